#include "semlink/aggregation.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <unordered_set>

#include "semlink/errors.h"

namespace semlink {

void AggregationConfig::validate() const {
  if (max_words < 1) throw ValueError("T must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValueError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

SemanticEmbeddingResult semantic_embedding(const EntityTypeAssignment &assignment,
                                           const EmbeddingTable &words,
                                           const AggregationConfig &config) {
  config.validate();
  SemanticEmbeddingResult result;
  result.entity_id = assignment.entity_id;
  const std::size_t used =
      std::min(config.max_words, assignment.type_words.size());
  std::vector<double> sum(words.dim(), 0.0);
  for (std::size_t i = 0; i < used; ++i) {
    const std::string &word = assignment.type_words[i];
    auto vec = words.lookup(word);
    if (!vec) {
      throw MissingWordVectorError("type word '" + word + "' of entity '" +
                                   assignment.entity_id + "' has no vector");
    }
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += vec->values[d];
    result.used_words.push_back(word);
  }
  result.vector.assign(words.dim(), 0.0f);
  result.uncovered = used == 0;
  if (used > 0) {
    for (std::size_t d = 0; d < sum.size(); ++d) {
      result.vector[d] = static_cast<float>(sum[d] / static_cast<double>(used));
    }
  }
  return result;
}

std::vector<float> aggregate(std::span<const float> wikitext,
                             std::span<const float> semantic, double alpha) {
  if (wikitext.size() != semantic.size()) {
    throw DimensionError("cannot aggregate vectors of dimension " +
                         std::to_string(wikitext.size()) + " and " +
                         std::to_string(semantic.size()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValueError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (alpha == 0.0) return {wikitext.begin(), wikitext.end()};
  if (alpha == 1.0) return {semantic.begin(), semantic.end()};
  std::vector<float> out(wikitext.size());
  const double keep = 1.0 - alpha;
  for (std::size_t d = 0; d < out.size(); ++d) {
    out[d] = static_cast<float>(keep * wikitext[d] + alpha * semantic[d]);
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn &&fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace

EmbeddingTable aggregate_table(const EmbeddingTable &wikitext,
                               const AssignmentMap &assignments,
                               const EmbeddingTable &words,
                               const AggregationConfig &config,
                               std::size_t workers, AggregationStats *stats) {
  config.validate();
  if (!assignments.empty() && words.dim() != wikitext.dim()) {
    throw DimensionError("word table dim " + std::to_string(words.dim()) +
                         " differs from entity table dim " +
                         std::to_string(wikitext.dim()));
  }
  const std::size_t n = wikitext.size();
  std::vector<std::vector<float>> rows(n);
  std::vector<std::size_t> used(n, 0);
  std::vector<std::exception_ptr> errors(n);
  parallel_for(n, workers, [&](std::size_t r) {
    auto it = assignments.find(wikitext.label(r));
    if (it == assignments.end() || it->second.type_words.empty()) return;
    try {
      auto semantic = semantic_embedding(it->second, words, config);
      used[r] = semantic.used_words.size();
      rows[r] = aggregate(wikitext.row(r), semantic.vector, config.alpha);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  });
  for (const auto &error : errors) {
    if (error) std::rethrow_exception(error);
  }

  EmbeddingTable out(wikitext.dim());
  out.reserve(n);
  AggregationStats local;
  local.entities = n;
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].empty()) {
      out.add(wikitext.label(r), wikitext.row(r));
    } else {
      out.add(wikitext.label(r), rows[r]);
      ++local.covered;
    }
    ++local.words_used_histogram[used[r]];
  }
  if (stats) *stats = std::move(local);
  return out;
}

EmbeddingTable semantic_table(const AssignmentMap &assignments,
                              const EmbeddingTable &words,
                              const AggregationConfig &config) {
  EmbeddingTable out(words.dim());
  for (const auto &[id, assignment] : assignments) {
    if (assignment.type_words.empty()) continue;
    out.add(id, semantic_embedding(assignment, words, config).vector);
  }
  return out;
}

EmbeddingTable reinforce_with_semantic(const EmbeddingTable &wikitext,
                                       const EmbeddingTable &semantic,
                                       double alpha) {
  if (!semantic.empty() && semantic.dim() != wikitext.dim()) {
    throw DimensionError("semantic table dim differs from entity table dim");
  }
  EmbeddingTable out(wikitext.dim());
  out.reserve(wikitext.size());
  for (std::size_t r = 0; r < wikitext.size(); ++r) {
    auto s = semantic.lookup(wikitext.label(r));
    if (s) {
      out.add(wikitext.label(r), aggregate(wikitext.row(r), s->values, alpha));
    } else {
      out.add(wikitext.label(r), wikitext.row(r));
    }
  }
  return out;
}

std::vector<Neighbor> neighbor_report(const EmbeddingTable &table,
                                      const std::string &query, std::size_t k) {
  auto vec = table.lookup(query);
  if (!vec) throw MissingLabelError("label '" + query + "' not in table");
  return top_k_cosine(table, vec->values, k,
                      [&](std::string_view label) { return label != query; });
}

HomogeneityStats homogeneity_stats(const EmbeddingTable &table,
                                   std::size_t sample_pairs,
                                   std::uint64_t seed) {
  const std::size_t n = table.size();
  if (n < 2) throw ValueError("homogeneity needs at least two rows");
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (sample_pairs >= total) {
    pairs.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    // Floyd's sampling of distinct pair indices, then decode index -> (i, j).
    std::mt19937_64 rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> order;
    for (std::uint64_t j = total - sample_pairs; j < total; ++j) {
      std::uniform_int_distribution<std::uint64_t> pick(0, j);
      std::uint64_t t = pick(rng);
      if (!chosen.insert(t).second) {
        chosen.insert(j);
        t = j;
      }
      order.push_back(t);
    }
    for (std::uint64_t index : order) {
      // Row i owns pairs [i*n - i(i+1)/2, (i+1)*n - (i+1)(i+2)/2).
      std::size_t i = 0;
      std::uint64_t start = 0;
      while (start + (n - 1 - i) <= index) {
        start += n - 1 - i;
        ++i;
      }
      pairs.emplace_back(i, i + 1 + static_cast<std::size_t>(index - start));
    }
  }

  std::vector<double> cosines;
  cosines.reserve(pairs.size());
  double sum = 0.0;
  for (const auto &[i, j] : pairs) {
    cosines.push_back(cosine(table.row(i), table.row(j)));
    sum += cosines.back();
  }
  HomogeneityStats stats;
  stats.pairs = pairs.size();
  stats.mean = sum / static_cast<double>(pairs.size());
  double squares = 0.0;
  for (double c : cosines) squares += (c - stats.mean) * (c - stats.mean);
  stats.stddev = std::sqrt(squares / static_cast<double>(pairs.size()));
  return stats;
}

}  // namespace semlink
