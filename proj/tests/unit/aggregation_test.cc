#include <doctest.h>

#include <bit>
#include <cmath>

#include "semlink/aggregation.h"
#include "semlink/errors.h"
#include "semlink/similarity.h"
#include "test_support.h"

using namespace semlink;
using semlink::testing::random_table;
using semlink::testing::random_vector;

namespace {

bool bit_equal(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
  }
  return true;
}

// Mean in long double, summed back to front.
std::vector<long double> reference_mean(const EmbeddingTable &words,
                                        const std::vector<std::string> &used) {
  std::vector<long double> acc(words.dim(), 0.0L);
  for (auto it = used.rbegin(); it != used.rend(); ++it) {
    const auto v = words.lookup(*it)->values;
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += v[d];
  }
  for (auto &x : acc) x /= static_cast<long double>(used.size());
  return acc;
}

EntityTypeAssignment assignment(const std::string &id, std::vector<std::string> words) {
  return {id, std::move(words)};
}

}  // namespace

TEST_CASE("semantic embedding hand values") {
  EmbeddingTable words(2);
  words.add("a", std::vector<float>{2, 0});
  words.add("b", std::vector<float>{0, 2});
  const auto single = semantic_embedding(assignment("e", {"a"}), words, {11, 0.2});
  CHECK(single.vector == std::vector<float>{2, 0});
  const auto both = semantic_embedding(assignment("e", {"a", "b"}), words, {2, 0.2});
  CHECK(both.vector == std::vector<float>{1, 1});
  CHECK(both.used_words == std::vector<std::string>{"a", "b"});
  const auto none = semantic_embedding(assignment("e", {}), words, {2, 0.2});
  CHECK(none.uncovered);
  CHECK(none.vector == std::vector<float>{0, 0});
  CHECK_THROWS_AS(semantic_embedding(assignment("e", {"zz"}), words, {2, 0.2}),
                  MissingWordVectorError);
}

TEST_CASE("semantic embedding uses the first T words") {
  std::mt19937_64 rng(301);
  const auto words = random_table(rng, 7, 300, "w");
  const auto a = assignment("e", words.labels());
  const auto got = semantic_embedding(a, words, {6, 0.2});
  const std::vector<std::string> first6(words.labels().begin(), words.labels().begin() + 6);
  CHECK(got.used_words == first6);
  const auto want = reference_mean(words, first6);
  for (std::size_t d = 0; d < want.size(); ++d) {
    CHECK(std::fabs(got.vector[d] - static_cast<double>(want[d])) <= 1e-7);
  }
}

TEST_CASE("mean is invariant to permutations of the used prefix") {
  std::mt19937_64 rng(17);
  const auto words = random_table(rng, 11, 32, "w");
  auto labels = words.labels();
  const auto base = semantic_embedding(assignment("e", labels), words, {11, 0.2}).vector;
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto perm = semantic_embedding(assignment("e", labels), words, {11, 0.2}).vector;
    for (std::size_t d = 0; d < base.size(); ++d) CHECK(std::fabs(perm[d] - base[d]) <= 1e-7);
  }
}

TEST_CASE("aggregate endpoints are exact and the midpoint matches hand arithmetic") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_vector(rng, 17);
    const auto s = random_vector(rng, 17);
    CHECK(bit_equal(aggregate(w, s, 0.0), w));
    CHECK(bit_equal(aggregate(w, s, 1.0), s));
  }
  const std::vector<float> w{1, 0}, s{0, 1};
  const auto mid = aggregate(w, s, 0.2);
  CHECK(mid[0] == 0.8f);
  CHECK(mid[1] == 0.2f);
  CHECK_THROWS_AS(aggregate(w, std::vector<float>{1, 2, 3}, 0.2), DimensionError);
}

TEST_CASE("aggregate is affine in alpha and obeys the norm bound") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_vector(rng, 12);
    const auto v = random_vector(rng, 12);
    const double a = unit(rng), b = unit(rng), l = unit(rng);
    const auto mixed = aggregate(u, v, l * a + (1 - l) * b);
    const auto ea = aggregate(u, v, a);
    const auto eb = aggregate(u, v, b);
    for (std::size_t d = 0; d < u.size(); ++d) {
      CHECK(std::fabs(mixed[d] - (l * ea[d] + (1 - l) * eb[d])) <= 1e-6);
    }
    CHECK(l2_norm(ea) <= (1 - a) * l2_norm(u) + a * l2_norm(v) + 1e-6);
  }
}

TEST_CASE("shared semantic vectors pull entities together") {
  std::mt19937_64 rng(8);
  const auto wi = random_vector(rng, 20);
  const auto wj = random_vector(rng, 20);
  const auto s = random_vector(rng, 20);
  CHECK(cosine(aggregate(wi, s, 1.0), aggregate(wj, s, 1.0)) == 1.0);
  CHECK(cosine(aggregate(wi, s, 0.0), aggregate(wj, s, 0.0)) == cosine(wi, wj));
  double previous = l2_distance(wi, wj) + 1;
  for (double alpha : {0.0, 0.1, 0.2, 0.5, 0.9}) {
    const double dist = l2_distance(aggregate(wi, s, alpha), aggregate(wj, s, alpha));
    CHECK(std::fabs(dist - (1 - alpha) * l2_distance(wi, wj)) <= 1e-6);
    CHECK(dist < previous);
    previous = dist;
  }
}

TEST_CASE("table aggregation equals row-wise composition") {
  std::mt19937_64 rng(100);
  const auto words = random_table(rng, 40, 24, "w");
  const auto wikitext = random_table(rng, 100, 24, "E");
  AssignmentMap assignments;
  for (std::size_t e = 0; e < wikitext.size(); ++e) {
    if (e % 10 == 0) continue;  // uncovered
    std::vector<std::string> types;
    for (std::size_t k = 0; k < 1 + e % 14; ++k) types.push_back(words.label((e * 7 + k * 3) % 40));
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    assignments[wikitext.label(e)] = assignment(wikitext.label(e), types);
  }
  const AggregationConfig config{11, 0.2};
  AggregationStats stats;
  const auto table = aggregate_table(wikitext, assignments, words, config, 3, &stats);
  CHECK(stats.entities == 100);
  CHECK(stats.covered == 90);
  CHECK(table.labels() == wikitext.labels());
  for (std::size_t e = 0; e < wikitext.size(); ++e) {
    auto it = assignments.find(wikitext.label(e));
    if (it == assignments.end()) {
      CHECK(bit_equal(table.row(e), wikitext.row(e)));
      continue;
    }
    const auto s = semantic_embedding(it->second, words, config).vector;
    CHECK(bit_equal(table.row(e), aggregate(wikitext.row(e), s, 0.2)));
  }
  CHECK(aggregate_table(wikitext, assignments, words, {11, 0.0}) == wikitext);
  CHECK(aggregate_table(wikitext, assignments, words, config, 1) == table);
  const auto semantic = semantic_table(assignments, words, config);
  CHECK(semantic.size() == 90);
  CHECK(reinforce_with_semantic(wikitext, semantic, 0.2) == table);
}

TEST_CASE("aggregation config is validated") {
  CHECK_THROWS_AS((AggregationConfig{0, 0.2}.validate()), ValueError);
  CHECK_THROWS_AS((AggregationConfig{11, 1.5}.validate()), ValueError);
  CHECK_THROWS_AS((AggregationConfig{11, -0.1}.validate()), ValueError);
  CHECK_NOTHROW((AggregationConfig{1, 1.0}.validate()));
}

TEST_CASE("neighbour report") {
  EmbeddingTable t(2);
  t.add("a", std::vector<float>{1, 0});
  t.add("b", std::vector<float>{0, 1});
  t.add("a2", std::vector<float>{1, 0});
  const auto got = neighbor_report(t, "a", 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].label == "a2");
  CHECK(got[0].score == doctest::Approx(1.0));
  CHECK(neighbor_report(t, "a", 10).size() == 2);
  CHECK_THROWS_AS(neighbor_report(t, "zz", 3), MissingLabelError);

  std::mt19937_64 rng(4);
  const auto big = random_table(rng, 200, 10);
  const auto q = big.lookup("r17")->values;
  std::vector<std::pair<double, std::string>> scan;
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (big.label(i) != "r17") scan.emplace_back(-cosine(q, big.row(i)), big.label(i));
  }
  std::sort(scan.begin(), scan.end());
  const auto top = neighbor_report(big, "r17", 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(top[k].label == scan[k].second);
}

TEST_CASE("homogeneity statistics") {
  EmbeddingTable same(3);
  for (int i = 0; i < 5; ++i) same.add("s" + std::to_string(i), std::vector<float>{0.3f, -1, 2});
  const auto h = homogeneity_stats(same, 100, 1);
  CHECK(h.mean == doctest::Approx(1.0));
  CHECK(h.stddev == 0.0);
  CHECK(h.pairs == 10);

  EmbeddingTable ortho(2);
  ortho.add("x", std::vector<float>{1, 0});
  ortho.add("y", std::vector<float>{0, 1});
  CHECK(homogeneity_stats(ortho, 5, 1).mean == 0.0);

  std::mt19937_64 rng(50);
  const auto t = random_table(rng, 50, 8);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double c = cosine(t.row(i), t.row(j));
      sum += c;
      sq += c * c;
      ++n;
    }
  }
  const double mean = sum / n;
  const auto full = homogeneity_stats(t, 5000, 9);
  CHECK(full.pairs == n);
  CHECK(full.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(full.stddev == doctest::Approx(std::sqrt(sq / n - mean * mean)).epsilon(1e-9));
  const auto sampled = homogeneity_stats(t, 300, 9);
  CHECK(sampled.pairs == 300);
  CHECK(homogeneity_stats(t, 300, 9).mean == sampled.mean);
}
