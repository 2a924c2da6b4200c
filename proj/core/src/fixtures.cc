#include "semlink/fixtures.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/linking_io.h"

namespace semlink {

namespace {

// Type vocabulary; '_' marks a phrase that articles spell with a space.
const std::vector<std::string> kTypeWords = {
    "lawyer",    "politician", "footballer", "singer",   "actor",
    "carmaker",  "university", "airport",    "physicist", "novelist",
    "painter",   "band",       "river",      "city",     "zoologist",
    "rugby_league",
};

// Articles about zoologists use this rarer word, which has no vector.
constexpr const char *kRareWord = "conchologist";
constexpr const char *kRareTarget = "zoologist";

std::string surface_form(const std::string &word) {
  std::string out = word;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string neighbor_word(const std::string &type, std::size_t j) {
  std::string base;
  for (char c : type) {
    if (c != '_') base.push_back(c);
  }
  return base + "ctx" + std::to_string(j);
}

bool disjoint(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.empty();
}

std::string pad(std::size_t i, std::size_t width) {
  std::string s = std::to_string(i);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

class Generator {
 public:
  Generator(std::uint64_t seed, const FixtureSizes &sizes, const FixtureSignal &signal)
      : rng_(seed), sizes_(sizes), signal_(signal) {}

  SyntheticData run();

 private:
  std::vector<float> gaussian(std::size_t begin, std::size_t end, double scale) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<float> v(sizes_.dim, 0.0f);
    const double sd = scale / std::sqrt(static_cast<double>(std::max<std::size_t>(1, end - begin)));
    for (std::size_t d = begin; d < end; ++d) v[d] = static_cast<float>(sd * normal(rng_));
    return v;
  }

  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::vector<LinkingDocument> mentions(const std::string &prefix, std::size_t count);

  std::mt19937_64 rng_;
  FixtureSizes sizes_;
  FixtureSignal signal_;
  SyntheticData data_;
  std::vector<std::string> entity_names_;
  std::vector<std::vector<std::size_t>> entity_types_;
  std::vector<std::string> fillers_;
  static constexpr std::size_t kNeighbors = 4;
};

std::vector<LinkingDocument> Generator::mentions(const std::string &prefix,
                                                 std::size_t count) {
  std::vector<LinkingDocument> docs;
  const std::size_t per_doc = std::max<std::size_t>(1, sizes_.mentions_per_doc);
  std::bernoulli_distribution from_type(signal_.context_type_rate);
  for (std::size_t made = 0; made < count;) {
    LinkingDocument doc;
    doc.doc_id = prefix + pad(docs.size(), 4);
    for (std::size_t k = 0; k < per_doc && made < count; ++k, ++made) {
      const std::size_t gold = uniform(entity_names_.size());
      Mention mention;
      mention.surface = entity_names_[gold];
      mention.gold = entity_names_[gold];
      mention.candidates.push_back(entity_names_[gold]);
      // Negatives share no type with the gold entity when enough such
      // entities exist; otherwise any different type set will do.
      std::vector<std::size_t> pool, fallback;
      for (std::size_t e = 0; e < entity_names_.size(); ++e) {
        if (entity_types_[e] == entity_types_[gold]) continue;
        (disjoint(entity_types_[e], entity_types_[gold]) ? pool : fallback).push_back(e);
      }
      std::shuffle(pool.begin(), pool.end(), rng_);
      std::shuffle(fallback.begin(), fallback.end(), rng_);
      pool.insert(pool.end(), fallback.begin(), fallback.end());
      for (std::size_t c = 0; c + 1 < sizes_.candidates && c < pool.size(); ++c) {
        mention.candidates.push_back(entity_names_[pool[c]]);
      }
      std::shuffle(mention.candidates.begin(), mention.candidates.end(), rng_);
      for (std::size_t t = 0; t < signal_.context_tokens; ++t) {
        if (from_type(rng_)) {
          const auto &types = entity_types_[gold];
          const std::string &type = kTypeWords[types[uniform(types.size())]];
          mention.context.push_back(neighbor_word(type, uniform(kNeighbors)));
        } else {
          mention.context.push_back(fillers_[uniform(fillers_.size())]);
        }
      }
      doc.mentions.push_back(std::move(mention));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

SyntheticData Generator::run() {
  const std::size_t dim = sizes_.dim;
  if (dim < 2) throw ConfigError("fixture dimension must be at least 2");
  const std::size_t semantic_dims = dim / 2;
  data_.words = EmbeddingTable(dim);
  data_.wikitext = EmbeddingTable(dim);

  std::vector<std::vector<float>> type_vectors;
  for (const auto &type : kTypeWords) {
    type_vectors.push_back(gaussian(0, semantic_dims, 1.0));
    data_.words.add(type, type_vectors.back());
    for (std::size_t j = 0; j < kNeighbors; ++j) {
      auto noise = gaussian(0, dim, signal_.neighbor_noise);
      std::vector<float> v(dim);
      for (std::size_t d = 0; d < dim; ++d) v[d] = type_vectors.back()[d] + noise[d];
      data_.words.add(neighbor_word(type, j), v);
    }
  }
  for (std::size_t f = 0; f < sizes_.fillers; ++f) {
    fillers_.push_back("filler" + pad(f, 3));
    data_.words.add(fillers_.back(), gaussian(0, dim, signal_.filler_scale));
  }

  // Seeds are the first half of the type vocabulary, extensions the rest.
  const std::size_t half = kTypeWords.size() / 2;
  for (std::size_t t = 0; t < kTypeWords.size(); ++t) {
    std::string &out = t < half ? data_.seeds_text : data_.extensions_text;
    out += surface_form(kTypeWords[t]) + "\n";
  }
  data_.extensions_text += std::string(kRareWord) + "\n";
  data_.remap_text = std::string(kRareWord) + "\t" + kRareTarget + "\n" +
                     "rugby league\trugby_league\n";

  const std::size_t width = std::max<std::size_t>(3, std::to_string(sizes_.entities).size());
  std::uniform_int_distribution<std::size_t> type_count(
      signal_.min_types, std::max(signal_.min_types, signal_.max_types));
  for (std::size_t e = 0; e < sizes_.entities; ++e) {
    const std::string name = "E" + pad(e, width);
    std::vector<std::size_t> types(kTypeWords.size());
    for (std::size_t t = 0; t < types.size(); ++t) types[t] = t;
    std::shuffle(types.begin(), types.end(), rng_);
    types.resize(std::min(types.size(), type_count(rng_)));
    std::sort(types.begin(), types.end());

    std::vector<double> mean(dim, 0.0);
    for (std::size_t t : types) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += type_vectors[t][d];
    }
    const auto jitter = gaussian(0, semantic_dims, signal_.type_jitter);
    const auto unique = gaussian(semantic_dims, dim, 1.0);
    std::vector<float> v(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = static_cast<float>(signal_.type_weight * (mean[d] / types.size() + jitter[d]) +
                                signal_.entity_noise * unique[d]);
    }
    data_.wikitext.add(name, v);

    std::string first = name + " is a";
    std::vector<std::string> planted;
    for (std::size_t i = 0; i < types.size(); ++i) {
      std::string word = kTypeWords[types[i]];
      planted.push_back(word);
      if (word == kRareTarget && uniform(2) == 0) word = kRareWord;
      first += (i == 0 ? " " : " and ") + surface_form(word);
    }
    first += ".";
    std::string body = "It is known for";
    for (std::size_t i = 0; i < 6; ++i) body += " " + fillers_[uniform(fillers_.size())];
    body += ".";
    data_.articles.push_back({name, name, first, body});
    data_.planted_types[name] = planted;
    entity_names_.push_back(name);
    entity_types_.push_back(std::move(types));
  }

  if (!entity_names_.empty()) {
    data_.train = mentions("train", sizes_.train_mentions);
    data_.dev = mentions("dev", sizes_.dev_mentions);
  }

  // Probe pairs: identical type sets versus disjoint type sets.
  std::vector<ProbePair> same, different;
  for (std::size_t a = 0; a < entity_names_.size(); ++a) {
    for (std::size_t b = a + 1; b < entity_names_.size(); ++b) {
      const auto &ta = entity_types_[a];
      const auto &tb = entity_types_[b];
      if (ta == tb) {
        same.push_back({entity_names_[a], entity_names_[b], true});
        continue;
      }
      if (disjoint(ta, tb)) different.push_back({entity_names_[a], entity_names_[b], false});
    }
  }
  std::shuffle(different.begin(), different.end(), rng_);
  same.resize(std::min(same.size(), sizes_.probes));
  different.resize(std::min(different.size(), sizes_.probes));
  data_.probes = std::move(same);
  data_.probes.insert(data_.probes.end(), different.begin(), different.end());
  return std::move(data_);
}

}  // namespace

FixtureSizes FixtureSizes::zero(std::size_t dim) {
  FixtureSizes sizes;
  sizes.entities = sizes.train_mentions = sizes.dev_mentions = 0;
  sizes.fillers = sizes.probes = 0;
  sizes.dim = dim;
  return sizes;
}

SyntheticData generate_fixtures(std::uint64_t seed, const FixtureSizes &sizes,
                                const FixtureSignal &signal) {
  return Generator(seed, sizes, signal).run();
}

FixturePaths fixture_paths(const std::string &dir) {
  const std::string base = dir.empty() || dir.back() == '/' ? dir : dir + "/";
  return {base + "words.bin",      base + "wikitext.bin", base + "corpus.tsv",
          base + "seeds.txt",      base + "extensions.txt", base + "remap.tsv",
          base + "train.jsonl",    base + "dev.jsonl",     base + "probes.tsv"};
}

FixturePaths write_fixtures(const SyntheticData &data, const std::string &dir) {
  const FixturePaths paths = fixture_paths(dir);
  save_binary(data.words, paths.words);
  save_binary(data.wikitext, paths.wikitext);
  std::string corpus;
  for (const auto &article : data.articles) corpus += format_article_line(article) + "\n";
  write_file(paths.corpus, corpus);
  write_file(paths.seeds, data.seeds_text);
  write_file(paths.extensions, data.extensions_text);
  write_file(paths.remap, data.remap_text);
  write_file(paths.train, serialize_linking_jsonl(data.train));
  write_file(paths.dev, serialize_linking_jsonl(data.dev));
  write_file(paths.probes, serialize_probes(data.probes));
  return paths;
}

FixturePaths make_fixtures(const std::string &dir, std::uint64_t seed,
                           const FixtureSizes &sizes, const FixtureSignal &signal) {
  return write_fixtures(generate_fixtures(seed, sizes, signal), dir);
}

std::vector<std::string> validate_linking_docs(const std::vector<LinkingDocument> &docs) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto &doc : docs) {
    if (!ids.insert(doc.doc_id).second) problems.push_back("duplicate doc id " + doc.doc_id);
    for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
      const auto &m = doc.mentions[i];
      const std::string where = doc.doc_id + "#" + std::to_string(i);
      if (m.candidates.empty()) problems.push_back(where + ": no candidates");
      if (m.gold && std::find(m.candidates.begin(), m.candidates.end(), *m.gold) ==
                        m.candidates.end()) {
        problems.push_back(where + ": gold '" + *m.gold + "' not among candidates");
      }
    }
  }
  return problems;
}

}  // namespace semlink
