#ifndef SEMLINK_FIXTURES_H_
#define SEMLINK_FIXTURES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semlink/corpus.h"
#include "semlink/embedding_table.h"
#include "semlink/experiments.h"
#include "semlink/linking.h"

namespace semlink {

struct FixtureSizes {
  std::size_t entities = 60;
  std::size_t train_mentions = 320;
  std::size_t dev_mentions = 160;
  std::size_t mentions_per_doc = 4;
  std::size_t candidates = 4;
  std::size_t dim = 32;
  std::size_t fillers = 120;
  std::size_t probes = 40;  // per class

  // Every count zero, dimension kept.
  static FixtureSizes zero(std::size_t dim = 32);
};

// Strength of the planted signals. Type words live in the first half of the
// dimensions and entity-unique noise in the second half; filler words span
// both, so an untrained scorer mixes noise into every comparison.
struct FixtureSignal {
  double type_weight = 0.45;   // weight of the type-word mean in entity vectors
  double type_jitter = 0.2;    // per-entity noise added to that mean
  double entity_noise = 1.5;   // weight of the entity-unique component
  double context_type_rate = 0.7;  // share of context tokens from type neighbourhoods
  double neighbor_noise = 0.3;
  double filler_scale = 1.0;
  std::size_t context_tokens = 10;
  std::size_t min_types = 2;
  std::size_t max_types = 3;
};

// Everything the pipeline and the experiments consume, held in memory.
struct SyntheticData {
  EmbeddingTable words;
  EmbeddingTable wikitext;
  std::vector<ArticleRecord> articles;
  std::string seeds_text;
  std::string extensions_text;
  std::string remap_text;
  std::vector<LinkingDocument> train;
  std::vector<LinkingDocument> dev;
  std::vector<ProbePair> probes;
  std::map<std::string, std::vector<std::string>> planted_types;
};

SyntheticData generate_fixtures(std::uint64_t seed, const FixtureSizes &sizes,
                                const FixtureSignal &signal = {});

struct FixturePaths {
  std::string words, wikitext, corpus, seeds, extensions, remap, train, dev, probes;
};

FixturePaths fixture_paths(const std::string &dir);
FixturePaths write_fixtures(const SyntheticData &data, const std::string &dir);

// generate_fixtures + write_fixtures.
FixturePaths make_fixtures(const std::string &dir, std::uint64_t seed,
                           const FixtureSizes &sizes,
                           const FixtureSignal &signal = {});

// Human-readable violations: mentions whose gold entity is not a candidate,
// empty candidate lists and duplicate document ids.
std::vector<std::string> validate_linking_docs(const std::vector<LinkingDocument> &docs);

}  // namespace semlink

#endif  // SEMLINK_FIXTURES_H_
