#ifndef SEMLINK_AGGREGATION_H_
#define SEMLINK_AGGREGATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "semlink/embedding_table.h"
#include "semlink/similarity.h"
#include "semlink/type_extraction.h"

namespace semlink {

struct AggregationConfig {
  std::size_t max_words = 11;  // T: type words averaged per entity
  double alpha = 0.2;          // weight of the semantic embedding

  // Throws ValueError unless max_words >= 1 and 0 <= alpha <= 1.
  void validate() const;
};

struct SemanticEmbeddingResult {
  std::string entity_id;
  std::vector<std::string> used_words;  // prefix of the assignment's words
  std::vector<float> vector;
  bool uncovered = false;  // the entity has no type words
};

// Mean of the word vectors of the first min(T, |S_e|) type words, summed in
// extraction order in double precision. Uncovered entities get the zero
// vector. Throws MissingWordVectorError.
SemanticEmbeddingResult semantic_embedding(const EntityTypeAssignment &assignment,
                                           const EmbeddingTable &words,
                                           const AggregationConfig &config);

// (1 - alpha) * wikitext + alpha * semantic, evaluated in double and rounded
// once. alpha == 0 and alpha == 1 return the respective input bit-exactly.
std::vector<float> aggregate(std::span<const float> wikitext,
                             std::span<const float> semantic, double alpha);

struct AggregationStats {
  std::size_t entities = 0;
  std::size_t covered = 0;
  // Number of entities by count of type words used.
  std::map<std::size_t, std::size_t> words_used_histogram;
};

// Reinforces every row of `wikitext` that has a non-empty assignment; other
// rows are copied unchanged. Output rows keep the input label order.
EmbeddingTable aggregate_table(const EmbeddingTable &wikitext,
                               const AssignmentMap &assignments,
                               const EmbeddingTable &words,
                               const AggregationConfig &config,
                               std::size_t workers = 1,
                               AggregationStats *stats = nullptr);

// Semantic embeddings for every covered entity of `assignments`, in entity
// id order.
EmbeddingTable semantic_table(const AssignmentMap &assignments,
                              const EmbeddingTable &words,
                              const AggregationConfig &config);

// Reinforcement from a precomputed semantic table: rows of `wikitext` that
// have a semantic row are aggregated, others copied.
EmbeddingTable reinforce_with_semantic(const EmbeddingTable &wikitext,
                                       const EmbeddingTable &semantic,
                                       double alpha);

// Top-k rows by cosine to `query`'s vector, excluding the query.
// Throws MissingLabelError.
std::vector<Neighbor> neighbor_report(const EmbeddingTable &table,
                                      const std::string &query, std::size_t k);

struct HomogeneityStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over sampled pairs
  std::size_t pairs = 0;
};

// Mean and standard deviation of cosine over distinct row pairs. When
// `sample_pairs` covers all n(n-1)/2 pairs the scan is exhaustive; otherwise
// that many distinct pairs are drawn without replacement using `seed`.
HomogeneityStats homogeneity_stats(const EmbeddingTable &table,
                                   std::size_t sample_pairs,
                                   std::uint64_t seed);

}  // namespace semlink

#endif  // SEMLINK_AGGREGATION_H_
