#ifndef SEMLINK_LINKING_H_
#define SEMLINK_LINKING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semlink/embedding_table.h"
#include "semlink/metrics.h"

namespace semlink {

struct Mention {
  std::string surface;
  std::vector<std::string> context;  // lowercased window tokens
  std::vector<std::string> candidates;
  std::vector<double> priors;  // optional; unused by the scorer
  std::optional<std::string> gold;
};

struct LinkingDocument {
  std::string doc_id;
  std::vector<Mention> mentions;
};

enum class RelationWeighting {
  kUniform,  // 1/K for every relation
  kSoftmax,  // softmax over k of f_i^T R_k f_j
};

// Diagonal bilinear scorer. Diagonals are stored as vectors of length dim.
// When `relations` is non-empty the pairwise term is the K-relation form,
// otherwise the single-matrix form with its 1/(n-1) factor.
struct LinkingModel {
  std::size_t dim = 0;
  std::vector<double> local;     // entity-context diagonal
  std::vector<double> pairwise;  // entity-entity diagonal
  std::vector<std::vector<double>> relations;
  RelationWeighting weighting = RelationWeighting::kUniform;

  // All diagonals set to one.
  static LinkingModel identity(std::size_t dim, std::size_t relation_count = 0);

  std::size_t relation_count() const { return relations.size(); }
  void validate() const;  // ValueError/DimensionError on bad shape or values
  bool operator==(const LinkingModel &) const = default;
};

struct ContextFeature {
  std::vector<double> values;
  std::size_t oov = 0;  // window tokens without a word vector
};

// Mean of the word vectors of in-vocabulary window tokens; zero if none.
ContextFeature context_feature(const Mention &mention,
                               const EmbeddingTable &words);

// sum_d entity[d] * weights[d] * feature[d]. Throws DimensionError.
double local_score(std::span<const double> entity,
                   std::span<const double> weights,
                   std::span<const double> feature);

// (1/(n-1)) sum_d a[d] * weights[d] * b[d]. Throws InvalidDocumentError
// when n < 2 and DimensionError on mismatch.
double pairwise_score(std::span<const double> a, std::span<const double> b,
                      std::span<const double> weights, std::size_t n);

// sum_k relation_weights[k] * sum_d a[d] * R_k[d] * b[d]. Throws
// RelationArityError unless |relation_weights| == K.
double relation_pairwise_score(std::span<const double> a,
                               std::span<const double> b,
                               const LinkingModel &model,
                               std::span<const double> relation_weights);

// Relation weights for a mention pair under the model's weighting scheme.
std::vector<double> relation_weights(const LinkingModel &model,
                                     std::span<const double> feature_i,
                                     std::span<const double> feature_j);

// A mention resolved against the embedding tables. Candidates are
// deduplicated, restricted to entities with vectors and sorted by label.
struct PreparedMention {
  std::size_t source_index = 0;  // position in LinkingDocument::mentions
  std::vector<double> feature;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> vectors;
  std::optional<std::size_t> gold;  // index into labels
  bool gold_missing = false;        // gold given but not among candidates
};

// Only mentions with at least one resolvable candidate are kept.
struct PreparedDocument {
  std::string doc_id;
  std::vector<PreparedMention> mentions;
  std::size_t source_mentions = 0;
  std::size_t dropped_candidates = 0;
  // In-KB mentions left without any resolvable candidate, by source index.
  std::vector<std::pair<std::size_t, std::string>> unscorable_gold;
};

PreparedDocument prepare_document(const LinkingDocument &doc,
                                  const EmbeddingTable &entities,
                                  const EmbeddingTable &words);
std::vector<PreparedDocument> prepare_documents(
    std::span<const LinkingDocument> docs, const EmbeddingTable &entities,
    const EmbeddingTable &words);

// Chosen candidate index per prepared mention.
using Assignment = std::vector<std::size_t>;

// Sum of local scores plus pairwise scores over unordered mention pairs.
double document_score(const PreparedDocument &doc, const LinkingModel &model,
                      const Assignment &assignment);

// Same, with the choice given as entity labels per prepared mention.
double document_score(const PreparedDocument &doc, const LinkingModel &model,
                      std::span<const std::string> labels);

enum class InferenceStrategy { kExhaustive, kGreedyLocal };

inline constexpr std::uint64_t kMaxExhaustiveAssignments = 1'000'000;

// Exhaustive search returns the document_score argmax; among equal scores
// the lexicographically smallest label sequence wins. Greedy-local takes each
// mention's best local score. Throws CapacityError when the candidate product
// exceeds kMaxExhaustiveAssignments.
Assignment infer(const PreparedDocument &doc, const LinkingModel &model,
                 InferenceStrategy strategy);

// Predictions for every mention with a gold label (in-KB mentions).
void collect_predictions(const PreparedDocument &doc,
                         const Assignment &assignment, PredictionSet &out);
// Gold labels of every in-KB mention of the raw documents.
GoldSet collect_gold(std::span<const LinkingDocument> docs);
GoldSet collect_gold(std::span<const PreparedDocument> docs);

struct TrainConfig {
  double margin = 0.1;
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  bool train_pairwise = false;  // also learn the entity-entity diagonals
  InferenceStrategy dev_strategy = InferenceStrategy::kGreedyLocal;
};

struct TrainTrace {
  double initial_loss = 0.0;
  std::vector<double> loss;    // full training loss after each epoch
  std::vector<double> dev_f1;  // micro F1 on the dev set after each epoch
};

struct TrainResult {
  LinkingModel model;
  TrainTrace trace;
  std::size_t training_mentions = 0;
  std::size_t skipped_mentions = 0;  // gold absent from candidates
};

// Hinge loss of one mention and its gradient with respect to the model.
// With train_pairwise the mention's score also includes pairwise terms
// against the gold entities of the other mentions.
struct MarginGradient {
  double loss = 0.0;
  std::vector<double> local;
  std::vector<double> pairwise;
  std::vector<std::vector<double>> relations;
};

MarginGradient margin_loss_gradient(const PreparedDocument &doc,
                                    std::size_t mention,
                                    const LinkingModel &model,
                                    const TrainConfig &config);

// Total hinge loss over every trainable mention.
double training_loss(std::span<const PreparedDocument> docs,
                     const LinkingModel &model, const TrainConfig &config);

// SGD on the max-margin loss, mentions shuffled each epoch with `seed`.
// Throws EmptyTrainingError if no mention has its gold among candidates.
TrainResult train(std::span<const PreparedDocument> train_docs,
                  std::span<const PreparedDocument> dev_docs,
                  const LinkingModel &initial, const TrainConfig &config);

// Micro F1 of `model` on prepared documents.
EvalReport evaluate(std::span<const PreparedDocument> docs,
                    const LinkingModel &model, InferenceStrategy strategy);

}  // namespace semlink

#endif  // SEMLINK_LINKING_H_
