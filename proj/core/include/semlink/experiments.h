#ifndef SEMLINK_EXPERIMENTS_H_
#define SEMLINK_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/embedding_table.h"
#include "semlink/linking.h"

namespace semlink {

struct ConvergenceRun {
  std::string table;  // "baseline" or "reinforced"
  std::uint64_t seed = 0;
  std::vector<double> dev_f1;
  std::vector<double> loss;
  std::optional<std::size_t> epochs_to_threshold;  // 1-based; empty if censored
};

struct ConvergenceSide {
  std::vector<ConvergenceRun> runs;
  // Censored runs count as max_epochs + 1.
  double mean_epochs = 0.0;
  std::size_t censored = 0;
};

struct ConvergenceReport {
  double threshold = 0.95;
  std::size_t max_epochs = 0;
  ConvergenceSide baseline;
  ConvergenceSide reinforced;
};

struct ConvergenceConfig {
  TrainConfig train;  // train.epochs is the epoch budget per run
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double threshold = 0.95;
  std::size_t workers = 1;
};

// Trains one linker per (embedding table, seed) and records how many epochs
// each needs to reach the dev-F1 threshold. Both tables must share labels
// and dimension. Propagates EmptyTrainingError.
ConvergenceReport convergence_experiment(
    std::span<const LinkingDocument> train_docs,
    std::span<const LinkingDocument> dev_docs, const EmbeddingTable &words,
    const EmbeddingTable &baseline, const EmbeddingTable &reinforced,
    const ConvergenceConfig &config);

struct ProbePair {
  std::string first;
  std::string second;
  bool same_type = false;
};

struct GeometryRow {
  ProbePair pair;
  double cosine_baseline = 0.0;
  double cosine_reinforced = 0.0;
  double delta = 0.0;  // reinforced - baseline
};

struct GeometryReport {
  std::vector<GeometryRow> rows;
  double mean_delta_same = 0.0;
  double mean_delta_different = 0.0;
  std::size_t same_pairs = 0;
  std::size_t different_pairs = 0;
};

// Cosine of every probe pair under both tables. Throws MissingLabelError.
GeometryReport geometry_report(const EmbeddingTable &baseline,
                               const EmbeddingTable &reinforced,
                               std::span<const ProbePair> probes);

// "<a>\t<b>\t<same|different>" per line.
std::vector<ProbePair> parse_probes(std::string_view text);
std::string serialize_probes(std::span<const ProbePair> probes);

std::string convergence_to_json(const ConvergenceReport &report);
std::string convergence_to_tsv(const ConvergenceReport &report);
std::string geometry_to_json(const GeometryReport &report);
std::string geometry_to_tsv(const GeometryReport &report);

}  // namespace semlink

#endif  // SEMLINK_EXPERIMENTS_H_
