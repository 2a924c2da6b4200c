#ifndef SEMLINK_PIPELINE_H_
#define SEMLINK_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/errors.h"

namespace semlink {

// Flat key = value configuration. Relative paths are taken as given.
struct PipelineConfig {
  // Inputs.
  std::string words;       // word embeddings
  std::string wikitext;    // baseline entity embeddings
  std::string corpus;      // article corpus
  std::string dict_seeds;  // curated seed words
  std::string dict_extensions;
  std::string dict_remap;
  std::string link_train;  // linking corpora (JSONL or CoNLL-style TSV)
  std::string link_dev;
  std::string output_dir = "semlink_out";

  // Parameters.
  std::size_t max_words = 11;  // T
  double alpha = 0.2;
  std::size_t cap = 11;
  std::size_t window = 25;
  std::uint64_t frequency_threshold = 10;
  bool normalize_words = false;
  std::vector<std::uint64_t> train_seeds = {1, 2, 3, 4, 5};
  std::size_t epochs = 20;
  double learning_rate = 0.01;
  double margin = 0.1;
  std::size_t workers = 1;

  // Stage toggles.
  bool stage_dict = true;
  bool stage_types = true;
  bool stage_semantic = true;
  bool stage_aggregate = true;
  bool stage_link = false;

  // Applies one "key=value" assignment. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  // Throws ConfigError on bad parameters or referenced paths that do not exist.
  void validate() const;
};

PipelineConfig parse_pipeline_config(std::string_view text);
PipelineConfig load_pipeline_config(const std::string &path);

// Artifact locations under output_dir.
struct PipelineArtifacts {
  std::string nouns, dictionary, remap, types, semantic, reinforced, model,
      predictions, eval, manifest;
};
PipelineArtifacts pipeline_artifacts(const std::string &output_dir);

struct PipelineResult {
  std::vector<std::string> ran;
  std::vector<std::string> skipped;  // inputs and outputs unchanged
  PipelineArtifacts artifacts;
};

// A stage failed; `stage()` names it and error_class() is the cause's class.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error &cause)
      : Error("stage '" + stage + "' failed: " + cause.what(), cause.error_class()),
        stage_(std::move(stage)) {}
  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

// Runs the enabled stages in order dict -> types -> semantic -> aggregate ->
// link. Each stage records input/output SHA-256 hashes in the manifest and
// is skipped when they are unchanged. On failure the stage's outputs are
// renamed with a ".partial" suffix and StageError is thrown.
PipelineResult run_pipeline(const PipelineConfig &config);

}  // namespace semlink

#endif  // SEMLINK_PIPELINE_H_
