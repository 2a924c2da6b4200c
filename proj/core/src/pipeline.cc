#include "semlink/pipeline.h"

#include <charconv>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>

#include "semlink/aggregation.h"
#include "semlink/dictionary.h"
#include "semlink/embedding_table.h"
#include "semlink/file_util.h"
#include "semlink/linking.h"
#include "semlink/linking_io.h"
#include "semlink/metrics.h"
#include "semlink/text.h"
#include "semlink/type_extraction.h"

namespace semlink {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = to_lower(value);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError("bad boolean '" + std::string(value) + "' for " + std::string(key));
}

bool exists(const std::string &path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const std::map<std::string_view, std::string *> paths = {
      {"words", &words},           {"wikitext", &wikitext},
      {"corpus", &corpus},         {"dict_seeds", &dict_seeds},
      {"dict_extensions", &dict_extensions}, {"dict_remap", &dict_remap},
      {"link_train", &link_train}, {"link_dev", &link_dev},
      {"output_dir", &output_dir},
  };
  const std::map<std::string_view, bool *> toggles = {
      {"stage.dict", &stage_dict},           {"stage.types", &stage_types},
      {"stage.semantic", &stage_semantic},   {"stage.aggregate", &stage_aggregate},
      {"stage.link", &stage_link},           {"normalize_words", &normalize_words},
  };
  if (auto it = paths.find(key); it != paths.end()) {
    *it->second = std::string(value);
  } else if (auto t = toggles.find(key); t != toggles.end()) {
    *t->second = parse_bool(key, value);
  } else if (key == "T") {
    max_words = parse_number<std::size_t>(key, value);
  } else if (key == "alpha") {
    alpha = parse_number<double>(key, value);
  } else if (key == "cap") {
    cap = parse_number<std::size_t>(key, value);
  } else if (key == "window") {
    window = parse_number<std::size_t>(key, value);
  } else if (key == "frequency_threshold") {
    frequency_threshold = parse_number<std::uint64_t>(key, value);
  } else if (key == "train_seeds") {
    train_seeds.clear();
    for (auto part : split(value, ',')) {
      if (!trim(part).empty()) train_seeds.push_back(parse_number<std::uint64_t>(key, trim(part)));
    }
  } else if (key == "epochs") {
    epochs = parse_number<std::size_t>(key, value);
  } else if (key == "learning_rate") {
    learning_rate = parse_number<double>(key, value);
  } else if (key == "margin") {
    margin = parse_number<double>(key, value);
  } else if (key == "workers") {
    workers = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void PipelineConfig::validate() const {
  if (max_words < 1) throw ConfigError("T must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (cap < 1) throw ConfigError("cap must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  const std::vector<std::pair<const char *, const std::string *>> inputs = {
      {"words", &words},           {"wikitext", &wikitext},
      {"corpus", &corpus},         {"dict_seeds", &dict_seeds},
      {"dict_extensions", &dict_extensions}, {"dict_remap", &dict_remap},
      {"link_train", &link_train}, {"link_dev", &link_dev},
  };
  for (const auto &[name, path] : inputs) {
    if (!path->empty() && !exists(*path)) {
      throw ConfigError(std::string(name) + " path '" + *path + "' does not exist");
    }
  }
  auto require = [](bool enabled, const std::string &path, const char *stage,
                    const char *name) {
    if (enabled && path.empty()) {
      throw ConfigError(std::string("stage ") + stage + " requires '" + name + "'");
    }
  };
  require(stage_dict, corpus, "dict", "corpus");
  require(stage_dict, dict_seeds, "dict", "dict_seeds");
  require(stage_types, corpus, "types", "corpus");
  require(stage_semantic, words, "semantic", "words");
  require(stage_aggregate, wikitext, "aggregate", "wikitext");
  require(stage_link, link_train, "link", "link_train");
  require(stage_link, link_dev, "link", "link_dev");
  require(stage_link, words, "link", "words");
  if (stage_link && train_seeds.empty()) throw ConfigError("train_seeds is empty");
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  PipelineConfig config;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

PipelineConfig load_pipeline_config(const std::string &path) {
  return parse_pipeline_config(read_file(path));
}

PipelineArtifacts pipeline_artifacts(const std::string &output_dir) {
  const std::filesystem::path dir(output_dir);
  auto at = [&](const char *name) { return (dir / name).string(); };
  return {at("nouns.tsv"),       at("dictionary.txt"), at("remap.tsv"),
          at("types.tsv"),       at("semantic.bin"),   at("reinforced.bin"),
          at("model.txt"),       at("predictions.tsv"), at("eval.json"),
          at("manifest.json")};
}

namespace {

struct Stage {
  std::string name;
  std::vector<std::string> inputs;
  std::string params;
  std::vector<std::string> outputs;
  std::function<void()> run;
};

nlohmann::json hash_files(const std::vector<std::string> &paths) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto &path : paths) out[path] = file_sha256(path);
  return out;
}

bool up_to_date(const nlohmann::json &manifest, const Stage &stage,
                const nlohmann::json &input_hashes) {
  if (!manifest.contains(stage.name)) return false;
  const auto &entry = manifest[stage.name];
  if (entry.value("params", std::string()) != stage.params) return false;
  if (entry.value("inputs", nlohmann::json()) != input_hashes) return false;
  const auto outputs = entry.value("outputs", nlohmann::json::object());
  if (outputs.size() != stage.outputs.size()) return false;
  for (const auto &path : stage.outputs) {
    if (!outputs.contains(path) || !exists(path)) return false;
    if (outputs[path].get<std::string>() != file_sha256(path)) return false;
  }
  return true;
}

EmbeddingTable load_words(const PipelineConfig &config) {
  EmbeddingTable words = load_any(config.words);
  return config.normalize_words ? normalized(words) : words;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig &config) {
  config.validate();
  const PipelineArtifacts art = pipeline_artifacts(config.output_dir);
  std::filesystem::create_directories(config.output_dir);

  nlohmann::json manifest = nlohmann::json::object();
  if (exists(art.manifest)) {
    try {
      manifest = nlohmann::json::parse(read_file(art.manifest)).value(
          "stages", nlohmann::json::object());
    } catch (const nlohmann::json::exception &) {
      manifest = nlohmann::json::object();
    }
  }
  auto write_manifest = [&] {
    nlohmann::json doc;
    doc["stages"] = manifest;
    write_file(art.manifest, doc.dump(2) + "\n");
  };

  std::vector<Stage> stages;
  if (config.stage_dict) {
    Stage s{"dict", {config.corpus, config.dict_seeds}, {}, {art.nouns, art.dictionary, art.remap}, {}};
    for (const auto *p : {&config.dict_extensions, &config.dict_remap, &config.words}) {
      if (!p->empty()) s.inputs.push_back(*p);
    }
    s.params = "frequency_threshold=" + std::to_string(config.frequency_threshold);
    s.run = [&config, art] {
      CorpusReader reader(config.corpus);
      const NounFrequencyReport nouns = mine_noun_frequency(reader, heuristic_noun_tagger());
      write_file(art.nouns, serialize_noun_report(nouns));
      std::optional<EmbeddingTable> words;
      if (!config.words.empty()) words = load_words(config);
      DictionaryBuildOptions options;
      options.frequency_threshold = config.frequency_threshold;
      const auto dict = build_dictionary_from_files(
          nouns, config.dict_seeds, config.dict_extensions, config.dict_remap,
          words ? &*words : nullptr, options);
      save_dictionary(dict, art.dictionary, art.remap);
    };
    stages.push_back(std::move(s));
  }
  if (config.stage_types) {
    Stage s{"types", {config.corpus, art.dictionary, art.remap},
            "cap=" + std::to_string(config.cap), {art.types}, {}};
    s.run = [&config, art] {
      const auto dict = load_dictionary(art.dictionary, art.remap);
      CorpusReader reader(config.corpus);
      save_assignments(extract_corpus(reader, dict, config.cap, config.workers), art.types);
    };
    stages.push_back(std::move(s));
  }
  if (config.stage_semantic) {
    Stage s{"semantic", {art.types, config.words},
            "T=" + std::to_string(config.max_words) +
                " normalize=" + std::to_string(config.normalize_words),
            {art.semantic}, {}};
    s.run = [&config, art] {
      AggregationConfig agg{config.max_words, config.alpha};
      save_binary(semantic_table(load_assignments(art.types), load_words(config), agg),
                  art.semantic);
    };
    stages.push_back(std::move(s));
  }
  if (config.stage_aggregate) {
    char alpha[32];
    auto [end, ec] = std::to_chars(alpha, alpha + sizeof alpha, config.alpha);
    Stage s{"aggregate", {config.wikitext, art.semantic},
            "alpha=" + std::string(alpha, end), {art.reinforced}, {}};
    s.run = [&config, art] {
      const EmbeddingTable wikitext = load_any(config.wikitext);
      save_binary(reinforce_with_semantic(wikitext, load_binary(art.semantic), config.alpha),
                  art.reinforced);
    };
    stages.push_back(std::move(s));
  }
  if (config.stage_link) {
    std::string params = "epochs=" + std::to_string(config.epochs) +
                         " lr=" + std::to_string(config.learning_rate) +
                         " margin=" + std::to_string(config.margin) +
                         " window=" + std::to_string(config.window) + " seeds=";
    for (auto seed : config.train_seeds) params += std::to_string(seed) + ",";
    Stage s{"link", {config.link_train, config.link_dev, art.reinforced, config.words},
            params, {art.model, art.predictions, art.eval}, {}};
    s.run = [&config, art] {
      const EmbeddingTable words = load_words(config);
      const EmbeddingTable entities = load_binary(art.reinforced);
      const auto train_docs = prepare_documents(
          load_linking_corpus(config.link_train, config.window), entities, words);
      const auto dev_docs = prepare_documents(
          load_linking_corpus(config.link_dev, config.window), entities, words);
      TrainConfig tc;
      tc.epochs = config.epochs;
      tc.learning_rate = config.learning_rate;
      tc.margin = config.margin;
      std::vector<double> scores;
      nlohmann::json eval;
      eval["runs"] = nlohmann::json::array();
      for (std::size_t i = 0; i < config.train_seeds.size(); ++i) {
        tc.seed = config.train_seeds[i];
        const TrainResult result =
            train(train_docs, {}, LinkingModel::identity(entities.dim()), tc);
        PredictionSet predictions;
        for (const auto &doc : dev_docs) {
          collect_predictions(doc, infer(doc, result.model, InferenceStrategy::kGreedyLocal),
                              predictions);
        }
        const EvalReport report = micro_f1(predictions, collect_gold(dev_docs));
        scores.push_back(report.f1);
        eval["runs"].push_back({{"seed", tc.seed},
                                {"micro_f1", report.f1},
                                {"precision", report.precision},
                                {"recall", report.recall}});
        if (i == 0) {
          save_model(result.model, art.model);
          write_file(art.predictions, serialize_predictions(predictions));
        }
      }
      const MultiRunSummary summary = summarize_runs(scores);
      eval["mean_f1"] = summary.mean;
      eval["ci95_halfwidth"] = summary.ci95_halfwidth;
      write_file(art.eval, eval.dump(2) + "\n");
    };
    stages.push_back(std::move(s));
  }

  PipelineResult result;
  result.artifacts = art;
  for (auto &stage : stages) {
    try {
      for (const auto &input : stage.inputs) {
        if (!exists(input)) throw IoError("missing input " + input);
      }
      const nlohmann::json inputs = hash_files(stage.inputs);
      if (up_to_date(manifest, stage, inputs)) {
        result.skipped.push_back(stage.name);
        continue;
      }
      stage.run();
      nlohmann::json entry;
      entry["inputs"] = inputs;
      entry["params"] = stage.params;
      entry["outputs"] = hash_files(stage.outputs);
      manifest[stage.name] = std::move(entry);
      write_manifest();
      result.ran.push_back(stage.name);
    } catch (const Error &e) {
      for (const auto &output : stage.outputs) {
        std::error_code ec;
        if (exists(output)) std::filesystem::rename(output, output + ".partial", ec);
      }
      manifest.erase(stage.name);
      write_manifest();
      throw StageError(stage.name, e);
    } catch (const std::exception &e) {
      manifest.erase(stage.name);
      write_manifest();
      throw StageError(stage.name, Error(e.what()));
    }
  }
  write_manifest();
  return result;
}

}  // namespace semlink
