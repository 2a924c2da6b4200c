#include "semlink/experiments.h"

#include <json.hpp>
#include <thread>

#include "semlink/errors.h"
#include "semlink/similarity.h"
#include "semlink/text.h"

namespace semlink {

namespace {

ConvergenceRun run_one(const std::string &name, std::uint64_t seed,
                       std::span<const PreparedDocument> train_docs,
                       std::span<const PreparedDocument> dev_docs,
                       std::size_t dim, const ConvergenceConfig &config) {
  TrainConfig train_config = config.train;
  train_config.seed = seed;
  const LinkingModel initial = LinkingModel::identity(dim);
  TrainResult result = train(train_docs, dev_docs, initial, train_config);
  ConvergenceRun run;
  run.table = name;
  run.seed = seed;
  run.dev_f1 = std::move(result.trace.dev_f1);
  run.loss = std::move(result.trace.loss);
  for (std::size_t e = 0; e < run.dev_f1.size(); ++e) {
    if (run.dev_f1[e] >= config.threshold) {
      run.epochs_to_threshold = e + 1;
      break;
    }
  }
  return run;
}

void summarize(ConvergenceSide &side, std::size_t max_epochs) {
  double total = 0.0;
  side.censored = 0;
  for (const auto &run : side.runs) {
    if (run.epochs_to_threshold) {
      total += static_cast<double>(*run.epochs_to_threshold);
    } else {
      total += static_cast<double>(max_epochs + 1);
      ++side.censored;
    }
  }
  side.mean_epochs = side.runs.empty() ? 0.0 : total / double(side.runs.size());
}

}  // namespace

ConvergenceReport convergence_experiment(
    std::span<const LinkingDocument> train_docs,
    std::span<const LinkingDocument> dev_docs, const EmbeddingTable &words,
    const EmbeddingTable &baseline, const EmbeddingTable &reinforced,
    const ConvergenceConfig &config) {
  if (baseline.dim() != reinforced.dim() ||
      baseline.labels() != reinforced.labels()) {
    throw DimensionError("baseline and reinforced tables must share labels and dimension");
  }
  if (config.seeds.empty()) throw ConfigError("convergence experiment needs seeds");

  const auto base_train = prepare_documents(train_docs, baseline, words);
  const auto base_dev = prepare_documents(dev_docs, baseline, words);
  const auto rein_train = prepare_documents(train_docs, reinforced, words);
  const auto rein_dev = prepare_documents(dev_docs, reinforced, words);

  const std::size_t n = config.seeds.size();
  std::vector<ConvergenceRun> runs(2 * n);
  std::vector<std::exception_ptr> errors(2 * n);
  auto job = [&](std::size_t index) {
    try {
      const std::uint64_t seed = config.seeds[index % n];
      runs[index] = index < n
          ? run_one("baseline", seed, base_train, base_dev, baseline.dim(), config)
          : run_one("reinforced", seed, rein_train, rein_dev, reinforced.dim(), config);
    } catch (...) {
      errors[index] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, 2 * n));
  if (workers == 1) {
    for (std::size_t i = 0; i < 2 * n; ++i) job(i);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < 2 * n; i += workers) job(i);
      });
    }
  }
  for (const auto &error : errors) {
    if (error) std::rethrow_exception(error);
  }

  ConvergenceReport report;
  report.threshold = config.threshold;
  report.max_epochs = config.train.epochs;
  report.baseline.runs.assign(runs.begin(), runs.begin() + n);
  report.reinforced.runs.assign(runs.begin() + n, runs.end());
  summarize(report.baseline, report.max_epochs);
  summarize(report.reinforced, report.max_epochs);
  return report;
}

GeometryReport geometry_report(const EmbeddingTable &baseline,
                               const EmbeddingTable &reinforced,
                               std::span<const ProbePair> probes) {
  auto get = [](const EmbeddingTable &table, const std::string &label,
                const char *which) {
    auto vec = table.lookup(label);
    if (!vec) {
      throw MissingLabelError("probe label '" + label + "' missing from " + which +
                              " table");
    }
    return vec->values;
  };
  GeometryReport report;
  double same = 0.0, different = 0.0;
  for (const auto &probe : probes) {
    GeometryRow row;
    row.pair = probe;
    row.cosine_baseline = cosine(get(baseline, probe.first, "baseline"),
                                 get(baseline, probe.second, "baseline"));
    row.cosine_reinforced = cosine(get(reinforced, probe.first, "reinforced"),
                                   get(reinforced, probe.second, "reinforced"));
    row.delta = row.cosine_reinforced - row.cosine_baseline;
    if (probe.same_type) {
      same += row.delta;
      ++report.same_pairs;
    } else {
      different += row.delta;
      ++report.different_pairs;
    }
    report.rows.push_back(std::move(row));
  }
  if (report.same_pairs) report.mean_delta_same = same / double(report.same_pairs);
  if (report.different_pairs) {
    report.mean_delta_different = different / double(report.different_pairs);
  }
  return report;
}

std::vector<ProbePair> parse_probes(std::string_view text) {
  std::vector<ProbePair> probes;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || (fields[2] != "same" && fields[2] != "different")) {
      throw FormatError("probe line " + std::to_string(line_no) +
                        ": expected '<a>\\t<b>\\t<same|different>'");
    }
    probes.push_back({std::string(fields[0]), std::string(fields[1]),
                      fields[2] == "same"});
  }
  return probes;
}

std::string serialize_probes(std::span<const ProbePair> probes) {
  std::string out;
  for (const auto &p : probes) {
    out += p.first + "\t" + p.second + "\t" + (p.same_type ? "same" : "different") + "\n";
  }
  return out;
}

namespace {

nlohmann::json side_json(const ConvergenceSide &side) {
  nlohmann::json out;
  out["mean_epochs"] = side.mean_epochs;
  out["censored"] = side.censored;
  out["runs"] = nlohmann::json::array();
  for (const auto &run : side.runs) {
    nlohmann::json r;
    r["seed"] = run.seed;
    r["epochs_to_threshold"] = run.epochs_to_threshold
                                   ? nlohmann::json(*run.epochs_to_threshold)
                                   : nlohmann::json(nullptr);
    r["dev_f1"] = run.dev_f1;
    r["loss"] = run.loss;
    out["runs"].push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string convergence_to_json(const ConvergenceReport &report) {
  nlohmann::json out;
  out["threshold"] = report.threshold;
  out["max_epochs"] = report.max_epochs;
  out["baseline"] = side_json(report.baseline);
  out["reinforced"] = side_json(report.reinforced);
  return out.dump(2) + "\n";
}

// Curve data, one row per epoch: epoch, then dev F1 of each run.
std::string convergence_to_tsv(const ConvergenceReport &report) {
  std::string out = "epoch";
  std::vector<const ConvergenceRun *> runs;
  for (const auto *side : {&report.baseline, &report.reinforced}) {
    for (const auto &run : side->runs) {
      out += "\t" + run.table + "_seed" + std::to_string(run.seed);
      runs.push_back(&run);
    }
  }
  out += '\n';
  for (std::size_t e = 0; e < report.max_epochs; ++e) {
    out += std::to_string(e + 1);
    for (const auto *run : runs) {
      out += '\t';
      if (e < run->dev_f1.size()) out += std::to_string(run->dev_f1[e]);
    }
    out += '\n';
  }
  return out;
}

std::string geometry_to_json(const GeometryReport &report) {
  nlohmann::json out;
  out["mean_delta_same"] = report.mean_delta_same;
  out["mean_delta_different"] = report.mean_delta_different;
  out["same_pairs"] = report.same_pairs;
  out["different_pairs"] = report.different_pairs;
  out["rows"] = nlohmann::json::array();
  for (const auto &row : report.rows) {
    out["rows"].push_back({{"first", row.pair.first},
                           {"second", row.pair.second},
                           {"same_type", row.pair.same_type},
                           {"cosine_baseline", row.cosine_baseline},
                           {"cosine_reinforced", row.cosine_reinforced},
                           {"delta", row.delta}});
  }
  return out.dump(2) + "\n";
}

std::string geometry_to_tsv(const GeometryReport &report) {
  std::string out = "first\tsecond\tclass\tcosine_baseline\tcosine_reinforced\tdelta\n";
  for (const auto &row : report.rows) {
    out += row.pair.first + "\t" + row.pair.second + "\t" +
           (row.pair.same_type ? "same" : "different") + "\t" +
           std::to_string(row.cosine_baseline) + "\t" +
           std::to_string(row.cosine_reinforced) + "\t" +
           std::to_string(row.delta) + "\n";
  }
  return out;
}

}  // namespace semlink
