// semlink: command-line front end for the type-reinforced entity embedding
// pipeline and the desk-scale linker.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "semlink/aggregation.h"
#include "semlink/dictionary.h"
#include "semlink/embedding_table.h"
#include "semlink/experiments.h"
#include "semlink/file_util.h"
#include "semlink/fixtures.h"
#include "semlink/linking.h"
#include "semlink/linking_io.h"
#include "semlink/metrics.h"
#include "semlink/pipeline.h"
#include "semlink/text.h"
#include "semlink/type_extraction.h"

namespace {

using namespace semlink;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCapacity = 3;

// Labels are raw bytes; invalid UTF-8 is escaped for display only.
std::string display_label(std::string_view label) {
  std::string out;
  std::size_t i = 0;
  while (i < label.size()) {
    const auto c = static_cast<unsigned char>(label[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3
                                   : (c >> 3) == 0x1e ? 4 : 0;
    bool ok = len > 0 && i + len <= label.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      ok = (static_cast<unsigned char>(label[i + k]) >> 6) == 0x2;
    }
    if (ok) {
      out.append(label.substr(i, len));
      i += len;
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
      ++i;
    }
  }
  return out;
}

void emit(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::vector<std::string> read_word_lines(const std::string &path) {
  std::vector<std::string> words;
  const std::string text = read_file(path);
  for (auto line : split(text, '\n')) {
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    auto fields = split(trim(line), '\t');
    const std::string word = normalize_phrase(fields[0]);
    if (!word.empty()) words.push_back(word);
  }
  return words;
}

InferenceStrategy parse_strategy(const std::string &name) {
  if (name == "exhaustive") return InferenceStrategy::kExhaustive;
  if (name == "greedy" || name == "greedy-local") return InferenceStrategy::kGreedyLocal;
  throw ConfigError("unknown inference strategy '" + name + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string &text) {
  std::vector<std::uint64_t> seeds;
  for (auto part : split(text, ',')) {
    if (!trim(part).empty()) seeds.push_back(std::stoull(std::string(trim(part))));
  }
  return seeds;
}

void log_warning(const std::string &message) { std::cerr << "warning: " << message << "\n"; }

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"semlink: fine-grained type reinforcement for entity embeddings"};
  app.require_subcommand(1);
  std::function<void()> action;

  // dict ------------------------------------------------------------------
  auto *dict = app.add_subcommand("dict", "Build the semantic type dictionary");
  dict->require_subcommand(1);

  struct {
    std::string corpus, out, nouns;
    std::uint64_t threshold = 10;
    std::size_t workers = 1;
  } mine;
  auto *dict_mine = dict->add_subcommand("mine", "Count nouns in article first sentences");
  dict_mine->add_option("--corpus", mine.corpus, "Article corpus (TSV or directory)")->required();
  dict_mine->add_option("--out", mine.out, "Noun frequency report (TSV)");
  dict_mine->add_option("--noun-list", mine.nouns,
                        "Treat exactly these words (one per line) as nouns");
  dict_mine->add_option("--threshold", mine.threshold, "Frequent-noun threshold");
  dict_mine->add_option("--workers", mine.workers, "Worker threads");
  dict_mine->callback([&] {
    action = [&] {
      const NounTagger tagger = mine.nouns.empty()
          ? heuristic_noun_tagger()
          : noun_set_tagger([&] {
              auto words = read_word_lines(mine.nouns);
              return std::unordered_set<std::string>(words.begin(), words.end());
            }());
      const auto articles = read_corpus(mine.corpus);
      const auto report = mine_noun_frequency(articles, tagger, mine.workers);
      emit(mine.out, serialize_noun_report(report));
      if (!mine.out.empty()) {
        for (const auto &[noun, count] : frequent_nouns(report, mine.threshold)) {
          std::cout << display_label(noun) << "\t" << count << "\n";
        }
      }
    };
  });

  struct {
    std::string seeds, corpus, embeddings, out;
    std::size_t k = 100;
  } expand;
  auto *dict_expand = dict->add_subcommand("expand", "Expand seeds by embedding similarity");
  dict_expand->add_option("--seeds", expand.seeds, "Seed words, one per line")->required();
  dict_expand->add_option("--corpus", expand.corpus, "Article corpus")->required();
  dict_expand->add_option("--embeddings", expand.embeddings, "Word embeddings")->required();
  dict_expand->add_option("-k", expand.k, "Neighbours per seed");
  dict_expand->add_option("--out", expand.out, "Output TSV: seed, word, similarity");
  dict_expand->callback([&] {
    action = [&] {
      CorpusReader reader(expand.corpus);
      const auto words = collect_article_words(reader);
      const auto table = load_any(expand.embeddings);
      const auto seeds = read_word_lines(expand.seeds);
      std::string out = "seed\tword\tsimilarity\n";
      for (const auto &e : expand_seeds(seeds, words, table, expand.k)) {
        for (const auto &n : e.neighbors) {
          out += display_label(e.seed) + "\t" + display_label(n.label) + "\t" +
                 std::to_string(n.score) + "\n";
        }
      }
      emit(expand.out, out);
    };
  });

  struct {
    std::string nouns, seeds, extensions, remap, embeddings, out_words, out_remap;
    std::uint64_t threshold = 10;
  } build;
  auto *dict_build = dict->add_subcommand("build", "Merge curated lists into a dictionary");
  dict_build->add_option("--nouns", build.nouns, "Noun frequency report from 'dict mine'");
  dict_build->add_option("--seeds", build.seeds, "Curated seed words")->required();
  dict_build->add_option("--extensions", build.extensions, "Accepted expansion words");
  dict_build->add_option("--remap", build.remap, "Remap table '<from>\\t<to>'");
  dict_build->add_option("--embeddings", build.embeddings, "Word embeddings for remap checks");
  dict_build->add_option("--threshold", build.threshold, "Frequent-noun threshold");
  dict_build->add_option("--out-words", build.out_words, "Dictionary output")->required();
  dict_build->add_option("--out-remap", build.out_remap, "Remap output")->required();
  dict_build->callback([&] {
    action = [&] {
      NounFrequencyReport nouns;
      if (!build.nouns.empty()) nouns = parse_noun_report(read_file(build.nouns));
      std::optional<EmbeddingTable> table;
      if (!build.embeddings.empty()) table = load_any(build.embeddings);
      DictionaryBuildInfo info;
      const auto d = build_dictionary_from_files(
          nouns, build.seeds, build.extensions, build.remap, table ? &*table : nullptr,
          {build.threshold}, &info);
      save_dictionary(d, build.out_words, build.out_remap);
      if (!build.nouns.empty()) {
        for (const auto &w : info.seeds_not_frequent) {
          log_warning("seed '" + display_label(w) + "' is not a frequent noun");
        }
      }
      for (const auto &w : info.unused_remap_keys) {
        log_warning("remap key '" + display_label(w) + "' is not a dictionary word");
      }
      std::cerr << d.size() << " words, " << d.remap().size() << " remaps\n";
    };
  });

  // types -----------------------------------------------------------------
  auto *types = app.add_subcommand("types", "Extract per-entity type words");
  types->require_subcommand(1);
  struct {
    std::string corpus, dict, remap, out;
    std::size_t cap = 11, workers = 1;
  } extract;
  auto *types_extract = types->add_subcommand("extract", "Extract type words from articles");
  types_extract->add_option("--corpus", extract.corpus, "Article corpus")->required();
  types_extract->add_option("--dict", extract.dict, "Dictionary words")->required();
  types_extract->add_option("--remap", extract.remap, "Remap table");
  types_extract->add_option("--cap", extract.cap, "Maximum type words per entity");
  types_extract->add_option("--workers", extract.workers, "Worker threads");
  types_extract->add_option("--out", extract.out, "Assignments output");
  types_extract->callback([&] {
    action = [&] {
      const auto d = load_dictionary(extract.dict, extract.remap);
      CorpusReader reader(extract.corpus);
      emit(extract.out,
           serialize_assignments(extract_corpus(reader, d, extract.cap, extract.workers)));
    };
  });

  // embed -----------------------------------------------------------------
  auto *embed = app.add_subcommand("embed", "Embedding tables");
  embed->require_subcommand(1);
  struct {
    std::string in, out, to;
    bool normalize = false;
  } convert;
  auto *embed_convert = embed->add_subcommand("convert", "Convert between binary and text");
  embed_convert->add_option("--in", convert.in, "Input table")->required();
  embed_convert->add_option("--out", convert.out, "Output table")->required();
  embed_convert->add_option("--to", convert.to, "Output format")
      ->check(CLI::IsMember({"binary", "text"}));
  embed_convert->add_flag("--normalize", convert.normalize, "Scale rows to unit length");
  embed_convert->callback([&] {
    action = [&] {
      EmbeddingTable table = load_any(convert.in);
      if (convert.normalize) table = normalized(table);
      if (convert.to == "binary") {
        save_binary(table, convert.out);
      } else if (convert.to == "text") {
        save_text(table, convert.out);
      } else {
        save_any(table, convert.out);
      }
      std::cerr << table.size() << " x " << table.dim() << "\n";
    };
  });

  struct {
    std::string wikitext, words, types, out, semantic_out;
    std::size_t max_words = 11, workers = 1;
    double alpha = 0.2;
    bool normalize = false;
  } reinforce;
  auto *embed_reinforce = embed->add_subcommand("reinforce", "Build semantic-reinforced entity embeddings");
  embed_reinforce->add_option("--wikitext", reinforce.wikitext, "Entity embeddings")->required();
  embed_reinforce->add_option("--words", reinforce.words, "Word embeddings")->required();
  embed_reinforce->add_option("--types", reinforce.types, "Type assignments")->required();
  embed_reinforce->add_option("--T", reinforce.max_words, "Type words averaged per entity");
  embed_reinforce->add_option("--alpha", reinforce.alpha, "Semantic weight in [0, 1]");
  embed_reinforce->add_option("--out", reinforce.out, "Output table")->required();
  embed_reinforce->add_option("--semantic-out", reinforce.semantic_out, "Also write the semantic table");
  embed_reinforce->add_option("--workers", reinforce.workers, "Worker threads");
  embed_reinforce->add_flag("--normalize-words", reinforce.normalize, "Unit-normalize word vectors first");
  embed_reinforce->callback([&] {
    action = [&] {
      EmbeddingTable words = load_any(reinforce.words);
      if (reinforce.normalize) words = normalized(words);
      const auto assignments = load_assignments(reinforce.types);
      const AggregationConfig config{reinforce.max_words, reinforce.alpha};
      AggregationStats stats;
      const auto out = aggregate_table(load_any(reinforce.wikitext), assignments, words,
                                       config, reinforce.workers, &stats);
      save_any(out, reinforce.out);
      if (!reinforce.semantic_out.empty()) {
        save_any(semantic_table(assignments, words, config), reinforce.semantic_out);
      }
      std::cerr << stats.covered << "/" << stats.entities << " entities reinforced\n";
      for (const auto &[used, count] : stats.words_used_histogram) {
        std::cerr << "  " << used << " type words: " << count << "\n";
      }
    };
  });

  struct {
    std::string table, query, out;
    std::size_t k = 10;
  } neighbors;
  auto *embed_neighbors = embed->add_subcommand("neighbors", "Nearest rows by cosine (TSV)");
  embed_neighbors->add_option("--table", neighbors.table, "Embedding table")->required();
  embed_neighbors->add_option("--query", neighbors.query, "Query label")->required();
  embed_neighbors->add_option("-k", neighbors.k, "Neighbours");
  embed_neighbors->add_option("--out", neighbors.out, "Output TSV");
  embed_neighbors->callback([&] {
    action = [&] {
      std::string out = "rank\tlabel\tcosine\n";
      std::size_t rank = 0;
      for (const auto &n : neighbor_report(load_any(neighbors.table), neighbors.query, neighbors.k)) {
        out += std::to_string(++rank) + "\t" + display_label(n.label) + "\t" +
               std::to_string(n.score) + "\n";
      }
      emit(neighbors.out, out);
    };
  });

  // link ------------------------------------------------------------------
  auto *link = app.add_subcommand("link", "Train and run the linker");
  link->require_subcommand(1);
  struct {
    std::string train, dev, entities, words, out, trace, weighting = "uniform";
    std::size_t epochs = 20, window = kDefaultContextWindow, relations = 0;
    double lr = 0.01, margin = 0.1;
    std::uint64_t seed = 1;
    bool pairwise = false;
  } lt;
  auto *link_train = link->add_subcommand("train", "Max-margin SGD on the diagonal scorer");
  link_train->add_option("--train", lt.train, "Training corpus")->required();
  link_train->add_option("--dev", lt.dev, "Dev corpus for per-epoch F1");
  link_train->add_option("--entities", lt.entities, "Entity embeddings")->required();
  link_train->add_option("--words", lt.words, "Word embeddings")->required();
  link_train->add_option("--epochs", lt.epochs, "Epochs");
  link_train->add_option("--lr", lt.lr, "Learning rate");
  link_train->add_option("--margin", lt.margin, "Hinge margin");
  link_train->add_option("--seed", lt.seed, "Shuffle seed");
  link_train->add_option("--window", lt.window, "Context tokens per side");
  link_train->add_option("--relations", lt.relations, "Number of relation diagonals (0: single pairwise diagonal)");
  link_train->add_option("--weighting", lt.weighting, "Relation weighting")
      ->check(CLI::IsMember({"uniform", "softmax"}));
  link_train->add_flag("--train-pairwise", lt.pairwise, "Also learn pairwise diagonals");
  link_train->add_option("--out", lt.out, "Model output")->required();
  link_train->add_option("--trace", lt.trace, "Per-epoch loss/F1 TSV");
  link_train->callback([&] {
    action = [&] {
      const auto words = load_any(lt.words);
      const auto entities = load_any(lt.entities);
      const auto train_docs =
          prepare_documents(load_linking_corpus(lt.train, lt.window), entities, words);
      std::vector<PreparedDocument> dev_docs;
      if (!lt.dev.empty()) {
        dev_docs = prepare_documents(load_linking_corpus(lt.dev, lt.window), entities, words);
      }
      LinkingModel initial = LinkingModel::identity(entities.dim(), lt.relations);
      if (lt.weighting == "softmax") initial.weighting = RelationWeighting::kSoftmax;
      TrainConfig config;
      config.epochs = lt.epochs;
      config.learning_rate = lt.lr;
      config.margin = lt.margin;
      config.seed = lt.seed;
      config.train_pairwise = lt.pairwise;
      const TrainResult result = train(train_docs, dev_docs, initial, config);
      save_model(result.model, lt.out);
      std::string trace = "epoch\tloss\tdev_f1\n0\t" + std::to_string(result.trace.initial_loss) + "\t\n";
      for (std::size_t e = 0; e < result.trace.loss.size(); ++e) {
        trace += std::to_string(e + 1) + "\t" + std::to_string(result.trace.loss[e]) + "\t" +
                 (e < result.trace.dev_f1.size() ? std::to_string(result.trace.dev_f1[e]) : "") +
                 "\n";
      }
      emit(lt.trace.empty() ? "-" : lt.trace, trace);
      if (result.skipped_mentions > 0) {
        log_warning(std::to_string(result.skipped_mentions) +
                    " training mentions skipped: gold not among candidates");
      }
    };
  });

  struct {
    std::string model, corpus, entities, words, out, strategy = "exhaustive";
    std::size_t window = kDefaultContextWindow;
  } li;
  auto *link_infer = link->add_subcommand("infer", "Link every mention of a corpus");
  link_infer->add_option("--model", li.model, "Model file")->required();
  link_infer->add_option("--corpus", li.corpus, "Linking corpus")->required();
  link_infer->add_option("--entities", li.entities, "Entity embeddings")->required();
  link_infer->add_option("--words", li.words, "Word embeddings")->required();
  link_infer->add_option("--strategy", li.strategy, "exhaustive or greedy");
  link_infer->add_option("--window", li.window, "Context tokens per side");
  link_infer->add_option("--out", li.out, "Predictions TSV");
  link_infer->callback([&] {
    action = [&] {
      const auto model = load_model(li.model);
      const auto docs = prepare_documents(load_linking_corpus(li.corpus, li.window),
                                          load_any(li.entities), load_any(li.words));
      const auto strategy = parse_strategy(li.strategy);
      PredictionSet predictions;
      for (const auto &doc : docs) {
        const Assignment a = infer(doc, model, strategy);
        for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
          predictions[{doc.doc_id, doc.mentions[i].source_index}] = doc.mentions[i].labels[a[i]];
        }
      }
      emit(li.out, serialize_predictions(predictions));
    };
  });

  struct {
    std::string model, corpus, entities, words, predictions, out;
    std::size_t window = kDefaultContextWindow;
  } ls;
  auto *link_score = link->add_subcommand("score", "Document scores of gold or predicted links");
  link_score->add_option("--model", ls.model, "Model file")->required();
  link_score->add_option("--corpus", ls.corpus, "Linking corpus")->required();
  link_score->add_option("--entities", ls.entities, "Entity embeddings")->required();
  link_score->add_option("--words", ls.words, "Word embeddings")->required();
  link_score->add_option("--predictions", ls.predictions, "Score these links instead of gold");
  link_score->add_option("--window", ls.window, "Context tokens per side");
  link_score->add_option("--out", ls.out, "Output TSV");
  link_score->callback([&] {
    action = [&] {
      const auto model = load_model(ls.model);
      const auto docs = prepare_documents(load_linking_corpus(ls.corpus, ls.window),
                                          load_any(ls.entities), load_any(ls.words));
      PredictionSet chosen;
      if (!ls.predictions.empty()) chosen = parse_predictions(read_file(ls.predictions));
      std::string out = "doc_id\tscore\n";
      for (const auto &doc : docs) {
        std::vector<std::string> labels;
        for (const auto &m : doc.mentions) {
          std::optional<std::string> label;
          if (ls.predictions.empty()) {
            if (m.gold) label = m.labels[*m.gold];
          } else if (auto it = chosen.find({doc.doc_id, m.source_index}); it != chosen.end()) {
            label = it->second;
          }
          if (!label) {
            throw AlignmentError("no link for " + doc.doc_id + "#" +
                                 std::to_string(m.source_index));
          }
          labels.push_back(*label);
        }
        out += doc.doc_id + "\t" + std::to_string(document_score(doc, model, labels)) + "\n";
      }
      emit(ls.out, out);
    };
  });

  // eval ------------------------------------------------------------------
  auto *eval = app.add_subcommand("eval", "Evaluation and experiments");
  eval->require_subcommand(1);
  struct {
    std::string predictions, gold, out;
    bool json = false;
  } ef;
  auto *eval_f1 = eval->add_subcommand("f1", "Micro F1 of predictions against a gold corpus");
  eval_f1->add_option("--predictions", ef.predictions, "Predictions TSV")->required();
  eval_f1->add_option("--gold", ef.gold, "Gold linking corpus")->required();
  eval_f1->add_flag("--json", ef.json, "Emit JSON instead of TSV");
  eval_f1->add_option("--out", ef.out, "Output file");
  eval_f1->callback([&] {
    action = [&] {
      const auto gold_docs = load_linking_corpus(ef.gold);
      const auto report =
          micro_f1(parse_predictions(read_file(ef.predictions)), collect_gold(gold_docs));
      if (ef.json) {
        nlohmann::json j = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn},
                            {"precision", report.precision}, {"recall", report.recall},
                            {"micro_f1", report.f1}};
        for (const auto &[doc, c] : report.per_doc) {
          j["per_doc"][doc] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
        }
        emit(ef.out, j.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "tp\tfp\tfn\tprecision\trecall\tmicro_f1\n"
           << report.tp << "\t" << report.fp << "\t" << report.fn << "\t"
           << report.precision << "\t" << report.recall << "\t" << report.f1 << "\n";
        emit(ef.out, os.str());
      }
    };
  });

  struct {
    std::string scores, file;
    bool json = false;
  } er;
  auto *eval_runs = eval->add_subcommand("runs", "Mean and 95% confidence interval over runs");
  eval_runs->add_option("--scores", er.scores, "Comma-separated scores");
  eval_runs->add_option("--file", er.file, "One score per line");
  eval_runs->add_flag("--json", er.json, "Emit JSON");
  eval_runs->callback([&] {
    action = [&] {
      std::vector<double> scores;
      std::string text = er.scores;
      if (!er.file.empty()) text += "\n" + read_file(er.file);
      for (auto line : split(text, '\n')) {
        for (auto part : split(line, ',')) {
          if (!trim(part).empty()) scores.push_back(std::stod(std::string(trim(part))));
        }
      }
      const auto s = summarize_runs(scores);
      if (s.single_run) log_warning("single run: confidence interval is not defined");
      if (er.json) {
        std::cout << nlohmann::json{{"runs", s.run_scores.size()}, {"mean", s.mean},
                                    {"stddev", s.stddev}, {"ci95_halfwidth", s.ci95_halfwidth}}
                         .dump(2)
                  << "\n";
      } else {
        std::printf("runs\tmean\tstddev\tci95_halfwidth\n%zu\t%.10g\t%.10g\t%.10g\n",
                    s.run_scores.size(), s.mean, s.stddev, s.ci95_halfwidth);
      }
    };
  });

  struct {
    std::string train, dev, words, baseline, reinforced, seeds = "1,2,3,4,5", json, tsv;
    std::size_t epochs = 200, workers = 1;
    double threshold = 0.95, lr = 0.01, margin = 0.1;
  } ec;
  auto *eval_converge = eval->add_subcommand("converge", "Epochs to a dev-F1 threshold per table");
  eval_converge->add_option("--train", ec.train, "Training corpus")->required();
  eval_converge->add_option("--dev", ec.dev, "Dev corpus")->required();
  eval_converge->add_option("--words", ec.words, "Word embeddings")->required();
  eval_converge->add_option("--baseline", ec.baseline, "Baseline entity table")->required();
  eval_converge->add_option("--reinforced", ec.reinforced, "Reinforced entity table")->required();
  eval_converge->add_option("--seeds", ec.seeds, "Comma-separated seeds");
  eval_converge->add_option("--epochs", ec.epochs, "Epoch budget");
  eval_converge->add_option("--threshold", ec.threshold, "Dev-F1 threshold");
  eval_converge->add_option("--lr", ec.lr, "Learning rate");
  eval_converge->add_option("--margin", ec.margin, "Hinge margin");
  eval_converge->add_option("--workers", ec.workers, "Parallel runs");
  eval_converge->add_option("--json", ec.json, "JSON report");
  eval_converge->add_option("--tsv", ec.tsv, "Curve data (gnuplot-friendly)");
  eval_converge->callback([&] {
    action = [&] {
      ConvergenceConfig config;
      config.train.epochs = ec.epochs;
      config.train.learning_rate = ec.lr;
      config.train.margin = ec.margin;
      config.seeds = parse_seed_list(ec.seeds);
      config.threshold = ec.threshold;
      config.workers = ec.workers;
      const auto train_docs = load_linking_corpus(ec.train);
      const auto dev_docs = load_linking_corpus(ec.dev);
      const auto report =
          convergence_experiment(train_docs, dev_docs, load_any(ec.words), load_any(ec.baseline),
                                 load_any(ec.reinforced), config);
      if (!ec.json.empty()) write_file(ec.json, convergence_to_json(report));
      if (!ec.tsv.empty()) write_file(ec.tsv, convergence_to_tsv(report));
      std::printf("table\tmean_epochs\tcensored\nbaseline\t%.3f\t%zu\nreinforced\t%.3f\t%zu\n",
                  report.baseline.mean_epochs, report.baseline.censored,
                  report.reinforced.mean_epochs, report.reinforced.censored);
    };
  });

  struct {
    std::string baseline, reinforced, probes, out;
    bool json = false;
  } eg;
  auto *eval_geometry = eval->add_subcommand("geometry", "Cosine deltas of probe pairs");
  eval_geometry->add_option("--baseline", eg.baseline, "Baseline entity table")->required();
  eval_geometry->add_option("--reinforced", eg.reinforced, "Reinforced entity table")->required();
  eval_geometry->add_option("--probes", eg.probes, "Probe pairs TSV")->required();
  eval_geometry->add_flag("--json", eg.json, "Emit JSON instead of TSV");
  eval_geometry->add_option("--out", eg.out, "Output file");
  eval_geometry->callback([&] {
    action = [&] {
      const auto probes = parse_probes(read_file(eg.probes));
      const auto report =
          geometry_report(load_any(eg.baseline), load_any(eg.reinforced), probes);
      emit(eg.out, eg.json ? geometry_to_json(report) : geometry_to_tsv(report));
      std::fprintf(stderr, "mean delta: same %.6f, different %.6f\n", report.mean_delta_same,
                   report.mean_delta_different);
    };
  });

  // pipeline / fixtures -----------------------------------------------------
  auto *pipeline = app.add_subcommand("pipeline", "End-to-end pipeline");
  pipeline->require_subcommand(1);
  struct {
    std::string config;
    std::vector<std::string> overrides;
  } pr;
  auto *pipeline_run = pipeline->add_subcommand("run", "Run the configured stages");
  pipeline_run->add_option("--config", pr.config, "key = value configuration file");
  pipeline_run->add_option("--set", pr.overrides, "Override: key=value (repeatable)");
  pipeline_run->callback([&] {
    action = [&] {
      PipelineConfig config = pr.config.empty() ? PipelineConfig{} : load_pipeline_config(pr.config);
      for (const auto &o : pr.overrides) {
        const std::size_t eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
        config.set(std::string_view(o).substr(0, eq), std::string_view(o).substr(eq + 1));
      }
      const auto result = run_pipeline(config);
      for (const auto &s : result.ran) std::cout << "ran\t" << s << "\n";
      for (const auto &s : result.skipped) std::cout << "skipped\t" << s << "\n";
    };
  });

  auto *fixtures = app.add_subcommand("fixtures", "Synthetic data");
  fixtures->require_subcommand(1);
  struct {
    std::string out;
    std::uint64_t seed = 1;
    FixtureSizes sizes;
  } fm;
  auto *fixtures_make = fixtures->add_subcommand("make", "Generate a deterministic synthetic corpus");
  fixtures_make->add_option("--out", fm.out, "Output directory")->required();
  fixtures_make->add_option("--seed", fm.seed, "Random seed");
  fixtures_make->add_option("--entities", fm.sizes.entities, "Entities");
  fixtures_make->add_option("--train-mentions", fm.sizes.train_mentions, "Training mentions");
  fixtures_make->add_option("--dev-mentions", fm.sizes.dev_mentions, "Dev mentions");
  fixtures_make->add_option("--mentions-per-doc", fm.sizes.mentions_per_doc, "Mentions per document");
  fixtures_make->add_option("--candidates", fm.sizes.candidates, "Candidates per mention");
  fixtures_make->add_option("--dim", fm.sizes.dim, "Vector dimension");
  fixtures_make->add_option("--fillers", fm.sizes.fillers, "Filler words");
  fixtures_make->add_option("--probes", fm.sizes.probes, "Probe pairs per class");
  fixtures_make->callback([&] {
    action = [&] {
      const auto paths = make_fixtures(fm.out, fm.seed, fm.sizes);
      for (const auto &p : {paths.words, paths.wikitext, paths.corpus, paths.seeds,
                            paths.extensions, paths.remap, paths.train, paths.dev, paths.probes}) {
        std::cout << p << "\n";
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.error_class()) {
      case ErrorClass::kUsage: return kExitUsage;
      case ErrorClass::kCapacity: return kExitCapacity;
      case ErrorClass::kData: return kExitData;
    }
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
