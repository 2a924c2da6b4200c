#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "semlink/aggregation.h"
#include "semlink/dictionary.h"
#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/fixtures.h"
#include "semlink/pipeline.h"
#include "semlink/type_extraction.h"
#include "test_support.h"

using namespace semlink;
using semlink::testing::TempDir;
namespace fs = std::filesystem;

namespace {

PipelineConfig fixture_config(const FixturePaths &p, const std::string &out) {
  PipelineConfig c;
  c.words = p.words;
  c.wikitext = p.wikitext;
  c.corpus = p.corpus;
  c.dict_seeds = p.seeds;
  c.dict_extensions = p.extensions;
  c.dict_remap = p.remap;
  c.link_train = p.train;
  c.link_dev = p.dev;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config text parsing and overrides") {
  const auto c = parse_pipeline_config(
      "# comment\nT = 6\nalpha=0.1\nstage.link = true\ntrain_seeds = 3,4\n\nwords = w.bin\n");
  CHECK(c.max_words == 6);
  CHECK(c.alpha == 0.1);
  CHECK(c.stage_link);
  CHECK(c.train_seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.words == "w.bin");
  PipelineConfig d;
  CHECK_THROWS_AS(d.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(d.set("alpha", "abc"), ConfigError);
  CHECK_THROWS_AS(parse_pipeline_config("alpha 0.2\n"), ConfigError);
}

TEST_CASE("all stages disabled writes only the manifest") {
  TempDir dir("pipe");
  PipelineConfig c;
  c.output_dir = dir.file("out");
  c.stage_dict = c.stage_types = c.stage_semantic = c.stage_aggregate = c.stage_link = false;
  const auto result = run_pipeline(c);
  CHECK(result.ran.empty());
  std::vector<std::string> files;
  for (const auto &e : fs::directory_iterator(c.output_dir)) files.push_back(e.path().filename());
  CHECK(files == std::vector<std::string>{"manifest.json"});
}

TEST_CASE("a missing word-embedding path fails validation before any stage") {
  TempDir dir("pipe");
  const auto p = make_fixtures(dir.file("fx"), 1, {});
  auto c = fixture_config(p, dir.file("out"));
  c.words = dir.file("missing.bin");
  CHECK_THROWS_AS(run_pipeline(c), ConfigError);
  CHECK_FALSE(fs::exists(dir.file("out")));
}

TEST_CASE("pipeline output equals manual stage composition") {
  TempDir dir("pipe");
  const auto p = make_fixtures(dir.file("fx"), 2, {});
  auto c = fixture_config(p, dir.file("out"));
  c.max_words = 6;
  c.alpha = 0.1;
  c.frequency_threshold = 3;
  const auto result = run_pipeline(c);
  CHECK(result.ran == std::vector<std::string>{"dict", "types", "semantic", "aggregate"});

  const auto words = load_binary(p.words);
  const auto articles = read_corpus(p.corpus);
  const auto nouns = mine_noun_frequency(articles, heuristic_noun_tagger());
  const auto dict = build_dictionary(nouns, read_file(p.seeds), read_file(p.extensions),
                                     read_file(p.remap), &words, {3});
  const auto types = extract_corpus(articles, dict, 11, 1);
  const auto reinforced = aggregate_table(load_binary(p.wikitext), types, words, {6, 0.1});
  CHECK(read_file(result.artifacts.reinforced) == serialize_binary(reinforced));
  CHECK(read_file(result.artifacts.types) == serialize_assignments(types));
  CHECK(read_file(result.artifacts.dictionary) == serialize_words(dict));
}

TEST_CASE("rerunning a completed pipeline does no work") {
  TempDir dir("pipe");
  const auto p = make_fixtures(dir.file("fx"), 3, {});
  auto c = fixture_config(p, dir.file("out"));
  c.stage_link = true;
  c.train_seeds = {1, 2};
  c.epochs = 3;
  const auto first = run_pipeline(c);
  CHECK(first.ran.size() == 5);
  const std::string manifest = read_file(first.artifacts.manifest);
  const std::string reinforced = read_file(first.artifacts.reinforced);
  const auto second = run_pipeline(c);
  CHECK(second.ran.empty());
  CHECK(second.skipped.size() == 5);
  CHECK(read_file(second.artifacts.reinforced) == reinforced);

  const auto eval = nlohmann::json::parse(read_file(first.artifacts.eval));
  CHECK(eval["runs"].size() == 2);
  CHECK(eval.contains("ci95_halfwidth"));

  // Changing a parameter reruns the affected stage and everything after it.
  c.alpha = 0.3;
  const auto third = run_pipeline(c);
  CHECK(third.ran == std::vector<std::string>{"aggregate", "link"});
  CHECK(read_file(third.artifacts.manifest) != manifest);
}

TEST_CASE("a failing stage leaves partial outputs and names itself") {
  TempDir dir("pipe");
  const auto p = make_fixtures(dir.file("fx"), 4, {});
  auto c = fixture_config(p, dir.file("out"));
  write_file(p.remap, "conchologist\tmalacologist\n");
  try {
    run_pipeline(c);
    FAIL("expected StageError");
  } catch (const StageError &e) {
    CHECK(e.stage() == "dict");
    CHECK(e.error_class() == ErrorClass::kData);
  }
  CHECK_FALSE(fs::exists(pipeline_artifacts(c.output_dir).dictionary));
}
