#include <doctest.h>

#include <json.hpp>

#include "semlink/aggregation.h"
#include "semlink/errors.h"
#include "semlink/experiments.h"
#include "semlink/fixtures.h"

using namespace semlink;

namespace {

FixtureSizes small_sizes() {
  FixtureSizes sizes;
  sizes.entities = 24;
  sizes.train_mentions = 80;
  sizes.dev_mentions = 40;
  sizes.dim = 16;
  sizes.fillers = 30;
  return sizes;
}

}  // namespace

TEST_CASE("convergence experiment is reproducible and censors unreached runs") {
  const auto data = generate_fixtures(4, small_sizes());
  const auto semantic_like = aggregate_table(data.wikitext, {}, data.words, {11, 0.2});
  ConvergenceConfig config;
  config.seeds = {1, 2};
  config.train.epochs = 6;
  config.threshold = 1.01;  // unreachable
  const auto a = convergence_experiment(data.train, data.dev, data.words, data.wikitext,
                                        semantic_like, config);
  CHECK(a.baseline.censored == 2);
  CHECK(a.baseline.mean_epochs == 7.0);
  REQUIRE(a.baseline.runs.size() == 2);
  CHECK(a.baseline.runs[0].dev_f1.size() == 6);
  config.workers = 2;
  const auto b = convergence_experiment(data.train, data.dev, data.words, data.wikitext,
                                        semantic_like, config);
  CHECK(convergence_to_json(a) == convergence_to_json(b));
  CHECK(convergence_to_tsv(a) == convergence_to_tsv(b));

  config.threshold = 0.0;
  const auto c = convergence_experiment(data.train, data.dev, data.words, data.wikitext,
                                        semantic_like, config);
  CHECK(c.reinforced.mean_epochs == 1.0);
  CHECK(c.reinforced.censored == 0);

  const auto json = nlohmann::json::parse(convergence_to_json(a));
  CHECK(json["baseline"]["runs"].size() == 2);
}

TEST_CASE("geometry report on hand-built tables") {
  EmbeddingTable base(2), reinforced(2);
  base.add("a", std::vector<float>{1, 0});
  base.add("b", std::vector<float>{0, 1});
  base.add("c", std::vector<float>{0, -1});
  reinforced.add("a", std::vector<float>{1, 1});
  reinforced.add("b", std::vector<float>{1, 1});
  reinforced.add("c", std::vector<float>{-1, -0.5f});
  const std::vector<ProbePair> probes{{"a", "b", true}, {"a", "c", false}};
  const auto r = geometry_report(base, reinforced, probes);
  CHECK(r.same_pairs == 1);
  CHECK(r.different_pairs == 1);
  CHECK(r.rows[0].cosine_baseline == 0.0);
  CHECK(r.rows[0].cosine_reinforced == doctest::Approx(1.0));
  CHECK(r.mean_delta_same == doctest::Approx(1.0));
  CHECK(r.mean_delta_different < 0.0);
  const std::vector<ProbePair> missing{{"a", "zz", true}};
  CHECK_THROWS_AS(geometry_report(base, reinforced, missing), MissingLabelError);
  CHECK(nlohmann::json::parse(geometry_to_json(r))["rows"].size() == 2);
  CHECK(geometry_to_tsv(r).find("a\tb\tsame") != std::string::npos);
}

TEST_CASE("probe files round-trip") {
  const std::vector<ProbePair> probes{{"E1", "E2", true}, {"E3", "E4", false}};
  const auto parsed = parse_probes(serialize_probes(probes));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].first == "E1");
  CHECK(parsed[1].same_type == false);
  CHECK_THROWS_AS(parse_probes("E1\tE2\tmaybe\n"), FormatError);
}
