#include <doctest.h>

#include <algorithm>
#include <set>

#include "semlink/dictionary.h"
#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/similarity.h"
#include "semlink/text.h"
#include "test_support.h"

using namespace semlink;
using semlink::testing::fixture;

namespace {

NounTagger fixture_tagger() {
  std::unordered_set<std::string> nouns;
  const std::string text = read_file(fixture("first_sentences_nouns.txt"));
  for (auto line : split(text, '\n')) {
    if (!trim(line).empty()) nouns.emplace(trim(line));
  }
  return noun_set_tagger(std::move(nouns));
}

EmbeddingTable table_of(std::initializer_list<std::pair<const char *, std::vector<float>>> rows) {
  EmbeddingTable t(rows.begin()->second.size());
  for (const auto &[label, v] : rows) t.add(label, v);
  return t;
}

}  // namespace

TEST_CASE("noun mining on a single sentence") {
  const std::vector<ArticleRecord> one{
      make_article("Q1", "Robert Mueller", "Robert Mueller is an american lawyer.")};
  const auto report = mine_noun_frequency(one, noun_set_tagger({"lawyer"}));
  CHECK(report.counts == std::map<std::string, std::uint64_t>{{"lawyer", 1}});
  CHECK(report.total_sentences == 1);
}

TEST_CASE("noun counts add up across articles") {
  const std::vector<ArticleRecord> two{
      make_article("a", "A", "A is a player."),
      make_article("b", "B", "B is a player. The player retired.")};
  const auto report = mine_noun_frequency(two, noun_set_tagger({"player"}));
  CHECK(report.counts.at("player") == 2);  // only first sentences count
  CHECK(mine_noun_frequency(std::vector<ArticleRecord>{}, heuristic_noun_tagger()) ==
        NounFrequencyReport{});
}

TEST_CASE("twenty-sentence fixture matches the hand tally") {
  const auto articles = read_corpus(fixture("first_sentences.tsv"));
  REQUIRE(articles.size() == 20);
  const auto expected = parse_noun_report(read_file(fixture("first_sentences_tally.tsv")));
  const auto tagger = fixture_tagger();
  const auto report = mine_noun_frequency(articles, tagger);
  CHECK(report == expected);
  CHECK(mine_noun_frequency(articles, tagger, 4) == expected);
  CorpusReader reader(fixture("first_sentences.tsv"));
  CHECK(mine_noun_frequency(reader, tagger) == expected);
  CHECK(parse_noun_report(serialize_noun_report(report)) == report);
}

TEST_CASE("heuristic tagger keeps content nouns and drops function words") {
  const auto tagger = heuristic_noun_tagger();
  CHECK(tagger("lawyer"));
  CHECK(tagger("footballer"));
  CHECK_FALSE(tagger("the"));
  CHECK_FALSE(tagger("is"));
  CHECK_FALSE(tagger("quickly"));
  CHECK_FALSE(tagger("playing"));
  CHECK_FALSE(tagger("1944"));
}

TEST_CASE("frequent nouns are ordered by count then word") {
  NounFrequencyReport r;
  r.counts = {{"b", 12}, {"a", 12}, {"c", 30}, {"d", 9}};
  const auto got = frequent_nouns(r, 10);
  REQUIRE(got.size() == 3);
  CHECK(got[0].first == "c");
  CHECK(got[1].first == "a");
  CHECK(got[2].first == "b");
}

TEST_CASE("seed expansion on orthogonal toy vectors") {
  const auto t = table_of({{"a", {1, 0}}, {"b", {1, 0}}, {"c", {0, 1}}});
  const std::vector<std::string> seeds{"a"};
  const auto got = expand_seeds(seeds, {"b", "c"}, t, 2);
  REQUIRE(got.size() == 1);
  REQUIRE(got[0].neighbors.size() == 2);
  CHECK(got[0].neighbors[0].label == "b");
  CHECK(got[0].neighbors[0].score == doctest::Approx(1.0));
  CHECK(got[0].neighbors[1].label == "c");
  CHECK(got[0].neighbors[1].score == doctest::Approx(0.0));
  CHECK(expand_seeds(seeds, {"b", "c"}, t, 10)[0].neighbors.size() == 2);
  const std::vector<std::string> missing{"zz"};
  CHECK_THROWS_AS(expand_seeds(missing, {"b"}, t, 2), MissingSeedError);
}

TEST_CASE("seed expansion matches an exhaustive cosine scan") {
  std::mt19937_64 rng(50);
  const auto t = semlink::testing::random_table(rng, 50, 6, "w");
  std::unordered_set<std::string> article_words;
  for (std::size_t i = 0; i < t.size(); i += 2) article_words.insert(t.label(i));
  const std::vector<std::string> seeds{"w0", "w7", "w13"};
  const auto got = expand_seeds(seeds, article_words, t, 5);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto seed_vec = t.lookup(seeds[s])->values;
    std::vector<std::pair<double, std::string>> scan;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.label(i) == seeds[s] || !article_words.count(t.label(i))) continue;
      scan.emplace_back(-cosine(seed_vec, t.row(i)), t.label(i));
    }
    std::sort(scan.begin(), scan.end());
    REQUIRE(got[s].neighbors.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(got[s].neighbors[k].label == scan[k].second);
      CHECK(got[s].neighbors[k].score == doctest::Approx(-scan[k].first).epsilon(1e-12));
      if (k > 0) CHECK(got[s].neighbors[k].score <= got[s].neighbors[k - 1].score);
    }
  }
}

TEST_CASE("building a dictionary from curated lists") {
  const auto d = build_dictionary({}, "lawyer\n", "attorney\n", "", nullptr);
  CHECK(d.size() == 2);
  CHECK(d.contains("attorney"));
  const auto with_comments =
      build_dictionary({}, "# seeds\nLawyer\t# profession\nrugby league\n\n", "", "", nullptr);
  CHECK(with_comments.contains("lawyer"));
  CHECK(with_comments.contains("rugby_league"));
}

TEST_CASE("remap reproduces conchologist and rugby league") {
  const auto vectors = table_of({{"zoologist", {1, 0}}, {"rugby_league", {0, 1}}});
  DictionaryBuildInfo info;
  const auto d = build_dictionary({}, "zoologist\nrugby league\n", "conchologist\n",
                                  "conchologist\tzoologist\nrugby league\trugby_league\n",
                                  &vectors, {}, &info);
  CHECK(apply_remap(d, "conchologist") == "zoologist");
  CHECK(apply_remap(d, "rugby league") == "rugby_league");
  CHECK(apply_remap(d, "Rugby League") == "rugby_league");
  CHECK(apply_remap(d, "lawyer") == "lawyer");
  CHECK(info.implicit_remaps == std::vector<std::string>{"rugby league -> rugby_league"});
  for (const auto &[word, category] : d.words()) {
    CHECK(apply_remap(d, apply_remap(d, word)) == apply_remap(d, word));
  }
}

TEST_CASE("remap targets must resolve") {
  const auto vectors = table_of({{"zoologist", {1, 0}}});
  CHECK_NOTHROW(build_dictionary({}, "x\n", "", "conchologist\tzoologist\n", &vectors));
  CHECK_THROWS_AS(build_dictionary({}, "x\n", "", "conchologist\tmalacologist\n", &vectors),
                  RemapTargetError);
  CHECK_THROWS_AS(build_dictionary({}, "x\n", "", "x\tx\n", &vectors), RemapTargetError);
  CHECK_THROWS_AS(build_dictionary({}, "x\ny\nz\n", "", "x\ty\ny\tz\n", nullptr),
                  RemapTargetError);
}

TEST_CASE("malformed curated lines report their line number") {
  try {
    build_dictionary({}, "lawyer\n", "", "ok\tlawyer\nbroken\n", nullptr);
    FAIL("expected FormatError");
  } catch (const FormatError &e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("dictionary build is deterministic and serialisation round-trips") {
  const auto vectors = table_of({{"zoologist", {1, 0}}});
  const auto build = [&] {
    return build_dictionary({}, "zoologist\nlawyer\tprofession/subject\nparis\tgeospatial\n",
                            "conchologist\n", "conchologist\tzoologist\n", &vectors);
  };
  const auto a = build();
  const auto b = build();
  CHECK(serialize_words(a) == serialize_words(b));
  CHECK(serialize_remap(a) == serialize_remap(b));
  CHECK(parse_dictionary(serialize_words(a), serialize_remap(a)) == a);
  semlink::testing::TempDir dir("dict");
  save_dictionary(a, dir.file("w.txt"), dir.file("r.tsv"));
  CHECK(load_dictionary(dir.file("w.txt"), dir.file("r.tsv")) == a);
}

TEST_CASE("category names") {
  CHECK(parse_category("profession/subject") == TypeCategory::kProfession);
  CHECK(parse_category("geospatial") == TypeCategory::kGeospatial);
  CHECK_FALSE(parse_category("color"));
  CHECK(category_name(TypeCategory::kIdeology) == "ideology");
  CHECK(parse_category("ideology/religion") == TypeCategory::kIdeology);
}
