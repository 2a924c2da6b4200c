#include <doctest.h>

#include <random>

#include "semlink/errors.h"
#include "semlink/type_extraction.h"
#include "test_support.h"

using namespace semlink;
using Words = std::vector<std::string>;

namespace {

SemanticTypeDictionary dict_of(const Words &words,
                               const std::vector<std::pair<std::string, std::string>> &remap = {}) {
  SemanticTypeDictionary d;
  for (const auto &w : words) d.add_word(w);
  for (const auto &[from, to] : remap) d.add_remap(from, to);
  return d;
}

}  // namespace

TEST_CASE("Robert Mueller is typed by five dictionary words") {
  const auto dict = dict_of({"american", "lawyer", "government", "official", "director"});
  const auto article = make_article(
      "Robert_Mueller", "Robert Mueller",
      "Robert Mueller is an american lawyer and government official who served as "
      "director of the Federal Bureau of Investigation from 2001 to 2013.");
  CHECK(extract_types(article, dict).type_words ==
        Words{"american", "lawyer", "government", "official", "director"});
}

TEST_CASE("the cap keeps the first matches in occurrence order") {
  Words vocab;
  std::string text = "X is";
  for (int i = 0; i < 15; ++i) {
    vocab.push_back("w" + std::string(1, static_cast<char>('a' + i)));
    text += " " + vocab.back();
  }
  text += ".";
  const auto dict = dict_of(vocab);
  const auto article = make_article("x", "X", text);
  CHECK(extract_types(article, dict, 11).type_words == Words(vocab.begin(), vocab.begin() + 11));
  for (std::size_t cap : {1u, 6u, 11u}) {
    CHECK(extract_types(article, dict, cap).type_words.size() == cap);
  }
  CHECK_THROWS_AS(extract_types(article, dict, 0), ValueError);
  CHECK_THROWS_AS(extract_types(article, SemanticTypeDictionary{}, 11), ValueError);
}

TEST_CASE("repeated words are collected once") {
  const auto dict = dict_of({"lawyer"});
  CHECK(extract_types(make_article("x", "X", "the lawyer met a lawyer"), dict).type_words ==
        Words{"lawyer"});
  CHECK(extract_types(make_article("x", "X", ""), dict).type_words.empty());
}

TEST_CASE("phrases match longest first and remaps apply") {
  const auto dict = dict_of({"rugby_league", "rugby", "zoologist", "conchologist", "player"},
                            {{"conchologist", "zoologist"}});
  const auto article = make_article(
      "x", "X", "X is a rugby league player and conchologist. Later a rugby coach and zoologist.");
  CHECK(extract_types(article, dict).type_words ==
        Words{"rugby_league", "player", "zoologist", "rugby"});
}

TEST_CASE("first sentence is scanned before the body") {
  const auto dict = dict_of({"singer", "actor"});
  ArticleRecord article{"x", "X", "X is an actor.", "She started as a singer."};
  CHECK(extract_types(article, dict, 1).type_words == Words{"actor"});
  CHECK(extract_types(article, dict, 2).type_words == Words{"actor", "singer"});
}

TEST_CASE("corpus extraction composes and parallelises") {
  const auto dict = dict_of({"lawyer", "singer", "actor", "city", "river", "rugby_league"});
  const Words pool{"lawyer", "singer", "actor", "city", "river", "rugby league", "the", "a"};
  std::mt19937_64 rng(9);
  std::vector<ArticleRecord> articles;
  for (int i = 0; i < 1000; ++i) {
    std::string text = "E" + std::to_string(i) + " is";
    for (int k = 0; k < 8; ++k) text += " " + pool[rng() % pool.size()];
    text += ". " + pool[rng() % pool.size()] + " again.";
    articles.push_back(make_article("E" + std::to_string(i), "", text));
  }
  const auto sequential = extract_corpus(articles, dict, 3, 1);
  CHECK(extract_corpus(articles, dict, 3, 4) == sequential);
  REQUIRE(sequential.size() == articles.size());
  for (const auto &a : std::vector<ArticleRecord>(articles.begin(), articles.begin() + 3)) {
    CHECK(sequential.at(a.entity_id) == extract_types(a, dict, 3));
  }
  // Permuting the input does not change any assignment.
  auto shuffled = articles;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(extract_corpus(shuffled, dict, 3, 2) == sequential);
  CHECK(extract_corpus(std::span<const ArticleRecord>{}, dict, 3, 1).empty());
}

TEST_CASE("duplicate entity ids are rejected") {
  const auto dict = dict_of({"lawyer"});
  const std::vector<ArticleRecord> dup{make_article("a", "", "a lawyer."),
                                       make_article("a", "", "another lawyer.")};
  CHECK_THROWS_AS(extract_corpus(dup, dict, 11, 1), DuplicateEntityError);
}

TEST_CASE("assignment files round-trip") {
  AssignmentMap m;
  m["E1"] = {"E1", {"lawyer", "rugby_league"}};
  m["E2"] = {"E2", {}};
  CHECK(parse_assignments(serialize_assignments(m)) == m);
  semlink::testing::TempDir dir("types");
  save_assignments(m, dir.file("types.tsv"));
  CHECK(load_assignments(dir.file("types.tsv")) == m);
}
