#ifndef SEMLINK_DICTIONARY_H_
#define SEMLINK_DICTIONARY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semlink/corpus.h"
#include "semlink/embedding_table.h"
#include "semlink/similarity.h"

namespace semlink {

// Hallmark categories used while curating type words.
enum class TypeCategory {
  kNone,
  kProfession,  // profession/subject
  kTitle,
  kIndustry,  // industry/genre
  kGeospatial,
  kIdeology,  // ideology/religion
  kMisc,
};

std::string_view category_name(TypeCategory category);
std::optional<TypeCategory> parse_category(std::string_view name);

// A flat list of fine-grained type words plus a remap table for words that
// have no usable embedding. Words and remap keys are stored in canonical
// phrase form (lowercase, '_'-joined).
class SemanticTypeDictionary {
 public:
  void add_word(const std::string &word, TypeCategory category = TypeCategory::kNone);
  void add_remap(const std::string &from, const std::string &to);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  const std::map<std::string, TypeCategory, std::less<>> &words() const {
    return words_;
  }
  const std::map<std::string, std::string, std::less<>> &remap() const {
    return remap_;
  }

  bool operator==(const SemanticTypeDictionary &) const = default;

 private:
  std::map<std::string, TypeCategory, std::less<>> words_;
  std::map<std::string, std::string, std::less<>> remap_;
};

// remap[w] if present, otherwise w, after canonicalising w. Chains are not
// followed.
std::string apply_remap(const SemanticTypeDictionary &dict,
                        std::string_view word);

// Decides whether a lowercase token is a noun.
using NounTagger = std::function<bool(std::string_view token)>;

// Rule-based fallback: alphabetic tokens of length >= 3 that are not on a
// function-word/verb stoplist and do not carry adverb or verb suffixes.
NounTagger heuristic_noun_tagger();

// Tagger that accepts exactly the given tokens.
NounTagger noun_set_tagger(std::unordered_set<std::string> nouns);

struct NounFrequencyReport {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total_sentences = 0;

  void merge(const NounFrequencyReport &other);
  bool operator==(const NounFrequencyReport &) const = default;
};

// Counts noun tokens of every article's first sentence. `workers` > 1 shards
// the articles and merges the partial counts.
NounFrequencyReport mine_noun_frequency(std::span<const ArticleRecord> corpus,
                                        const NounTagger &tagger,
                                        std::size_t workers = 1);
NounFrequencyReport mine_noun_frequency(CorpusReader &corpus,
                                        const NounTagger &tagger);

// Nouns with count >= threshold, by descending count then word.
std::vector<std::pair<std::string, std::uint64_t>> frequent_nouns(
    const NounFrequencyReport &report, std::uint64_t threshold = 10);

std::string serialize_noun_report(const NounFrequencyReport &report);
NounFrequencyReport parse_noun_report(std::string_view text);

struct SeedExpansion {
  std::string seed;
  std::vector<Neighbor> neighbors;  // descending similarity, at most k
};

// For each seed, the k most cosine-similar embedding labels that occur in
// `article_words`, excluding the seed itself. Throws MissingSeedError.
std::vector<SeedExpansion> expand_seeds(
    std::span<const std::string> seeds,
    const std::unordered_set<std::string> &article_words,
    const EmbeddingTable &embeddings, std::size_t k = 100);

// Every token that appears anywhere in the corpus.
std::unordered_set<std::string> collect_article_words(CorpusReader &corpus);

struct DictionaryBuildOptions {
  std::uint64_t frequency_threshold = 10;
};

// Non-fatal findings from build_dictionary.
struct DictionaryBuildInfo {
  std::vector<std::string> seeds_not_frequent;
  std::vector<std::string> unused_remap_keys;  // keys that are not dictionary words
  std::vector<std::string> implicit_remaps;    // entries that only normalise a phrase
};

// Merges curated seeds and accepted expansions into a dictionary and
// validates the remap table. The curated inputs are file contents:
// one word (optionally "\t<category>") per line, '#' starts a comment;
// remap lines are "<from>\t<to>". Remap targets must be dictionary words or
// labels of `word_vectors` (when given); self-maps and chains are rejected
// with RemapTargetError. Malformed lines raise FormatError.
SemanticTypeDictionary build_dictionary(
    const NounFrequencyReport &frequent, std::string_view curated_seeds,
    std::string_view curated_extensions, std::string_view remap_table,
    const EmbeddingTable *word_vectors, const DictionaryBuildOptions &options = {},
    DictionaryBuildInfo *info = nullptr);

// Same, reading the three curated files from disk.
SemanticTypeDictionary build_dictionary_from_files(
    const NounFrequencyReport &frequent, const std::string &seeds_path,
    const std::string &extensions_path, const std::string &remap_path,
    const EmbeddingTable *word_vectors, const DictionaryBuildOptions &options = {},
    DictionaryBuildInfo *info = nullptr);

std::string serialize_words(const SemanticTypeDictionary &dict);
std::string serialize_remap(const SemanticTypeDictionary &dict);

// Parses serialized word and remap files without embedding validation.
SemanticTypeDictionary parse_dictionary(std::string_view words_text,
                                        std::string_view remap_text);
SemanticTypeDictionary load_dictionary(const std::string &words_path,
                                       const std::string &remap_path);
void save_dictionary(const SemanticTypeDictionary &dict,
                     const std::string &words_path,
                     const std::string &remap_path);

}  // namespace semlink

#endif  // SEMLINK_DICTIONARY_H_
