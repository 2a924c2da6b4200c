#ifndef SEMLINK_TYPE_EXTRACTION_H_
#define SEMLINK_TYPE_EXTRACTION_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semlink/corpus.h"
#include "semlink/dictionary.h"

namespace semlink {

// Type words extracted for one entity, in first-occurrence order.
struct EntityTypeAssignment {
  std::string entity_id;
  std::vector<std::string> type_words;

  bool operator==(const EntityTypeAssignment &) const = default;
};

using AssignmentMap = std::map<std::string, EntityTypeAssignment, std::less<>>;

// Token trie over dictionary phrases for greedy longest matching.
class PhraseTrie {
 public:
  explicit PhraseTrie(const SemanticTypeDictionary &dict);

  // Length in tokens of the longest dictionary phrase starting at `pos`, or
  // 0. On a match `word` receives the canonical dictionary entry.
  std::size_t longest_match(std::span<const std::string> tokens,
                            std::size_t pos, const std::string **word) const;

 private:
  struct Node {
    std::unordered_map<std::string, std::size_t> children;
    const std::string *word = nullptr;
  };
  std::vector<Node> nodes_;
};

// Scans the first sentence and then the body, collecting distinct dictionary
// matches (remapped) until `cap` words are found.
class TypeExtractor {
 public:
  TypeExtractor(const SemanticTypeDictionary &dict, std::size_t cap = 11);

  EntityTypeAssignment extract(const ArticleRecord &article) const;
  std::size_t cap() const { return cap_; }

 private:
  // Returns true once the cap is reached.
  bool scan(std::string_view text, std::vector<std::string> &out) const;

  const SemanticTypeDictionary &dict_;
  PhraseTrie trie_;
  std::size_t cap_;
};

EntityTypeAssignment extract_types(const ArticleRecord &article,
                                   const SemanticTypeDictionary &dict,
                                   std::size_t cap = 11);

// One assignment per article. Throws DuplicateEntityError on a repeated
// entity id. Articles are processed in bounded batches spread over `workers`
// threads; the result does not depend on the worker count.
AssignmentMap extract_corpus(std::span<const ArticleRecord> corpus,
                             const SemanticTypeDictionary &dict,
                             std::size_t cap = 11, std::size_t workers = 1);
AssignmentMap extract_corpus(CorpusReader &corpus,
                             const SemanticTypeDictionary &dict,
                             std::size_t cap = 11, std::size_t workers = 1);

// "<entity_id>\t<w1,w2,...>" per line, sorted by entity id.
std::string serialize_assignments(const AssignmentMap &assignments);
AssignmentMap parse_assignments(std::string_view text);
AssignmentMap load_assignments(const std::string &path);
void save_assignments(const AssignmentMap &assignments, const std::string &path);

}  // namespace semlink

#endif  // SEMLINK_TYPE_EXTRACTION_H_
