#include "semlink/type_extraction.h"

#include <algorithm>
#include <thread>

#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/text.h"

namespace semlink {

PhraseTrie::PhraseTrie(const SemanticTypeDictionary &dict) : nodes_(1) {
  for (const auto &[word, category] : dict.words()) {
    std::size_t node = 0;
    for (const auto &token : phrase_tokens(word)) {
      auto it = nodes_[node].children.find(token);
      if (it == nodes_[node].children.end()) {
        nodes_.emplace_back();
        it = nodes_[node].children.emplace(token, nodes_.size() - 1).first;
      }
      node = it->second;
    }
    if (node != 0) nodes_[node].word = &word;
  }
}

std::size_t PhraseTrie::longest_match(std::span<const std::string> tokens,
                                      std::size_t pos,
                                      const std::string **word) const {
  std::size_t node = 0, best = 0;
  for (std::size_t i = pos; i < tokens.size(); ++i) {
    auto it = nodes_[node].children.find(tokens[i]);
    if (it == nodes_[node].children.end()) break;
    node = it->second;
    if (nodes_[node].word != nullptr) {
      best = i - pos + 1;
      *word = nodes_[node].word;
    }
  }
  return best;
}

TypeExtractor::TypeExtractor(const SemanticTypeDictionary &dict,
                             std::size_t cap)
    : dict_(dict), trie_(dict), cap_(cap) {
  if (cap == 0) throw ValueError("type cap must be at least 1");
  if (dict.empty()) throw ValueError("type dictionary is empty");
}

bool TypeExtractor::scan(std::string_view text,
                         std::vector<std::string> &out) const {
  const std::vector<std::string> tokens = tokenize(text);
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    if (out.size() >= cap_) return true;
    const std::string *word = nullptr;
    const std::size_t length = trie_.longest_match(tokens, pos, &word);
    if (length == 0) {
      ++pos;
      continue;
    }
    pos += length;
    std::string mapped = apply_remap(dict_, *word);
    if (std::find(out.begin(), out.end(), mapped) == out.end()) {
      out.push_back(std::move(mapped));
    }
  }
  return out.size() >= cap_;
}

EntityTypeAssignment TypeExtractor::extract(const ArticleRecord &article) const {
  EntityTypeAssignment assignment;
  assignment.entity_id = article.entity_id;
  if (!scan(article.first_sentence, assignment.type_words)) {
    scan(article.body, assignment.type_words);
  }
  return assignment;
}

EntityTypeAssignment extract_types(const ArticleRecord &article,
                                   const SemanticTypeDictionary &dict,
                                   std::size_t cap) {
  return TypeExtractor(dict, cap).extract(article);
}

namespace {

constexpr std::size_t kBatchSize = 1024;

void extract_batch(const TypeExtractor &extractor,
                   std::span<const ArticleRecord> batch, std::size_t workers,
                   AssignmentMap &out) {
  std::vector<EntityTypeAssignment> results(batch.size());
  workers = std::max<std::size_t>(1, std::min(workers, batch.size()));
  auto run = [&](std::size_t shard) {
    for (std::size_t i = shard; i < batch.size(); i += workers) {
      results[i] = extractor.extract(batch[i]);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  for (auto &result : results) {
    std::string id = result.entity_id;
    auto [it, inserted] = out.try_emplace(std::move(id), std::move(result));
    if (!inserted) {
      throw DuplicateEntityError("duplicate entity id '" + it->first + "'");
    }
  }
}

}  // namespace

AssignmentMap extract_corpus(std::span<const ArticleRecord> corpus,
                             const SemanticTypeDictionary &dict,
                             std::size_t cap, std::size_t workers) {
  AssignmentMap out;
  if (corpus.empty()) return out;
  const TypeExtractor extractor(dict, cap);
  for (std::size_t start = 0; start < corpus.size(); start += kBatchSize) {
    const std::size_t n = std::min(kBatchSize, corpus.size() - start);
    extract_batch(extractor, corpus.subspan(start, n), workers, out);
  }
  return out;
}

AssignmentMap extract_corpus(CorpusReader &corpus,
                             const SemanticTypeDictionary &dict,
                             std::size_t cap, std::size_t workers) {
  AssignmentMap out;
  const TypeExtractor extractor(dict, cap);
  std::vector<ArticleRecord> batch;
  batch.reserve(kBatchSize);
  while (auto article = corpus.next()) {
    batch.push_back(std::move(*article));
    if (batch.size() == kBatchSize) {
      extract_batch(extractor, batch, workers, out);
      batch.clear();
    }
  }
  if (!batch.empty()) extract_batch(extractor, batch, workers, out);
  return out;
}

std::string serialize_assignments(const AssignmentMap &assignments) {
  std::string out;
  for (const auto &[id, assignment] : assignments) {
    out += id;
    out += '\t';
    for (std::size_t i = 0; i < assignment.type_words.size(); ++i) {
      if (i > 0) out += ',';
      out += assignment.type_words[i];
    }
    out += '\n';
  }
  return out;
}

AssignmentMap parse_assignments(std::string_view text) {
  AssignmentMap out;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty()) {
      throw FormatError("types line " + std::to_string(line_no) +
                        ": expected '<entity_id>\\t<w1,w2,...>'");
    }
    EntityTypeAssignment assignment;
    assignment.entity_id = std::string(trim(fields[0]));
    if (!trim(fields[1]).empty()) {
      for (std::string_view word : split(trim(fields[1]), ',')) {
        word = trim(word);
        if (word.empty()) {
          throw FormatError("types line " + std::to_string(line_no) +
                            ": empty type word");
        }
        assignment.type_words.emplace_back(word);
      }
    }
    std::string id = assignment.entity_id;
    if (!out.try_emplace(std::move(id), std::move(assignment)).second) {
      throw DuplicateEntityError("types line " + std::to_string(line_no) +
                                 ": duplicate entity id");
    }
  }
  return out;
}

AssignmentMap load_assignments(const std::string &path) {
  return parse_assignments(read_file(path));
}

void save_assignments(const AssignmentMap &assignments,
                      const std::string &path) {
  write_file(path, serialize_assignments(assignments));
}

}  // namespace semlink
