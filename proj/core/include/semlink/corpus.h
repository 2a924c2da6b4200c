#ifndef SEMLINK_CORPUS_H_
#define SEMLINK_CORPUS_H_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semlink {

// One entity's article, pre-stripped of markup.
struct ArticleRecord {
  std::string entity_id;
  std::string title;
  std::string first_sentence;
  std::string body;  // remainder of the article after the first sentence
};

// Builds a record from raw article text, splitting off the first sentence.
ArticleRecord make_article(std::string entity_id, std::string title,
                           std::string_view text);

// Parses one corpus line: "<entity_id>\t<title>\t<text>" or
// "<entity_id>\t<title>\t<first_sentence>\t<body>". Throws FormatError.
ArticleRecord parse_article_line(std::string_view line, std::size_t line_no);

// Streams articles from a line-delimited corpus file or from a directory of
// per-entity text files (entity id = file stem, visited in sorted order).
// Blank lines and lines starting with '#' are skipped.
class CorpusReader {
 public:
  explicit CorpusReader(const std::string &path);

  std::optional<ArticleRecord> next();

 private:
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::vector<std::filesystem::path> files_;
  std::size_t next_file_ = 0;
  bool directory_ = false;
};

// Reads every article into memory.
std::vector<ArticleRecord> read_corpus(const std::string &path);

std::string format_article_line(const ArticleRecord &article);

}  // namespace semlink

#endif  // SEMLINK_CORPUS_H_
