#include "semlink/corpus.h"

#include <algorithm>

#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/text.h"

namespace semlink {

ArticleRecord make_article(std::string entity_id, std::string title,
                           std::string_view text) {
  ArticleRecord article;
  article.entity_id = std::move(entity_id);
  article.title = std::move(title);
  const std::string_view first = first_sentence(trim(text));
  article.first_sentence = std::string(trim(first));
  article.body = std::string(trim(trim(text).substr(first.size())));
  return article;
}

ArticleRecord parse_article_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split(line, '\t');
  if (fields.size() != 3 && fields.size() != 4) {
    throw FormatError("corpus line " + std::to_string(line_no) +
                      ": expected 3 or 4 tab-separated fields, found " +
                      std::to_string(fields.size()));
  }
  if (trim(fields[0]).empty()) {
    throw FormatError("corpus line " + std::to_string(line_no) +
                      ": empty entity id");
  }
  if (fields.size() == 3) {
    return make_article(std::string(trim(fields[0])), std::string(fields[1]),
                        fields[2]);
  }
  ArticleRecord article;
  article.entity_id = std::string(trim(fields[0]));
  article.title = std::string(fields[1]);
  article.first_sentence = std::string(trim(fields[2]));
  article.body = std::string(trim(fields[3]));
  return article;
}

CorpusReader::CorpusReader(const std::string &path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    directory_ = true;
    for (const auto &entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files_.push_back(entry.path());
    }
    std::sort(files_.begin(), files_.end());
    return;
  }
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError("cannot open corpus " + path);
}

std::optional<ArticleRecord> CorpusReader::next() {
  if (directory_) {
    if (next_file_ == files_.size()) return std::nullopt;
    const auto &file = files_[next_file_++];
    const std::string stem = file.stem().string();
    return make_article(stem, stem, read_file(file.string()));
  }
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    return parse_article_line(line, line_no_);
  }
  return std::nullopt;
}

std::vector<ArticleRecord> read_corpus(const std::string &path) {
  CorpusReader reader(path);
  std::vector<ArticleRecord> articles;
  while (auto article = reader.next()) articles.push_back(std::move(*article));
  return articles;
}

std::string format_article_line(const ArticleRecord &article) {
  std::string line = article.entity_id + "\t" + article.title + "\t" +
                     article.first_sentence;
  if (!article.body.empty()) line += "\t" + article.body;
  return line;
}

}  // namespace semlink
