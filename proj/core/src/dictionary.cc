#include "semlink/dictionary.h"

#include <algorithm>
#include <array>
#include <thread>

#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/text.h"

namespace semlink {

namespace {

struct CategoryName {
  TypeCategory category;
  std::string_view name;
  std::string_view alias;
};

constexpr std::array<CategoryName, 6> kCategoryNames = {{
    {TypeCategory::kProfession, "profession", "profession/subject"},
    {TypeCategory::kTitle, "title", "title"},
    {TypeCategory::kIndustry, "industry", "industry/genre"},
    {TypeCategory::kGeospatial, "geospatial", "geospatial"},
    {TypeCategory::kIdeology, "ideology", "ideology/religion"},
    {TypeCategory::kMisc, "misc", "miscellaneous"},
}};

// Function words and frequent verbs that open encyclopedia first sentences.
const std::unordered_set<std::string_view> &stoplist() {
  static const std::unordered_set<std::string_view> words = {
      "a", "an", "the", "and", "or", "but", "nor", "of", "in", "on", "at",
      "to", "for", "from", "by", "with", "without", "as", "into", "onto",
      "upon", "about", "above", "below", "after", "before", "during", "since",
      "until", "between", "among", "through", "over", "under", "within",
      "is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
      "had", "having", "do", "does", "did", "will", "would", "shall", "should",
      "can", "could", "may", "might", "must", "he", "she", "it", "they", "we",
      "you", "i", "him", "her", "them", "us", "his", "hers", "its", "their",
      "our", "your", "my", "this", "that", "these", "those", "who", "whom",
      "whose", "which", "what", "where", "when", "why", "how", "not", "no",
      "also", "known", "born", "died", "served", "serves", "became", "become",
      "founded", "located", "based", "such", "other", "some", "all", "any",
      "each", "both", "either", "neither", "one", "two", "three", "first",
      "second", "third", "many", "most", "more", "very", "than", "then",
      "there", "here", "if", "so", "because", "while", "although", "though",
      "currently", "formerly", "former", "best", "well", "same", "own",
  };
  return words;
}

bool is_alpha_token(std::string_view token) {
  return std::all_of(token.begin(), token.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || static_cast<unsigned char>(c) >= 0x80;
  });
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Drops a trailing '#' comment and surrounding whitespace.
std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return trim(line);
}

struct ParsedWord {
  std::string word;
  TypeCategory category = TypeCategory::kNone;
};

std::vector<ParsedWord> parse_word_list(std::string_view text,
                                        std::string_view what) {
  std::vector<ParsedWord> out;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    const auto where = std::string(what) + " line " + std::to_string(line_no);
    if (fields.size() > 2) throw FormatError(where + ": too many fields");
    ParsedWord parsed;
    parsed.word = normalize_phrase(fields[0]);
    if (parsed.word.empty()) throw FormatError(where + ": no word");
    if (fields.size() == 2) {
      auto category = parse_category(trim(fields[1]));
      if (!category) {
        throw FormatError(where + ": unknown category '" +
                          std::string(trim(fields[1])) + "'");
      }
      parsed.category = *category;
    }
    out.push_back(std::move(parsed));
  }
  return out;
}

struct RemapLine {
  std::size_t line_no;
  std::string raw_from;
  std::string raw_to;
};

std::vector<RemapLine> parse_remap_lines(std::string_view text) {
  std::vector<RemapLine> out;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() ||
        trim(fields[1]).empty()) {
      throw FormatError("remap line " + std::to_string(line_no) +
                        ": expected '<from>\\t<to>'");
    }
    out.push_back({line_no, to_lower(trim(fields[0])), to_lower(trim(fields[1]))});
  }
  return out;
}

// Applies remap lines to `dict`. `target_known` decides whether a target is
// resolvable; implicit (normalisation-only) entries are reported and dropped.
void install_remaps(SemanticTypeDictionary &dict,
                    const std::vector<RemapLine> &lines,
                    const std::function<bool(const std::string &)> &target_known,
                    std::vector<std::string> *implicit) {
  for (const auto &line : lines) {
    const std::string where = "remap line " + std::to_string(line.line_no);
    if (line.raw_from == line.raw_to) {
      throw RemapTargetError(where + ": '" + line.raw_from + "' maps to itself");
    }
    const std::string from = normalize_phrase(line.raw_from);
    const std::string to = normalize_phrase(line.raw_to);
    if (from.empty() || to.empty()) {
      throw FormatError(where + ": empty word after normalisation");
    }
    if (from == to) {
      if (implicit) implicit->push_back(line.raw_from + " -> " + to);
      continue;
    }
    if (!target_known(to)) {
      throw RemapTargetError(where + ": target '" + to +
                             "' is neither a dictionary word nor embedded");
    }
    if (dict.remap().count(from)) {
      throw FormatError(where + ": '" + from + "' remapped twice");
    }
    dict.add_remap(from, to);
  }
  for (const auto &[from, to] : dict.remap()) {
    if (dict.remap().count(to)) {
      throw RemapTargetError("remap chain '" + from + "' -> '" + to +
                             "' -> '" + dict.remap().at(to) +
                             "'; chains are not followed");
    }
  }
}

}  // namespace

std::string_view category_name(TypeCategory category) {
  for (const auto &entry : kCategoryNames) {
    if (entry.category == category) return entry.name;
  }
  return "";
}

std::optional<TypeCategory> parse_category(std::string_view name) {
  const std::string lowered = to_lower(name);
  for (const auto &entry : kCategoryNames) {
    if (lowered == entry.name || lowered == entry.alias) return entry.category;
  }
  return std::nullopt;
}

void SemanticTypeDictionary::add_word(const std::string &word,
                                      TypeCategory category) {
  const std::string canonical = normalize_phrase(word);
  if (canonical.empty()) throw ValueError("empty dictionary word");
  auto [it, inserted] = words_.try_emplace(canonical, category);
  if (!inserted && it->second == TypeCategory::kNone) it->second = category;
}

void SemanticTypeDictionary::add_remap(const std::string &from,
                                       const std::string &to) {
  const std::string key = normalize_phrase(from);
  const std::string value = normalize_phrase(to);
  if (key.empty() || value.empty()) throw ValueError("empty remap word");
  if (key == value) {
    throw RemapTargetError("'" + key + "' maps to itself");
  }
  remap_[key] = value;
}

bool SemanticTypeDictionary::contains(std::string_view word) const {
  return words_.find(word) != words_.end();
}

std::string apply_remap(const SemanticTypeDictionary &dict,
                        std::string_view word) {
  std::string canonical = normalize_phrase(word);
  auto it = dict.remap().find(canonical);
  if (it != dict.remap().end()) return it->second;
  return canonical;
}

NounTagger heuristic_noun_tagger() {
  return [](std::string_view token) {
    if (token.size() < 3 || !is_alpha_token(token)) return false;
    if (stoplist().count(token)) return false;
    for (std::string_view suffix : {"ly", "ing", "ed"}) {
      if (ends_with(token, suffix)) return false;
    }
    return true;
  };
}

NounTagger noun_set_tagger(std::unordered_set<std::string> nouns) {
  return [nouns = std::move(nouns)](std::string_view token) {
    return nouns.count(std::string(token)) > 0;
  };
}

void NounFrequencyReport::merge(const NounFrequencyReport &other) {
  for (const auto &[noun, count] : other.counts) counts[noun] += count;
  total_sentences += other.total_sentences;
}

namespace {

void count_sentence(const ArticleRecord &article, const NounTagger &tagger,
                    NounFrequencyReport &report) {
  if (article.first_sentence.empty()) return;
  ++report.total_sentences;
  for (const auto &token : tokenize(article.first_sentence)) {
    if (tagger(token)) ++report.counts[token];
  }
}

}  // namespace

NounFrequencyReport mine_noun_frequency(std::span<const ArticleRecord> corpus,
                                        const NounTagger &tagger,
                                        std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, corpus.size()));
  std::vector<NounFrequencyReport> partial(workers);
  auto run = [&](std::size_t shard) {
    for (std::size_t i = shard; i < corpus.size(); i += workers) {
      count_sentence(corpus[i], tagger, partial[shard]);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  NounFrequencyReport report;
  for (const auto &part : partial) report.merge(part);
  return report;
}

NounFrequencyReport mine_noun_frequency(CorpusReader &corpus,
                                        const NounTagger &tagger) {
  NounFrequencyReport report;
  while (auto article = corpus.next()) count_sentence(*article, tagger, report);
  return report;
}

std::vector<std::pair<std::string, std::uint64_t>> frequent_nouns(
    const NounFrequencyReport &report, std::uint64_t threshold) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto &[noun, count] : report.counts) {
    if (count >= threshold) out.emplace_back(noun, count);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  return out;
}

std::string serialize_noun_report(const NounFrequencyReport &report) {
  std::string out = "#sentences\t" + std::to_string(report.total_sentences) + "\n";
  for (const auto &[noun, count] : report.counts) {
    out += noun + "\t" + std::to_string(count) + "\n";
  }
  return out;
}

NounFrequencyReport parse_noun_report(std::string_view text) {
  NounFrequencyReport report;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw FormatError("noun report line " + std::to_string(line_no) +
                        ": expected '<noun>\\t<count>'");
    }
    std::uint64_t count = 0;
    try {
      count = std::stoull(std::string(fields[1]));
    } catch (const std::exception &) {
      throw FormatError("noun report line " + std::to_string(line_no) +
                        ": bad count");
    }
    if (fields[0] == "#sentences") {
      report.total_sentences = count;
    } else {
      if (count == 0) {
        throw FormatError("noun report line " + std::to_string(line_no) +
                          ": zero count");
      }
      report.counts[std::string(fields[0])] = count;
    }
  }
  return report;
}

std::vector<SeedExpansion> expand_seeds(
    std::span<const std::string> seeds,
    const std::unordered_set<std::string> &article_words,
    const EmbeddingTable &embeddings, std::size_t k) {
  if (k == 0) throw ValueError("k must be at least 1");
  std::vector<SeedExpansion> out;
  out.reserve(seeds.size());
  for (const auto &seed : seeds) {
    auto query = embeddings.lookup(seed);
    if (!query) throw MissingSeedError("seed '" + seed + "' has no embedding");
    SeedExpansion expansion;
    expansion.seed = seed;
    expansion.neighbors = top_k_cosine(
        embeddings, query->values, k, [&](std::string_view label) {
          return label != seed && article_words.count(std::string(label)) > 0;
        });
    out.push_back(std::move(expansion));
  }
  return out;
}

std::unordered_set<std::string> collect_article_words(CorpusReader &corpus) {
  std::unordered_set<std::string> words;
  while (auto article = corpus.next()) {
    for (auto &token : tokenize(article->first_sentence)) words.insert(std::move(token));
    for (auto &token : tokenize(article->body)) words.insert(std::move(token));
  }
  return words;
}

SemanticTypeDictionary build_dictionary(
    const NounFrequencyReport &frequent, std::string_view curated_seeds,
    std::string_view curated_extensions, std::string_view remap_table,
    const EmbeddingTable *word_vectors, const DictionaryBuildOptions &options,
    DictionaryBuildInfo *info) {
  SemanticTypeDictionary dict;
  DictionaryBuildInfo local;
  for (const auto &seed : parse_word_list(curated_seeds, "seeds")) {
    dict.add_word(seed.word, seed.category);
    auto it = frequent.counts.find(seed.word);
    if (it == frequent.counts.end() || it->second < options.frequency_threshold) {
      local.seeds_not_frequent.push_back(seed.word);
    }
  }
  for (const auto &ext : parse_word_list(curated_extensions, "extensions")) {
    dict.add_word(ext.word, ext.category);
  }
  install_remaps(
      dict, parse_remap_lines(remap_table),
      [&](const std::string &target) {
        return dict.contains(target) ||
               (word_vectors != nullptr && word_vectors->contains(target));
      },
      &local.implicit_remaps);
  for (const auto &[from, to] : dict.remap()) {
    if (!dict.contains(from)) local.unused_remap_keys.push_back(from);
  }
  if (info) *info = std::move(local);
  return dict;
}

SemanticTypeDictionary build_dictionary_from_files(
    const NounFrequencyReport &frequent, const std::string &seeds_path,
    const std::string &extensions_path, const std::string &remap_path,
    const EmbeddingTable *word_vectors, const DictionaryBuildOptions &options,
    DictionaryBuildInfo *info) {
  const std::string extensions =
      extensions_path.empty() ? std::string() : read_file(extensions_path);
  const std::string remap =
      remap_path.empty() ? std::string() : read_file(remap_path);
  return build_dictionary(frequent, read_file(seeds_path), extensions, remap,
                          word_vectors, options, info);
}

std::string serialize_words(const SemanticTypeDictionary &dict) {
  std::string out = "# semantic type dictionary: " +
                    std::to_string(dict.size()) + " words\n";
  for (const auto &[word, category] : dict.words()) {
    out += word;
    if (category != TypeCategory::kNone) {
      out += '\t';
      out += category_name(category);
    }
    out += '\n';
  }
  return out;
}

std::string serialize_remap(const SemanticTypeDictionary &dict) {
  std::string out;
  for (const auto &[from, to] : dict.remap()) out += from + "\t" + to + "\n";
  return out;
}

SemanticTypeDictionary parse_dictionary(std::string_view words_text,
                                        std::string_view remap_text) {
  SemanticTypeDictionary dict;
  for (const auto &word : parse_word_list(words_text, "dictionary")) {
    dict.add_word(word.word, word.category);
  }
  install_remaps(dict, parse_remap_lines(remap_text),
                 [](const std::string &) { return true; }, nullptr);
  return dict;
}

SemanticTypeDictionary load_dictionary(const std::string &words_path,
                                       const std::string &remap_path) {
  return parse_dictionary(read_file(words_path),
                          remap_path.empty() ? std::string() : read_file(remap_path));
}

void save_dictionary(const SemanticTypeDictionary &dict,
                     const std::string &words_path,
                     const std::string &remap_path) {
  write_file(words_path, serialize_words(dict));
  write_file(remap_path, serialize_remap(dict));
}

}  // namespace semlink
