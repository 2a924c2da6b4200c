#include "semlink/linking_io.h"

#include <charconv>
#include <json.hpp>

#include "semlink/errors.h"
#include "semlink/file_util.h"
#include "semlink/text.h"

namespace semlink {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view text, const std::string &where) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(where + ": bad number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto f : split(line, ' ')) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

}  // namespace

std::vector<std::string> context_window(const std::vector<std::string> &tokens,
                                        std::size_t start, std::size_t end,
                                        std::size_t window) {
  std::vector<std::string> out;
  const std::size_t lo = start > window ? start - window : 0;
  const std::size_t hi = std::min(tokens.size(), end + window);
  auto add = [&](std::size_t i) {
    for (auto &t : tokenize(tokens[i])) out.push_back(std::move(t));
  };
  for (std::size_t i = lo; i < start; ++i) add(i);
  for (std::size_t i = end; i < hi; ++i) add(i);
  return out;
}

std::vector<LinkingDocument> parse_linking_jsonl(std::string_view text,
                                                 std::size_t window) {
  std::vector<LinkingDocument> docs;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "corpus line " + std::to_string(line_no);
    try {
      const json record = json::parse(line);
      LinkingDocument doc;
      doc.doc_id = record.at("doc_id").get<std::string>();
      const auto tokens =
          record.value("tokens", std::vector<std::string>{});
      for (const auto &jm : record.at("mentions")) {
        Mention mention;
        mention.candidates = jm.at("candidates").get<std::vector<std::string>>();
        if (jm.contains("priors")) mention.priors = jm["priors"].get<std::vector<double>>();
        if (jm.contains("gold") && !jm["gold"].is_null()) {
          mention.gold = jm["gold"].get<std::string>();
        }
        if (jm.contains("context")) {
          for (const auto &t : jm["context"].get<std::vector<std::string>>()) {
            for (auto &tok : tokenize(t)) mention.context.push_back(std::move(tok));
          }
          mention.surface = jm.value("surface", std::string());
        } else {
          const auto start = jm.at("start").get<std::size_t>();
          const auto end = jm.at("end").get<std::size_t>();
          if (start >= end || end > tokens.size()) {
            throw FormatError(where + ": mention offsets out of range");
          }
          for (std::size_t i = start; i < end; ++i) {
            if (i > start) mention.surface += ' ';
            mention.surface += tokens[i];
          }
          mention.context = context_window(tokens, start, end, window);
        }
        doc.mentions.push_back(std::move(mention));
      }
      docs.push_back(std::move(doc));
    } catch (const json::exception &e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return docs;
}

std::string serialize_linking_jsonl(const std::vector<LinkingDocument> &docs) {
  std::string out;
  for (const auto &doc : docs) {
    json record;
    record["doc_id"] = doc.doc_id;
    record["mentions"] = json::array();
    for (const auto &m : doc.mentions) {
      json jm;
      jm["surface"] = m.surface;
      jm["context"] = m.context;
      jm["candidates"] = m.candidates;
      if (!m.priors.empty()) jm["priors"] = m.priors;
      if (m.gold) jm["gold"] = *m.gold;
      record["mentions"].push_back(std::move(jm));
    }
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<LinkingDocument> parse_linking_conll(std::string_view text,
                                                 std::size_t window) {
  struct Span {
    std::size_t start, end;
    Mention mention;
  };
  std::vector<LinkingDocument> docs;
  std::vector<std::string> tokens;
  std::vector<Span> spans;
  std::string doc_id;
  bool open = false;

  auto flush = [&] {
    if (!open) return;
    LinkingDocument doc;
    doc.doc_id = doc_id;
    for (auto &span : spans) {
      span.mention.context = context_window(tokens, span.start, span.end, window);
      doc.mentions.push_back(std::move(span.mention));
    }
    docs.push_back(std::move(doc));
    tokens.clear();
    spans.clear();
  };

  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const std::string where = "conll line " + std::to_string(line_no);
    if (line.starts_with("-DOCSTART-")) {
      flush();
      std::string_view id = trim(line.substr(10));
      if (id.size() >= 2 && id.front() == '(' && id.back() == ')') {
        id = id.substr(1, id.size() - 2);
      }
      doc_id = id.empty() ? "doc" + std::to_string(docs.size()) : std::string(id);
      open = true;
      continue;
    }
    if (!open) throw FormatError(where + ": token before -DOCSTART-");
    auto fields = split(line, '\t');
    tokens.emplace_back(fields[0]);
    if (fields.size() == 1) continue;
    if (fields[1] == "I") {
      if (spans.empty() || spans.back().end != tokens.size() - 1) {
        throw FormatError(where + ": I tag without an open mention");
      }
      spans.back().end = tokens.size();
      spans.back().mention.surface += " " + std::string(fields[0]);
      continue;
    }
    if (fields[1] != "B" || fields.size() != 4) {
      throw FormatError(where + ": expected '<token>\\tB\\t<gold>\\t<candidates>'");
    }
    Span span{tokens.size() - 1, tokens.size(), {}};
    span.mention.surface = std::string(fields[0]);
    const std::string_view gold = trim(fields[2]);
    if (!gold.empty() && gold != "--NME--") span.mention.gold = std::string(gold);
    bool has_priors = false;
    for (std::string_view cand : split(fields[3], '|')) {
      cand = trim(cand);
      if (cand.empty()) continue;
      const std::size_t colon = cand.rfind(':');
      if (colon != std::string_view::npos) {
        span.mention.candidates.emplace_back(cand.substr(0, colon));
        span.mention.priors.push_back(parse_double(cand.substr(colon + 1), where));
        has_priors = true;
      } else {
        span.mention.candidates.emplace_back(cand);
        span.mention.priors.push_back(0.0);
      }
    }
    if (!has_priors) span.mention.priors.clear();
    spans.push_back(std::move(span));
  }
  flush();
  return docs;
}

std::vector<LinkingDocument> load_linking_corpus(const std::string &path,
                                                 std::size_t window) {
  const std::string text = read_file(path);
  if (path.ends_with(".jsonl") || path.ends_with(".json")) {
    return parse_linking_jsonl(text, window);
  }
  return parse_linking_conll(text, window);
}

std::string serialize_model(const LinkingModel &model) {
  std::string out = std::to_string(model.dim) + " " +
                    std::to_string(model.relation_count()) + " " +
                    (model.weighting == RelationWeighting::kSoftmax ? "softmax" : "uniform") +
                    "\n";
  auto row = [&](const char *name, const std::vector<double> &values) {
    out += name;
    for (double v : values) out += " " + format_double(v);
    out += '\n';
  };
  row("local", model.local);
  row("pairwise", model.pairwise);
  for (const auto &r : model.relations) row("relation", r);
  return out;
}

LinkingModel parse_model(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  if (lines.empty()) throw FormatError("empty model file");
  const auto header = fields_of(lines[0]);
  if (header.size() < 2 || header.size() > 3) {
    throw FormatError("model header must be '<dim> <K> [uniform|softmax]'");
  }
  LinkingModel model;
  const std::size_t dim = static_cast<std::size_t>(parse_double(header[0], "model header"));
  const std::size_t k = static_cast<std::size_t>(parse_double(header[1], "model header"));
  model.dim = dim;
  if (header.size() == 3) {
    if (header[2] == "softmax") {
      model.weighting = RelationWeighting::kSoftmax;
    } else if (header[2] != "uniform") {
      throw FormatError("unknown relation weighting '" + std::string(header[2]) + "'");
    }
  }
  if (lines.size() != 3 + k) {
    throw FormatError("model file has " + std::to_string(lines.size()) +
                      " lines, expected " + std::to_string(3 + k));
  }
  auto row = [&](std::size_t index, std::string_view name) {
    const auto fields = fields_of(lines[index]);
    const std::string where = "model line " + std::to_string(index + 1);
    if (fields.empty() || fields[0] != name || fields.size() != dim + 1) {
      throw FormatError(where + ": expected '" + std::string(name) + "' and " +
                        std::to_string(dim) + " values");
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      values.push_back(parse_double(fields[i], where));
    }
    return values;
  };
  model.local = row(1, "local");
  model.pairwise = row(2, "pairwise");
  for (std::size_t r = 0; r < k; ++r) model.relations.push_back(row(3 + r, "relation"));
  model.validate();
  return model;
}

void save_model(const LinkingModel &model, const std::string &path) {
  write_file(path, serialize_model(model));
}

LinkingModel load_model(const std::string &path) {
  return parse_model(read_file(path));
}

std::string serialize_predictions(const PredictionSet &predictions) {
  std::string out;
  for (const auto &[key, value] : predictions) {
    out += key.doc_id + "\t" + std::to_string(key.index) + "\t" +
           value.value_or("") + "\n";
  }
  return out;
}

PredictionSet parse_predictions(std::string_view text) {
  PredictionSet out;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    const std::string where = "predictions line " + std::to_string(line_no);
    if (fields.size() != 3) throw FormatError(where + ": expected 3 fields");
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(fields[1].data(),
                                     fields[1].data() + fields[1].size(), index);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw FormatError(where + ": bad mention index");
    }
    std::optional<std::string> value;
    if (!trim(fields[2]).empty()) value = std::string(trim(fields[2]));
    if (!out.emplace(MentionKey{std::string(fields[0]), index}, value).second) {
      throw FormatError(where + ": duplicate mention");
    }
  }
  return out;
}

}  // namespace semlink
