#include "semlink/embedding_table.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "semlink/errors.h"
#include "semlink/file_util.h"

namespace semlink {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ValueError("embedding dimension must be positive");
}

void EmbeddingTable::reserve(std::size_t rows) {
  labels_.reserve(labels_.size() + rows);
  data_.reserve(data_.size() + rows * dim_);
  index_.reserve(index_.size() + rows);
}

void EmbeddingTable::add(std::string label, std::span<const float> values) {
  if (dim_ == 0) throw ValueError("table has no dimension");
  if (values.size() != dim_) {
    throw DimensionError("vector for '" + label + "' has " +
                         std::to_string(values.size()) +
                         " components, table dim is " + std::to_string(dim_));
  }
  if (label.empty()) throw ValueError("empty label");
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw ValueError("non-finite component in vector for '" + label + "'");
    }
  }
  auto [it, inserted] = index_.try_emplace(label, labels_.size());
  if (!inserted) throw DuplicateLabelError("duplicate label '" + label + "'");
  labels_.push_back(std::move(label));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<VectorRef> EmbeddingTable::lookup(std::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return at(it->second);
}

bool EmbeddingTable::contains(std::string_view label) const {
  return index_.find(label) != index_.end();
}

bool EmbeddingTable::operator==(const EmbeddingTable &other) const {
  if (dim_ != other.dim_ || labels_ != other.labels_) return false;
  // Bitwise comparison: -0.0 and 0.0 differ, NaN cannot occur.
  return data_.size() == other.data_.size() &&
         std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(float)) == 0;
}

namespace {

std::uint32_t to_little_endian(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap32(bits);
  } else {
    return bits;
  }
}

bool parse_size(std::string_view text, std::size_t &out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_blank(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

float parse_float(std::string_view text, std::size_t line_no) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  float value = 0.0f;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": bad number '" +
                      std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ValueError("line " + std::to_string(line_no) +
                     ": non-finite value '" + std::string(text) + "'");
  }
  return value;
}

bool has_text_extension(const std::string &path) {
  for (const char *ext : {".txt", ".vec", ".tsv"}) {
    const std::size_t n = std::strlen(ext);
    if (path.size() >= n && path.compare(path.size() - n, n, ext) == 0) {
      return true;
    }
  }
  return false;
}

}  // namespace

EmbeddingTable parse_binary(std::string_view bytes) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) throw FormatError("missing header line");
  const std::string_view header = bytes.substr(0, eol);
  const std::size_t space = header.find(' ');
  std::size_t count = 0, dim = 0;
  if (space == std::string_view::npos ||
      !parse_size(header.substr(0, space), count) ||
      !parse_size(header.substr(space + 1), dim)) {
    throw FormatError("malformed header '" + std::string(header) + "'");
  }
  if (dim == 0) throw FormatError("header declares zero dimension");

  EmbeddingTable table(dim);
  const std::size_t record_bytes = dim * sizeof(float);
  std::size_t pos = eol + 1;
  table.reserve(std::min(count, (bytes.size() - pos) / (record_bytes + 2)));
  std::vector<float> values(dim);
  for (std::size_t entry = 0; entry < count; ++entry) {
    const std::size_t sep = bytes.find(' ', pos);
    if (sep == std::string_view::npos) {
      throw TruncatedError("entry " + std::to_string(entry) + " of " +
                           std::to_string(count) + ": missing label");
    }
    const std::string_view label = bytes.substr(pos, sep - pos);
    if (label.empty() || label.find('\n') != std::string_view::npos) {
      throw FormatError("entry " + std::to_string(entry) + ": bad label");
    }
    pos = sep + 1;
    if (bytes.size() - pos < record_bytes) {
      throw TruncatedError("entry " + std::to_string(entry) + " ('" +
                           std::string(label) + "'): truncated vector");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, bytes.data() + pos + i * sizeof(float), sizeof bits);
      values[i] = std::bit_cast<float>(to_little_endian(bits));
    }
    pos += record_bytes;
    if (pos < bytes.size() && bytes[pos] == '\n') ++pos;
    table.add(std::string(label), values);
  }
  if (pos != bytes.size()) {
    throw FormatError(std::to_string(bytes.size() - pos) +
                      " trailing bytes after " + std::to_string(count) +
                      " entries");
  }
  return table;
}

EmbeddingTable load_binary(const std::string &path) {
  return parse_binary(read_file(path));
}

std::string serialize_binary(const EmbeddingTable &table) {
  std::string out = std::to_string(table.size()) + " " +
                    std::to_string(table.dim()) + "\n";
  std::size_t total = out.size();
  for (const auto &label : table.labels()) total += label.size() + 1;
  total += table.data().size() * sizeof(float);
  out.reserve(total);
  for (std::size_t r = 0; r < table.size(); ++r) {
    out += table.label(r);
    out += ' ';
    for (float v : table.row(r)) {
      const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(v));
      out.append(reinterpret_cast<const char *>(&bits), sizeof bits);
    }
  }
  return out;
}

void save_binary(const EmbeddingTable &table, const std::string &path) {
  write_file(path, serialize_binary(table));
}

EmbeddingTable parse_text(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (split_blank(line).empty()) continue;
    lines.emplace_back(line_no, line);
  }
  if (lines.empty()) throw FormatError("empty text embedding file");

  std::size_t first = 0;
  std::size_t declared_count = 0, declared_dim = 0;
  bool has_header = false;
  {
    auto fields = split_blank(lines[0].second);
    if (fields.size() == 2 && parse_size(fields[0], declared_count) &&
        parse_size(fields[1], declared_dim) && declared_dim > 0) {
      if (lines.size() == 1) {
        has_header = declared_count == 0;
      } else {
        has_header = split_blank(lines[1].second).size() == declared_dim + 1;
      }
    }
  }
  if (has_header) first = 1;

  std::size_t dim = declared_dim;
  if (!has_header) dim = split_blank(lines[0].second).size() - 1;
  if (dim == 0) {
    throw FormatError("line " + std::to_string(lines[0].first) +
                      ": no vector values");
  }
  EmbeddingTable table(dim);
  table.reserve(lines.size() - first);
  std::vector<float> values(dim);
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto [no, line] = lines[i];
    auto fields = split_blank(line);
    if (fields.size() != dim + 1) {
      throw FormatError("line " + std::to_string(no) + ": expected " +
                        std::to_string(dim) + " values, found " +
                        std::to_string(fields.size() - 1));
    }
    for (std::size_t j = 0; j < dim; ++j) values[j] = parse_float(fields[j + 1], no);
    table.add(std::string(fields[0]), values);
  }
  if (has_header && declared_count != table.size()) {
    throw FormatError("header declares " + std::to_string(declared_count) +
                      " rows, found " + std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable load_text(const std::string &path) {
  return parse_text(read_file(path));
}

std::string serialize_text(const EmbeddingTable &table) {
  std::string out = std::to_string(table.size()) + " " +
                    std::to_string(table.dim()) + "\n";
  char buf[64];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out += table.label(r);
    for (float v : table.row(r)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                     std::chars_format::general, 9);
      out += ' ';
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

void save_text(const EmbeddingTable &table, const std::string &path) {
  write_file(path, serialize_text(table));
}

EmbeddingTable load_any(const std::string &path) {
  return has_text_extension(path) ? load_text(path) : load_binary(path);
}

void save_any(const EmbeddingTable &table, const std::string &path) {
  if (has_text_extension(path)) {
    save_text(table, path);
  } else {
    save_binary(table, path);
  }
}

EmbeddingTable normalized(const EmbeddingTable &table) {
  EmbeddingTable out(table.dim());
  out.reserve(table.size());
  std::vector<float> values(table.dim());
  for (std::size_t r = 0; r < table.size(); ++r) {
    auto row = table.row(r);
    double norm = 0.0;
    for (float v : row) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < row.size(); ++i) {
      values[i] = norm > 0.0 ? static_cast<float>(row[i] / norm) : row[i];
    }
    out.add(table.label(r), values);
  }
  return out;
}

}  // namespace semlink
