#ifndef SEMLINK_EMBEDDING_TABLE_H_
#define SEMLINK_EMBEDDING_TABLE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semlink {

// A non-owning view of one row of an EmbeddingTable. Valid as long as the
// table is alive and not mutated.
struct VectorRef {
  std::string_view label;
  std::span<const float> values;
};

// Named dense float vectors of a fixed dimension, kept in insertion order.
// Rows are stored contiguously. Labels are raw bytes and must be unique.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  // Appends a row. Throws DimensionError on a length mismatch,
  // DuplicateLabelError on a repeated label and ValueError on a non-finite
  // component or an empty label.
  void add(std::string label, std::span<const float> values);

  // Reserves room for `rows` more entries.
  void reserve(std::size_t rows);

  std::optional<VectorRef> lookup(std::string_view label) const;
  bool contains(std::string_view label) const;

  const std::string &label(std::size_t row) const { return labels_[row]; }
  std::span<const float> row(std::size_t row) const {
    return {data_.data() + row * dim_, dim_};
  }
  VectorRef at(std::size_t row) const { return {labels_[row], this->row(row)}; }

  const std::vector<std::string> &labels() const { return labels_; }
  std::span<const float> data() const { return data_; }

  // Exact equality: same dim, same labels in the same order and bitwise
  // equal floats.
  bool operator==(const EmbeddingTable &other) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

// Free-function lookup; absent labels yield std::nullopt.
inline std::optional<VectorRef> lookup(const EmbeddingTable &table,
                                       std::string_view label) {
  return table.lookup(label);
}

// word2vec binary format:
//   "<count> <dim>\n" then count times: label bytes, 0x20, dim little-endian
//   IEEE-754 binary32 values, optionally followed by one 0x0A.
// Writing never emits the optional newline.
EmbeddingTable load_binary(const std::string &path);
EmbeddingTable parse_binary(std::string_view bytes);
void save_binary(const EmbeddingTable &table, const std::string &path);
std::string serialize_binary(const EmbeddingTable &table);

// Text format: one "<label> v1 ... vd" line per entry; the dimension is
// inferred from the first row. A leading word2vec-style "<count> <dim>"
// header is accepted when the following row has exactly dim values.
// Values are written with 9 significant digits.
EmbeddingTable load_text(const std::string &path);
EmbeddingTable parse_text(std::string_view text);
void save_text(const EmbeddingTable &table, const std::string &path);
std::string serialize_text(const EmbeddingTable &table);

// Loads by extension: ".txt"/".vec"/".tsv" are text, everything else binary.
EmbeddingTable load_any(const std::string &path);
void save_any(const EmbeddingTable &table, const std::string &path);

// Returns a copy with every non-zero row scaled to unit L2 norm.
EmbeddingTable normalized(const EmbeddingTable &table);

}  // namespace semlink

#endif  // SEMLINK_EMBEDDING_TABLE_H_
