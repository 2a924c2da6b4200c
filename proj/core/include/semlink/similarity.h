#ifndef SEMLINK_SIMILARITY_H_
#define SEMLINK_SIMILARITY_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/embedding_table.h"

namespace semlink {

// u.v / (|u| |v|) accumulated in double; 0 when either vector is zero.
// The result is clamped to [-1, 1]. Throws DimensionError on mismatch.
double cosine(std::span<const float> u, std::span<const float> v);

double dot(std::span<const float> u, std::span<const float> v);
double l2_norm(std::span<const float> u);
double l2_distance(std::span<const float> u, std::span<const float> v);

struct Neighbor {
  std::string label;
  double score = 0.0;

  bool operator==(const Neighbor &) const = default;
};

// Exhaustive top-k scan by cosine against `query`. Rows rejected by `keep`
// are skipped. Results are sorted by descending score, ties broken by
// ascending label.
std::vector<Neighbor> top_k_cosine(
    const EmbeddingTable &table, std::span<const float> query, std::size_t k,
    const std::function<bool(std::string_view)> &keep = {});

}  // namespace semlink

#endif  // SEMLINK_SIMILARITY_H_
