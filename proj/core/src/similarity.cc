#include "semlink/similarity.h"

#include <algorithm>
#include <cmath>

#include "semlink/errors.h"

namespace semlink {

namespace {

void check_dims(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw DimensionError("dimension mismatch: " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
  }
}

// Orders by descending score then ascending label.
bool ranks_before(const Neighbor &a, const Neighbor &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.label < b.label;
}

}  // namespace

double dot(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sum += static_cast<double>(u[i]) * v[i];
  }
  return sum;
}

double l2_norm(std::span<const float> u) { return std::sqrt(dot(u, u)); }

double l2_distance(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = static_cast<double>(u[i]) - v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cosine(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i], b = v[i];
    uv += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::vector<Neighbor> top_k_cosine(
    const EmbeddingTable &table, std::span<const float> query, std::size_t k,
    const std::function<bool(std::string_view)> &keep) {
  if (query.size() != table.dim()) {
    throw DimensionError("query has " + std::to_string(query.size()) +
                         " components, table dim is " +
                         std::to_string(table.dim()));
  }
  if (k == 0) return {};
  // Bounded heap of the k best seen so far; the worst sits at the front.
  std::vector<Neighbor> heap;
  heap.reserve(k + 1);
  for (std::size_t r = 0; r < table.size(); ++r) {
    const std::string &label = table.label(r);
    if (keep && !keep(label)) continue;
    Neighbor candidate{label, cosine(query, table.row(r))};
    if (heap.size() < k) {
      heap.push_back(std::move(candidate));
      std::push_heap(heap.begin(), heap.end(), ranks_before);
    } else if (ranks_before(candidate, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), ranks_before);
      heap.back() = std::move(candidate);
      std::push_heap(heap.begin(), heap.end(), ranks_before);
    }
  }
  std::sort(heap.begin(), heap.end(), ranks_before);
  return heap;
}

}  // namespace semlink
