#ifndef SEMLINK_LINKING_ORACLE_H_
#define SEMLINK_LINKING_ORACLE_H_

// Straightforward re-implementations of the linker's scores used as test
// oracles. Deliberately naive: explicit dense matrices and nested loops.

#include <limits>
#include <random>
#include <string>
#include <vector>

#include "semlink/linking.h"

namespace semlink::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix diag(const std::vector<double> &d) {
  Matrix m(d.size(), std::vector<double>(d.size(), 0.0));
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
  return m;
}

// x^T M y with a full matrix.
inline double bilinear(const std::vector<double> &x, const Matrix &m,
                       const std::vector<double> &y) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (std::size_t c = 0; c < y.size(); ++c) total += x[r] * m[r][c] * y[c];
  }
  return total;
}

inline double pair_term(const LinkingModel &model, const std::vector<double> &a,
                        const std::vector<double> &b, std::size_t n) {
  if (model.relations.empty()) {
    return bilinear(a, diag(model.pairwise), b) / static_cast<double>(n - 1);
  }
  double total = 0.0;
  const double w = 1.0 / static_cast<double>(model.relations.size());
  for (const auto &r : model.relations) total += w * bilinear(a, diag(r), b);
  return total;
}

inline double score(const PreparedDocument &doc, const LinkingModel &model,
                    const std::vector<std::size_t> &choice) {
  double total = 0.0;
  const std::size_t n = doc.mentions.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &m = doc.mentions[i];
    total += bilinear(m.vectors[choice[i]], diag(model.local), m.feature);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += pair_term(model, doc.mentions[i].vectors[choice[i]],
                         doc.mentions[j].vectors[choice[j]], n);
    }
  }
  return total;
}

struct Best {
  std::vector<std::size_t> choice;
  double score = -std::numeric_limits<double>::infinity();
  std::size_t visited = 0;
};

// Visits every assignment in odometer order.
inline Best enumerate(const PreparedDocument &doc, const LinkingModel &model) {
  Best best;
  const std::size_t n = doc.mentions.size();
  std::vector<std::size_t> choice(n, 0);
  while (true) {
    const double s = score(doc, model, choice);
    ++best.visited;
    if (s > best.score) {
      best.score = s;
      best.choice = choice;
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++choice[pos] < doc.mentions[pos].labels.size()) break;
      choice[pos] = 0;
      if (pos == 0) return best;
    }
    if (n == 0) return best;
  }
}

// Random prepared document with sorted labels and random features.
inline PreparedDocument random_document(std::mt19937_64 &rng, std::size_t mentions,
                                        std::size_t candidates, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PreparedDocument doc;
  doc.doc_id = "doc";
  doc.source_mentions = mentions;
  for (std::size_t i = 0; i < mentions; ++i) {
    PreparedMention m;
    m.source_index = i;
    for (std::size_t d = 0; d < dim; ++d) m.feature.push_back(normal(rng));
    for (std::size_t c = 0; c < candidates; ++c) {
      m.labels.push_back("m" + std::to_string(i) + "c" + std::to_string(c));
      std::vector<double> v(dim);
      for (auto &x : v) x = normal(rng);
      m.vectors.push_back(std::move(v));
    }
    m.gold = std::uniform_int_distribution<std::size_t>(0, candidates - 1)(rng);
    doc.mentions.push_back(std::move(m));
  }
  return doc;
}

inline LinkingModel random_model(std::mt19937_64 &rng, std::size_t dim, std::size_t relations) {
  std::normal_distribution<double> normal(0.0, 1.0);
  LinkingModel model = LinkingModel::identity(dim, relations);
  for (auto &x : model.local) x = normal(rng);
  for (auto &x : model.pairwise) x = normal(rng);
  for (auto &r : model.relations) {
    for (auto &x : r) x = normal(rng);
  }
  return model;
}

}  // namespace semlink::oracle

#endif  // SEMLINK_LINKING_ORACLE_H_
