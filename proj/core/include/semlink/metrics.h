#ifndef SEMLINK_METRICS_H_
#define SEMLINK_METRICS_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace semlink {

struct MentionKey {
  std::string doc_id;
  std::size_t index = 0;

  auto operator<=>(const MentionKey &) const = default;
};

// Predicted entity per mention; std::nullopt is an abstention.
using PredictionSet = std::map<MentionKey, std::optional<std::string>>;
// Gold entity per in-KB mention.
using GoldSet = std::map<MentionKey, std::string>;

struct DocCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::map<std::string, DocCounts> per_doc;
};

// Micro-averaged precision, recall and F1 over pooled link counts. A wrong
// link is both a false positive and a false negative; an abstention is a
// false negative. Precision is 0 when nothing is predicted. Throws
// AlignmentError when the two sets do not cover the same mentions.
EvalReport micro_f1(const PredictionSet &predictions, const GoldSet &gold);

struct MultiRunSummary {
  std::vector<double> run_scores;
  double mean = 0.0;
  double stddev = 0.0;          // sample standard deviation (n - 1)
  double ci95_halfwidth = 0.0;  // t_{0.975, n-1} * s / sqrt(n)
  bool single_run = false;      // halfwidth forced to 0
};

// Mean and Student-t 95% confidence half-width. Throws ValueError on an
// empty list.
MultiRunSummary summarize_runs(std::span<const double> scores);

// Two-sided 95% Student-t critical value for `dof` degrees of freedom.
double student_t_975(std::size_t dof);

}  // namespace semlink

#endif  // SEMLINK_METRICS_H_
