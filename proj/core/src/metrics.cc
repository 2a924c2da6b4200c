#include "semlink/metrics.h"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <algorithm>

#include "semlink/errors.h"

namespace semlink {

namespace {

std::string describe(const MentionKey &key) {
  return key.doc_id + "#" + std::to_string(key.index);
}

}  // namespace

EvalReport micro_f1(const PredictionSet &predictions, const GoldSet &gold) {
  std::vector<std::string> offenders;
  for (const auto &[key, value] : predictions) {
    if (!gold.count(key)) offenders.push_back("unexpected " + describe(key));
  }
  for (const auto &[key, value] : gold) {
    if (!predictions.count(key)) offenders.push_back("missing " + describe(key));
  }
  if (!offenders.empty()) {
    std::string message = "prediction/gold mismatch on " +
                          std::to_string(offenders.size()) + " mentions:";
    for (std::size_t i = 0; i < offenders.size() && i < 20; ++i) {
      message += " " + offenders[i];
    }
    throw AlignmentError(message);
  }

  EvalReport report;
  for (const auto &[key, truth] : gold) {
    const auto &predicted = predictions.at(key);
    DocCounts &doc = report.per_doc[key.doc_id];
    if (!predicted) {
      ++doc.fn;
    } else if (*predicted == truth) {
      ++doc.tp;
    } else {
      ++doc.fp;
      ++doc.fn;
    }
  }
  for (const auto &[doc_id, counts] : report.per_doc) {
    report.tp += counts.tp;
    report.fp += counts.fp;
    report.fn += counts.fn;
  }
  const double tp = static_cast<double>(report.tp);
  if (report.tp + report.fp > 0) report.precision = tp / double(report.tp + report.fp);
  if (report.tp + report.fn > 0) report.recall = tp / double(report.tp + report.fn);
  const double pr = report.precision + report.recall;
  if (pr > 0.0) report.f1 = 2.0 * report.precision * report.recall / pr;
  return report;
}

double student_t_975(std::size_t dof) {
  if (dof == 0) throw ValueError("Student t needs at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

MultiRunSummary summarize_runs(std::span<const double> scores) {
  if (scores.empty()) throw ValueError("no run scores to summarize");
  MultiRunSummary summary;
  summary.run_scores.assign(scores.begin(), scores.end());
  const double n = static_cast<double>(scores.size());
  // Shifted summation keeps equal scores exact.
  const double shift = scores.front();
  double offset = 0.0;
  for (double s : scores) offset += s - shift;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  summary.mean = std::clamp(shift + offset / n, *lo, *hi);
  if (scores.size() == 1) {
    summary.single_run = true;
    return summary;
  }
  double squares = 0.0;
  for (double s : scores) squares += (s - summary.mean) * (s - summary.mean);
  summary.stddev = std::sqrt(squares / (n - 1.0));
  summary.ci95_halfwidth =
      student_t_975(scores.size() - 1) * summary.stddev / std::sqrt(n);
  return summary;
}

}  // namespace semlink
