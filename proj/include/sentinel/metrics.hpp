#pragma once

#include <span>

namespace sentinel {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  bool operator==(const Metrics&) const = default;
};

// ROC area by the trapezoid rule; equal scores form one ROC step. Throws
// InvalidArgument unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

// 2PR/(P+R), or 0 when P+R = 0.
double f1_from(double precision, double recall);

// Precision, recall and F1 at `threshold` (score >= threshold is positive) plus
// AUC. Precision is 0 when nothing is predicted positive.
Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold);

double mean_of(std::span<const double> v);
// Sample standard deviation (n-1) over sqrt(n); 0 for fewer than two values.
double standard_error(std::span<const double> v);

}  // namespace sentinel
