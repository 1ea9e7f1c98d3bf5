#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "internal.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detail {

void NaiveBayesClassifier::fit(const Matrix& x, std::span<const int> y, std::uint64_t, const Hyperparameters& hp) {
  const std::size_t n = x.rows(), p = x.cols();
  double count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    mean_[c].assign(p, 0.0);
    var_[c].assign(p, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    int c = y[i] == 1 ? 1 : 0;
    count[c] += 1;
    for (std::size_t j = 0; j < p; ++j) mean_[c][j] += x(i, j);
  }
  if (count[0] == 0 || count[1] == 0) throw InvalidArgument("naive bayes needs both classes");
  for (int c = 0; c < 2; ++c)
    for (auto& m : mean_[c]) m /= count[c];
  for (std::size_t i = 0; i < n; ++i) {
    int c = y[i] == 1 ? 1 : 0;
    for (std::size_t j = 0; j < p; ++j) {
      double d = x(i, j) - mean_[c][j];
      var_[c][j] += d * d;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (auto& v : var_[c]) v = std::max(v / count[c], hp.naive_bayes_var_floor);
    log_prior_[c] = std::log(count[c] / static_cast<double>(n));
  }
}

double NaiveBayesClassifier::score(std::span<const double> row) const {
  if (row.size() != mean_[0].size()) throw InvalidArgument("naive bayes column count mismatch");
  double ll[2];
  for (int c = 0; c < 2; ++c) {
    double s = log_prior_[c];
    for (std::size_t j = 0; j < row.size(); ++j) {
      double d = row[j] - mean_[c][j];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + d * d / var_[c][j]);
    }
    ll[c] = s;
  }
  double diff = ll[0] - ll[1];
  if (diff >= 0) {
    double e = std::exp(-diff);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(diff));
}

void NaiveBayesClassifier::save(std::ostream& out) const {
  write_doubles(out, "log_prior", std::span<const double>(log_prior_, 2));
  write_doubles(out, "mean0", mean_[0]);
  write_doubles(out, "var0", var_[0]);
  write_doubles(out, "mean1", mean_[1]);
  write_doubles(out, "var1", var_[1]);
}

void NaiveBayesClassifier::load(std::istream& in) {
  auto lp = read_doubles(in, "log_prior");
  if (lp.size() != 2) throw DataError("bad prior in model artifact");
  log_prior_[0] = lp[0];
  log_prior_[1] = lp[1];
  mean_[0] = read_doubles(in, "mean0");
  var_[0] = read_doubles(in, "var0");
  mean_[1] = read_doubles(in, "mean1");
  var_[1] = read_doubles(in, "var1");
  std::size_t p = mean_[0].size();
  if (var_[0].size() != p || mean_[1].size() != p || var_[1].size() != p)
    throw DataError("inconsistent naive bayes artifact");
}

}  // namespace sentinel::detail
