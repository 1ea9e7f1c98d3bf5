#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "internal.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detail {

// Two-class SAMME over depth-1 trees.
void AdaBoostClassifier::fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) {
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("adaboost fit on empty sample");
  alphas_.clear();
  stumps_.clear();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(seed);
  TreeOptions opts;
  opts.max_depth = 1;
  for (std::size_t m = 0; m < hp.adaboost_rounds; ++m) {
    CartTree stump;
    stump.fit(x, y, w, opts, rng);
    double err = 0.0, total = 0.0;
    std::vector<char> wrong(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      int h = stump.predict(x.row(i)) > 0.5 ? 1 : 0;
      wrong[i] = h != y[i];
      total += w[i];
      if (wrong[i]) err += w[i];
    }
    err /= total;
    if (err <= 1e-10) {
      // A perfect stump dominates the vote; boosting cannot continue.
      alphas_.push_back(std::log((1.0 - 1e-10) / 1e-10));
      stumps_.push_back(std::move(stump));
      break;
    }
    if (err >= 0.5) {
      if (stumps_.empty()) {
        alphas_.push_back(1e-10);
        stumps_.push_back(std::move(stump));
      }
      break;
    }
    double alpha = std::log((1.0 - err) / err);
    alphas_.push_back(alpha);
    stumps_.push_back(std::move(stump));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
  }
}

double AdaBoostClassifier::score(std::span<const double> row) const {
  if (stumps_.empty()) throw InvalidArgument("adaboost is not fitted");
  double vote = 0.0, total = 0.0;
  for (std::size_t m = 0; m < stumps_.size(); ++m) {
    vote += alphas_[m] * (stumps_[m].predict(row) > 0.5 ? 1.0 : -1.0);
    total += alphas_[m];
  }
  return (vote / total + 1.0) / 2.0;
}

void AdaBoostClassifier::save(std::ostream& out) const {
  write_doubles(out, "alphas", alphas_);
  for (const auto& s : stumps_) s.save(out);
}

void AdaBoostClassifier::load(std::istream& in) {
  alphas_ = read_doubles(in, "alphas");
  if (alphas_.empty()) throw DataError("adaboost artifact has no stumps");
  stumps_.assign(alphas_.size(), CartTree{});
  for (auto& s : stumps_) s.load(in);
}

}  // namespace sentinel::detail
