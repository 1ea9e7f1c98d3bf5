#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>

#include "internal.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detail {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

// Minimises sum(logloss) + lambda/2 * |w|^2 (intercept unpenalised) by damped
// Newton steps.
void LogisticRegressionClassifier::fit(const Matrix& x, std::span<const int> y, std::uint64_t,
                                       const Hyperparameters& hp) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.rows());
  const Eigen::Index p = static_cast<Eigen::Index>(x.cols());
  if (n == 0) throw InvalidArgument("logistic fit on empty sample");
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j + 1) = x(i, j);
    t(i) = y[i] == 1 ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, hp.logistic_lambda);
  penalty(0) = 0.0;
  auto objective = [&](const Eigen::VectorXd& beta) {
    Eigen::VectorXd z = a * beta;
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) f += softplus(z(i)) - t(i) * z(i);
    return f + 0.5 * (penalty.array() * beta.array().square()).sum();
  };
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  double f = objective(beta);
  iterations_ = 0;
  for (std::size_t it = 0; it < hp.logistic_max_iterations; ++it) {
    Eigen::VectorXd z = a * beta;
    Eigen::VectorXd prob(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(z(i));
      s(i) = prob(i) * (1.0 - prob(i));
    }
    Eigen::VectorXd grad = a.transpose() * (prob - t) + penalty.cwiseProduct(beta);
    iterations_ = it + 1;
    if (grad.lpNorm<Eigen::Infinity>() < hp.logistic_tolerance) break;
    Eigen::MatrixXd h = a.transpose() * s.asDiagonal() * a;
    h.diagonal() += penalty;
    // Tiny ridge on the intercept keeps the system solvable when one class
    // saturates.
    h(0, 0) += 1e-12;
    Eigen::VectorXd step = h.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd next = beta - step;
    double fn = objective(next);
    while (fn > f && scale > 1e-10) {
      scale *= 0.5;
      next = beta - scale * step;
      fn = objective(next);
    }
    double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = next;
    f = fn;
    if (change < hp.logistic_tolerance) break;
  }
  intercept_ = beta(0);
  coef_.assign(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j) coef_[j] = beta(j + 1);
}

double LogisticRegressionClassifier::score(std::span<const double> row) const {
  if (row.size() != coef_.size()) throw InvalidArgument("logistic model column count mismatch");
  double z = intercept_;
  for (std::size_t j = 0; j < coef_.size(); ++j) z += coef_[j] * row[j];
  return sigmoid(z);
}

void LogisticRegressionClassifier::save(std::ostream& out) const {
  double b[] = {intercept_};
  write_doubles(out, "intercept", b);
  write_doubles(out, "coef", coef_);
}

void LogisticRegressionClassifier::load(std::istream& in) {
  auto b = read_doubles(in, "intercept");
  if (b.size() != 1) throw DataError("bad intercept in model artifact");
  intercept_ = b[0];
  coef_ = read_doubles(in, "coef");
}

}  // namespace sentinel::detail
