#include <cmath>

#include "sentinel/error.hpp"
#include "sentinel/models.hpp"

namespace sentinel {

Scaler fit_scaler(const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("cannot fit scaler on an empty matrix");
  const std::size_t n = x.rows(), p = x.cols();
  Scaler s;
  s.mean.assign(p, 0.0);
  s.std.assign(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) s.mean[c] += x(r, c);
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      double d = x(r, c) - s.mean[c];
      s.std[c] += d * d;
    }
  for (auto& v : s.std) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

void Scaler::transform_row(std::span<double> row) const {
  if (row.size() != mean.size()) throw InvalidArgument("scaler column count mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / std[c];
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& x) {
  if (x.cols() != scaler.mean.size()) throw InvalidArgument("scaler column count mismatch");
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) scaler.transform_row(out.row(r));
  return out;
}

}  // namespace sentinel
