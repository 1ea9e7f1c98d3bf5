#include "sentinel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sentinel/error.hpp"
#include "sentinel/simd.hpp"

namespace sentinel {

const std::array<std::string_view, Summary12::kSize>& Summary12::names() {
  static const std::array<std::string_view, kSize> n = {"range", "q25", "q50",  "q75",      "iqr",      "min",
                                                         "max",   "mean", "std", "skewness", "kurtosis", "entropy"};
  return n;
}

std::array<double, Summary12::kSize> Summary12::values() const {
  return {range, q25, q50, q75, iqr, min, max, mean, std, skewness, kurtosis, entropy};
}

const std::array<std::string_view, Summary9::kSize>& Summary9::names() {
  static const std::array<std::string_view, kSize> n = {"range", "q25", "q50", "q75",    "iqr",
                                                        "max",   "min", "mean", "entropy"};
  return n;
}

std::array<double, Summary9::kSize> Summary9::values() const {
  return {range, q25, q50, q75, iqr, max, min, mean, entropy};
}

namespace {

std::vector<double> sorted_copy(std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument("non-finite value in sample");
  std::sort(v.begin(), v.end());
  return v;
}

struct Core {
  double min, max, q25, q50, q75, mean, entropy;
  bool constant;
};

Core core_stats(std::span<const double> sorted) {
  Core c{};
  const std::size_t n = sorted.size();
  c.min = sorted.front();
  c.max = sorted.back();
  c.constant = c.min == c.max;
  c.q25 = quantile_sorted(sorted, 0.25);
  c.q50 = quantile_sorted(sorted, 0.50);
  c.q75 = quantile_sorted(sorted, 0.75);
  if (c.constant) {
    c.mean = c.min;
  } else {
    c.mean = simd::active().sum_f64(sorted.data(), n) / static_cast<double>(n);
    c.mean = std::clamp(c.mean, c.min, c.max);
  }
  c.entropy = entropy_sorted(sorted);
  return c;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> sample, double q) {
  auto v = sorted_copy(sample);
  return quantile_sorted(v, q);
}

double entropy_sorted(std::span<const double> sorted) {
  if (sorted.empty()) throw InvalidArgument("empty sample");
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (lo == hi) return 0.0;
  std::array<std::size_t, kEntropyBins> counts{};
  const double width = hi - lo;
  for (double x : sorted) {
    auto bin = static_cast<std::size_t>((x - lo) / width * static_cast<double>(kEntropyBins));
    counts[std::min(bin, kEntropyBins - 1)]++;
  }
  const double n = static_cast<double>(sorted.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double entropy(std::span<const double> sample) {
  auto v = sorted_copy(sample);
  return entropy_sorted(v);
}

Summary12 summarize12(std::span<const double> sample) {
  const auto v = sorted_copy(sample);
  const Core c = core_stats(v);
  const std::size_t n = v.size();

  Summary12 s;
  s.min = c.min;
  s.max = c.max;
  s.range = c.max - c.min;
  s.q25 = c.q25;
  s.q50 = c.q50;
  s.q75 = c.q75;
  s.iqr = c.q75 - c.q25;
  s.mean = c.mean;
  s.entropy = c.entropy;
  if (c.constant || n < 2) return s;

  double sums[3];
  simd::active().central_moments_f64(v.data(), n, c.mean, sums);
  const double nn = static_cast<double>(n);
  s.std = std::sqrt(sums[0] / (nn - 1.0));
  const double m2 = sums[0] / nn;
  if (m2 > 0.0) {
    if (n >= 3) s.skewness = (sums[1] / nn) / std::pow(m2, 1.5);
    if (n >= 4) s.kurtosis = (sums[2] / nn) / (m2 * m2) - 3.0;
  }
  return s;
}

Summary9 summarize9(std::span<const double> sample) {
  const auto v = sorted_copy(sample);
  const Core c = core_stats(v);
  Summary9 s;
  s.range = c.max - c.min;
  s.q25 = c.q25;
  s.q50 = c.q50;
  s.q75 = c.q75;
  s.iqr = c.q75 - c.q25;
  s.max = c.max;
  s.min = c.min;
  s.mean = c.mean;
  s.entropy = c.entropy;
  return s;
}

}  // namespace sentinel
