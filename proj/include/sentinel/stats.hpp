#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

// One attribute's values over a reply group. Order carries no meaning.
struct AttributeSample {
  std::string attribute_name;
  std::vector<double> values;
};

struct Summary12 {
  double range = 0, q25 = 0, q50 = 0, q75 = 0, iqr = 0, min = 0, max = 0, mean = 0, std = 0, skewness = 0,
         kurtosis = 0, entropy = 0;

  static constexpr std::size_t kSize = 12;
  static const std::array<std::string_view, kSize>& names();
  std::array<double, kSize> values() const;
  bool operator==(const Summary12&) const = default;
};

struct Summary9 {
  double range = 0, q25 = 0, q50 = 0, q75 = 0, iqr = 0, max = 0, min = 0, mean = 0, entropy = 0;

  static constexpr std::size_t kSize = 9;
  static const std::array<std::string_view, kSize>& names();
  std::array<double, kSize> values() const;
  bool operator==(const Summary9&) const = default;
};

inline constexpr std::size_t kEntropyBins = 10;

// Linear-interpolation quantile at h = q (n - 1) of the sorted sample.
// Throws InvalidArgument on an empty sample or q outside [0, 1].
double quantile(std::span<const double> sample, double q);
double quantile_sorted(std::span<const double> sorted, double q);

// Shannon entropy (natural log) of a 10-bin equal-width histogram over
// [min, max]; 0 for a constant sample.
double entropy(std::span<const double> sample);
double entropy_sorted(std::span<const double> sorted);

// Sample std uses the n - 1 divisor. Skewness is g1 = m3 / m2^1.5 and kurtosis
// the excess g2 = m4 / m2^2 - 3 over population moments; both are 0 for a
// constant sample, skewness for n < 3 and kurtosis for n < 4.
// All values must be finite; throws InvalidArgument otherwise or when empty.
Summary12 summarize12(std::span<const double> sample);
Summary9 summarize9(std::span<const double> sample);

inline Summary12 summarize12(const AttributeSample& s) { return summarize12(s.values); }
inline Summary9 summarize9(const AttributeSample& s) { return summarize9(s.values); }

}  // namespace sentinel
