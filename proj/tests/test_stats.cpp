#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "sentinel/error.hpp"
#include "sentinel/stats.hpp"

using namespace sentinel;

TEST_CASE("quantile interpolates on n-1 spacing") {
  std::vector<double> v{4, 1, 3, 2};
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.0) == 1);
  CHECK(quantile(v, 1.0) == 4);
  CHECK_THROWS_AS(quantile(v, 1.5), InvalidArgument);
  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), InvalidArgument);
}

TEST_CASE("entropy of one value per bin is ln 10") {
  std::vector<double> v;
  for (int i = 0; i < 10; ++i) v.push_back(i + 0.5);
  CHECK(entropy(v) == doctest::Approx(std::log(10.0)));
  CHECK(entropy(std::vector<double>{3, 3, 3}) == 0.0);
}

TEST_CASE("degenerate samples") {
  auto one = summarize12(std::vector<double>{5});
  CHECK(one.mean == 5);
  CHECK(one.std == 0);
  CHECK(one.skewness == 0);
  CHECK(one.kurtosis == 0);
  CHECK(one.entropy == 0);

  auto flat = summarize12(std::vector<double>{2, 2, 2, 2, 2});
  CHECK(flat.range == 0);
  CHECK(flat.std == 0);
  CHECK(flat.kurtosis == 0);

  auto two = summarize12(std::vector<double>{1, 3});
  CHECK(two.std == doctest::Approx(std::sqrt(2.0)));
  CHECK(two.skewness == 0);

  CHECK_THROWS_AS(summarize12(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(summarize9(std::vector<double>{1, NAN}), InvalidArgument);
}

TEST_CASE("summaries match the two-pass oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 100);
  std::uniform_real_distribution<double> val(-1000, 1000);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(size(rng));
    for (auto& x : v) x = val(rng);
    if (t % 5 == 0)
      for (auto& x : v) x = std::round(x / 250.0) * 250.0 + 0.125;  // heavy ties
    auto s = summarize12(v);
    auto o = oracle::summarize(v);
    CHECK(s.range == o.range);
    CHECK(std::abs(s.q25 - o.q25) < 1e-9);
    CHECK(std::abs(s.q50 - o.q50) < 1e-9);
    CHECK(std::abs(s.q75 - o.q75) < 1e-9);
    CHECK(std::abs(s.iqr - o.iqr) < 1e-9);
    CHECK(std::abs(s.mean - o.mean) < 1e-9);
    CHECK(std::abs(s.std - o.std) < 1e-9);
    CHECK(std::abs(s.skewness - o.skewness) < 1e-9);
    CHECK(std::abs(s.kurtosis - o.kurtosis) < 1e-9);
    CHECK(std::abs(s.entropy - o.entropy) < 1e-9);

    auto s9 = summarize9(v);
    CHECK(s9.min == s.min);
    CHECK(s9.max == s.max);
    CHECK(s9.mean == s.mean);
    CHECK(s9.entropy == s.entropy);
  }
}

TEST_CASE("summaries are permutation invariant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0, 50);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(1 + t * 3);
    for (auto& x : v) x = nd(rng);
    auto a = summarize12(v);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(summarize12(v) == a);
    std::reverse(v.begin(), v.end());
    CHECK(summarize9(v) == summarize9(std::vector<double>(v.rbegin(), v.rend())));
  }
}

TEST_CASE("affine maps move location and scale only") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 40; ++t) {
    std::vector<double> x(20 + t), y;
    for (auto& v : x) v = u(rng);
    const double a = 0.5 + t * 0.25, b = u(rng);
    for (double v : x) y.push_back(a * v + b);
    auto sx = summarize12(x), sy = summarize12(y);
    CHECK(sy.mean == doctest::Approx(a * sx.mean + b));
    CHECK(sy.std == doctest::Approx(a * sx.std));
    CHECK(sy.skewness == doctest::Approx(sx.skewness).epsilon(1e-9));
    CHECK(sy.kurtosis == doctest::Approx(sx.kurtosis).epsilon(1e-9));
    CHECK(sy.entropy == doctest::Approx(sx.entropy));
  }
}

TEST_CASE("quantiles are monotone in q") {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> e(0.1);
  std::vector<double> v(37);
  for (auto& x : v) x = e(rng);
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    double q = quantile(v, i / 100.0);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("feature order of the summaries") {
  CHECK(Summary12::names()[0] == "range");
  CHECK(Summary12::names()[11] == "entropy");
  CHECK(Summary9::names()[5] == "max");
  Summary12 s;
  s.kurtosis = 7;
  CHECK(s.values()[10] == 7);
}
