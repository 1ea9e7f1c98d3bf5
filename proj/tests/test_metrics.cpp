#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "sentinel/error.hpp"
#include "sentinel/metrics.hpp"

using namespace sentinel;

TEST_CASE("auc examples") {
  std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  std::vector<int> y{0, 0, 1, 1};
  CHECK(auc(s, y) == doctest::Approx(0.75));
  std::vector<double> tied{0.5, 0.5, 0.5, 0.5};
  CHECK(auc(tied, y) == doctest::Approx(0.5));
  std::vector<double> perfect{0, 0.1, 0.9, 1};
  CHECK(auc(perfect, y) == 1.0);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 1, 1, 1}), InvalidArgument);
}

TEST_CASE("auc equals the pairwise win probability") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_int_distribution<int> level(0, 9);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = size(rng);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = level(rng) / 9.0;  // coarse levels force ties
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(std::abs(auc(s, y) - oracle::pairwise_auc(s, y)) < 1e-9);
  }
}

TEST_CASE("precision recall f1") {
  std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  std::vector<int> y{1, 0, 1, 0};
  auto m = compute_metrics(s, y, 0.5);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == 0.5);
  auto none = compute_metrics(s, y, 0.95);
  CHECK(none.precision == 0);
  CHECK(none.f1 == 0);
  CHECK(f1_from(0, 0) == 0);
  CHECK(f1_from(1, 0.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("mean and standard error") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(mean_of(v) == 2.5);
  CHECK(standard_error(v) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(standard_error(std::vector<double>{3}) == 0);
}
