#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/hash.hpp"
#include "sentinel/sweeps.hpp"

using namespace sentinel;

namespace {

// Column 0 carries the label with noise; the others are noise.
void noisy(std::size_t n, std::size_t pos, std::uint64_t seed, Matrix& x, std::vector<int>& y,
           std::size_t cols = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0, 1);
  x = Matrix(n, cols);
  y.assign(n, 0);
  for (std::size_t i = 0; i < pos; ++i) y[i] = 1;
  std::shuffle(y.begin(), y.end(), rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols; ++j) x(i, j) = nd(rng) + (j == 0 && y[i] ? 2.5 : 0.0);
}

EvalOptions fast() {
  EvalOptions o;
  o.hp.forest_trees = 20;
  return o;
}

}  // namespace

TEST_CASE("stratified folds partition the rows with level class counts") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 20 + rng() % 200;
    std::size_t k = 2 + rng() % 9;
    std::vector<int> y(n, 0);
    std::size_t pos = k + rng() % (n - 2 * k);
    for (std::size_t i = 0; i < pos; ++i) y[i] = 1;
    std::shuffle(y.begin(), y.end(), rng);
    auto folds = stratified_folds(y, k, t);
    REQUIRE(folds.size() == k);
    std::vector<int> seen(n, 0);
    for (const auto& f : folds) {
      CHECK(f.train.size() + f.test.size() == n);
      std::set<std::size_t> tr(f.train.begin(), f.train.end());
      std::size_t p = 0;
      for (std::size_t i : f.test) {
        CHECK_FALSE(tr.contains(i));
        seen[i]++;
        p += y[i];
      }
      const double expect_p = double(pos) / k, expect_n = double(n - pos) / k;
      CHECK(std::abs(double(p) - expect_p) < 1.0 + 1e-9);
      CHECK(std::abs(double(f.test.size() - p) - expect_n) < 1.0 + 1e-9);
    }
    for (int s : seen) CHECK(s == 1);
  }
  std::vector<int> tiny{1, 0, 0, 0};
  CHECK_THROWS_AS(stratified_folds(tiny, 2, 0), InvalidArgument);
}

TEST_CASE("oversampling touches training rows only") {
  std::vector<int> y(100, 0);
  for (int i = 0; i < 13; ++i) y[i * 7] = 1;
  auto folds = stratified_folds(y, 5, 3);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto test_before = folds[f].test;
    auto over = oversample_train(y, folds[f].train, f);
    CHECK(folds[f].test == test_before);
    std::set<std::size_t> train(folds[f].train.begin(), folds[f].train.end());
    std::size_t p = 0;
    for (std::size_t i : over) {
      CHECK(train.contains(i));
      p += y[i];
    }
    CHECK(2 * p == over.size());
    // every original row kept
    for (std::size_t i : folds[f].train) CHECK(std::count(over.begin(), over.end(), i) >= 1);
  }
  std::vector<std::size_t> balanced{0, 7, 1, 2};
  std::vector<int> yb{1, 0, 0, 0, 0, 0, 0, 1};
  CHECK(oversample_train(yb, balanced, 0) == balanced);
}

TEST_CASE("downsampled sets hold every positive and as many negatives") {
  std::vector<int> y(60, 0);
  for (int i = 0; i < 10; ++i) y[i * 6] = 1;
  auto sets = downsample_balanced(y, 4, 2);
  REQUIRE(sets.size() == 4);
  for (const auto& s : sets) {
    CHECK(s.size() == 20);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 20);
    std::size_t p = 0;
    for (std::size_t i : s) p += y[i];
    CHECK(p == 10);
  }
  CHECK(sets[0] != sets[1]);
  std::vector<int> more_pos{1, 1, 1, 0};
  CHECK_THROWS_AS(downsample_balanced(more_pos, 1, 0), InvalidArgument);
}

TEST_CASE("fold models are fitted on training rows only") {
  Matrix x;
  std::vector<int> y;
  noisy(80, 30, 5, x, y);
  // an outlier far outside the training range of every fold but its own
  x(0, 1) = 1e6;
  EvalOptions o = fast();
  o.folds = 4;
  std::vector<Fold> folds;
  auto oof = out_of_fold_scores(x, y, ModelKind::kLogisticRegression, 11, o, &folds);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    Matrix xt = x.select_rows(folds[f].train);
    std::vector<int> yt;
    for (std::size_t i : folds[f].train) yt.push_back(y[i]);
    auto m = train(ModelKind::kLogisticRegression, xt, yt, mix_seed(11, 0x200 + f), o.hp);
    CHECK(m.scaler() == fit_scaler(xt));
    auto s = m.predict_score(x.select_rows(folds[f].test));
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(oof[folds[f].test[i]] == s[i]);
  }
}

TEST_CASE("kfold report") {
  Matrix x;
  std::vector<int> y;
  noisy(120, 40, 6, x, y);
  auto r = kfold_cv(x, y, ModelKind::kRandomForest, 1, fast());
  CHECK(r.fold_metrics.size() == 10);
  CHECK(r.thresholds.size() == 1);
  CHECK(r.mean.auc > 0.8);
  auto again = kfold_cv(x, y, ModelKind::kRandomForest, 1, fast());
  CHECK(again.fold_metrics == r.fold_metrics);

  EvalOptions d = fast();
  d.sampling = Sampling::kDownsample;
  d.n_datasets = 3;
  auto rd = kfold_cv(x, y, ModelKind::kNaiveBayes, 1, d);
  CHECK(rd.datasets == 3);
  CHECK(rd.fold_metrics.size() == 30);
  CHECK(rd.thresholds.size() == 3);

  EvalOptions ov = fast();
  ov.sampling = Sampling::kOversample;
  auto ro = kfold_cv(x, y, ModelKind::kDecisionTree, 1, ov);
  CHECK(ro.fold_metrics.size() == 10);

  std::vector<double> f1;
  for (const auto& m : r.fold_metrics) f1.push_back(m.f1);
  CHECK(r.stderr_.f1 == doctest::Approx(standard_error(f1)));
  CHECK(r.mean.f1 == doctest::Approx(mean_of(f1)));
}

TEST_CASE("permutation importance") {
  Matrix x;
  std::vector<int> y;
  noisy(120, 50, 7, x, y, 4);
  for (std::size_t i = 0; i < x.rows(); ++i) x(i, 3) = 4.0;  // constant
  std::map<std::string, std::vector<std::size_t>> groups{
      {"signal", {0}}, {"noise", {1, 2}}, {"constant", {3}}};
  auto rep = permutation_importance(x, y, groups, ModelKind::kRandomForest, 3, fast(), 5);
  REQUIRE(rep.groups.size() == 3);
  CHECK(rep.groups[0].group == "signal");
  CHECK(rep.groups[0].median > 0.1);
  for (const auto& g : rep.groups) {
    CHECK(g.drops.size() == 5);
    if (g.group == "constant") {
      for (double d : g.drops) CHECK(d == 0.0);
    }
  }
  CHECK(rep.baseline_f1 == doctest::Approx(kfold_cv(x, y, ModelKind::kRandomForest, 3, fast()).mean.f1));

  // shuffling everything leaves chance-level ranking
  auto all = permutation_importance(x, y, {{"all", {0, 1, 2, 3}}}, ModelKind::kRandomForest, 3, fast(), 3);
  CHECK(all.groups[0].median > 0.15);

  CHECK_THROWS_AS(permutation_importance(x, y, {{"bad", {9}}}, ModelKind::kRandomForest, 3, fast(), 1),
                  InvalidArgument);
}

TEST_CASE("cross-campaign transfer") {
  Matrix base;
  std::vector<int> yb;
  noisy(60, 30, 8, base, yb);
  FeatureMatrix data;
  data.names = {"a", "b", "c"};
  // twin campaigns share the same relation; the third has it inverted; the last has one class only
  auto add = [&](const std::string& camp, bool invert) {
    for (std::size_t i = 0; i < base.rows(); ++i) {
      std::vector<double> row(base.row(i).begin(), base.row(i).end());
      data.append({camp + std::to_string(i), row, invert ? 1 - yb[i] : yb[i], camp, false});
    }
  };
  add("a", false);
  add("b", false);
  add("c", true);
  for (int i = 0; i < 12; ++i) data.append({"d" + std::to_string(i), {0.0, 0.0, 0.0}, 0, "d", false});
  auto rep = cross_campaign(data, ModelKind::kLogisticRegression, 4, fast());
  CHECK(rep.campaigns == std::vector<std::string>{"a", "b", "c"});
  CHECK(rep.excluded == std::vector<std::string>{"d"});
  CHECK(rep.f1[0][1] > 0.8);
  CHECK(rep.f1[1][0] > 0.8);
  CHECK(rep.f1[0][2] < 0.4);
  CHECK(rep.f1[0][0] > 0.7);
}

TEST_CASE("engagement correlation") {
  // every reply mirrors its post's counts
  std::vector<fixtures::PostSpec> specs;
  for (int p = 0; p < 12; ++p) {
    fixtures::PostSpec s{"p" + std::to_string(p), "t1", p * 10, {}};
    for (int r = 0; r < 3; ++r) s.replies.push_back({"n" + std::to_string(r), "x", p * 10 + r + 1});
    specs.push_back(s);
  }
  Corpus c0 = fixtures::build(specs);
  Corpus::Builder b;
  for (const auto& [id, a] : c0.accounts()) b.add_account(a);
  for (auto [id, p] : c0.posts()) {
    int k = std::stoi(id.substr(1));
    p.retweet_count = p.like_count = k;
    p.reply_count = 5;
    b.add_post(p);
  }
  for (auto r : c0.replies()) {
    int k = std::stoi(r.target_tweet_id.substr(1));
    r.retweet_count = r.like_count = k;
    r.reply_count = 1;
    b.add_reply(r);
  }
  Corpus c = std::move(b).build();
  std::vector<std::string> posts;
  for (const auto& [id, p] : c.posts()) posts.push_back(id);
  auto out = engagement_correlation(c, posts, 5, 1);
  REQUIRE(out.size() == 3);
  CHECK(out[0].mean_correlation == doctest::Approx(1.0));
  CHECK(out[1].mean_correlation == doctest::Approx(1.0));
  CHECK(out[2].degenerate);
  CHECK(out[2].mean_correlation == 0.0);

  std::vector<std::string> none{"missing"};
  CHECK_THROWS_AS(engagement_correlation(c, none, 5, 1), DataError);
}

TEST_CASE("pearson") {
  std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
  CHECK(pearson(a, b) == doctest::Approx(1));
  CHECK(pearson(a, c) == doctest::Approx(-1));
}

TEST_CASE("imbalance sweep shapes") {
  Matrix x;
  std::vector<int> y;
  noisy(400, 60, 9, x, y);
  std::vector<std::size_t> ratios{1, 2, 5};
  EvalOptions o = fast();
  o.folds = 3;
  auto rows = imbalance_sweep(x, y, ratios, ModelKind::kLogisticRegression, 2, o, 2);
  REQUIRE(rows.size() == 3);
  // positives are capped so the widest ratio still fits
  for (const auto& r : rows) {
    CHECK(r.positives == std::min<std::size_t>(60, 340 / 5));
    CHECK(r.negatives == r.value * r.positives);
    REQUIRE(r.report);
    CHECK(r.report->fold_metrics.size() == 6);
  }
}
