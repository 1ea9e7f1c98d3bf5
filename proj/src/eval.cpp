#include "sentinel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sentinel/error.hpp"
#include "sentinel/hash.hpp"
#include "sentinel/parallel.hpp"

namespace sentinel {

std::string to_string(Sampling s) {
  switch (s) {
    case Sampling::kNone: return "none";
    case Sampling::kDownsample: return "downsample";
    case Sampling::kOversample: return "oversample";
  }
  return "none";
}

std::optional<Sampling> parse_sampling(std::string_view text) {
  if (text == "none") return Sampling::kNone;
  if (text == "downsample") return Sampling::kDownsample;
  if (text == "oversample") return Sampling::kOversample;
  return std::nullopt;
}

std::vector<Fold> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("need at least two folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k)
    throw InvalidArgument("class smaller than fold count (" + std::to_string(std::min(pos.size(), neg.size())) +
                          " < " + std::to_string(k) + ")");
  std::mt19937_64 rng(mix_seed(seed, 0x5f01d));
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> fold_of(y.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % k;
  // Negatives continue the deal where positives stopped so fold sizes stay level.
  for (std::size_t j = 0; j < neg.size(); ++j) fold_of[neg[j]] = (pos.size() + j) % k;
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
  return folds;
}

std::vector<std::size_t> oversample_train(std::span<const int> y, std::span<const std::size_t> train,
                                          std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i : train) (y[i] == 1 ? pos : neg).push_back(i);
  std::vector<std::size_t> out(train.begin(), train.end());
  if (pos.empty() || neg.empty() || pos.size() == neg.size()) return out;
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  std::size_t need = std::max(pos.size(), neg.size()) - minority.size();
  while (need >= minority.size()) {
    out.insert(out.end(), minority.begin(), minority.end());
    need -= minority.size();
  }
  std::vector<std::size_t> pool = minority;
  std::mt19937_64 rng(mix_seed(seed, 0x0e45));
  std::shuffle(pool.begin(), pool.end(), rng);
  out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
  return out;
}

std::vector<std::vector<std::size_t>> downsample_balanced(std::span<const int> y, std::size_t n_datasets,
                                                          std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (neg.size() < pos.size()) throw InvalidArgument("too few negatives to downsample");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    std::vector<std::size_t> pool = neg;
    std::mt19937_64 rng(mix_seed(seed, 0xd0 + d));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::size_t> rows = pos;
    rows.insert(rows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(pos.size()));
    std::sort(rows.begin(), rows.end());
    out.push_back(std::move(rows));
  }
  return out;
}

namespace {

std::vector<int> pick(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

// One CV run on one dataset, with the fold models kept for rescoring.
struct FittedRun {
  std::vector<std::size_t> rows;  // dataset rows in the caller's matrix
  std::vector<Fold> folds;        // indices into `rows`
  std::vector<TrainedModel> models;
  std::vector<ScoredSet> sets;
  double threshold = 0.5;
};

FittedRun fit_run(const Matrix& x, std::span<const int> y, std::vector<std::size_t> rows, ModelKind kind,
                  std::uint64_t seed, const EvalOptions& options, bool oversample) {
  FittedRun run;
  run.rows = std::move(rows);
  Matrix xd = x.select_rows(run.rows);
  auto yd = pick(y, run.rows);
  run.folds = stratified_folds(yd, options.folds, seed);
  run.models.resize(run.folds.size());
  run.sets.resize(run.folds.size());
  parallel_for(run.folds.size(), [&](std::size_t f) {
    std::vector<std::size_t> train = run.folds[f].train;
    if (oversample) train = oversample_train(yd, train, mix_seed(seed, 0x100 + f));
    run.models[f] = sentinel::train(kind, xd.select_rows(train), pick(yd, train), mix_seed(seed, 0x200 + f), options.hp);
    run.sets[f].scores = run.models[f].predict_score(xd.select_rows(run.folds[f].test));
    run.sets[f].labels = pick(yd, run.folds[f].test);
  });
  run.threshold = tune_threshold(run.sets);
  return run;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// The protocol kfold_cv reports on: one run, or one per balanced dataset.
std::vector<FittedRun> fit_protocol(const Matrix& x, std::span<const int> y, ModelKind kind, std::uint64_t seed,
                                    const EvalOptions& options) {
  std::vector<FittedRun> runs;
  if (options.sampling == Sampling::kDownsample) {
    auto sets = downsample_balanced(y, options.n_datasets, seed);
    for (std::size_t d = 0; d < sets.size(); ++d)
      runs.push_back(fit_run(x, y, std::move(sets[d]), kind, mix_seed(seed, 0x300 + d), options, false));
  } else {
    runs.push_back(fit_run(x, y, all_rows(y.size()), kind, seed, options, options.sampling == Sampling::kOversample));
  }
  return runs;
}

// Mean fold F1 of fitted runs rescored on `x`.
double rescored_f1(const std::vector<FittedRun>& runs, const Matrix& x, std::span<const int> y) {
  std::vector<double> f1;
  for (const auto& run : runs)
    for (std::size_t f = 0; f < run.folds.size(); ++f) {
      std::vector<std::size_t> test;
      for (std::size_t i : run.folds[f].test) test.push_back(run.rows[i]);
      auto scores = run.models[f].predict_score(x.select_rows(test));
      f1.push_back(compute_metrics(scores, pick(y, test), run.threshold).f1);
    }
  return mean_of(f1);
}

}  // namespace

void pool_metrics(EvalReport& r) {
  std::vector<double> p, rc, f, a;
  for (const auto& m : r.fold_metrics) {
    p.push_back(m.precision);
    rc.push_back(m.recall);
    f.push_back(m.f1);
    a.push_back(m.auc);
  }
  r.mean = {mean_of(p), mean_of(rc), mean_of(f), mean_of(a)};
  r.stderr_ = {standard_error(p), standard_error(rc), standard_error(f), standard_error(a)};
}

std::vector<double> out_of_fold_scores(const Matrix& x, std::span<const int> y, ModelKind kind, std::uint64_t seed,
                                       const EvalOptions& options, std::vector<Fold>* folds_out) {
  auto run = fit_run(x, y, all_rows(y.size()), kind, seed, options, false);
  std::vector<double> out(y.size());
  for (std::size_t f = 0; f < run.folds.size(); ++f)
    for (std::size_t i = 0; i < run.folds[f].test.size(); ++i) out[run.folds[f].test[i]] = run.sets[f].scores[i];
  if (folds_out) *folds_out = std::move(run.folds);
  return out;
}

EvalReport kfold_cv(const Matrix& x, std::span<const int> y, ModelKind kind, std::uint64_t seed,
                    const EvalOptions& options) {
  if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
  EvalReport r;
  r.kind = kind;
  r.seed = seed;
  r.sampling = options.sampling;
  r.folds = options.folds;
  r.rows = y.size();
  r.positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  auto runs = fit_protocol(x, y, kind, seed, options);
  r.datasets = runs.size();
  for (const auto& run : runs) {
    r.thresholds.push_back(run.threshold);
    for (const auto& set : run.sets) r.fold_metrics.push_back(compute_metrics(set.scores, set.labels, run.threshold));
  }
  pool_metrics(r);
  return r;
}

ImportanceReport permutation_importance(const Matrix& x, std::span<const int> y,
                                        const std::map<std::string, std::vector<std::size_t>>& groups,
                                        ModelKind kind, std::uint64_t seed, const EvalOptions& options,
                                        std::size_t repeats) {
  for (const auto& [name, cols] : groups) {
    if (cols.empty()) throw InvalidArgument("empty importance group: " + name);
    for (std::size_t c : cols)
      if (c >= x.cols()) throw InvalidArgument("unknown column in importance group: " + name);
  }
  ImportanceReport rep;
  rep.repeats = repeats;
  if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
  const auto runs = fit_protocol(x, y, kind, seed, options);
  rep.baseline_f1 = rescored_f1(runs, x, y);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> list(groups.begin(), groups.end());
  std::vector<double> drops(list.size() * repeats);
  parallel_for(drops.size(), [&](std::size_t task) {
    const auto& [name, cols] = list[task / repeats];
    std::size_t rep_i = task % repeats;
    std::vector<std::size_t> perm(x.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(seed ^ fnv1a64(name), rep_i));
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled = x;
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c : cols) shuffled(r, c) = x(perm[r], c);
    drops[task] = rep.baseline_f1 - rescored_f1(runs, shuffled, y);
  });
  for (std::size_t g = 0; g < list.size(); ++g) {
    GroupImportance gi;
    gi.group = list[g].first;
    gi.columns = list[g].second;
    gi.drops.assign(drops.begin() + static_cast<std::ptrdiff_t>(g * repeats),
                    drops.begin() + static_cast<std::ptrdiff_t>((g + 1) * repeats));
    std::vector<double> sorted = gi.drops;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    gi.median = n == 0 ? 0.0 : (n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0);
    rep.groups.push_back(std::move(gi));
  }
  std::stable_sort(rep.groups.begin(), rep.groups.end(),
                   [](const GroupImportance& a, const GroupImportance& b) { return a.median > b.median; });
  return rep;
}

CrossCampaignReport cross_campaign(const FeatureMatrix& data, ModelKind kind, std::uint64_t seed,
                                   const EvalOptions& options) {
  std::map<std::string, std::vector<std::size_t>> by_campaign;
  for (std::size_t i = 0; i < data.rows(); ++i)
    by_campaign[i < data.campaigns.size() ? data.campaigns[i] : std::string()].push_back(i);
  CrossCampaignReport rep;
  struct Fitted {
    std::vector<std::size_t> rows;
    TrainedModel model;
    double cv_f1 = 0.0;
  };
  std::vector<Fitted> fitted;
  for (const auto& [name, rows] : by_campaign) {
    auto y = pick(data.y, rows);
    std::size_t pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    std::size_t need = options.folds;
    if (pos < need || y.size() - pos < need || (options.sampling == Sampling::kDownsample && y.size() - pos < pos)) {
      rep.excluded.push_back(name);
      continue;
    }
    Matrix x = data.x.select_rows(rows);
    EvalReport cv = kfold_cv(x, y, kind, seed, options);
    double threshold = mean_of(cv.thresholds);
    std::vector<std::size_t> train_rows(rows.size());
    std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
    if (options.sampling == Sampling::kOversample) train_rows = oversample_train(y, train_rows, seed);
    if (options.sampling == Sampling::kDownsample) train_rows = downsample_balanced(y, 1, seed).front();
    TrainedModel m = train(kind, x.select_rows(train_rows), pick(y, train_rows), seed, options.hp, data.names);
    m.set_threshold(threshold);
    rep.campaigns.push_back(name);
    fitted.push_back({rows, std::move(m), cv.mean.f1});
  }
  const std::size_t n = fitted.size();
  rep.f1.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (r == c) {
        rep.f1[r][c] = fitted[r].cv_f1;
        continue;
      }
      auto y = pick(data.y, fitted[c].rows);
      auto scores = fitted[r].model.predict_score(data.x.select_rows(fitted[c].rows));
      rep.f1[r][c] = compute_metrics(scores, y, fitted[r].model.threshold()).f1;
    }
  return rep;
}

double pearson(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  if (a.size() != b.size()) throw InvalidArgument("correlation inputs differ in length");
  double ma = mean_of(a), mb = mean_of(b), sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<EngagementPair> engagement_correlation(const Corpus& corpus, std::span<const std::string> posts,
                                                   std::size_t samples, std::uint64_t seed) {
  struct Field {
    const char* tweet;
    const char* reply;
    double (*post_value)(const Post&);
    double (*reply_value)(const ReplyRecord&);
  };
  static const Field fields[] = {
      {"retweet_count", "retweet_count", [](const Post& p) { return static_cast<double>(p.retweet_count); },
       [](const ReplyRecord& r) { return static_cast<double>(r.retweet_count); }},
      {"like_count", "like_count", [](const Post& p) { return static_cast<double>(p.like_count); },
       [](const ReplyRecord& r) { return static_cast<double>(r.like_count); }},
      {"reply_count", "reply_count", [](const Post& p) { return static_cast<double>(p.reply_count); },
       [](const ReplyRecord& r) { return static_cast<double>(r.reply_count); }},
  };
  // Pool of (post, reply) pairs over the given posts.
  std::vector<std::pair<const Post*, const ReplyRecord*>> pool;
  std::size_t with_replies = 0;
  for (const auto& id : posts) {
    const Post* post = corpus.post(id);
    if (!post) continue;
    auto rs = corpus.replies_to(id);
    if (!rs.empty()) ++with_replies;
    for (std::size_t r : rs) pool.emplace_back(post, &corpus.replies()[r]);
  }
  if (pool.size() < 2 || with_replies == 0) throw DataError("engagement correlation needs posts with replies");
  std::size_t draw = std::min(with_replies, pool.size());
  std::vector<EngagementPair> out;
  for (const auto& f : fields) out.push_back({f.tweet, f.reply, 0.0, false});
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(seed, 0xe000 + s));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(draw);
    std::sort(idx.begin(), idx.end());
    for (std::size_t k = 0; k < std::size(fields); ++k) {
      std::vector<double> a, b;
      for (std::size_t i : idx) {
        a.push_back(fields[k].post_value(*pool[i].first));
        b.push_back(fields[k].reply_value(*pool[i].second));
      }
      bool deg = false;
      out[k].mean_correlation += pearson(a, b, &deg) / static_cast<double>(samples);
      out[k].degenerate = out[k].degenerate || deg;
    }
  }
  return out;
}

}  // namespace sentinel
