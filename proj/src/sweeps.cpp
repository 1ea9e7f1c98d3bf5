#include "sentinel/sweeps.hpp"

#include <algorithm>
#include <random>

#include "sentinel/dataset.hpp"
#include "sentinel/error.hpp"
#include "sentinel/hash.hpp"

namespace sentinel {

std::vector<SweepRow> threshold_sweep(const Corpus& corpus, ModelKind kind, std::uint64_t seed,
                                      const SimilaritySource& source, const ThresholdSweepOptions& options) {
  if (options.lo == 0 || options.hi < options.lo) throw InvalidArgument("bad sweep range");
  std::vector<ClassificationDataset> datasets;
  std::set<std::string> scope;
  for (std::size_t t = options.lo; t <= options.hi; ++t) {
    datasets.push_back(build_classification_dataset(corpus, t, options.min_total_replies));
    scope.insert(datasets.back().positives.begin(), datasets.back().positives.end());
    scope.insert(datasets.back().negatives.begin(), datasets.back().negatives.end());
  }
  TweetSimilarityCollector collector;
  PairSink sink = [&](const PostPairs& b) { collector(b); };
  if (source.provider)
    coreply_pair_join(corpus, *source.provider, scope, sink, options.join);
  else
    replay_pairs_file(source.pairs_path, scope, sink);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    SweepRow row;
    row.value = options.lo + i;
    FeatureMatrix m = build_tweet_matrix(corpus, datasets[i], collector.summaries(), options.min_total_replies);
    row.positives = m.positives();
    row.negatives = m.rows() - row.positives;
    row.insufficient = row.positives < options.eval.folds || row.negatives < options.eval.folds;
    if (!row.insufficient) row.report = kfold_cv(m.x, m.y, kind, seed, options.eval);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::size_t> default_imbalance_ratios() { return {5, 10, 15, 20, 25, 30, 35, 40, 45}; }

std::vector<SweepRow> imbalance_sweep(const Matrix& x, std::span<const int> y, std::span<const std::size_t> ratios,
                                      ModelKind kind, std::uint64_t seed, const EvalOptions& options,
                                      std::size_t draws) {
  if (ratios.empty()) throw InvalidArgument("no imbalance ratios");
  if (draws == 0) throw InvalidArgument("imbalance sweep needs at least one draw");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  std::size_t max_ratio = *std::max_element(ratios.begin(), ratios.end());
  if (max_ratio == 0) throw InvalidArgument("imbalance ratio must be positive");
  std::size_t keep = std::min(pos.size(), neg.size() / max_ratio);
  // Positive subsets per draw, shared by every ratio.
  std::vector<std::vector<std::size_t>> pos_sets;
  for (std::size_t d = 0; d < draws; ++d) {
    std::vector<std::size_t> p = pos;
    std::mt19937_64 rng(mix_seed(seed, 0x1b00 + d));
    std::shuffle(p.begin(), p.end(), rng);
    p.resize(keep);
    pos_sets.push_back(std::move(p));
  }
  std::vector<SweepRow> rows;
  EvalOptions plain = options;
  plain.sampling = Sampling::kNone;
  for (std::size_t ratio : ratios) {
    SweepRow row;
    row.value = ratio;
    row.positives = keep;
    row.negatives = keep * ratio;
    row.insufficient = keep < options.folds || row.negatives > neg.size() || ratio == 0;
    if (!row.insufficient) {
      EvalReport pooled;
      for (std::size_t d = 0; d < draws; ++d) {
        std::vector<std::size_t> pool = neg;
        std::mt19937_64 nrng(mix_seed(seed, (ratio << 16) + d));
        std::shuffle(pool.begin(), pool.end(), nrng);
        std::vector<std::size_t> idx = pos_sets[d];
        idx.insert(idx.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(row.negatives));
        std::sort(idx.begin(), idx.end());
        std::vector<int> ys(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) ys[i] = y[idx[i]];
        EvalReport r = kfold_cv(x.select_rows(idx), ys, kind, mix_seed(seed, d), plain);
        if (d == 0) pooled = r;
        else {
          pooled.thresholds.insert(pooled.thresholds.end(), r.thresholds.begin(), r.thresholds.end());
          pooled.fold_metrics.insert(pooled.fold_metrics.end(), r.fold_metrics.begin(), r.fold_metrics.end());
        }
      }
      pooled.datasets = draws;
      pooled.seed = seed;
      pool_metrics(pooled);
      row.report = std::move(pooled);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sentinel
