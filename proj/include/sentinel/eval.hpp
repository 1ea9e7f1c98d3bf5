#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/features.hpp"
#include "sentinel/matrix.hpp"
#include "sentinel/metrics.hpp"
#include "sentinel/models.hpp"

namespace sentinel {

enum class Sampling { kNone, kDownsample, kOversample };

std::string to_string(Sampling s);
std::optional<Sampling> parse_sampling(std::string_view text);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified k-fold split. Each class is shuffled with `seed` and dealt
// round-robin, so every fold is within one row of the global class counts.
// Throws InvalidArgument when a class has fewer than k rows.
std::vector<Fold> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed);

// Training indices with minority rows repeated until both classes match. Whole
// copies first, then a seeded draw without replacement for the remainder.
std::vector<std::size_t> oversample_train(std::span<const int> y, std::span<const std::size_t> train,
                                          std::uint64_t seed);

// `n_datasets` row sets, each holding every positive plus as many negatives
// drawn without replacement. Rows within a set are in ascending order.
std::vector<std::vector<std::size_t>> downsample_balanced(std::span<const int> y, std::size_t n_datasets,
                                                          std::uint64_t seed);

struct EvalOptions {
  std::size_t folds = 10;
  Sampling sampling = Sampling::kNone;
  std::size_t n_datasets = 10;  // for Sampling::kDownsample
  Hyperparameters hp;
};

inline constexpr const char* kThresholdPolicy = "pooled_out_of_fold_max_mean_f1";

struct EvalReport {
  ModelKind kind = ModelKind::kRandomForest;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::kNone;
  std::size_t folds = 10;
  std::size_t rows = 0;
  std::size_t positives = 0;
  std::size_t datasets = 1;
  std::vector<double> thresholds;     // one per evaluated dataset
  std::vector<Metrics> fold_metrics;  // all folds of all datasets
  Metrics mean;
  Metrics stderr_;
};

// k-fold CV of `kind`. Per training split: optional oversampling, scaler fit,
// model fit. The threshold is tuned once per dataset on the out-of-fold
// scores (maximising mean per-fold F1); fold metrics use it. With
// Sampling::kDownsample the protocol runs on each balanced dataset and the
// folds are pooled.
EvalReport kfold_cv(const Matrix& x, std::span<const int> y, ModelKind kind, std::uint64_t seed,
                    const EvalOptions& options = {});

// Recomputes mean and stderr from fold_metrics.
void pool_metrics(EvalReport& report);

// Out-of-fold scores of one plain k-fold run (no sampling).
std::vector<double> out_of_fold_scores(const Matrix& x, std::span<const int> y, ModelKind kind, std::uint64_t seed,
                                       const EvalOptions& options, std::vector<Fold>* folds_out = nullptr);

struct GroupImportance {
  std::string group;
  std::vector<std::size_t> columns;
  std::vector<double> drops;  // baseline mean F1 minus shuffled mean F1, per repeat
  double median = 0.0;
};

struct ImportanceReport {
  double baseline_f1 = 0.0;
  std::size_t repeats = 0;
  std::vector<GroupImportance> groups;  // by median drop, descending; ties by name
};

// Grouped permutation importance. The CV protocol of kfold_cv is fitted once;
// for each group and repeat one row permutation is applied jointly to the
// group's columns and every fold model rescores its test rows at its dataset's
// tuned threshold. Drops are against the unshuffled mean fold F1.
ImportanceReport permutation_importance(const Matrix& x, std::span<const int> y,
                                        const std::map<std::string, std::vector<std::size_t>>& groups,
                                        ModelKind kind, std::uint64_t seed, const EvalOptions& options = {},
                                        std::size_t repeats = 10);

struct CrossCampaignReport {
  std::vector<std::string> campaigns;
  std::vector<std::vector<double>> f1;  // [train][test]
  std::vector<std::string> excluded;    // single-class or too small for CV
};

// Diagonal: mean CV F1 within the campaign. Off-diagonal: model fit on the
// whole row campaign, thresholded by that campaign's CV, scored on the column
// campaign.
CrossCampaignReport cross_campaign(const FeatureMatrix& data, ModelKind kind, std::uint64_t seed,
                                   const EvalOptions& options = {});

struct EngagementPair {
  std::string tweet_field;
  std::string reply_field;
  double mean_correlation = 0.0;
  bool degenerate = false;  // some sample had a constant column
};

// Each of `samples` seeded draws takes as many replies as there are posts with
// replies, without replacement from all their replies, and pairs each reply
// with its post. Pearson correlation per engagement count, averaged over draws.
std::vector<EngagementPair> engagement_correlation(const Corpus& corpus, std::span<const std::string> posts,
                                                   std::size_t samples = 10, std::uint64_t seed = 0);

double pearson(std::span<const double> a, std::span<const double> b, bool* degenerate = nullptr);

}  // namespace sentinel
