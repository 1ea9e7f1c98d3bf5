#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/matrix.hpp"

namespace sentinel {

enum class ModelKind { kLogisticRegression, kRandomForest, kAdaBoost, kDecisionTree, kNaiveBayes };

std::string to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);
const std::array<ModelKind, 5>& all_model_kinds();

// Column-wise z-scores. Columns with zero fitted spread use std = 1, so
// constant columns map to 0.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> std;

  void transform_row(std::span<double> row) const;
  bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const Matrix& x);
Matrix apply_scaler(const Scaler& scaler, const Matrix& x);

// Repo constants for everything the classifiers leave open.
struct Hyperparameters {
  std::size_t forest_trees = 100;
  std::size_t forest_max_features = 0;  // 0 = floor(sqrt(p))
  double logistic_lambda = 1.0;
  double logistic_tolerance = 1e-6;
  std::size_t logistic_max_iterations = 100;
  std::size_t adaboost_rounds = 50;
  double naive_bayes_var_floor = 1e-9;
};

// A binary classifier over standardised features producing a positive-class
// score in [0, 1].
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ModelKind kind() const = 0;
  virtual void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) = 0;
  virtual double score(std::span<const double> row) const = 0;
  virtual void save(std::ostream& out) const = 0;
  virtual void load(std::istream& in) = 0;
};

std::unique_ptr<Classifier> make_classifier(ModelKind kind);

class TrainedModel {
 public:
  TrainedModel() = default;
  TrainedModel(ModelKind kind, std::vector<std::string> feature_names, Scaler scaler,
               std::shared_ptr<const Classifier> impl, double threshold, std::uint64_t seed)
      : kind_(kind), feature_names_(std::move(feature_names)), scaler_(std::move(scaler)), impl_(std::move(impl)),
        threshold_(threshold), seed_(seed) {}

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Scaler& scaler() const { return scaler_; }
  const Classifier& classifier() const { return *impl_; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  std::uint64_t seed() const { return seed_; }
  std::size_t num_features() const { return scaler_.mean.size(); }

  // Scores for raw (unscaled) rows. Throws InvalidArgument on a column-count
  // mismatch.
  std::vector<double> predict_score(const Matrix& x) const;
  // 1 where score >= threshold.
  std::vector<int> predict(const Matrix& x) const;

 private:
  ModelKind kind_ = ModelKind::kRandomForest;
  std::vector<std::string> feature_names_;
  Scaler scaler_;
  std::shared_ptr<const Classifier> impl_;
  double threshold_ = 0.5;
  std::uint64_t seed_ = 0;
};

// Fits the scaler on `x`, then the classifier on the scaled rows. Requires
// both classes with at least two rows each.
TrainedModel train(ModelKind kind, const Matrix& x, std::span<const int> y, std::uint64_t seed,
                   const Hyperparameters& hp = {}, std::vector<std::string> feature_names = {});

std::vector<double> predict_score(const TrainedModel& model, const Matrix& x);

// Threshold grid 0.00, 0.01, ..., 1.00; a score at or above the threshold is
// positive.
std::vector<double> threshold_grid();

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Smallest grid threshold maximising the mean F1 over the given score sets.
// Throws InvalidArgument if no set contains a positive.
double tune_threshold(std::span<const ScoredSet> sets);
double tune_threshold(std::span<const double> scores, std::span<const int> labels);

// Portable text artifact, version-tagged (`reply-sentinel-model 1`).
void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::string& path);

}  // namespace sentinel
