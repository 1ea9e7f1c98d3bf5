#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

namespace {
const std::array<ModelKind, 5> kKinds = {ModelKind::kLogisticRegression, ModelKind::kRandomForest,
                                         ModelKind::kAdaBoost, ModelKind::kDecisionTree, ModelKind::kNaiveBayes};
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogisticRegression: return "logistic_regression";
    case ModelKind::kRandomForest: return "random_forest";
    case ModelKind::kAdaBoost: return "adaboost";
    case ModelKind::kDecisionTree: return "decision_tree";
    case ModelKind::kNaiveBayes: return "naive_bayes";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (auto k : kKinds)
    if (to_string(k) == text) return k;
  if (text == "lr") return ModelKind::kLogisticRegression;
  if (text == "rf") return ModelKind::kRandomForest;
  if (text == "ab") return ModelKind::kAdaBoost;
  if (text == "dt") return ModelKind::kDecisionTree;
  if (text == "nb") return ModelKind::kNaiveBayes;
  return std::nullopt;
}

const std::array<ModelKind, 5>& all_model_kinds() { return kKinds; }

std::unique_ptr<Classifier> make_classifier(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogisticRegression: return std::make_unique<detail::LogisticRegressionClassifier>();
    case ModelKind::kRandomForest: return std::make_unique<detail::RandomForestClassifier>();
    case ModelKind::kAdaBoost: return std::make_unique<detail::AdaBoostClassifier>();
    case ModelKind::kDecisionTree: return std::make_unique<detail::DecisionTreeClassifier>();
    case ModelKind::kNaiveBayes: return std::make_unique<detail::NaiveBayesClassifier>();
  }
  throw InvalidArgument("unknown model kind");
}

TrainedModel train(ModelKind kind, const Matrix& x, std::span<const int> y, std::uint64_t seed,
                   const Hyperparameters& hp, std::vector<std::string> feature_names) {
  if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidArgument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  if (pos < 2 || x.rows() - pos < 2) throw InvalidArgument("training needs at least two rows of each class");
  if (!feature_names.empty() && feature_names.size() != x.cols())
    throw InvalidArgument("feature name count does not match columns");
  for (double v : x.data())
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  Scaler scaler = fit_scaler(x);
  Matrix z = apply_scaler(scaler, x);
  auto impl = make_classifier(kind);
  impl->fit(z, y, seed, hp);
  return TrainedModel(kind, std::move(feature_names), std::move(scaler), std::move(impl), 0.5, seed);
}

std::vector<double> TrainedModel::predict_score(const Matrix& x) const {
  if (!impl_) throw InvalidArgument("model is not trained");
  if (x.cols() != num_features())
    throw InvalidArgument("feature schema mismatch: model expects " + std::to_string(num_features()) +
                          " columns, got " + std::to_string(x.cols()));
  std::vector<double> out(x.rows());
  std::vector<double> row(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r);
    std::copy(src.begin(), src.end(), row.begin());
    scaler_.transform_row(row);
    out[r] = std::clamp(impl_->score(row), 0.0, 1.0);
  }
  return out;
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
  auto s = predict_score(x);
  std::vector<int> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= threshold_ ? 1 : 0;
  return out;
}

std::vector<double> predict_score(const TrainedModel& model, const Matrix& x) { return model.predict_score(x); }

std::vector<double> threshold_grid() {
  std::vector<double> g(101);
  for (int i = 0; i <= 100; ++i) g[i] = i / 100.0;
  return g;
}

namespace {
double f1_at(const ScoredSet& s, double t) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    bool p = s.scores[i] >= t;
    if (p && s.labels[i] == 1) ++tp;
    else if (p) ++fp;
    else if (s.labels[i] == 1) ++fn;
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}
}  // namespace

double tune_threshold(std::span<const ScoredSet> sets) {
  bool any_pos = false;
  for (const auto& s : sets) {
    if (s.scores.size() != s.labels.size()) throw InvalidArgument("score and label counts differ");
    for (int l : s.labels) any_pos |= l == 1;
  }
  if (!any_pos) throw InvalidArgument("threshold tuning needs at least one positive");
  double best_t = 0.0, best = -1.0;
  for (double t : threshold_grid()) {
    double sum = 0.0;
    for (const auto& s : sets) sum += f1_at(s, t);
    double mean = sum / static_cast<double>(sets.size());
    if (mean > best + 1e-12) {
      best = mean;
      best_t = t;
    }
  }
  return best_t;
}

double tune_threshold(std::span<const double> scores, std::span<const int> labels) {
  ScoredSet s{{scores.begin(), scores.end()}, {labels.begin(), labels.end()}};
  return tune_threshold(std::span<const ScoredSet>(&s, 1));
}

}  // namespace sentinel
