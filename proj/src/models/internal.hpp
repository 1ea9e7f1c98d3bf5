#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sentinel/models.hpp"

namespace sentinel::detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted positive fraction
};

struct TreeOptions {
  std::size_t max_depth = 0;     // 0 = unlimited
  std::size_t max_features = 0;  // 0 = all features
};

// CART with Gini impurity and weighted samples. Rows with zero weight are
// ignored. Features tried per node are drawn from `rng` when max_features is
// set; if none of them separates the node, remaining features are tried too.
class CartTree {
 public:
  void fit(const Matrix& x, std::span<const int> y, std::span<const double> weights, const TreeOptions& opts,
           std::mt19937_64& rng);
  double predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  std::vector<TreeNode> nodes_;
};

class DecisionTreeClassifier final : public Classifier {
 public:
  ModelKind kind() const override { return ModelKind::kDecisionTree; }
  void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) override;
  double score(std::span<const double> row) const override { return tree_.predict(row); }
  void save(std::ostream& out) const override { tree_.save(out); }
  void load(std::istream& in) override { tree_.load(in); }
  const CartTree& tree() const { return tree_; }

 private:
  CartTree tree_;
};

class RandomForestClassifier final : public Classifier {
 public:
  ModelKind kind() const override { return ModelKind::kRandomForest; }
  void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) override;
  double score(std::span<const double> row) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in) override;
  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<CartTree> trees_;
};

class LogisticRegressionClassifier final : public Classifier {
 public:
  ModelKind kind() const override { return ModelKind::kLogisticRegression; }
  void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) override;
  double score(std::span<const double> row) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in) override;
  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coef_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double intercept_ = 0.0;
  std::vector<double> coef_;
  std::size_t iterations_ = 0;
};

class AdaBoostClassifier final : public Classifier {
 public:
  ModelKind kind() const override { return ModelKind::kAdaBoost; }
  void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) override;
  double score(std::span<const double> row) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in) override;
  std::size_t rounds() const { return stumps_.size(); }

 private:
  std::vector<double> alphas_;
  std::vector<CartTree> stumps_;
};

class NaiveBayesClassifier final : public Classifier {
 public:
  ModelKind kind() const override { return ModelKind::kNaiveBayes; }
  void fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters& hp) override;
  double score(std::span<const double> row) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in) override;

 private:
  double log_prior_[2] = {0.0, 0.0};
  std::vector<double> mean_[2];
  std::vector<double> var_[2];
};

// Text helpers shared by the artifact reader and writer.
void write_doubles(std::ostream& out, const std::string& key, std::span<const double> values);
std::vector<double> read_doubles(std::istream& in, const std::string& key);
std::string read_token(std::istream& in);
double read_double(std::istream& in);
int read_int(std::istream& in);
void expect_token(std::istream& in, const std::string& expected);
std::size_t read_size(std::istream& in, const std::string& key);

}  // namespace sentinel::detail
