#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "internal.hpp"
#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detail {
namespace {

double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

struct Builder {
  const Matrix& x;
  std::span<const int> y;
  std::span<const double> w;
  const TreeOptions& opts;
  std::mt19937_64& rng;
  std::vector<TreeNode>& nodes;
  std::vector<std::size_t> features;
  std::vector<std::pair<double, std::size_t>> scratch;

  Split best_split(std::span<const std::size_t> rows, double total_w, double pos_w) {
    const std::size_t p = x.cols();
    std::size_t tries = opts.max_features == 0 ? p : std::min(opts.max_features, p);
    if (tries < p) {
      // Partial Fisher-Yates: the first `tries` entries become the sample,
      // the rest are visited only if the sample has no usable split.
      for (std::size_t i = 0; i < p; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, p - 1);
        std::swap(features[i], features[pick(rng)]);
      }
    } else {
      std::iota(features.begin(), features.end(), std::size_t{0});
    }
    const double parent = gini(pos_w, total_w);
    Split best;
    for (std::size_t k = 0; k < p; ++k) {
      if (k >= tries && best.feature >= 0) break;
      const std::size_t f = features[k];
      scratch.clear();
      for (std::size_t r : rows) scratch.emplace_back(x(r, f), r);
      std::sort(scratch.begin(), scratch.end());
      if (scratch.front().first == scratch.back().first) continue;
      double lw = 0.0, lp = 0.0;
      for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        std::size_t r = scratch[i].second;
        lw += w[r];
        if (y[r] == 1) lp += w[r];
        double a = scratch[i].first, b = scratch[i + 1].first;
        if (a == b) continue;
        double rw = total_w - lw, rp = pos_w - lp;
        double child = (lw / total_w) * gini(lp, lw) + (rw / total_w) * gini(rp, rw);
        double gain = parent - child;
        if (gain > best.gain + 1e-15 || best.feature < 0) {
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = {static_cast<int>(f), t, gain};
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> rows, std::size_t depth) {
    double total_w = 0.0, pos_w = 0.0;
    for (std::size_t r : rows) {
      total_w += w[r];
      if (y[r] == 1) pos_w += w[r];
    }
    int id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});
    nodes[id].value = total_w > 0.0 ? pos_w / total_w : 0.0;
    bool pure = pos_w <= 0.0 || pos_w >= total_w;
    bool depth_cap = opts.max_depth != 0 && depth >= opts.max_depth;
    if (pure || depth_cap || rows.size() < 2) return id;
    Split s = best_split(rows, total_w, pos_w);
    if (s.feature < 0) return id;
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x(r, s.feature) <= s.threshold ? left : right).push_back(r);
    if (left.empty() || right.empty()) return id;
    rows.clear();
    rows.shrink_to_fit();
    nodes[id].feature = s.feature;
    nodes[id].threshold = s.threshold;
    int l = build(std::move(left), depth + 1);
    int r = build(std::move(right), depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

}  // namespace

void CartTree::fit(const Matrix& x, std::span<const int> y, std::span<const double> weights, const TreeOptions& opts,
                   std::mt19937_64& rng) {
  if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(x.rows(), 1.0);
    weights = unit;
  }
  if (weights.size() != x.rows()) throw InvalidArgument("weight count does not match rows");
  nodes_.clear();
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (weights[r] > 0.0) rows.push_back(r);
  if (rows.empty()) throw InvalidArgument("tree fit on empty sample");
  Builder b{x, y, weights, opts, rng, nodes_, std::vector<std::size_t>(x.cols()), {}};
  std::iota(b.features.begin(), b.features.end(), std::size_t{0});
  b.build(std::move(rows), 0);
}

double CartTree::predict(std::span<const double> row) const {
  if (nodes_.empty()) throw InvalidArgument("tree is not fitted");
  int i = 0;
  while (nodes_[i].feature >= 0) i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].value;
}

std::size_t CartTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

void CartTree::save(std::ostream& out) const {
  out << "tree " << nodes_.size() << '\n';
  for (const auto& n : nodes_)
    out << n.feature << ' ' << csv::format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
        << csv::format_double(n.value) << '\n';
}

void CartTree::load(std::istream& in) {
  std::size_t n = read_size(in, "tree");
  nodes_.assign(n, TreeNode{});
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = nodes_[i];
    node.feature = read_int(in);
    node.threshold = read_double(in);
    node.left = read_int(in);
    node.right = read_int(in);
    node.value = read_double(in);
    if (node.feature >= 0) {
      auto ok = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
      if (!ok(node.left) || !ok(node.right)) throw DataError("corrupt tree node in model artifact");
    }
  }
  if (nodes_.empty()) throw DataError("empty tree in model artifact");
}

void DecisionTreeClassifier::fit(const Matrix& x, std::span<const int> y, std::uint64_t seed, const Hyperparameters&) {
  std::mt19937_64 rng(seed);
  tree_.fit(x, y, {}, TreeOptions{}, rng);
}

}  // namespace sentinel::detail
