#include <cmath>
#include <istream>
#include <ostream>

#include "internal.hpp"
#include "sentinel/error.hpp"
#include "sentinel/parallel.hpp"

namespace sentinel::detail {

void RandomForestClassifier::fit(const Matrix& x, std::span<const int> y, std::uint64_t seed,
                                 const Hyperparameters& hp) {
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("forest fit on empty sample");
  TreeOptions opts;
  opts.max_features = hp.forest_max_features;
  if (opts.max_features == 0)
    opts.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
  trees_.assign(hp.forest_trees, CartTree{});
  parallel_for(trees_.size(), [&](std::size_t t) {
    std::mt19937_64 rng(seed + t);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    // Bootstrap multiplicities act as sample weights.
    std::vector<double> weights(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) weights[pick(rng)] += 1.0;
    trees_[t].fit(x, y, weights, opts, rng);
  });
}

double RandomForestClassifier::score(std::span<const double> row) const {
  if (trees_.empty()) throw InvalidArgument("forest is not fitted");
  std::size_t votes = 0;
  for (const auto& t : trees_)
    if (t.predict(row) > 0.5) ++votes;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

void RandomForestClassifier::save(std::ostream& out) const {
  out << "trees " << trees_.size() << '\n';
  for (const auto& t : trees_) t.save(out);
}

void RandomForestClassifier::load(std::istream& in) {
  std::size_t n = read_size(in, "trees");
  if (n == 0) throw DataError("forest artifact has no trees");
  trees_.assign(n, CartTree{});
  for (auto& t : trees_) t.load(in);
}

}  // namespace sentinel::detail
