#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/corpus.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/features.hpp"

namespace sentinel {

struct SweepRow {
  std::size_t value = 0;  // IO-reply threshold, or negatives per positive
  std::size_t positives = 0;
  std::size_t negatives = 0;
  bool insufficient = false;
  std::optional<EvalReport> report;
};

struct ThresholdSweepOptions {
  std::size_t lo = 5;
  std::size_t hi = 20;
  std::size_t min_total_replies = 5;
  JoinOptions join;
  EvalOptions eval;
};

// Rebuilds the tweet dataset and features for every IO-reply threshold in
// [lo, hi] and runs CV on each. One co-reply join covers the union of all
// thresholds' posts. Rows with fewer than `folds` examples of a class are
// marked insufficient.
std::vector<SweepRow> threshold_sweep(const Corpus& corpus, ModelKind kind, std::uint64_t seed,
                                      const SimilaritySource& source, const ThresholdSweepOptions& options = {});

// Default ratios 5, 10, ..., 45.
std::vector<std::size_t> default_imbalance_ratios();

// Each of `draws` repetitions caps the positives at floor(|negatives| / max
// ratio) by a seeded draw, reused for every ratio; ratio r then draws
// r x positives negatives without replacement and runs plain CV. Folds of all
// draws are pooled per ratio.
std::vector<SweepRow> imbalance_sweep(const Matrix& x, std::span<const int> y, std::span<const std::size_t> ratios,
                                      ModelKind kind, std::uint64_t seed, const EvalOptions& options = {},
                                      std::size_t draws = 10);

}  // namespace sentinel
