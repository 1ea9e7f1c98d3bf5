#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sentinel/corpus.hpp"

namespace sentinel {

// Generator parameters. Defaults are the frozen benchmark calibration, also
// committed as config/synth_default.conf.
struct SynthConfig {
  std::size_t n_targets = 40;
  std::size_t posts_per_target = 10;
  std::size_t n_io_repliers = 300;
  std::size_t n_organic_repliers = 3000;
  std::size_t n_campaigns = 2;
  double io_fraction_targeted = 0.5;
  std::size_t io_replies_min = 5;
  std::size_t io_replies_max = 40;
  std::size_t organic_replies_min = 5;
  std::size_t organic_replies_max = 20;
  double io_delay_scale_minutes = 400.0;
  double organic_delay_scale_minutes = 600.0;
  std::size_t template_pool_size = 20;
  double token_noise = 0.25;
  double io_age_scale_years = 1.6;
  double organic_age_scale_years = 2.5;
  // Share of IO accounts that blend in; each gets a blend level in [0.3, 1)
  // giving the chance that one of its traits is drawn from the organic model.
  double stealth_fraction = 0.35;
  // Share of organic accounts that reply often once every account has replied.
  double organic_regular_fraction = 0.05;
  // Chance that an organic reply to a targeted post repeats the campaign text.
  double organic_echo = 0.01;
  std::uint64_t seed = 7;

  bool operator==(const SynthConfig&) const = default;
};

// key = value lines; `#` starts a comment. Unknown keys are an error.
SynthConfig load_synth_config(const std::string& path);
SynthConfig parse_synth_config(const std::string& text, SynthConfig base = {});
std::string format_synth_config(const SynthConfig& config);

struct OracleLabels {
  std::map<std::string, PostLabel> posts;
  std::map<std::string, ReplierLabel> repliers;
};

// Planted-contrast checks computed at generation time.
struct SynthChecks {
  double median_age_io = 0, median_age_organic = 0;
  double median_delay_io = 0, median_delay_organic = 0;
  double median_cosine_io = 0, median_cosine_organic = 0;
  double rank_sum_p = 1.0;  // IO-IO vs normal-normal pair cosines, one-sided
};

struct SynthResult {
  Corpus corpus;
  OracleLabels truth;
  SynthChecks checks;
};

// Fully determined by config.seed. Throws DataError if the planted contrasts
// fail their self-check or a targeted post cannot receive 5 IO replies.
SynthResult generate(const SynthConfig& config);

// Exact labels of a synthetic corpus: every targeted/control post and every
// account that replied. Throws DataError for a non-synthetic corpus.
OracleLabels oracle_labels(const Corpus& corpus);

// Writes accounts_full.csv, posts_full.csv, replies_full.csv and the
// synthetic.csv marker into `dir`; returns the written paths.
std::vector<std::string> write_synthetic_corpus(const SynthResult& result, const SynthConfig& config,
                                                const std::string& dir);

// One-sided Mann-Whitney test that `a` tends to exceed `b` (normal
// approximation with tie correction).
double rank_sum_p_greater(std::span<const double> a, std::span<const double> b);

}  // namespace sentinel
