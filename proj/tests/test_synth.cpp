#include <set>

#include "doctest.h"
#include "sentinel/dataset.hpp"
#include "sentinel/error.hpp"
#include "sentinel/synth.hpp"
#include "util.hpp"

using namespace sentinel;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.n_targets = 8;
  c.n_io_repliers = 80;
  c.n_organic_repliers = 400;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("committed default config equals the built-in defaults") {
  auto c = load_synth_config(std::string(SENTINEL_SOURCE_DIR) + "/config/synth_default.conf");
  CHECK(c == SynthConfig{});
}

TEST_CASE("config text round trip and validation") {
  SynthConfig c = small_config();
  c.token_noise = 0.125;
  CHECK(parse_synth_config(format_synth_config(c)) == c);
  auto d = parse_synth_config("# comment\nseed = 99\n\nn_targets=5  # trailing\n");
  CHECK(d.seed == 99);
  CHECK(d.n_targets == 5);
  CHECK(d.n_io_repliers == SynthConfig{}.n_io_repliers);
  CHECK_THROWS_AS(parse_synth_config("bogus = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_synth_config("seed = x\n"), InvalidArgument);
}

TEST_CASE("generation is determined by the seed") {
  auto a = generate(small_config());
  auto b = generate(small_config());
  CHECK(a.corpus == b.corpus);
  SynthConfig other = small_config();
  other.seed = 4;
  CHECK_FALSE(generate(other).corpus == a.corpus);
}

TEST_CASE("planted labels agree with the pipeline's selection") {
  auto res = generate(small_config());
  const Corpus& c = res.corpus;
  CHECK(c.synthetic());
  auto truth = oracle_labels(c);
  std::set<std::string> targeted, control;
  for (const auto& [id, l] : truth.posts) (l == PostLabel::kTargeted ? targeted : control).insert(id);
  CHECK(targeted.size() == 8 * 5);
  CHECK(control.size() == 8 * 5);
  CHECK(select_targeted(c) == targeted);
  auto ds = build_classification_dataset(c);
  CHECK(ds.positives == targeted);
  CHECK(ds.negatives == control);

  std::size_t io = 0;
  for (const auto& [id, l] : truth.repliers) {
    io += l == ReplierLabel::kIO;
    CHECK((l == ReplierLabel::kIO) == c.account(id)->is_io);
  }
  CHECK(io > 0);
  CHECK(io <= 80);
  for (const auto& id : control)
    for (std::size_t r : c.replies_to(id)) CHECK(c.replies()[r].replier_label == ReplierLabel::kNormal);

  CHECK(res.checks.median_age_io < res.checks.median_age_organic);
  CHECK(res.checks.median_delay_io < res.checks.median_delay_organic);
  CHECK(res.checks.median_cosine_io > res.checks.median_cosine_organic);
  CHECK(res.checks.rank_sum_p < 0.01);
}

TEST_CASE("oracle labels refuse real corpora") {
  Corpus c;
  CHECK_THROWS_AS(oracle_labels(c), DataError);
}

TEST_CASE("written corpora reload as synthetic") {
  testutil::TempDir dir("synth");
  auto cfg = small_config();
  auto res = generate(cfg);
  auto paths = write_synthetic_corpus(res, cfg, dir.path().string());
  CHECK(paths.size() == 4);
  Corpus back = load_corpus(paths);
  CHECK(back.synthetic());
  CHECK(back.accounts() == res.corpus.accounts());
  CHECK(back.posts() == res.corpus.posts());
  CHECK(back.replies() == res.corpus.replies());
  CHECK(oracle_labels(back).repliers == res.truth.repliers);
}

TEST_CASE("rank sum test") {
  std::vector<double> a{5, 6, 7, 8, 9, 10, 11, 12}, b{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(rank_sum_p_greater(a, b) < 0.01);
  CHECK(rank_sum_p_greater(b, a) > 0.99);
  CHECK(rank_sum_p_greater(a, a) == doctest::Approx(0.5).epsilon(0.05));
}
