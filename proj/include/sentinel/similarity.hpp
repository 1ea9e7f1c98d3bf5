#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentinel/corpus.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

struct EmbeddingVector {
  std::vector<float> components;
  double norm = 0.0;
  // Produced from empty text; the zero vector.
  bool empty = false;
};

EmbeddingVector make_embedding(std::vector<float> components);

// dot(u, v) / (|u| |v|), clamped to [-1, 1]. Throws InvalidArgument on a
// dimension mismatch or a zero-norm operand ("degenerate vector").
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
  // Vector for one reply, or nullopt when the provider has none for it.
  virtual std::optional<EmbeddingVector> embed_reply(const ReplyRecord& reply) const = 0;
};

// Signed feature hashing of character n-grams (FNV-1a), L2-normalised.
// Text shorter than n hashes as a single gram. Needs no external model.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 64, std::size_t ngram = 3);

  EmbeddingVector embed(std::string_view text) const;

  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "hashing"; }
  // Missing text embeds as the empty string.
  std::optional<EmbeddingVector> embed_reply(const ReplyRecord& reply) const override;

 private:
  std::size_t dimension_;
  std::size_t ngram_;
};

// Precomputed vectors keyed by reply tweet id; CSV header `tweet_id,v0,...,v{d-1}`.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::string& path);

  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "file"; }
  std::optional<EmbeddingVector> embed_reply(const ReplyRecord& reply) const override;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, EmbeddingVector> vectors_;
};

struct PairSimilarity {
  std::string poster_tweetid;
  std::string replier_userid_x, replier_userid_y;
  std::string replier_tweetid_x, replier_tweetid_y;
  ReplierLabel replier_label_x = ReplierLabel::kNormal;
  ReplierLabel replier_label_y = ReplierLabel::kNormal;
  double cosine = 0.0;
  bool operator==(const PairSimilarity&) const = default;
};

// Identity of one reply inside a post's pair block.
struct ReplyRef {
  std::string reply_tweet_id;
  std::string replier_id;
  ReplierLabel label = ReplierLabel::kNormal;
};

// Pair between replies[x] and replies[y] of the enclosing block, x < y.
struct CompactPair {
  std::uint32_t x, y;
  double cosine;
};

// All emitted pairs of one post. Replies are ordered by reply tweet id, so
// (x, y) with x < y is the canonical orientation.
struct PostPairs {
  std::string poster_tweetid;
  std::vector<ReplyRef> replies;
  std::vector<CompactPair> pairs;
};

PairSimilarity materialize(const PostPairs& block, const CompactPair& pair);

using PairSink = std::function<void(const PostPairs&)>;

struct JoinOptions {
  // Posts with more replies than this are pair-subsampled to pair_budget.
  std::size_t subsample_cap = 20000;
  std::size_t pair_budget = 10'000'000;
  std::uint64_t seed = 0;
  // Upper bound on candidate pairs computed before a block is flushed to the sink.
  std::size_t chunk_pair_budget = 4'000'000;
};

struct GapEntry {
  std::string poster_tweetid;
  std::size_t missing_count = 0;
  bool subsampled = false;
};

struct JoinReport {
  std::size_t posts = 0;
  std::size_t expected_pairs = 0;   // sum over posts of C(k, 2)
  std::size_t emitted_pairs = 0;
  std::size_t missing_pairs = 0;    // a side had no usable embedding
  std::size_t self_pairs = 0;       // same account twice on one post; excluded
  std::size_t subsampled_out = 0;   // dropped by the per-post pair budget
  std::vector<GapEntry> gaps;
};

// Streams every unordered co-reply pair of each post in `scope`, one sink call
// per post, in post id order. Posts are computed in parallel; delivery is
// sequential and deterministic. expected = emitted + missing + self + subsampled_out.
JoinReport coreply_pair_join(const Corpus& corpus, const EmbeddingProvider& provider,
                             const std::set<std::string>& scope, const PairSink& sink,
                             const JoinOptions& options = {});

inline constexpr std::string_view kPairsHeader =
    "replier_label_x,replier_label_y,replier_userid_x,replier_userid_y,replier_tweetid_x,replier_tweetid_y,"
    "poster_tweetid,cosine";

// Replays a precomputed-pairs CSV. Rows must be grouped by poster_tweetid;
// a post reappearing after its block closed is a DataError. Posts outside a
// non-empty scope are skipped.
JoinReport replay_pairs_file(const std::string& path, const std::set<std::string>& scope, const PairSink& sink);

class PairCsvWriter {
 public:
  explicit PairCsvWriter(const std::string& path);
  void operator()(const PostPairs& block);

 private:
  std::shared_ptr<std::ofstream> out_;
};

void write_gap_report(const JoinReport& report, const std::string& path);

// The multiset of cosines over one post's pairs. Throws InvalidArgument
// ("empty sample") when the post has no pairs.
AttributeSample tweet_similarity_sample(std::span<const PairSimilarity> pairs);
AttributeSample tweet_similarity_sample(const PostPairs& block);

// All cosines of pairs that involve `replier` on either side.
AttributeSample replier_similarity_sample(const std::string& replier, std::span<const PairSimilarity> pairs);

// Per-post cosine summaries, filled from a sink.
class TweetSimilarityCollector {
 public:
  explicit TweetSimilarityCollector(bool keep_samples = false) : keep_samples_(keep_samples) {}
  void operator()(const PostPairs& block);

  const std::map<std::string, Summary12>& summaries() const { return summaries_; }
  const std::map<std::string, std::vector<double>>& samples() const { return samples_; }
  std::size_t pairs(const std::string& post) const;

 private:
  bool keep_samples_;
  std::map<std::string, Summary12> summaries_;
  std::map<std::string, std::vector<double>> samples_;
  std::map<std::string, std::size_t> pair_counts_;
  std::string last_post_;
};

// Per-replier cosine samples: pass 1 appends every pair value to both
// repliers, pass 2 visits each replier's complete sample. With a spill
// directory, values go to sharded append-only files so the pair set never
// sits in memory.
class ReplierSampleAccumulator {
 public:
  explicit ReplierSampleAccumulator(std::optional<std::filesystem::path> spill_dir = std::nullopt,
                                    std::size_t shards = 16);
  ~ReplierSampleAccumulator();
  ReplierSampleAccumulator(const ReplierSampleAccumulator&) = delete;
  ReplierSampleAccumulator& operator=(const ReplierSampleAccumulator&) = delete;

  void add(const std::string& replier, double value);
  // Sink adapter: only posts in `scope` contribute (all posts when empty).
  void consume(const PostPairs& block, const std::set<std::string>& scope = {});

  // Visits every replier once with its values sorted ascending. Order is
  // deterministic: shard by shard, replier id order within a shard.
  void for_each(const std::function<void(const std::string&, std::vector<double>&)>& visit);

  std::size_t total_values() const { return total_; }

 private:
  struct Shard;
  std::optional<std::filesystem::path> spill_dir_;
  std::vector<std::unique_ptr<Shard>> shards_;
  std::map<std::string, std::vector<double>> memory_;
  std::size_t total_ = 0;
};

// Cosine histogram per pair type (io-io, io-normal, normal-normal) over [-1, 1].
class PairTypeHistogram {
 public:
  explicit PairTypeHistogram(std::size_t bins = 40) : bins_(bins), counts_(3, std::vector<std::size_t>(bins, 0)) {}
  void operator()(const PostPairs& block);
  void write_csv(const std::string& path) const;
  const std::vector<std::vector<std::size_t>>& counts() const { return counts_; }
  // Median cosine per type from the histogram bin centres; NaN when empty.
  double median(std::size_t type) const;

 private:
  std::size_t bins_;
  std::vector<std::vector<std::size_t>> counts_;
};

}  // namespace sentinel
