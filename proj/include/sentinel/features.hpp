#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/corpus.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/matrix.hpp"
#include "sentinel/similarity.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

// Reply-level attributes, in feature order.
inline constexpr std::array<std::string_view, 8> kReplyAttributes = {
    "like_count", "retweet_count", "reply_count", "mention_count",
    "hashtag_count", "url_count", "reply_time_diff", "cosine"};

inline constexpr std::array<std::string_view, 3> kTweetLevelFeatures = {"reply_count", "retweet_count", "like_count"};
inline constexpr std::array<std::string_view, 4> kProfileFeatures = {"age", "follower_rate", "following_rate",
                                                                     "activity_rate"};

inline constexpr std::size_t kTweetFeatureCount = 99;
inline constexpr std::size_t kReplierFeatureCount = 76;

// `tweet.<feature>` then `reply.<attribute>.<statistic>` (12 statistics).
const std::vector<std::string>& tweet_feature_names();
// `profile.<feature>` then `reply.<attribute>.<statistic>` (9 statistics).
const std::vector<std::string>& replier_feature_names();

struct FeatureVector {
  std::string entity_id;
  std::vector<double> values;  // aligned to the schema's names
  int label = 0;
  std::string campaign;
  // Cosine block zero-filled because the replier had no co-repliers.
  bool imputed = false;
};

struct ReplierProfile {
  double age = 0;
  double follower_rate = 0;
  double following_rate = 0;
  double activity_rate = 0;
};

// Minimum account age: one day.
inline constexpr double kMinAgeYears = 1.0 / kDaysPerYear;

// Reply-level attribute values of one reply. Delay is minutes after `target`,
// clamped at 0.
std::array<double, 7> reply_attribute_values(const ReplyRecord& reply, const Post& target);

// 3 tweet-level counts plus Summary12 of the 8 reply attributes. Throws
// DataError("below reply floor") for fewer than `min_total_replies` replies.
FeatureVector tweet_features(const Post& post, std::span<const ReplyRecord* const> replies,
                             const Summary12& cosine_summary, std::size_t min_total_replies = 5);
FeatureVector tweet_features(const Post& post, std::span<const ReplyRecord* const> replies,
                             const AttributeSample& cosine_sample, std::size_t min_total_replies = 5);

// Age is taken at the replier's last reply; without created_at the shipped
// age column is used; nullopt when neither exists.
std::optional<ReplierProfile> replier_profile(const Account& account, std::span<const ReplyRecord* const> replies);

// 4 profile features plus Summary9 of the 8 reply attributes over the
// replier's replies to targeted posts. Delays are measured from each reply's
// own target. An empty cosine sample zero-fills the cosine block and sets
// `imputed`. Returns nullopt when the account has no usable age.
std::optional<FeatureVector> replier_features(const Corpus& corpus, const Account& account,
                                              std::span<const ReplyRecord* const> replies,
                                              std::span<const double> cosine_sample);
// Same, from a precomputed cosine summary (nullopt = no co-repliers).
std::optional<FeatureVector> replier_features(const Corpus& corpus, const Account& account,
                                              std::span<const ReplyRecord* const> replies,
                                              const std::optional<Summary9>& cosine_summary);

// A labelled feature table. Rows follow entity id order.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<std::string> ids;
  std::vector<std::string> campaigns;
  Matrix x;
  std::vector<int> y;

  std::size_t rows() const { return x.rows(); }
  std::size_t positives() const;
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const;
  FeatureMatrix select_features(std::span<const std::size_t> cols) const;
  void append(const FeatureVector& v);
};

// Header: entity_id, campaign, <feature names>, label.
void write_feature_csv(const FeatureMatrix& m, const std::string& path);

struct FeatureLoadReport {
  std::size_t rows = 0;
  std::size_t imputed_cells = 0;  // blank or NaN cells set to 0
  std::string label_column;
};

// Reads our feature CSVs and the published classifier feature files. Columns
// are matched by name: label from `label`, `tweet_label` or `replier_label`;
// optional id and `campaign` columns; unnamed index columns are ignored; every
// other column is a numeric feature.
FeatureMatrix load_feature_csv(const std::string& path, FeatureLoadReport* report = nullptr);

// Permutation groups: each reply attribute's statistics together, tweet-level
// and profile features individually; unrecognised columns individually.
std::map<std::string, std::vector<std::size_t>> feature_groups(const std::vector<std::string>& names);

// Ablation sets: tweet_level, profile, engagement, entities, delay, similarity.
std::map<std::string, std::vector<std::size_t>> feature_sets(const std::vector<std::string>& names);

struct SimilaritySource {
  const EmbeddingProvider* provider = nullptr;
  std::string pairs_path;  // used when provider is null
};

struct ExtractionOptions {
  std::size_t min_total_replies = 5;
  JoinOptions join;
  std::optional<std::filesystem::path> spill_dir;
  // Optional extra sink for every pair block (pair file writer, histograms).
  PairSink tap;
};

struct ExtractionReport {
  JoinReport join;
  std::size_t tweets = 0;
  std::size_t repliers = 0;
  std::vector<std::string> below_floor;
  std::vector<std::string> excluded_repliers;
  std::vector<std::string> imputed_repliers;
};

struct ExtractedFeatures {
  FeatureMatrix tweets;
  FeatureMatrix repliers;
  ExtractionReport report;
};

// Runs the co-reply join over the dataset's posts once, then builds tweet
// vectors for positives and negatives and replier vectors for every account
// that replied to a positive post.
ExtractedFeatures extract_features(const Corpus& corpus, const ClassificationDataset& dataset,
                                   const SimilaritySource& source, const ExtractionOptions& options = {});

// Tweet vectors only, from precomputed cosine summaries.
FeatureMatrix build_tweet_matrix(const Corpus& corpus, const ClassificationDataset& dataset,
                                 const std::map<std::string, Summary12>& cosine, std::size_t min_total_replies,
                                 std::vector<std::string>* below_floor = nullptr);

}  // namespace sentinel
