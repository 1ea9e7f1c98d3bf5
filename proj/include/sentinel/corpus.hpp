#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/timeutil.hpp"

namespace sentinel {

enum class PostLabel { kTargeted, kControl, kUnlabeled };
enum class ReplierLabel { kNormal, kIO };

std::string to_string(PostLabel label);
std::string to_string(ReplierLabel label);
std::optional<PostLabel> parse_post_label(std::string_view text);
std::optional<ReplierLabel> parse_replier_label(std::string_view text);

struct Account {
  std::string user_id;
  std::optional<Timestamp> created_at;
  // Precomputed account age in years, as shipped by the published replier table.
  std::optional<double> age_years;
  std::uint64_t followers_count = 0;
  std::uint64_t following_count = 0;
  std::uint64_t activity_count = 0;
  bool is_io = false;
  std::optional<std::string> campaign;

  bool operator==(const Account&) const = default;
};

struct Post {
  std::string tweet_id;
  std::string author_id;
  Timestamp created_at{};
  std::uint64_t retweet_count = 0;
  std::uint64_t like_count = 0;
  std::uint64_t quote_count = 0;
  std::uint64_t reply_count = 0;
  std::string campaign;
  PostLabel label = PostLabel::kUnlabeled;
  std::optional<std::string> text;

  bool operator==(const Post&) const = default;
};

struct ReplyRecord {
  std::string reply_tweet_id;
  std::string replier_id;
  std::string target_tweet_id;
  Timestamp created_at{};
  std::uint64_t like_count = 0;
  std::uint64_t retweet_count = 0;
  std::uint64_t reply_count = 0;
  std::uint64_t mention_count = 0;
  std::uint64_t hashtag_count = 0;
  std::uint64_t url_count = 0;
  std::optional<std::string> text;
  ReplierLabel replier_label = ReplierLabel::kNormal;
  // Reply timestamp precedes its target post (clock skew). Kept; delay clamps to 0.
  bool skew_anomalous = false;

  bool operator==(const ReplyRecord&) const = default;
};

// One row of the published post/reply pairing file; carries no timestamps or
// counts, only identities and labels.
struct ReplyLink {
  std::string poster_tweetid;
  std::string campaign;
  std::string replier_userid;
  ReplierLabel replier_label = ReplierLabel::kNormal;
  std::string replier_tweetid;
  PostLabel type = PostLabel::kUnlabeled;

  bool operator==(const ReplyLink&) const = default;
};

// Derived tables shipped with the published data. Kept verbatim.
struct DerivedTables {
  struct TargetCounts {
    std::string userid;
    std::uint64_t followers_count, following_count;
    bool operator==(const TargetCounts&) const = default;
  };
  struct RepliesPerTweet {
    std::string poster_tweetid;
    std::uint64_t reply_count;
    bool operator==(const RepliesPerTweet&) const = default;
  };
  struct TargetedByIO {
    std::string poster_userid, replier_userid;
    std::uint64_t count;
    bool operator==(const TargetedByIO&) const = default;
  };
  struct ReplyDelay {
    std::string replier_tweetid;
    double diff_min;
    bool operator==(const ReplyDelay&) const = default;
  };
  struct Engagement {
    std::string tweetid;
    std::uint64_t retweet_count, like_count, quote_count;
    PostLabel type;
    bool operator==(const Engagement&) const = default;
  };

  std::vector<TargetCounts> target_counts;
  std::vector<RepliesPerTweet> replies_per_tweet;
  std::vector<TargetedByIO> targeted_by_io;
  std::vector<ReplyDelay> reply_delays;
  std::vector<Engagement> engagement;

  bool operator==(const DerivedTables&) const = default;
};

struct Reject {
  std::string file;
  std::size_t line = 0;
  std::string reason;
  bool operator==(const Reject&) const = default;
};

struct FileManifest {
  std::string path;
  std::string schema;
  std::size_t rows = 0;
  std::size_t loaded = 0;
  std::size_t rejected = 0;
  bool operator==(const FileManifest&) const = default;
};

// Immutable after construction; safe to share across threads.
class Corpus {
 public:
  Corpus() = default;

  const std::map<std::string, Account>& accounts() const { return accounts_; }
  const std::map<std::string, Post>& posts() const { return posts_; }
  const std::vector<ReplyRecord>& replies() const { return replies_; }
  const std::vector<ReplyLink>& links() const { return links_; }
  const DerivedTables& tables() const { return tables_; }
  const std::vector<FileManifest>& provenance() const { return provenance_; }
  const std::vector<Reject>& rejects() const { return rejects_; }
  bool synthetic() const { return synthetic_; }

  const Account* account(const std::string& id) const;
  const Post* post(const std::string& id) const;

  // Reply indices (into replies()) per post / per replier, ordered by reply id.
  std::span<const std::size_t> replies_to(const std::string& tweet_id) const;
  std::span<const std::size_t> replies_by(const std::string& user_id) const;
  const std::map<std::string, std::vector<std::size_t>>& replies_by_post() const { return by_post_; }
  const std::map<std::string, std::vector<std::size_t>>& replies_by_replier() const { return by_replier_; }

  bool operator==(const Corpus& other) const;

  class Builder;

 private:
  void build_indexes();

  std::map<std::string, Account> accounts_;
  std::map<std::string, Post> posts_;
  std::vector<ReplyRecord> replies_;
  std::vector<ReplyLink> links_;
  DerivedTables tables_;
  std::vector<FileManifest> provenance_;
  std::vector<Reject> rejects_;
  bool synthetic_ = false;
  std::map<std::string, std::vector<std::size_t>> by_post_;
  std::map<std::string, std::vector<std::size_t>> by_replier_;
};

// Assembles a Corpus from in-memory records with the same validation rules
// load_corpus applies. Used by the loader and the synthetic generator.
class Corpus::Builder {
 public:
  // Each add_* returns an empty string on success or the reject reason.
  std::string add_account(Account a);
  std::string add_post(Post p);
  // Replies must be added after the accounts and posts they reference.
  std::string add_reply(ReplyRecord r);
  std::string add_link(ReplyLink l);
  DerivedTables& tables() { return corpus_.tables_; }

  void add_manifest(FileManifest m) { corpus_.provenance_.push_back(std::move(m)); }
  void add_reject(Reject r) { corpus_.rejects_.push_back(std::move(r)); }
  void mark_synthetic() { corpus_.synthetic_ = true; }

  Corpus build() &&;

 private:
  Corpus corpus_;
  std::map<std::string, bool> reply_ids_;
  std::map<std::string, bool> link_ids_;
};

// Column renames applied to headers before schema matching (from -> to).
using SchemaMap = std::map<std::string, std::string>;

// Schema names recognised by load_corpus, with their column lists.
struct SchemaSpec {
  std::string name;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};
const std::vector<SchemaSpec>& known_schemas();

// Identifies the schema of a header row; throws DataError on unknown headers.
const SchemaSpec& match_schema(const std::vector<std::string>& header, const SchemaMap& schema_map = {});

// Loads the published CSV layouts and the repo-defined ones. Missing file or unknown header throws
// DataError; unparsable or unresolvable rows are rejected and reported.
// Files are parsed in parallel and merged in a fixed schema order
// (accounts, posts, replies, links, tables) then by the given path order.
Corpus load_corpus(const std::vector<std::string>& paths, const SchemaMap& schema_map = {});

struct CorpusSummary {
  std::size_t accounts = 0;
  std::size_t io_accounts = 0;
  std::size_t normal_accounts = 0;
  std::size_t posts = 0;
  std::size_t targeted_posts = 0;
  std::size_t control_posts = 0;
  std::size_t replies = 0;
  std::size_t io_replies = 0;
  std::size_t io_repliers = 0;
  std::size_t normal_repliers = 0;
  std::size_t distinct_targets = 0;
  std::size_t skew_anomalous_replies = 0;
  std::size_t rejects = 0;
  bool operator==(const CorpusSummary&) const = default;
};

// Reply-level counts are taken over full reply records plus pairing-file links
// whose reply id has no full record.
CorpusSummary corpus_summary(const Corpus& corpus);

void write_rejects_csv(const Corpus& corpus, const std::string& path);

// Canonical CSV writers for the repo-defined full-record schemas.
void write_accounts_csv(const Corpus& corpus, const std::string& path);
void write_posts_csv(const Corpus& corpus, const std::string& path);
void write_replies_csv(const Corpus& corpus, const std::string& path);
void write_links_csv(const Corpus& corpus, const std::string& path);
void write_replier_info_csv(const Corpus& corpus, const std::string& path);

}  // namespace sentinel
