#include "sentinel/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>
#include <variant>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/parallel.hpp"

namespace sentinel {

std::string to_string(PostLabel label) {
  switch (label) {
    case PostLabel::kTargeted: return "target";
    case PostLabel::kControl: return "control";
    case PostLabel::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::string to_string(ReplierLabel label) { return label == ReplierLabel::kIO ? "1" : "0"; }

std::optional<PostLabel> parse_post_label(std::string_view text) {
  if (text == "target" || text == "targeted" || text == "1") return PostLabel::kTargeted;
  if (text == "control" || text == "0") return PostLabel::kControl;
  if (text.empty() || text == "unlabeled" || text == "non_target") return PostLabel::kUnlabeled;
  return std::nullopt;
}

std::optional<ReplierLabel> parse_replier_label(std::string_view text) {
  if (text == "1" || text == "io" || text == "IO" || text == "true") return ReplierLabel::kIO;
  if (text == "0" || text == "normal" || text == "false") return ReplierLabel::kNormal;
  return std::nullopt;
}

const Account* Corpus::account(const std::string& id) const {
  auto it = accounts_.find(id);
  return it == accounts_.end() ? nullptr : &it->second;
}

const Post* Corpus::post(const std::string& id) const {
  auto it = posts_.find(id);
  return it == posts_.end() ? nullptr : &it->second;
}

std::span<const std::size_t> Corpus::replies_to(const std::string& tweet_id) const {
  auto it = by_post_.find(tweet_id);
  if (it == by_post_.end()) return {};
  return it->second;
}

std::span<const std::size_t> Corpus::replies_by(const std::string& user_id) const {
  auto it = by_replier_.find(user_id);
  if (it == by_replier_.end()) return {};
  return it->second;
}

bool Corpus::operator==(const Corpus& o) const {
  return accounts_ == o.accounts_ && posts_ == o.posts_ && replies_ == o.replies_ && links_ == o.links_ &&
         tables_ == o.tables_ && provenance_ == o.provenance_ && rejects_ == o.rejects_ &&
         synthetic_ == o.synthetic_;
}

void Corpus::build_indexes() {
  by_post_.clear();
  by_replier_.clear();
  for (std::size_t i = 0; i < replies_.size(); ++i) {
    by_post_[replies_[i].target_tweet_id].push_back(i);
    by_replier_[replies_[i].replier_id].push_back(i);
  }
  auto by_reply_id = [this](std::size_t a, std::size_t b) {
    return replies_[a].reply_tweet_id < replies_[b].reply_tweet_id;
  };
  for (auto& [_, v] : by_post_) std::sort(v.begin(), v.end(), by_reply_id);
  for (auto& [_, v] : by_replier_) std::sort(v.begin(), v.end(), by_reply_id);
}

std::string Corpus::Builder::add_account(Account a) {
  if (a.user_id.empty()) return "empty user id";
  if (a.created_at && *a.created_at < kPlatformEpoch) return "account created before platform launch";
  if (a.age_years && !(std::isfinite(*a.age_years) && *a.age_years >= 0)) return "invalid age";
  if (corpus_.accounts_.contains(a.user_id)) return "duplicate user id " + a.user_id;
  std::string id = a.user_id;
  corpus_.accounts_.emplace(std::move(id), std::move(a));
  return {};
}

std::string Corpus::Builder::add_post(Post p) {
  if (p.tweet_id.empty()) return "empty tweet id";
  if (corpus_.posts_.contains(p.tweet_id)) return "duplicate tweet id " + p.tweet_id;
  std::string id = p.tweet_id;
  corpus_.posts_.emplace(std::move(id), std::move(p));
  return {};
}

std::string Corpus::Builder::add_reply(ReplyRecord r) {
  if (r.reply_tweet_id.empty()) return "empty reply id";
  if (reply_ids_.contains(r.reply_tweet_id)) return "duplicate reply id " + r.reply_tweet_id;
  if (!corpus_.accounts_.contains(r.replier_id)) return "unresolved replier " + r.replier_id;
  auto post = corpus_.posts_.find(r.target_tweet_id);
  if (post == corpus_.posts_.end()) return "unresolved target post " + r.target_tweet_id;
  r.skew_anomalous = r.created_at < post->second.created_at;
  reply_ids_.emplace(r.reply_tweet_id, true);
  corpus_.replies_.push_back(std::move(r));
  return {};
}

std::string Corpus::Builder::add_link(ReplyLink l) {
  if (l.replier_tweetid.empty()) return "empty reply id";
  if (link_ids_.contains(l.replier_tweetid)) return "duplicate reply id " + l.replier_tweetid;
  link_ids_.emplace(l.replier_tweetid, true);
  corpus_.links_.push_back(std::move(l));
  return {};
}

Corpus Corpus::Builder::build() && {
  corpus_.build_indexes();
  return std::move(corpus_);
}

// ---------------------------------------------------------------------------
// Schemas

const std::vector<SchemaSpec>& known_schemas() {
  static const std::vector<SchemaSpec> schemas = {
      {"accounts_full",
       {"userid", "created_at", "followers_count", "following_count", "activity_count", "replier_label"},
       {"campaign"}},
      {"replier_info",
       {"replier_userid", "activity_count", "replier_label", "following_count", "followers_count", "age"},
       {}},
      {"posts_full",
       {"tweetid", "author_userid", "created_at", "retweet_count", "like_count", "quote_count", "reply_count"},
       {"campaign", "type", "text"}},
      {"replies_full",
       {"replier_tweetid", "replier_userid", "poster_tweetid", "created_at", "like_count", "retweet_count",
        "reply_count", "mention_count", "hashtag_count", "url_count", "replier_label"},
       {"text"}},
      {"reply_links",
       {"poster_tweetid", "campaign", "replier_userid", "replier_label", "replier_tweetid", "type"},
       {}},
      {"target_follower_following_count", {"userid", "followers_count", "following_count"}, {}},
      {"number_of_reply_per_tweet", {"poster_tweetid", "reply_count"}, {}},
      {"num_targeted_tweet_by_io", {"poster_userid", "replier_userid", "count"}, {}},
      {"time_difference_of_reply", {"replier_tweetid", "diff_min"}, {}},
      {"engagement", {"tweetid", "retweet_count", "like_count", "quote_count", "type"}, {}},
      {"synthetic_marker", {"generator", "seed"}, {"config_digest"}},
  };
  return schemas;
}

namespace {

bool ignorable_column(const std::string& name) { return name.empty() || name.starts_with("Unnamed:"); }

std::vector<std::string> mapped_header(const std::vector<std::string>& header, const SchemaMap& schema_map) {
  std::vector<std::string> out;
  out.reserve(header.size());
  for (const auto& h : header) {
    auto it = schema_map.find(h);
    out.push_back(it == schema_map.end() ? h : it->second);
  }
  return out;
}

}  // namespace

const SchemaSpec& match_schema(const std::vector<std::string>& header, const SchemaMap& schema_map) {
  auto cols = mapped_header(header, schema_map);
  std::set<std::string> present;
  for (const auto& c : cols)
    if (!ignorable_column(c)) present.insert(c);
  const SchemaSpec* best = nullptr;
  for (const auto& s : known_schemas()) {
    std::set<std::string> allowed(s.required.begin(), s.required.end());
    allowed.insert(s.optional.begin(), s.optional.end());
    bool ok = std::all_of(s.required.begin(), s.required.end(), [&](const auto& c) { return present.contains(c); }) &&
              std::all_of(present.begin(), present.end(), [&](const auto& c) { return allowed.contains(c); });
    if (ok && (!best || s.required.size() > best->required.size())) best = &s;
  }
  if (!best) {
    std::string joined;
    for (const auto& c : header) joined += (joined.empty() ? "" : ",") + c;
    throw DataError("unknown header: " + joined);
  }
  return *best;
}

namespace {

std::optional<std::uint64_t> parse_count(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // Accept "12.0" as written by some exporters.
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    if (s.find_first_not_of('0', dot + 1) != std::string_view::npos) return std::nullopt;
    s = s.substr(0, dot);
  }
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct SyntheticMarker {
  std::string generator;
};

using Record = std::variant<Account, Post, ReplyRecord, ReplyLink, DerivedTables::TargetCounts,
                            DerivedTables::RepliesPerTweet, DerivedTables::TargetedByIO, DerivedTables::ReplyDelay,
                            DerivedTables::Engagement, SyntheticMarker>;

struct ParsedFile {
  std::string path;
  std::string schema;
  std::size_t rows = 0;
  std::vector<std::pair<std::size_t, Record>> records;  // (line, record)
  std::vector<Reject> rejects;
};

// Field accessor bound to one row; records the first failure.
class Fields {
 public:
  Fields(const csv::Row& row, const std::map<std::string, std::size_t>& cols) : row_(row), cols_(cols) {}

  const std::string* raw(const std::string& name) const {
    auto it = cols_.find(name);
    if (it == cols_.end() || it->second >= row_.size()) return nullptr;
    return &row_[it->second];
  }
  std::string str(const std::string& name) {
    const auto* v = raw(name);
    if (!v) fail("missing field " + name);
    return v ? *v : std::string{};
  }
  std::optional<std::string> opt_str(const std::string& name) const {
    const auto* v = raw(name);
    if (!v || v->empty()) return std::nullopt;
    return *v;
  }
  std::uint64_t count(const std::string& name) {
    auto v = parse_count(str(name));
    if (!v) fail("invalid count in " + name);
    return v.value_or(0);
  }
  double real(const std::string& name) {
    auto v = parse_real(str(name));
    if (!v) fail("invalid number in " + name);
    return v.value_or(0);
  }
  Timestamp time(const std::string& name) {
    auto v = parse_timestamp(str(name));
    if (!v) fail("invalid timestamp in " + name);
    return v.value_or(Timestamp{});
  }
  std::optional<Timestamp> opt_time(const std::string& name) {
    auto s = opt_str(name);
    if (!s) return std::nullopt;
    auto v = parse_timestamp(*s);
    if (!v) fail("invalid timestamp in " + name);
    return v;
  }
  ReplierLabel replier_label(const std::string& name) {
    auto v = parse_replier_label(str(name));
    if (!v) fail("invalid replier label in " + name);
    return v.value_or(ReplierLabel::kNormal);
  }
  PostLabel post_label(const std::string& name) {
    const auto* r = raw(name);
    if (!r) return PostLabel::kUnlabeled;
    auto v = parse_post_label(*r);
    if (!v) fail("invalid post type in " + name);
    return v.value_or(PostLabel::kUnlabeled);
  }

  void fail(std::string reason) {
    if (error_.empty()) error_ = std::move(reason);
  }
  const std::string& error() const { return error_; }

 private:
  const csv::Row& row_;
  const std::map<std::string, std::size_t>& cols_;
  std::string error_;
};

Record parse_record(const std::string& schema, Fields& f) {
  if (schema == "accounts_full") {
    Account a;
    a.user_id = f.str("userid");
    a.created_at = f.opt_time("created_at");
    a.followers_count = f.count("followers_count");
    a.following_count = f.count("following_count");
    a.activity_count = f.count("activity_count");
    a.is_io = f.replier_label("replier_label") == ReplierLabel::kIO;
    a.campaign = f.opt_str("campaign");
    return a;
  }
  if (schema == "replier_info") {
    Account a;
    a.user_id = f.str("replier_userid");
    a.activity_count = f.count("activity_count");
    a.is_io = f.replier_label("replier_label") == ReplierLabel::kIO;
    a.following_count = f.count("following_count");
    a.followers_count = f.count("followers_count");
    a.age_years = f.real("age");
    return a;
  }
  if (schema == "posts_full") {
    Post p;
    p.tweet_id = f.str("tweetid");
    p.author_id = f.str("author_userid");
    p.created_at = f.time("created_at");
    p.retweet_count = f.count("retweet_count");
    p.like_count = f.count("like_count");
    p.quote_count = f.count("quote_count");
    p.reply_count = f.count("reply_count");
    p.campaign = f.opt_str("campaign").value_or("");
    p.label = f.post_label("type");
    p.text = f.opt_str("text");
    return p;
  }
  if (schema == "replies_full") {
    ReplyRecord r;
    r.reply_tweet_id = f.str("replier_tweetid");
    r.replier_id = f.str("replier_userid");
    r.target_tweet_id = f.str("poster_tweetid");
    r.created_at = f.time("created_at");
    r.like_count = f.count("like_count");
    r.retweet_count = f.count("retweet_count");
    r.reply_count = f.count("reply_count");
    r.mention_count = f.count("mention_count");
    r.hashtag_count = f.count("hashtag_count");
    r.url_count = f.count("url_count");
    r.replier_label = f.replier_label("replier_label");
    r.text = f.opt_str("text");
    return r;
  }
  if (schema == "reply_links") {
    ReplyLink l;
    l.poster_tweetid = f.str("poster_tweetid");
    l.campaign = f.str("campaign");
    l.replier_userid = f.str("replier_userid");
    l.replier_label = f.replier_label("replier_label");
    l.replier_tweetid = f.str("replier_tweetid");
    l.type = f.post_label("type");
    return l;
  }
  if (schema == "target_follower_following_count")
    return DerivedTables::TargetCounts{f.str("userid"), f.count("followers_count"), f.count("following_count")};
  if (schema == "number_of_reply_per_tweet")
    return DerivedTables::RepliesPerTweet{f.str("poster_tweetid"), f.count("reply_count")};
  if (schema == "num_targeted_tweet_by_io")
    return DerivedTables::TargetedByIO{f.str("poster_userid"), f.str("replier_userid"), f.count("count")};
  if (schema == "time_difference_of_reply") {
    DerivedTables::ReplyDelay d{f.str("replier_tweetid"), f.real("diff_min")};
    return d;
  }
  if (schema == "synthetic_marker") return SyntheticMarker{f.str("generator")};
  DerivedTables::Engagement e{f.str("tweetid"), f.count("retweet_count"), f.count("like_count"),
                              f.count("quote_count"), f.post_label("type")};
  return e;
}

ParsedFile parse_file(const std::string& path, const SchemaMap& schema_map) {
  if (!std::filesystem::exists(path)) throw DataError("missing file: " + path);
  csv::Reader reader(path);
  const SchemaSpec& schema = match_schema(reader.header(), schema_map);
  auto header = mapped_header(reader.header(), schema_map);
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!ignorable_column(header[i])) cols.emplace(header[i], i);

  ParsedFile out;
  out.path = path;
  out.schema = schema.name;
  csv::Row row;
  while (reader.next(row)) {
    ++out.rows;
    if (row.size() != header.size()) {
      out.rejects.push_back({path, reader.line(), "expected " + std::to_string(header.size()) + " fields, got " +
                                                      std::to_string(row.size())});
      continue;
    }
    Fields f(row, cols);
    Record rec = parse_record(schema.name, f);
    if (!f.error().empty()) {
      out.rejects.push_back({path, reader.line(), f.error()});
      continue;
    }
    out.records.emplace_back(reader.line(), std::move(rec));
  }
  return out;
}

int schema_rank(const std::string& schema) {
  if (schema == "accounts_full" || schema == "replier_info") return 0;
  if (schema == "posts_full") return 1;
  if (schema == "replies_full") return 2;
  if (schema == "reply_links") return 3;
  return 4;
}

}  // namespace

Corpus load_corpus(const std::vector<std::string>& paths, const SchemaMap& schema_map) {
  for (const auto& p : paths)
    if (!std::filesystem::exists(p)) throw DataError("missing file: " + p);

  std::vector<ParsedFile> parsed(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { parsed[i] = parse_file(paths[i], schema_map); });

  std::vector<std::size_t> order(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return schema_rank(parsed[a].schema) < schema_rank(parsed[b].schema);
  });

  Corpus::Builder builder;
  std::vector<FileManifest> manifests(paths.size());
  for (std::size_t idx : order) {
    ParsedFile& file = parsed[idx];
    FileManifest m{file.path, file.schema, file.rows, 0, file.rejects.size()};
    for (auto& r : file.rejects) builder.add_reject(r);
    for (auto& [line, rec] : file.records) {
      std::string reason = std::visit(
          [&](auto&& value) -> std::string {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, Account>) return builder.add_account(std::move(value));
            else if constexpr (std::is_same_v<T, Post>) return builder.add_post(std::move(value));
            else if constexpr (std::is_same_v<T, ReplyRecord>) return builder.add_reply(std::move(value));
            else if constexpr (std::is_same_v<T, ReplyLink>) return builder.add_link(std::move(value));
            else if constexpr (std::is_same_v<T, DerivedTables::TargetCounts>) builder.tables().target_counts.push_back(std::move(value));
            else if constexpr (std::is_same_v<T, DerivedTables::RepliesPerTweet>) builder.tables().replies_per_tweet.push_back(std::move(value));
            else if constexpr (std::is_same_v<T, DerivedTables::TargetedByIO>) builder.tables().targeted_by_io.push_back(std::move(value));
            else if constexpr (std::is_same_v<T, DerivedTables::ReplyDelay>) builder.tables().reply_delays.push_back(std::move(value));
            else if constexpr (std::is_same_v<T, DerivedTables::Engagement>) builder.tables().engagement.push_back(std::move(value));
            else builder.mark_synthetic();
            return {};
          },
          rec);
      if (reason.empty()) {
        ++m.loaded;
      } else {
        ++m.rejected;
        builder.add_reject({file.path, line, reason});
      }
    }
    manifests[idx] = m;
  }
  for (auto& m : manifests) builder.add_manifest(std::move(m));
  return std::move(builder).build();
}

CorpusSummary corpus_summary(const Corpus& corpus) {
  CorpusSummary s;
  s.accounts = corpus.accounts().size();
  for (const auto& [_, a] : corpus.accounts()) (a.is_io ? s.io_accounts : s.normal_accounts)++;
  s.posts = corpus.posts().size();
  for (const auto& [_, p] : corpus.posts()) {
    if (p.label == PostLabel::kTargeted) ++s.targeted_posts;
    if (p.label == PostLabel::kControl) ++s.control_posts;
  }

  std::set<std::string> reply_ids, io_repliers, normal_repliers, targets;
  auto visit = [&](const std::string& reply_id, const std::string& replier, ReplierLabel label,
                   const std::string& target_author) {
    if (!reply_ids.insert(reply_id).second) return;
    ++s.replies;
    if (label == ReplierLabel::kIO) {
      ++s.io_replies;
      io_repliers.insert(replier);
      if (!target_author.empty()) targets.insert(target_author);
    } else {
      normal_repliers.insert(replier);
    }
  };
  for (const auto& r : corpus.replies()) {
    const Post* p = corpus.post(r.target_tweet_id);
    visit(r.reply_tweet_id, r.replier_id, r.replier_label, p ? p->author_id : std::string{});
    if (r.skew_anomalous) ++s.skew_anomalous_replies;
  }
  for (const auto& l : corpus.links()) {
    const Post* p = corpus.post(l.poster_tweetid);
    // Without post records the poster tweet stands in for its author.
    visit(l.replier_tweetid, l.replier_userid, l.replier_label, p ? p->author_id : "tweet:" + l.poster_tweetid);
  }
  s.io_repliers = io_repliers.size();
  s.normal_repliers = normal_repliers.size();
  s.distinct_targets = targets.size();
  s.rejects = corpus.rejects().size();
  return s;
}

void write_rejects_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"file", "line", "reason"});
  for (const auto& r : corpus.rejects()) w.row({r.file, std::to_string(r.line), r.reason});
}

void write_accounts_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"userid", "created_at", "followers_count", "following_count", "activity_count", "replier_label",
         "campaign"});
  for (const auto& [id, a] : corpus.accounts()) {
    w.row({id, a.created_at ? format_timestamp(*a.created_at) : "", std::to_string(a.followers_count),
           std::to_string(a.following_count), std::to_string(a.activity_count), a.is_io ? "1" : "0",
           a.campaign.value_or("")});
  }
}

void write_replier_info_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"replier_userid", "activity_count", "replier_label", "following_count", "followers_count", "age"});
  for (const auto& [id, a] : corpus.accounts()) {
    if (corpus.replies_by(id).empty()) continue;
    std::string age;
    if (a.age_years) {
      age = csv::format_double(*a.age_years);
    } else if (a.created_at) {
      Timestamp last = *a.created_at;
      for (std::size_t i : corpus.replies_by(id)) last = std::max(last, corpus.replies()[i].created_at);
      age = csv::format_double(years_between(*a.created_at, last));
    }
    w.row({id, std::to_string(a.activity_count), a.is_io ? "1" : "0", std::to_string(a.following_count),
           std::to_string(a.followers_count), age});
  }
}

void write_posts_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"tweetid", "author_userid", "created_at", "retweet_count", "like_count", "quote_count", "reply_count",
         "campaign", "type", "text"});
  for (const auto& [id, p] : corpus.posts()) {
    w.row({id, p.author_id, format_timestamp(p.created_at), std::to_string(p.retweet_count),
           std::to_string(p.like_count), std::to_string(p.quote_count), std::to_string(p.reply_count), p.campaign,
           to_string(p.label), p.text.value_or("")});
  }
}

void write_replies_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"replier_tweetid", "replier_userid", "poster_tweetid", "created_at", "like_count", "retweet_count",
         "reply_count", "mention_count", "hashtag_count", "url_count", "replier_label", "text"});
  for (const auto& r : corpus.replies()) {
    w.row({r.reply_tweet_id, r.replier_id, r.target_tweet_id, format_timestamp(r.created_at),
           std::to_string(r.like_count), std::to_string(r.retweet_count), std::to_string(r.reply_count),
           std::to_string(r.mention_count), std::to_string(r.hashtag_count), std::to_string(r.url_count),
           to_string(r.replier_label), r.text.value_or("")});
  }
}

void write_links_csv(const Corpus& corpus, const std::string& path) {
  csv::Writer w(path);
  w.row({"poster_tweetid", "campaign", "replier_userid", "replier_label", "replier_tweetid", "type"});
  for (const auto& r : corpus.replies()) {
    const Post* p = corpus.post(r.target_tweet_id);
    w.row({r.target_tweet_id, p ? p->campaign : "", r.replier_id, to_string(r.replier_label), r.reply_tweet_id,
           p ? to_string(p->label) : "unlabeled"});
  }
}

}  // namespace sentinel
