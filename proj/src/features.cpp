#include "sentinel/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <tuple>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

const std::vector<std::string>& tweet_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (auto f : kTweetLevelFeatures) n.push_back("tweet." + std::string(f));
    for (auto a : kReplyAttributes)
      for (auto s : Summary12::names()) n.push_back("reply." + std::string(a) + "." + std::string(s));
    return n;
  }();
  return names;
}

const std::vector<std::string>& replier_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (auto f : kProfileFeatures) n.push_back("profile." + std::string(f));
    for (auto a : kReplyAttributes)
      for (auto s : Summary9::names()) n.push_back("reply." + std::string(a) + "." + std::string(s));
    return n;
  }();
  return names;
}

std::array<double, 7> reply_attribute_values(const ReplyRecord& r, const Post& target) {
  return {static_cast<double>(r.like_count),    static_cast<double>(r.retweet_count),
          static_cast<double>(r.reply_count),   static_cast<double>(r.mention_count),
          static_cast<double>(r.hashtag_count), static_cast<double>(r.url_count),
          std::max(0.0, minutes_between(target.created_at, r.created_at))};
}

namespace {

std::array<std::vector<double>, 7> attribute_columns(std::span<const ReplyRecord* const> replies,
                                                     const std::function<const Post&(const ReplyRecord&)>& target) {
  std::array<std::vector<double>, 7> cols;
  for (auto& c : cols) c.reserve(replies.size());
  for (const ReplyRecord* r : replies) {
    auto v = reply_attribute_values(*r, target(*r));
    for (std::size_t a = 0; a < v.size(); ++a) cols[a].push_back(v[a]);
  }
  return cols;
}

}  // namespace

FeatureVector tweet_features(const Post& post, std::span<const ReplyRecord* const> replies,
                             const Summary12& cosine_summary, std::size_t min_total_replies) {
  if (replies.size() < std::max<std::size_t>(min_total_replies, 1)) throw DataError("below reply floor: " + post.tweet_id);
  FeatureVector fv;
  fv.entity_id = post.tweet_id;
  fv.campaign = post.campaign;
  fv.label = post.label == PostLabel::kTargeted ? 1 : 0;
  fv.values.reserve(kTweetFeatureCount);
  fv.values.push_back(static_cast<double>(post.reply_count));
  fv.values.push_back(static_cast<double>(post.retweet_count));
  fv.values.push_back(static_cast<double>(post.like_count));
  auto cols = attribute_columns(replies, [&](const ReplyRecord&) -> const Post& { return post; });
  for (const auto& c : cols) {
    auto s = summarize12(c).values();
    fv.values.insert(fv.values.end(), s.begin(), s.end());
  }
  auto s = cosine_summary.values();
  fv.values.insert(fv.values.end(), s.begin(), s.end());
  return fv;
}

FeatureVector tweet_features(const Post& post, std::span<const ReplyRecord* const> replies,
                             const AttributeSample& cosine_sample, std::size_t min_total_replies) {
  if (replies.size() < std::max<std::size_t>(min_total_replies, 1)) throw DataError("below reply floor: " + post.tweet_id);
  return tweet_features(post, replies, summarize12(cosine_sample), min_total_replies);
}

std::optional<ReplierProfile> replier_profile(const Account& account, std::span<const ReplyRecord* const> replies) {
  double age = 0;
  if (account.created_at && !replies.empty()) {
    Timestamp last = replies.front()->created_at;
    for (const ReplyRecord* r : replies) last = std::max(last, r->created_at);
    age = years_between(*account.created_at, last);
  } else if (account.age_years) {
    age = *account.age_years;
  } else {
    return std::nullopt;
  }
  ReplierProfile p;
  p.age = std::max(age, kMinAgeYears);
  p.follower_rate = static_cast<double>(account.followers_count) / p.age;
  p.following_rate = static_cast<double>(account.following_count) / p.age;
  p.activity_rate = static_cast<double>(account.activity_count) / p.age;
  return p;
}

std::optional<FeatureVector> replier_features(const Corpus& corpus, const Account& account,
                                              std::span<const ReplyRecord* const> replies,
                                              std::span<const double> cosine_sample) {
  std::optional<Summary9> summary;
  if (!cosine_sample.empty()) summary = summarize9(cosine_sample);
  return replier_features(corpus, account, replies, summary);
}

std::optional<FeatureVector> replier_features(const Corpus& corpus, const Account& account,
                                              std::span<const ReplyRecord* const> replies,
                                              const std::optional<Summary9>& cosine_summary) {
  if (replies.empty()) throw InvalidArgument("replier has no replies to targeted posts: " + account.user_id);
  auto profile = replier_profile(account, replies);
  if (!profile) return std::nullopt;

  FeatureVector fv;
  fv.entity_id = account.user_id;
  fv.label = account.is_io ? 1 : 0;
  fv.values.reserve(kReplierFeatureCount);
  fv.values.insert(fv.values.end(), {profile->age, profile->follower_rate, profile->following_rate, profile->activity_rate});

  auto cols = attribute_columns(replies, [&](const ReplyRecord& r) -> const Post& {
    const Post* p = corpus.post(r.target_tweet_id);
    if (!p) throw DataError("reply target missing: " + r.target_tweet_id);
    return *p;
  });
  for (const auto& c : cols) {
    auto s = summarize9(c).values();
    fv.values.insert(fv.values.end(), s.begin(), s.end());
  }
  if (!cosine_summary) {
    fv.values.insert(fv.values.end(), Summary9::kSize, 0.0);
    fv.imputed = true;
  } else {
    auto s = cosine_summary->values();
    fv.values.insert(fv.values.end(), s.begin(), s.end());
  }

  if (account.campaign) {
    fv.campaign = *account.campaign;
  } else {
    const ReplyRecord* first = *std::min_element(replies.begin(), replies.end(), [](auto* a, auto* b) {
      return std::tie(a->created_at, a->reply_tweet_id) < std::tie(b->created_at, b->reply_tweet_id);
    });
    fv.campaign = corpus.post(first->target_tweet_id)->campaign;
  }
  return fv;
}

// ---------------------------------------------------------------------------

std::size_t FeatureMatrix::positives() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
  FeatureMatrix m;
  m.names = names;
  m.x = x.select_rows(idx);
  for (std::size_t i : idx) {
    if (!ids.empty()) m.ids.push_back(ids[i]);
    if (!campaigns.empty()) m.campaigns.push_back(campaigns[i]);
    m.y.push_back(y[i]);
  }
  return m;
}

FeatureMatrix FeatureMatrix::select_features(std::span<const std::size_t> cols) const {
  FeatureMatrix m;
  for (std::size_t c : cols) m.names.push_back(names.at(c));
  m.ids = ids;
  m.campaigns = campaigns;
  m.x = x.select_cols(cols);
  m.y = y;
  return m;
}

void FeatureMatrix::append(const FeatureVector& v) {
  if (v.values.size() != names.size()) throw InvalidArgument("feature vector length does not match schema");
  if (x.rows() == 0) x = Matrix(0, names.size());
  x.append_row(v.values);
  ids.push_back(v.entity_id);
  campaigns.push_back(v.campaign);
  y.push_back(v.label);
}

void write_feature_csv(const FeatureMatrix& m, const std::string& path) {
  csv::Writer w(path);
  std::vector<std::string> header{"entity_id", "campaign"};
  header.insert(header.end(), m.names.begin(), m.names.end());
  header.push_back("label");
  w.row(header);
  std::vector<std::string> row;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    row.clear();
    row.push_back(r < m.ids.size() ? m.ids[r] : std::to_string(r));
    row.push_back(r < m.campaigns.size() ? m.campaigns[r] : "");
    for (double v : m.x.row(r)) row.push_back(csv::format_double(v));
    row.push_back(std::to_string(m.y[r]));
    w.row(row);
  }
}

FeatureMatrix load_feature_csv(const std::string& path, FeatureLoadReport* report) {
  csv::Reader reader(path);
  const auto& header = reader.header();
  std::optional<std::size_t> label_col, id_col, campaign_col;
  std::vector<std::size_t> feature_cols;
  FeatureMatrix m;
  static const std::vector<std::string> kLabels = {"label", "tweet_label", "replier_label"};
  static const std::vector<std::string> kIds = {"entity_id", "tweetid",        "tweet_id", "poster_tweetid",
                                                "replier_userid", "userid", "user_id"};
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.empty() || h.starts_with("Unnamed:")) continue;
    if (!label_col && std::find(kLabels.begin(), kLabels.end(), h) != kLabels.end()) {
      label_col = i;
    } else if (!id_col && std::find(kIds.begin(), kIds.end(), h) != kIds.end()) {
      id_col = i;
    } else if (!campaign_col && h == "campaign") {
      campaign_col = i;
    } else {
      feature_cols.push_back(i);
      m.names.push_back(h);
    }
  }
  if (!label_col) throw DataError("feature file has no label column: " + path);
  if (feature_cols.empty()) throw DataError("feature file has no feature columns: " + path);

  FeatureLoadReport rep;
  rep.label_column = header[*label_col];
  m.x = Matrix(0, feature_cols.size());
  std::vector<double> values(feature_cols.size());
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() != header.size())
      throw DataError("feature row width mismatch at line " + std::to_string(reader.line()));
    const std::string& lab = row[*label_col];
    int label;
    if (lab == "1" || lab == "1.0" || lab == "True" || lab == "true") label = 1;
    else if (lab == "0" || lab == "0.0" || lab == "False" || lab == "false") label = 0;
    else throw DataError("invalid label '" + lab + "' at line " + std::to_string(reader.line()));
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const std::string& f = row[feature_cols[j]];
      double v = 0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        if (!f.empty() && f != "nan" && f != "NaN" && f != "inf" && f != "-inf" && res.ec == std::errc{} &&
            res.ptr != f.data() + f.size())
          throw DataError("invalid feature value '" + f + "' at line " + std::to_string(reader.line()));
        v = 0;
        ++rep.imputed_cells;
      }
      values[j] = v;
    }
    m.x.append_row(values);
    m.y.push_back(label);
    m.ids.push_back(id_col ? row[*id_col] : std::to_string(rep.rows));
    m.campaigns.push_back(campaign_col ? row[*campaign_col] : "");
    ++rep.rows;
  }
  if (report) *report = rep;
  return m;
}

std::map<std::string, std::vector<std::size_t>> feature_groups(const std::vector<std::string>& names) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    std::string key = n;
    if (n.starts_with("reply.")) {
      auto dot = n.find('.', 6);
      key = n.substr(6, dot == std::string::npos ? std::string::npos : dot - 6);
    }
    groups[key].push_back(i);
  }
  return groups;
}

std::map<std::string, std::vector<std::size_t>> feature_sets(const std::vector<std::string>& names) {
  std::map<std::string, std::vector<std::size_t>> sets;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    if (n.starts_with("tweet.")) sets["tweet_level"].push_back(i);
    else if (n.starts_with("profile.")) sets["profile"].push_back(i);
    else if (n.starts_with("reply.like_count.") || n.starts_with("reply.retweet_count.") ||
             n.starts_with("reply.reply_count."))
      sets["engagement"].push_back(i);
    else if (n.starts_with("reply.mention_count.") || n.starts_with("reply.hashtag_count.") ||
             n.starts_with("reply.url_count."))
      sets["entities"].push_back(i);
    else if (n.starts_with("reply.reply_time_diff.")) sets["delay"].push_back(i);
    else if (n.starts_with("reply.cosine.")) sets["similarity"].push_back(i);
  }
  return sets;
}

// ---------------------------------------------------------------------------

FeatureMatrix build_tweet_matrix(const Corpus& corpus, const ClassificationDataset& dataset,
                                 const std::map<std::string, Summary12>& cosine, std::size_t min_total_replies,
                                 std::vector<std::string>* below_floor) {
  FeatureMatrix m;
  m.names = tweet_feature_names();
  std::set<std::string> ids(dataset.positives.begin(), dataset.positives.end());
  ids.insert(dataset.negatives.begin(), dataset.negatives.end());
  for (const auto& id : ids) {
    const Post* post = corpus.post(id);
    if (!post) continue;
    std::vector<const ReplyRecord*> replies;
    for (std::size_t i : corpus.replies_to(id)) replies.push_back(&corpus.replies()[i]);
    if (replies.size() < std::max<std::size_t>(min_total_replies, 1)) {
      if (below_floor) below_floor->push_back(id);
      continue;
    }
    auto it = cosine.find(id);
    FeatureVector fv = tweet_features(*post, replies, it == cosine.end() ? Summary12{} : it->second, min_total_replies);
    fv.label = dataset.positives.contains(id) ? 1 : 0;
    if (auto c = dataset.campaign.find(id); c != dataset.campaign.end()) fv.campaign = c->second;
    m.append(fv);
  }
  if (m.x.rows() == 0) m.x = Matrix(0, m.names.size());
  return m;
}

ExtractedFeatures extract_features(const Corpus& corpus, const ClassificationDataset& dataset,
                                   const SimilaritySource& source, const ExtractionOptions& options) {
  ExtractedFeatures out;
  std::set<std::string> scope(dataset.positives.begin(), dataset.positives.end());
  scope.insert(dataset.negatives.begin(), dataset.negatives.end());

  TweetSimilarityCollector tweets;
  ReplierSampleAccumulator repliers(options.spill_dir);
  auto sink = [&](const PostPairs& block) {
    tweets(block);
    repliers.consume(block, dataset.positives);
    if (options.tap) options.tap(block);
  };
  if (source.provider) {
    out.report.join = coreply_pair_join(corpus, *source.provider, scope, sink, options.join);
  } else if (!source.pairs_path.empty()) {
    out.report.join = replay_pairs_file(source.pairs_path, scope, sink);
  } else {
    throw InvalidArgument("no similarity source");
  }

  out.tweets = build_tweet_matrix(corpus, dataset, tweets.summaries(), options.min_total_replies,
                                  &out.report.below_floor);
  out.report.tweets = out.tweets.rows();

  std::map<std::string, Summary9> summaries;
  repliers.for_each([&](const std::string& id, std::vector<double>& values) { summaries.emplace(id, summarize9(values)); });

  std::map<std::string, std::vector<const ReplyRecord*>> by_replier;
  for (const auto& post : dataset.positives)
    for (std::size_t i : corpus.replies_to(post)) by_replier[corpus.replies()[i].replier_id].push_back(&corpus.replies()[i]);

  out.repliers.names = replier_feature_names();
  out.repliers.x = Matrix(0, out.repliers.names.size());
  for (auto& [id, replies] : by_replier) {
    std::sort(replies.begin(), replies.end(),
              [](auto* a, auto* b) { return a->reply_tweet_id < b->reply_tweet_id; });
    const Account* account = corpus.account(id);
    auto it = summaries.find(id);
    std::optional<Summary9> summary;
    if (it != summaries.end()) summary = it->second;
    auto fv = account ? replier_features(corpus, *account, replies, summary) : std::nullopt;
    if (!fv) {
      out.report.excluded_repliers.push_back(id);
      continue;
    }
    if (fv->imputed) out.report.imputed_repliers.push_back(id);
    out.repliers.append(*fv);
  }
  out.report.repliers = out.repliers.rows();
  return out;
}

}  // namespace sentinel
