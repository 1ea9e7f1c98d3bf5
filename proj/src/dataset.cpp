#include "sentinel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <json.hpp>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

std::map<std::string, std::size_t> io_reply_counts(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  std::set<std::string> seen;
  for (const auto& r : corpus.replies()) {
    seen.insert(r.reply_tweet_id);
    if (r.replier_label == ReplierLabel::kIO) counts[r.target_tweet_id]++;
  }
  for (const auto& l : corpus.links()) {
    if (seen.contains(l.replier_tweetid)) continue;
    if (l.replier_label == ReplierLabel::kIO) counts[l.poster_tweetid]++;
  }
  return counts;
}

std::set<std::string> select_targeted(const Corpus& corpus, std::size_t min_io_replies) {
  std::set<std::string> out;
  for (const auto& [post, n] : io_reply_counts(corpus))
    if (n >= min_io_replies) out.insert(post);
  return out;
}

namespace {

bool chrono_less(const Post* a, const Post* b) {
  if (a->created_at != b->created_at) return a->created_at < b->created_at;
  return a->tweet_id < b->tweet_id;
}

}  // namespace

ClassificationDataset select_controls(const Corpus& corpus, const std::set<std::string>& targeted,
                                      std::size_t min_total_replies) {
  if (targeted.empty()) throw InvalidArgument("no targeted posts");
  ClassificationDataset ds;

  std::map<std::string, std::vector<const Post*>> posts_by_author;
  for (const auto& [_, p] : corpus.posts()) posts_by_author[p.author_id].push_back(&p);

  std::map<std::string, Timestamp> last_io_reply;
  for (const auto& r : corpus.replies()) {
    if (r.replier_label != ReplierLabel::kIO) continue;
    const Post* p = corpus.post(r.target_tweet_id);
    auto [it, inserted] = last_io_reply.try_emplace(p->author_id, r.created_at);
    if (!inserted) it->second = std::max(it->second, r.created_at);
  }

  std::map<std::string, std::vector<const Post*>> targeted_by_author;
  for (const auto& id : targeted) {
    const Post* p = corpus.post(id);
    if (!p) {
      ds.unresolved_targeted.push_back(id);
      continue;
    }
    std::size_t total = corpus.replies_to(id).size();
    if (total > 0 && total < min_total_replies) continue;
    targeted_by_author[p->author_id].push_back(p);
  }

  for (auto& [author, tposts] : targeted_by_author) {
    std::sort(tposts.begin(), tposts.end(), chrono_less);
    auto last = last_io_reply.find(author);
    std::vector<const Post*> candidates;
    for (const Post* p : posts_by_author[author]) {
      if (targeted.contains(p->tweet_id)) continue;
      if (last != last_io_reply.end() && !(p->created_at > last->second)) continue;
      if (corpus.replies_to(p->tweet_id).size() < min_total_replies) continue;
      candidates.push_back(p);
    }
    std::sort(candidates.begin(), candidates.end(), chrono_less);
    if (candidates.empty()) {
      ds.dropped_authors.push_back(author);
      continue;
    }
    const std::size_t n = std::min(tposts.size(), candidates.size());
    ClassificationDataset::Pairing pairing;
    for (std::size_t i = tposts.size() - n; i < tposts.size(); ++i) pairing.targeted.push_back(tposts[i]->tweet_id);
    for (std::size_t i = 0; i < n; ++i) pairing.controls.push_back(candidates[i]->tweet_id);
    for (const auto& id : pairing.targeted) {
      ds.positives.insert(id);
      ds.campaign[id] = corpus.post(id)->campaign;
    }
    for (const auto& id : pairing.controls) {
      ds.negatives.insert(id);
      ds.campaign[id] = corpus.post(id)->campaign;
    }
    ds.per_target.emplace(author, std::move(pairing));
  }
  return ds;
}

ClassificationDataset build_classification_dataset(const Corpus& corpus, std::size_t min_io_replies,
                                                   std::size_t min_total_replies) {
  auto targeted = select_targeted(corpus, min_io_replies);
  if (targeted.empty()) return {};
  return select_controls(corpus, targeted, min_total_replies);
}

void write_classification_dataset(const ClassificationDataset& ds, const std::string& path) {
  csv::Writer w(path);
  w.row({"tweetid", "type", "campaign"});
  std::map<std::string, std::string> rows;
  for (const auto& id : ds.positives) rows[id] = "target";
  for (const auto& id : ds.negatives) rows[id] = "control";
  for (const auto& [id, type] : rows) {
    auto it = ds.campaign.find(id);
    w.row({id, type, it == ds.campaign.end() ? "" : it->second});
  }
}

void write_engagement_csv(const Corpus& corpus, const ClassificationDataset& ds, const std::string& path) {
  csv::Writer w(path);
  w.row({"tweetid", "retweet_count", "like_count", "quote_count", "type"});
  std::map<std::string, std::string> rows;
  for (const auto& id : ds.positives) rows[id] = "target";
  for (const auto& id : ds.negatives) rows[id] = "control";
  for (const auto& [id, type] : rows) {
    const Post* p = corpus.post(id);
    if (!p) continue;
    w.row({id, std::to_string(p->retweet_count), std::to_string(p->like_count), std::to_string(p->quote_count), type});
  }
}

std::vector<CcdfPoint> ccdf(std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    out.push_back({v[i], static_cast<double>(v.size() - i) / n});
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalnum(c) || c == '_' || c == '#' || c == '@') {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

namespace {

std::vector<TermCount> term_counts(const std::vector<std::string>& texts, const std::set<std::string>& stop_words) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& t : texts)
    for (auto& tok : tokenize(t)) {
      if (stop_words.contains(tok)) continue;
      counts[tok]++;
      ++total;
    }
  std::vector<TermCount> out;
  for (auto& [term, n] : counts) out.push_back({term, n, static_cast<double>(n) / static_cast<double>(total)});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

}  // namespace

Rq1Report rq1_report(const Corpus& corpus, const std::set<std::string>& stop_words, std::size_t min_io_replies) {
  Rq1Report rep;
  const auto io_counts = io_reply_counts(corpus);
  const auto targeted = select_targeted(corpus, min_io_replies);

  // Targets and their targeted-post counts.
  std::map<std::string, std::size_t> per_target;
  for (const auto& id : targeted)
    if (const Post* p = corpus.post(id)) per_target[p->author_id]++;

  Distribution followers{"target_followers", {}}, following{"target_following", {}};
  if (!per_target.empty()) {
    for (const auto& [author, _] : per_target) {
      if (const Account* a = corpus.account(author)) {
        followers.values.push_back(static_cast<double>(a->followers_count));
        following.values.push_back(static_cast<double>(a->following_count));
        rep.tables.target_counts.push_back({author, a->followers_count, a->following_count});
      }
    }
  }
  if (rep.tables.target_counts.empty()) {
    for (const auto& t : corpus.tables().target_counts) {
      followers.values.push_back(static_cast<double>(t.followers_count));
      following.values.push_back(static_cast<double>(t.following_count));
      rep.tables.target_counts.push_back(t);
    }
  }

  Distribution posts_per_target{"targeted_posts_per_target", {}};
  for (const auto& [_, n] : per_target) posts_per_target.values.push_back(static_cast<double>(n));

  Distribution io_per_post{"io_replies_per_targeted_post", {}};
  for (const auto& id : targeted) {
    std::size_t n = io_counts.at(id);
    io_per_post.values.push_back(static_cast<double>(n));
    rep.tables.replies_per_tweet.push_back({id, n});
  }
  if (targeted.empty()) {
    for (const auto& r : corpus.tables().replies_per_tweet) {
      io_per_post.values.push_back(static_cast<double>(r.reply_count));
      rep.tables.replies_per_tweet.push_back(r);
    }
  }

  Distribution delays{"io_reply_delay_minutes", {}};
  std::map<std::pair<std::string, std::string>, std::size_t> pair_counts;
  for (const auto& id : targeted) {
    const Post* p = corpus.post(id);
    if (!p) continue;
    std::set<std::string> repliers;
    for (std::size_t i : corpus.replies_to(id)) {
      const ReplyRecord& r = corpus.replies()[i];
      if (r.replier_label != ReplierLabel::kIO) continue;
      double d = std::max(0.0, minutes_between(p->created_at, r.created_at));
      delays.values.push_back(d);
      rep.tables.reply_delays.push_back({r.reply_tweet_id, d});
      repliers.insert(r.replier_id);
    }
    for (const auto& u : repliers) pair_counts[{p->author_id, u}]++;
  }
  if (rep.tables.reply_delays.empty()) {
    for (const auto& d : corpus.tables().reply_delays) {
      delays.values.push_back(d.diff_min);
      rep.tables.reply_delays.push_back(d);
    }
  }
  for (const auto& [key, n] : pair_counts) rep.tables.targeted_by_io.push_back({key.first, key.second, n});
  if (rep.tables.targeted_by_io.empty()) rep.tables.targeted_by_io = corpus.tables().targeted_by_io;

  // Replier metadata by label, over repliers to targeted posts.
  Distribution age[2] = {{"normal_replier_age_years", {}}, {"io_replier_age_years", {}}};
  Distribution fol[2] = {{"normal_replier_followers", {}}, {"io_replier_followers", {}}};
  Distribution fng[2] = {{"normal_replier_following", {}}, {"io_replier_following", {}}};
  Distribution act[2] = {{"normal_replier_activity", {}}, {"io_replier_activity", {}}};
  std::set<std::string> repliers;
  for (const auto& id : targeted)
    for (std::size_t i : corpus.replies_to(id)) repliers.insert(corpus.replies()[i].replier_id);
  if (repliers.empty())
    for (const auto& [id, a] : corpus.accounts())
      if (a.age_years) repliers.insert(id);
  for (const auto& id : repliers) {
    const Account* a = corpus.account(id);
    if (!a) continue;
    int k = a->is_io ? 1 : 0;
    std::optional<double> years = a->age_years;
    if (!years && a->created_at) {
      Timestamp last = *a->created_at;
      for (std::size_t i : corpus.replies_by(id)) last = std::max(last, corpus.replies()[i].created_at);
      years = years_between(*a->created_at, last);
    }
    if (years) age[k].values.push_back(*years);
    fol[k].values.push_back(static_cast<double>(a->followers_count));
    fng[k].values.push_back(static_cast<double>(a->following_count));
    act[k].values.push_back(static_cast<double>(a->activity_count));
  }

  // Engagement of the classification dataset by type.
  Distribution eng[2][4] = {{{"target_retweet_count", {}}, {"target_like_count", {}}, {"target_quote_count", {}},
                             {"target_reply_count", {}}},
                            {{"control_retweet_count", {}}, {"control_like_count", {}}, {"control_quote_count", {}},
                             {"control_reply_count", {}}}};
  if (!targeted.empty() && !corpus.replies().empty()) {
    auto ds = select_controls(corpus, targeted);
    auto add = [&](const std::set<std::string>& ids, int k) {
      for (const auto& id : ids) {
        const Post* p = corpus.post(id);
        eng[k][0].values.push_back(static_cast<double>(p->retweet_count));
        eng[k][1].values.push_back(static_cast<double>(p->like_count));
        eng[k][2].values.push_back(static_cast<double>(p->quote_count));
        eng[k][3].values.push_back(static_cast<double>(p->reply_count));
      }
    };
    add(ds.positives, 0);
    add(ds.negatives, 1);
    for (const auto& id : ds.positives) {
      const Post* p = corpus.post(id);
      rep.tables.engagement.push_back({id, p->retweet_count, p->like_count, p->quote_count, PostLabel::kTargeted});
    }
    for (const auto& id : ds.negatives) {
      const Post* p = corpus.post(id);
      rep.tables.engagement.push_back({id, p->retweet_count, p->like_count, p->quote_count, PostLabel::kControl});
    }
  } else {
    for (const auto& e : corpus.tables().engagement) {
      int k = e.type == PostLabel::kTargeted ? 0 : 1;
      eng[k][0].values.push_back(static_cast<double>(e.retweet_count));
      eng[k][1].values.push_back(static_cast<double>(e.like_count));
      eng[k][2].values.push_back(static_cast<double>(e.quote_count));
      rep.tables.engagement.push_back(e);
    }
  }

  for (auto* d : {&followers, &following, &posts_per_target, &io_per_post, &delays}) rep.distributions.push_back(std::move(*d));
  for (int k : {1, 0}) {
    rep.distributions.push_back(std::move(age[k]));
    rep.distributions.push_back(std::move(fol[k]));
    rep.distributions.push_back(std::move(fng[k]));
    rep.distributions.push_back(std::move(act[k]));
  }
  for (auto& row : eng)
    for (auto& d : row) rep.distributions.push_back(std::move(d));

  // Term frequencies over texts of posts by targets.
  std::vector<std::string> t_texts, n_texts;
  for (const auto& [id, p] : corpus.posts()) {
    if (!p.text || !per_target.contains(p.author_id)) continue;
    (targeted.contains(id) ? t_texts : n_texts).push_back(*p.text);
  }
  rep.targeted_terms = term_counts(t_texts, stop_words);
  rep.non_targeted_terms = term_counts(n_texts, stop_words);
  return rep;
}

void write_rq1_report(const Rq1Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  namespace fs = std::filesystem;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& d : report.distributions) {
    nlohmann::ordered_json entry;
    entry["count"] = d.values.size();
    if (!d.values.empty()) {
      entry["median"] = quantile(d.values, 0.5);
      entry["mean"] = std::accumulate(d.values.begin(), d.values.end(), 0.0) / static_cast<double>(d.values.size());
      csv::Writer w((fs::path(dir) / ("ccdf_" + d.name + ".csv")).string());
      w.row({"value", "ccdf"});
      for (const auto& p : ccdf(d.values)) w.row({csv::format_double(p.value), csv::format_double(p.fraction)});
    } else {
      entry["median"] = nullptr;
      entry["mean"] = nullptr;
    }
    summary[d.name] = entry;
  }
  std::ofstream((fs::path(dir) / "rq1_summary.json").string()) << summary.dump(2) << '\n';

  const auto& t = report.tables;
  {
    csv::Writer w((fs::path(dir) / "RQ1_target_follower_following_count.csv").string());
    w.row({"userid", "followers_count", "following_count"});
    for (const auto& r : t.target_counts)
      w.row({r.userid, std::to_string(r.followers_count), std::to_string(r.following_count)});
  }
  {
    csv::Writer w((fs::path(dir) / "RQ1_number_of_reply_per_tweet.csv").string());
    w.row({"poster_tweetid", "reply_count"});
    for (const auto& r : t.replies_per_tweet) w.row({r.poster_tweetid, std::to_string(r.reply_count)});
  }
  {
    csv::Writer w((fs::path(dir) / "RQ1_num_targeted_tweet_by_IO.csv").string());
    w.row({"poster_userid", "replier_userid", "count"});
    for (const auto& r : t.targeted_by_io) w.row({r.poster_userid, r.replier_userid, std::to_string(r.count)});
  }
  {
    csv::Writer w((fs::path(dir) / "RQ1_time_difference_of_reply.csv").string());
    w.row({"replier_tweetid", "diff_min"});
    for (const auto& r : t.reply_delays) w.row({r.replier_tweetid, csv::format_double(r.diff_min)});
  }
  {
    csv::Writer w((fs::path(dir) / "RQ2_engagement.csv").string());
    w.row({"tweetid", "retweet_count", "like_count", "quote_count", "type"});
    for (const auto& r : t.engagement)
      w.row({r.tweetid, std::to_string(r.retweet_count), std::to_string(r.like_count), std::to_string(r.quote_count),
             to_string(r.type)});
  }
  auto write_terms = [&](const std::vector<TermCount>& terms, const std::string& name) {
    csv::Writer w((fs::path(dir) / name).string());
    w.row({"term", "count", "frequency"});
    for (const auto& tc : terms) w.row({tc.term, std::to_string(tc.count), csv::format_double(tc.frequency)});
  };
  write_terms(report.targeted_terms, "term_frequency_targeted.csv");
  write_terms(report.non_targeted_terms, "term_frequency_non_targeted.csv");
}

}  // namespace sentinel
