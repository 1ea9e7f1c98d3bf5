#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "sentinel/corpus.hpp"

namespace fixtures {

inline sentinel::Timestamp at(int minutes) {
  using namespace std::chrono;
  return sys_days{year{2019} / January / 1} + sentinel::Timestamp::duration(minutes * 60);
}

struct ReplySpec {
  std::string replier;
  std::string text;
  int minute = 0;
};

struct PostSpec {
  std::string id;
  std::string author = "t1";
  int minute = 0;
  std::vector<ReplySpec> replies;
};

// Accounts whose id starts with "io" are IO accounts.
inline sentinel::Corpus build(const std::vector<PostSpec>& posts) {
  sentinel::Corpus::Builder b;
  std::vector<std::string> seen;
  auto ensure = [&](const std::string& id) {
    for (const auto& s : seen)
      if (s == id) return;
    seen.push_back(id);
    sentinel::Account a;
    a.user_id = id;
    a.created_at = at(-500000);
    a.followers_count = 10 + seen.size();
    a.following_count = 20;
    a.activity_count = 100;
    a.is_io = id.rfind("io", 0) == 0;
    if (a.is_io) a.campaign = "c1";
    b.add_account(std::move(a));
  };
  for (const auto& p : posts) {
    ensure(p.author);
    for (const auto& r : p.replies) ensure(r.replier);
  }
  int reply_no = 0;
  for (const auto& p : posts) {
    sentinel::Post post;
    post.tweet_id = p.id;
    post.author_id = p.author;
    post.created_at = at(p.minute);
    post.reply_count = p.replies.size();
    post.campaign = "c1";
    b.add_post(std::move(post));
  }
  for (const auto& p : posts)
    for (const auto& r : p.replies) {
      sentinel::ReplyRecord rec;
      char buf[32];
      std::snprintf(buf, sizeof buf, "r%06d", reply_no++);
      rec.reply_tweet_id = buf;
      rec.replier_id = r.replier;
      rec.target_tweet_id = p.id;
      rec.created_at = at(r.minute);
      rec.text = r.text;
      rec.mention_count = 1;
      rec.replier_label = r.replier.rfind("io", 0) == 0 ? sentinel::ReplierLabel::kIO : sentinel::ReplierLabel::kNormal;
      b.add_reply(std::move(rec));
    }
  return std::move(b).build();
}

}  // namespace fixtures
