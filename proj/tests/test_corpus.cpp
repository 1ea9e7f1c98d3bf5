#include <chrono>
#include <sstream>

#include "doctest.h"
#include "sentinel/corpus.hpp"
#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/timeutil.hpp"
#include "util.hpp"

using namespace sentinel;

TEST_CASE("csv reader handles quoting, embedded newlines and BOM") {
  std::istringstream in("\xEF\xBB\xBF" "a,b,c\n1,\"x,y\",3\n2,\"multi\nline\",\"q\"\"q\"\n");
  csv::Reader r(in);
  CHECK(r.header() == csv::Row{"a", "b", "c"});
  csv::Row row;
  REQUIRE(r.next(row));
  CHECK(row == csv::Row{"1", "x,y", "3"});
  REQUIRE(r.next(row));
  CHECK(row[1] == "multi\nline");
  CHECK(row[2] == "q\"q");
  CHECK(r.line() == 3);
  CHECK_FALSE(r.next(row));
  CHECK(r.column("c") == 2u);
  CHECK_FALSE(r.column("zz"));
}

TEST_CASE("csv escape and double round trip") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.125}) {
    std::string s = csv::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("empty csv is a data error") {
  std::istringstream in("");
  CHECK_THROWS_AS(csv::Reader{in}, DataError);
}

TEST_CASE("timestamps in both accepted formats") {
  auto a = parse_timestamp("Wed Oct 10 20:19:24 +0000 2018");
  auto b = parse_timestamp("2018-10-10T20:19:24Z");
  auto c = parse_timestamp("2018-10-10 20:19:24");
  auto d = parse_timestamp("2018-10-10T22:19:24+02:00");
  auto e = parse_timestamp("2018-10-10T20:19:24.987Z");
  REQUIRE(a);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a == d);
  CHECK(a == e);
  CHECK(format_timestamp(*a) == "2018-10-10T20:19:24Z");
  CHECK(parse_timestamp("2018-10-10") == parse_timestamp("2018-10-10T00:00:00Z"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK_FALSE(parse_timestamp("2018-13-40"));
  CHECK(minutes_between(*a, *a + std::chrono::minutes(90)) == 90.0);
}

namespace {

const char* kAccounts =
    "userid,created_at,followers_count,following_count,activity_count,replier_label,campaign\n"
    "u1,2015-01-01,10,20,30,1,c1\n"
    "u2,2012-05-05,1,2,3,0,\n"
    "u2,2012-05-05,1,2,3,0,\n"       // duplicate
    "u3,2001-01-01,1,2,3,0,\n"       // before the platform existed
    "u4,2016-01-01,abc,2,3,0,\n";    // bad count

const char* kPosts =
    "tweetid,author_userid,created_at,retweet_count,like_count,quote_count,reply_count,campaign,type\n"
    "p1,t1,2019-01-01T00:00:00Z,1,2,0,3,c1,target\n";

const char* kReplies =
    "replier_tweetid,replier_userid,poster_tweetid,created_at,like_count,retweet_count,reply_count,mention_count,"
    "hashtag_count,url_count,replier_label,text\n"
    "r1,u1,p1,2019-01-01T00:10:00Z,0,0,0,1,0,0,1,hello\n"
    "r2,u2,p1,2018-12-31T23:50:00Z,0,0,0,1,0,0,0,early\n"  // clock skew, kept
    "r3,u9,p1,2019-01-01T00:20:00Z,0,0,0,1,0,0,0,x\n"      // unknown replier
    "r4,u2,p9,2019-01-01T00:20:00Z,0,0,0,1,0,0,0,x\n";     // unknown post

}  // namespace

TEST_CASE("corpus load validates and reports rejects") {
  testutil::TempDir dir("corpus");
  auto a = dir.write("accounts.csv", kAccounts);
  auto p = dir.write("posts.csv", kPosts);
  auto r = dir.write("replies.csv", kReplies);
  Corpus c = load_corpus({r, p, a});  // order of paths does not matter
  CHECK(c.accounts().size() == 2);
  CHECK(c.posts().size() == 1);
  CHECK(c.replies().size() == 2);
  CHECK(c.rejects().size() == 5);
  CHECK(c.account("u1")->is_io);
  CHECK(c.account("u1")->campaign == "c1");
  CHECK_FALSE(c.account("u2")->campaign);
  CHECK(c.post("p1")->label == PostLabel::kTargeted);
  CHECK(c.replies_to("p1").size() == 2);
  CHECK(c.replies_by("u2").size() == 1);
  bool skew = false;
  for (const auto& rep : c.replies())
    if (rep.reply_tweet_id == "r2") skew = rep.skew_anomalous;
  CHECK(skew);
  CHECK_FALSE(c.synthetic());

  auto s = corpus_summary(c);
  CHECK(s.io_replies == 1);
  CHECK(s.skew_anomalous_replies == 1);
  CHECK(s.rejects == 5);

  Corpus again = load_corpus({a, p, r});
  CHECK(again.accounts() == c.accounts());
  CHECK(again.posts() == c.posts());
  CHECK(again.replies() == c.replies());
  CHECK(again.rejects().size() == c.rejects().size());
}

TEST_CASE("corpus load errors") {
  testutil::TempDir dir("corpus_err");
  CHECK_THROWS_AS(load_corpus({dir.file("missing.csv")}), DataError);
  CHECK_THROWS_AS(load_corpus({dir.write("empty.csv", "")}), DataError);
  CHECK_THROWS_AS(load_corpus({dir.write("odd.csv", "foo,bar\n1,2\n")}), DataError);
}

TEST_CASE("schema map renames columns") {
  testutil::TempDir dir("schema");
  auto path = dir.write("info.csv",
                        "id,activity_count,replier_label,following_count,followers_count,age\n"
                        "a,10,1,5,6,2.5\n");
  Corpus c = load_corpus({path}, {{"id", "replier_userid"}});
  REQUIRE(c.account("a"));
  CHECK(c.account("a")->age_years == 2.5);
  CHECK(match_schema({"poster_tweetid", "reply_count"}).name == "number_of_reply_per_tweet");
}

TEST_CASE("canonical writers round trip") {
  testutil::TempDir dir("roundtrip");
  Corpus c = load_corpus({dir.write("a.csv", kAccounts), dir.write("p.csv", kPosts), dir.write("r.csv", kReplies)});
  write_accounts_csv(c, dir.file("a2.csv"));
  write_posts_csv(c, dir.file("p2.csv"));
  write_replies_csv(c, dir.file("r2.csv"));
  Corpus d = load_corpus({dir.file("a2.csv"), dir.file("p2.csv"), dir.file("r2.csv")});
  CHECK(d.accounts() == c.accounts());
  CHECK(d.posts() == c.posts());
  CHECK(d.replies() == c.replies());
}
