#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "sentinel/error.hpp"
#include "sentinel/similarity.hpp"
#include "util.hpp"

using namespace sentinel;

namespace {

std::set<std::string> all_posts(const Corpus& c) {
  std::set<std::string> s;
  for (const auto& [id, p] : c.posts()) s.insert(id);
  return s;
}

Corpus sample_corpus() {
  return fixtures::build({
      {"p1", "t1", 0, {{"io1", "vote for him now", 3}, {"io2", "vote for him now!", 4}, {"n1", "nice dog", 50},
                       {"n2", "where is this", 80}, {"io1", "again, vote", 90}}},
      {"p2", "t1", 100, {{"n1", "lovely", 120}, {"n3", "", 130}, {"n2", "what?", 140}}},
      {"p3", "t2", 0, {{"n1", "solo", 3}}},
      {"p4", "t2", 10, {}},
  });
}

}  // namespace

TEST_CASE("cosine basics") {
  auto u = make_embedding({1, 0, 0});
  auto v = make_embedding({0, 2, 0});
  auto w = make_embedding({-3, 0, 0});
  CHECK(cosine(u, u) == doctest::Approx(1));
  CHECK(cosine(u, v) == doctest::Approx(0));
  CHECK(cosine(u, w) == doctest::Approx(-1));
  CHECK_THROWS_AS(cosine(u, make_embedding({1, 0})), InvalidArgument);
  CHECK_THROWS_AS(cosine(u, make_embedding({0, 0, 0})), InvalidArgument);
}

TEST_CASE("hashing embedder") {
  HashingEmbedder h;
  auto a = h.embed("coordinated reply text");
  CHECK(a.components.size() == 64);
  CHECK(a.norm == doctest::Approx(1.0));
  CHECK(cosine(a, h.embed("coordinated reply text")) == doctest::Approx(1.0));
  CHECK(cosine(a, h.embed("coordinated reply text!")) > cosine(a, h.embed("the weather in spring")));
  CHECK(h.embed("").empty);
  CHECK(h.embed("ab").norm == doctest::Approx(1.0));  // shorter than n
  CHECK_THROWS_AS(HashingEmbedder(0), InvalidArgument);
}

TEST_CASE("pair join conservation and determinism") {
  Corpus c = sample_corpus();
  HashingEmbedder h;
  std::vector<PairSimilarity> pairs;
  std::vector<std::string> order;
  auto rep = coreply_pair_join(c, h, all_posts(c), [&](const PostPairs& b) {
    order.push_back(b.poster_tweetid);
    for (const auto& p : b.pairs) pairs.push_back(materialize(b, p));
  });
  CHECK(rep.posts == 4);
  // p1: C(5,2) = 10 with one self pair; p2: C(3,2) = 3 with two pairs touching empty text
  CHECK(rep.expected_pairs == 13);
  CHECK(rep.self_pairs == 1);
  CHECK(rep.missing_pairs == 2);
  CHECK(rep.emitted_pairs == 10);
  CHECK(rep.expected_pairs == rep.emitted_pairs + rep.missing_pairs + rep.self_pairs + rep.subsampled_out);
  CHECK(pairs.size() == rep.emitted_pairs);
  CHECK(order == std::vector<std::string>{"p1", "p2", "p3", "p4"});
  for (const auto& p : pairs) {
    CHECK(p.replier_userid_x != p.replier_userid_y);
    CHECK(p.replier_tweetid_x < p.replier_tweetid_y);
    CHECK(p.cosine >= -1.0);
    CHECK(p.cosine <= 1.0);
  }
  REQUIRE(rep.gaps.size() == 1);
  CHECK(rep.gaps[0].poster_tweetid == "p2");

  std::vector<PairSimilarity> again;
  coreply_pair_join(c, h, all_posts(c), [&](const PostPairs& b) {
    for (const auto& p : b.pairs) again.push_back(materialize(b, p));
  });
  CHECK(again == pairs);
}

TEST_CASE("replier samples total twice the pairs, in memory and spilled") {
  Corpus c = sample_corpus();
  HashingEmbedder h;
  testutil::TempDir dir("spill");
  ReplierSampleAccumulator mem, spill(dir.path(), 3);
  std::vector<PairSimilarity> pairs;
  auto rep = coreply_pair_join(c, h, all_posts(c), [&](const PostPairs& b) {
    mem.consume(b);
    spill.consume(b);
    for (const auto& p : b.pairs) pairs.push_back(materialize(b, p));
  });
  CHECK(mem.total_values() == 2 * rep.emitted_pairs);
  CHECK(spill.total_values() == 2 * rep.emitted_pairs);

  std::map<std::string, std::vector<double>> a, b;
  std::size_t seen = 0;
  mem.for_each([&](const std::string& id, std::vector<double>& v) { a[id] = v; seen += v.size(); });
  spill.for_each([&](const std::string& id, std::vector<double>& v) { b[id] = v; });
  CHECK(seen == 2 * pairs.size());
  CHECK(a == b);
  for (const auto& [id, values] : a) {
    auto ref = replier_similarity_sample(id, pairs).values;
    std::sort(ref.begin(), ref.end());
    CHECK(values == ref);
  }
}

TEST_CASE("pairs file replays identically") {
  Corpus c = sample_corpus();
  HashingEmbedder h;
  testutil::TempDir dir("pairs");
  TweetSimilarityCollector direct(true), replayed(true);
  {
    PairCsvWriter writer(dir.file("pairs.csv"));
    coreply_pair_join(c, h, all_posts(c), [&](const PostPairs& b) {
      writer(b);
      direct(b);
    });
  }
  auto rep = replay_pairs_file(dir.file("pairs.csv"), {}, [&](const PostPairs& b) { replayed(b); });
  CHECK(rep.emitted_pairs == 10);
  CHECK(replayed.summaries() == direct.summaries());
  CHECK(replayed.samples() == direct.samples());
  CHECK(direct.pairs("p1") == 9);

  // a post that reappears after its block closed
  std::string text = testutil::slurp(dir.file("pairs.csv"));
  auto first_row = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n'));
  dir.write("bad.csv", text + first_row);
  CHECK_THROWS_AS(replay_pairs_file(dir.file("bad.csv"), {}, [](const PostPairs&) {}), DataError);
}

TEST_CASE("large posts are subsampled to the pair budget") {
  std::vector<fixtures::ReplySpec> replies;
  for (int i = 0; i < 60; ++i) replies.push_back({"n" + std::to_string(i), "text " + std::to_string(i), i});
  Corpus c = fixtures::build({{"p1", "t1", 0, replies}});
  JoinOptions opt;
  opt.subsample_cap = 10;
  opt.pair_budget = 300;
  auto rep = coreply_pair_join(c, HashingEmbedder(), all_posts(c), [](const PostPairs&) {}, opt);
  CHECK(rep.expected_pairs == 1770);
  CHECK(rep.emitted_pairs + rep.subsampled_out == 1770);
  CHECK(rep.emitted_pairs > 150);
  CHECK(rep.emitted_pairs < 450);
  REQUIRE(rep.gaps.size() == 1);
  CHECK(rep.gaps[0].subsampled);
}

TEST_CASE("tweet similarity sample needs a pair") {
  PostPairs empty;
  CHECK_THROWS_AS(tweet_similarity_sample(empty), InvalidArgument);
}

TEST_CASE("file embeddings") {
  testutil::TempDir dir("emb");
  auto path = dir.write("e.csv", "tweet_id,v0,v1\nr000000,1,0\nr000001,0.5,0.5\n");
  FileEmbeddingProvider f(path);
  CHECK(f.dimension() == 2);
  ReplyRecord r;
  r.reply_tweet_id = "r000001";
  REQUIRE(f.embed_reply(r));
  r.reply_tweet_id = "nope";
  CHECK_FALSE(f.embed_reply(r));
  CHECK_THROWS_AS(FileEmbeddingProvider(dir.write("bad.csv", "id,x\n")), DataError);
}
