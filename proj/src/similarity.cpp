#include "sentinel/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/parallel.hpp"
#include "sentinel/simd.hpp"

namespace sentinel {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double clamp_cosine(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

EmbeddingVector make_embedding(std::vector<float> components) {
  EmbeddingVector v;
  v.components = std::move(components);
  v.norm = std::sqrt(simd::active().dot_f32(v.components.data(), v.components.data(), v.components.size()));
  return v;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.components.size() != v.components.size()) throw InvalidArgument("dimension mismatch");
  if (!(u.norm > 0.0) || !(v.norm > 0.0)) throw InvalidArgument("degenerate vector");
  double dot = simd::active().dot_f32(u.components.data(), v.components.data(), u.components.size());
  return clamp_cosine(dot / (u.norm * v.norm));
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::size_t ngram) : dimension_(dimension), ngram_(ngram) {
  if (dimension == 0 || ngram == 0) throw InvalidArgument("hashing embedder needs positive dimension and n");
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
  std::vector<float> acc(dimension_, 0.0f);
  if (text.empty()) {
    EmbeddingVector v;
    v.components = std::move(acc);
    v.empty = true;
    return v;
  }
  auto add_gram = [&](std::string_view gram, bool signed_hash) {
    std::uint64_t h = fnv1a(gram);
    float sign = (signed_hash && (h >> 63)) ? -1.0f : 1.0f;
    acc[h % dimension_] += sign;
  };
  auto hash_all = [&](bool signed_hash) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    if (text.size() < ngram_) {
      add_gram(text, signed_hash);
    } else {
      for (std::size_t i = 0; i + ngram_ <= text.size(); ++i) add_gram(text.substr(i, ngram_), signed_hash);
    }
  };
  hash_all(true);
  // Signed collisions can cancel to the zero vector; unsigned counts cannot.
  if (std::all_of(acc.begin(), acc.end(), [](float x) { return x == 0.0f; })) hash_all(false);

  EmbeddingVector v = make_embedding(std::move(acc));
  const float inv = static_cast<float>(1.0 / v.norm);
  for (float& x : v.components) x *= inv;
  v.norm = std::sqrt(simd::active().dot_f32(v.components.data(), v.components.data(), v.components.size()));
  return v;
}

std::optional<EmbeddingVector> HashingEmbedder::embed_reply(const ReplyRecord& reply) const {
  return embed(reply.text.value_or(""));
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::string& path) {
  csv::Reader reader(path);
  const auto& header = reader.header();
  if (header.size() < 2 || header[0] != "tweet_id") throw DataError("embedding file header must be tweet_id,v0,...");
  dimension_ = header.size() - 1;
  for (std::size_t i = 0; i < dimension_; ++i)
    if (header[i + 1] != "v" + std::to_string(i)) throw DataError("embedding file header must be tweet_id,v0,...");
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() != header.size()) throw DataError("embedding row width mismatch at line " + std::to_string(reader.line()));
    std::vector<float> comps(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
      const std::string& f = row[i + 1];
      auto res = std::from_chars(f.data(), f.data() + f.size(), comps[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(comps[i]))
        throw DataError("invalid embedding component at line " + std::to_string(reader.line()));
    }
    EmbeddingVector v = make_embedding(std::move(comps));
    v.empty = v.norm == 0.0;
    vectors_.emplace(row[0], std::move(v));
  }
}

std::optional<EmbeddingVector> FileEmbeddingProvider::embed_reply(const ReplyRecord& reply) const {
  auto it = vectors_.find(reply.reply_tweet_id);
  if (it == vectors_.end()) return std::nullopt;
  return it->second;
}

PairSimilarity materialize(const PostPairs& block, const CompactPair& pair) {
  const ReplyRef& x = block.replies[pair.x];
  const ReplyRef& y = block.replies[pair.y];
  return PairSimilarity{block.poster_tweetid, x.replier_id,   y.replier_id, x.reply_tweet_id,
                        y.reply_tweet_id,     x.label,        y.label,      pair.cosine};
}

// ---------------------------------------------------------------------------
// Join

namespace {

struct PostResult {
  PostPairs block;
  std::size_t expected = 0, missing = 0, self = 0, subsampled_out = 0;
  bool subsampled = false;
};

PostResult join_post(const Corpus& corpus, const EmbeddingProvider& provider, const std::string& post_id,
                     const JoinOptions& options) {
  PostResult out;
  out.block.poster_tweetid = post_id;
  auto idx = corpus.replies_to(post_id);
  const std::size_t k = idx.size();
  out.block.replies.reserve(k);
  std::vector<std::optional<EmbeddingVector>> emb(k);
  for (std::size_t i = 0; i < k; ++i) {
    const ReplyRecord& r = corpus.replies()[idx[i]];
    out.block.replies.push_back({r.reply_tweet_id, r.replier_id, r.replier_label});
    emb[i] = provider.embed_reply(r);
    if (emb[i] && !(emb[i]->norm > 0.0)) emb[i].reset();
    if (emb[i] && emb[i]->components.size() != provider.dimension())
      throw DataError("embedding dimension mismatch for reply " + r.reply_tweet_id);
  }
  out.expected = k * (k - (k > 0 ? 1 : 0)) / 2;
  out.subsampled = k > options.subsample_cap && out.expected > options.pair_budget;
  const double keep = out.subsampled ? static_cast<double>(options.pair_budget) / static_cast<double>(out.expected) : 1.0;
  std::mt19937_64 rng(options.seed ^ fnv1a(post_id));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& kernels = simd::active();

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (out.block.replies[i].replier_id == out.block.replies[j].replier_id) {
        ++out.self;
      } else if (!emb[i] || !emb[j]) {
        ++out.missing;
      } else if (out.subsampled && unit(rng) >= keep) {
        ++out.subsampled_out;
      } else {
        const auto& u = *emb[i];
        const auto& v = *emb[j];
        double dot = kernels.dot_f32(u.components.data(), v.components.data(), u.components.size());
        out.block.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                   clamp_cosine(dot / (u.norm * v.norm))});
      }
    }
  }
  return out;
}

}  // namespace

JoinReport coreply_pair_join(const Corpus& corpus, const EmbeddingProvider& provider,
                             const std::set<std::string>& scope, const PairSink& sink, const JoinOptions& options) {
  JoinReport report;
  std::vector<std::string> posts(scope.begin(), scope.end());
  std::size_t begin = 0;
  while (begin < posts.size()) {
    std::size_t end = begin;
    std::size_t budget = 0;
    while (end < posts.size() && (end == begin || budget < options.chunk_pair_budget)) {
      std::size_t k = corpus.replies_to(posts[end]).size();
      std::size_t pairs = k > 1 ? k * (k - 1) / 2 : 0;
      budget += std::min(pairs, options.pair_budget) + 1;
      ++end;
    }
    std::vector<PostResult> results(end - begin);
    parallel_for(results.size(), [&](std::size_t i) {
      results[i] = join_post(corpus, provider, posts[begin + i], options);
    });
    for (auto& r : results) {
      ++report.posts;
      report.expected_pairs += r.expected;
      report.emitted_pairs += r.block.pairs.size();
      report.missing_pairs += r.missing;
      report.self_pairs += r.self;
      report.subsampled_out += r.subsampled_out;
      if (r.missing > 0 || r.subsampled) report.gaps.push_back({r.block.poster_tweetid, r.missing, r.subsampled});
      sink(r.block);
    }
    begin = end;
  }
  return report;
}

JoinReport replay_pairs_file(const std::string& path, const std::set<std::string>& scope, const PairSink& sink) {
  csv::Reader reader(path);
  std::string header;
  for (const auto& h : reader.header()) header += (header.empty() ? "" : ",") + h;
  if (header != kPairsHeader) throw DataError("pairs file header mismatch: " + header);

  JoinReport report;
  std::set<std::string> closed;
  std::string current;
  std::vector<PairSimilarity> rows;

  auto flush = [&] {
    if (current.empty()) return;
    closed.insert(current);
    PostPairs block;
    block.poster_tweetid = current;
    std::map<std::string, std::size_t> index;
    std::map<std::string, ReplyRef> refs;
    for (const auto& p : rows) {
      refs.try_emplace(p.replier_tweetid_x, ReplyRef{p.replier_tweetid_x, p.replier_userid_x, p.replier_label_x});
      refs.try_emplace(p.replier_tweetid_y, ReplyRef{p.replier_tweetid_y, p.replier_userid_y, p.replier_label_y});
    }
    for (auto& [id, ref] : refs) {
      index[id] = block.replies.size();
      block.replies.push_back(ref);
    }
    for (const auto& p : rows) {
      auto x = static_cast<std::uint32_t>(index[p.replier_tweetid_x]);
      auto y = static_cast<std::uint32_t>(index[p.replier_tweetid_y]);
      if (x > y) std::swap(x, y);
      block.pairs.push_back({x, y, p.cosine});
    }
    ++report.posts;
    report.expected_pairs += rows.size();
    report.emitted_pairs += rows.size();
    sink(block);
    rows.clear();
  };

  csv::Row row;
  while (reader.next(row)) {
    if (row.size() != 8) throw DataError("pairs row width mismatch at line " + std::to_string(reader.line()));
    const std::string& post = row[6];
    if (!scope.empty() && !scope.contains(post)) continue;
    if (post != current) {
      flush();
      if (closed.contains(post)) throw DataError("pairs file not grouped by poster_tweetid: " + post);
      current = post;
    }
    PairSimilarity p;
    auto lx = parse_replier_label(row[0]);
    auto ly = parse_replier_label(row[1]);
    if (!lx || !ly) throw DataError("invalid replier label at line " + std::to_string(reader.line()));
    p.replier_label_x = *lx;
    p.replier_label_y = *ly;
    p.replier_userid_x = row[2];
    p.replier_userid_y = row[3];
    p.replier_tweetid_x = row[4];
    p.replier_tweetid_y = row[5];
    p.poster_tweetid = post;
    auto res = std::from_chars(row[7].data(), row[7].data() + row[7].size(), p.cosine);
    if (res.ec != std::errc() || !std::isfinite(p.cosine))
      throw DataError("invalid cosine at line " + std::to_string(reader.line()));
    p.cosine = clamp_cosine(p.cosine);
    rows.push_back(std::move(p));
  }
  flush();
  return report;
}

PairCsvWriter::PairCsvWriter(const std::string& path)
    : out_(std::make_shared<std::ofstream>(path, std::ios::binary | std::ios::trunc)) {
  if (!*out_) throw DataError("cannot write file: " + path);
  *out_ << kPairsHeader << '\n';
}

void PairCsvWriter::operator()(const PostPairs& block) {
  csv::Writer w(*out_);
  for (const auto& cp : block.pairs) {
    PairSimilarity p = materialize(block, cp);
    w.row({to_string(p.replier_label_x), to_string(p.replier_label_y), p.replier_userid_x, p.replier_userid_y,
           p.replier_tweetid_x, p.replier_tweetid_y, p.poster_tweetid, csv::format_double(p.cosine)});
  }
}

void write_gap_report(const JoinReport& report, const std::string& path) {
  csv::Writer w(path);
  w.row({"poster_tweetid", "missing_count", "subsampled"});
  for (const auto& g : report.gaps)
    w.row({g.poster_tweetid, std::to_string(g.missing_count), g.subsampled ? "true" : "false"});
}

AttributeSample tweet_similarity_sample(std::span<const PairSimilarity> pairs) {
  if (pairs.empty()) throw InvalidArgument("empty sample");
  AttributeSample s{"cosine", {}};
  s.values.reserve(pairs.size());
  for (const auto& p : pairs) s.values.push_back(p.cosine);
  return s;
}

AttributeSample tweet_similarity_sample(const PostPairs& block) {
  if (block.pairs.empty()) throw InvalidArgument("empty sample");
  AttributeSample s{"cosine", {}};
  s.values.reserve(block.pairs.size());
  for (const auto& p : block.pairs) s.values.push_back(p.cosine);
  return s;
}

AttributeSample replier_similarity_sample(const std::string& replier, std::span<const PairSimilarity> pairs) {
  AttributeSample s{"cosine", {}};
  for (const auto& p : pairs) {
    if (p.replier_userid_x == p.replier_userid_y) continue;
    if (p.replier_userid_x == replier || p.replier_userid_y == replier) s.values.push_back(p.cosine);
  }
  return s;
}

void TweetSimilarityCollector::operator()(const PostPairs& block) {
  pair_counts_[block.poster_tweetid] += block.pairs.size();
  if (block.pairs.empty()) return;
  if (summaries_.contains(block.poster_tweetid))
    throw DataError("pair blocks for post " + block.poster_tweetid + " are not contiguous");
  auto sample = tweet_similarity_sample(block);
  summaries_.emplace(block.poster_tweetid, summarize12(sample));
  if (keep_samples_) samples_.emplace(block.poster_tweetid, std::move(sample.values));
}

std::size_t TweetSimilarityCollector::pairs(const std::string& post) const {
  auto it = pair_counts_.find(post);
  return it == pair_counts_.end() ? 0 : it->second;
}

void PairTypeHistogram::operator()(const PostPairs& block) {
  for (const auto& p : block.pairs) {
    int ios = (block.replies[p.x].label == ReplierLabel::kIO) + (block.replies[p.y].label == ReplierLabel::kIO);
    std::size_t type = ios == 2 ? 0 : ios == 1 ? 1 : 2;
    auto bin = static_cast<std::size_t>((p.cosine + 1.0) / 2.0 * static_cast<double>(bins_));
    counts_[type][std::min(bin, bins_ - 1)]++;
  }
}

double PairTypeHistogram::median(std::size_t type) const {
  std::size_t total = 0;
  for (auto c : counts_[type]) total += c;
  if (total == 0) return std::nan("");
  std::size_t seen = 0;
  for (std::size_t b = 0; b < bins_; ++b) {
    seen += counts_[type][b];
    if (2 * seen >= total) return -1.0 + (static_cast<double>(b) + 0.5) * 2.0 / static_cast<double>(bins_);
  }
  return 1.0;
}

void PairTypeHistogram::write_csv(const std::string& path) const {
  static const char* kTypes[] = {"io-io", "io-normal", "normal-normal"};
  csv::Writer w(path);
  w.row({"pair_type", "bin_lo", "bin_hi", "count"});
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t b = 0; b < bins_; ++b) {
      double lo = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(bins_);
      double hi = -1.0 + 2.0 * static_cast<double>(b + 1) / static_cast<double>(bins_);
      w.row({kTypes[t], csv::format_double(lo), csv::format_double(hi), std::to_string(counts_[t][b])});
    }
  }
}

}  // namespace sentinel
