#include "sentinel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/hash.hpp"
#include "sentinel/similarity.hpp"

namespace sentinel {

// ---------------------------------------------------------------------------
// Config files

namespace {

struct ConfigField {
  const char* key;
  std::function<void(SynthConfig&, const std::string&)> set;
  std::function<std::string(const SynthConfig&)> get;
};

template <typename T>
ConfigField field(const char* key, T SynthConfig::*member) {
  return {key,
          [member, key](SynthConfig& c, const std::string& v) {
            std::istringstream in(v);
            T parsed{};
            in >> parsed;
            if (in.fail() || !in.eof()) throw InvalidArgument(std::string("bad value for ") + key + ": " + v);
            c.*member = parsed;
          },
          [member](const SynthConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return csv::format_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      field("n_targets", &SynthConfig::n_targets),
      field("posts_per_target", &SynthConfig::posts_per_target),
      field("n_io_repliers", &SynthConfig::n_io_repliers),
      field("n_organic_repliers", &SynthConfig::n_organic_repliers),
      field("n_campaigns", &SynthConfig::n_campaigns),
      field("io_fraction_targeted", &SynthConfig::io_fraction_targeted),
      field("io_replies_min", &SynthConfig::io_replies_min),
      field("io_replies_max", &SynthConfig::io_replies_max),
      field("organic_replies_min", &SynthConfig::organic_replies_min),
      field("organic_replies_max", &SynthConfig::organic_replies_max),
      field("io_delay_scale_minutes", &SynthConfig::io_delay_scale_minutes),
      field("organic_delay_scale_minutes", &SynthConfig::organic_delay_scale_minutes),
      field("template_pool_size", &SynthConfig::template_pool_size),
      field("token_noise", &SynthConfig::token_noise),
      field("io_age_scale_years", &SynthConfig::io_age_scale_years),
      field("organic_age_scale_years", &SynthConfig::organic_age_scale_years),
      field("stealth_fraction", &SynthConfig::stealth_fraction),
      field("organic_regular_fraction", &SynthConfig::organic_regular_fraction),
      field("organic_echo", &SynthConfig::organic_echo),
      field("seed", &SynthConfig::seed),
  };
  return fields;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

void validate(const SynthConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw InvalidArgument(std::string("synth config: ") + name + " must be positive");
  };
  positive(static_cast<double>(c.n_targets), "n_targets");
  positive(static_cast<double>(c.posts_per_target), "posts_per_target");
  positive(static_cast<double>(c.n_io_repliers), "n_io_repliers");
  positive(static_cast<double>(c.n_organic_repliers), "n_organic_repliers");
  positive(static_cast<double>(c.n_campaigns), "n_campaigns");
  positive(c.io_fraction_targeted, "io_fraction_targeted");
  positive(c.io_delay_scale_minutes, "io_delay_scale_minutes");
  positive(c.organic_delay_scale_minutes, "organic_delay_scale_minutes");
  positive(static_cast<double>(c.template_pool_size), "template_pool_size");
  positive(c.io_age_scale_years, "io_age_scale_years");
  positive(c.organic_age_scale_years, "organic_age_scale_years");
  if (c.io_fraction_targeted >= 1.0) throw InvalidArgument("synth config: io_fraction_targeted must be below 1");
  if (c.io_replies_max < c.io_replies_min || c.organic_replies_max < c.organic_replies_min)
    throw InvalidArgument("synth config: reply range max below min");
  if (c.organic_replies_min < 5) throw InvalidArgument("synth config: control posts need at least 5 replies");
  auto prob = [](double v) { return v >= 0 && v <= 1; };
  if (!prob(c.token_noise) || !prob(c.stealth_fraction) || !prob(c.organic_regular_fraction) ||
      !prob(c.organic_echo))
    throw InvalidArgument("synth config: probabilities must lie in [0, 1]");
  if (c.organic_replies_max > c.n_organic_repliers)
    throw InvalidArgument("synth config: more organic replies per post than organic accounts");
}

}  // namespace

SynthConfig parse_synth_config(const std::string& text, SynthConfig base) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("synth config: expected key = value, got: " + line);
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto& fields = config_fields();
    auto it = std::find_if(fields.begin(), fields.end(), [&](const ConfigField& f) { return key == f.key; });
    if (it == fields.end()) throw InvalidArgument("synth config: unknown key " + key);
    it->set(base, value);
  }
  return base;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synth config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_synth_config(ss.str());
}

std::string format_synth_config(const SynthConfig& config) {
  std::string out;
  for (const auto& f : config_fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Statistics used by the self-check

double rank_sum_p_greater(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::vector<std::pair<double, int>> all;
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());
  double rank_a = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_a += avg;
    i = j;
  }
  double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size()), n = n1 + n2;
  double u = rank_a - n1 * (n1 + 1) / 2.0;
  double var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0) return 1.0;
  double z = (u - n1 * n2 / 2.0) / std::sqrt(var);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------
// Generator

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string pad(const char* prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

class Gen {
 public:
  explicit Gen(const SynthConfig& c) : c_(c), rng_(mix_seed(c.seed, 0x5e7)) {}

  SynthResult run();

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t range(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  double exponential(double scale) { return std::exponential_distribution<double>(1.0 / scale)(rng_); }
  double lognormal(double median, double sigma) {
    return std::lognormal_distribution<double>(std::log(median), sigma)(rng_);
  }
  std::uint64_t poisson(double mean) { return std::poisson_distribution<std::uint64_t>(mean)(rng_); }
  std::uint64_t count(double v) { return static_cast<std::uint64_t>(std::llround(v)); }

  std::string word();
  std::string organic_text();
  std::string noisy(const std::string& templ);

  Account make_replier(std::string id, bool io, double blend, const std::string& campaign);

  const SynthConfig& c_;
  std::mt19937_64 rng_;
  std::vector<std::string> vocabulary_;
};

std::string Gen::word() { return vocabulary_[range(0, vocabulary_.size() - 1)]; }

std::string Gen::organic_text() {
  std::size_t n = range(6, 14);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + word();
  return s;
}

std::string Gen::noisy(const std::string& templ) {
  std::istringstream in(templ);
  std::string tok, out;
  while (in >> tok) {
    if (uniform() < c_.token_noise) tok = word();
    out += (out.empty() ? "" : " ") + tok;
  }
  return out;
}

const Timestamp kReference = std::chrono::sys_days{std::chrono::year{2019} / 1 / 1};

Account Gen::make_replier(std::string id, bool io, double blend, const std::string& campaign) {
  auto organic_trait = [&] { return !io || uniform() < blend; };
  Account a;
  a.user_id = std::move(id);
  double age = organic_trait() ? 7.0 / kDaysPerYear + exponential(c_.organic_age_scale_years)
                               : 2.0 / kDaysPerYear + exponential(c_.io_age_scale_years);
  age = std::min(age, 12.0);
  a.created_at = kReference - std::chrono::seconds(static_cast<std::int64_t>(age * kDaysPerYear * 86400.0));
  a.followers_count = count(organic_trait() ? lognormal(150, 1.4) : lognormal(300, 1.0));
  a.following_count = count(organic_trait() ? lognormal(250, 1.2) : lognormal(500, 0.9));
  a.activity_count = count(organic_trait() ? lognormal(3000, 1.5) : lognormal(900, 1.1));
  a.is_io = io;
  if (!campaign.empty()) a.campaign = campaign;
  return a;
}

SynthResult Gen::run() {
  validate(c_);
  // Pseudo-words from syllables.
  static const char* onset[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "sh"};
  static const char* nucleus[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::set<std::string> seen;
  while (vocabulary_.size() < 3000) {
    std::string w;
    std::size_t syl = range(2, 3);
    for (std::size_t s = 0; s < syl; ++s) w += std::string(onset[range(0, 15)]) + nucleus[range(0, 6)];
    if (seen.insert(w).second) vocabulary_.push_back(w);
  }

  std::vector<std::string> campaigns;
  for (std::size_t k = 0; k < c_.n_campaigns; ++k) campaigns.push_back(pad("synth_", k + 1, 2));

  Corpus::Builder builder;
  builder.mark_synthetic();
  auto must = [](const std::string& reason) {
    if (!reason.empty()) throw DataError("synthetic generator produced an invalid record: " + reason);
  };

  // IO accounts, dealt round-robin into campaigns.
  std::vector<std::vector<std::string>> io_by_campaign(c_.n_campaigns);
  std::map<std::string, double> blend;
  std::vector<double> ages_io, ages_org;
  auto age_of = [](const Account& a) { return years_between(*a.created_at, kReference); };
  for (std::size_t k = 0; k < c_.n_io_repliers; ++k) {
    std::string id = pad("io", k + 1, 5);
    double b = uniform() < c_.stealth_fraction ? 0.3 + 0.7 * uniform() : 0.0;
    blend[id] = b;
    Account a = make_replier(id, true, b, campaigns[k % c_.n_campaigns]);
    ages_io.push_back(age_of(a));
    io_by_campaign[k % c_.n_campaigns].push_back(id);
    must(builder.add_account(std::move(a)));
  }
  std::vector<std::string> organic;
  for (std::size_t k = 0; k < c_.n_organic_repliers; ++k) {
    Account a = make_replier(pad("u", k + 1, 6), false, 0.0, "");
    ages_org.push_back(age_of(a));
    organic.push_back(a.user_id);
    must(builder.add_account(std::move(a)));
  }
  for (auto& pool : io_by_campaign) std::shuffle(pool.begin(), pool.end(), rng_);
  std::shuffle(organic.begin(), organic.end(), rng_);

  // Template pools per campaign.
  std::vector<std::vector<std::string>> templates(c_.n_campaigns);
  for (auto& pool : templates)
    for (std::size_t t = 0; t < c_.template_pool_size; ++t) pool.push_back(organic_text());

  // Dealers hand out distinct accounts per post. Every account is used once
  // before weighted repeats, so all accounts reply; the lognormal weights
  // spread reply volume so it alone does not mark IO accounts.
  struct Dealer {
    std::vector<std::string> pool;
    std::vector<double> weight;
    std::size_t fresh = 0;
  };
  auto make_dealer = [&](std::vector<std::string> pool, std::size_t active) {
    Dealer d;
    d.pool = std::move(pool);
    for (std::size_t i = 0; i < d.pool.size(); ++i) d.weight.push_back(i < active ? lognormal(1.0, 1.0) : 0.0);
    return d;
  };
  auto deal = [&](Dealer& d, std::size_t k) {
    std::vector<std::string> out;
    std::vector<char> used(d.pool.size(), 0);
    while (out.size() < k && d.fresh < d.pool.size()) {
      used[d.fresh] = 1;
      out.push_back(d.pool[d.fresh++]);
    }
    if (out.size() < k) {
      // Weighted draw without replacement by exponential keys.
      std::vector<std::pair<double, std::size_t>> keys;
      for (std::size_t i = 0; i < d.pool.size(); ++i)
        if (!used[i] && d.weight[i] > 0) keys.emplace_back(exponential(1.0) / d.weight[i], i);
      std::sort(keys.begin(), keys.end());
      for (std::size_t j = 0; j < keys.size() && out.size() < k; ++j) out.push_back(d.pool[keys[j].second]);
    }
    return out;
  };
  std::vector<Dealer> io_dealers;
  for (auto& pool : io_by_campaign) io_dealers.push_back(make_dealer(pool, pool.size()));
  const std::size_t n_regulars = std::max<std::size_t>(
      c_.organic_replies_max,
      static_cast<std::size_t>(std::llround(c_.organic_regular_fraction * static_cast<double>(organic.size()))));
  Dealer organic_dealer = make_dealer(organic, n_regulars);

  std::size_t post_counter = 0, reply_counter = 0;
  std::vector<ReplyRecord> replies;
  std::vector<double> delays_io, delays_org;
  OracleLabels truth;

  auto add_reply = [&](const Post& post, const std::string& replier, bool io, double b, const std::string* templ) {
    auto organic_trait = [&] { return !io || uniform() < b; };
    ReplyRecord r;
    r.reply_tweet_id = pad("r", ++reply_counter, 8);
    r.replier_id = replier;
    r.target_tweet_id = post.tweet_id;
    double delay = organic_trait() ? exponential(c_.organic_delay_scale_minutes) : exponential(c_.io_delay_scale_minutes);
    r.created_at = post.created_at + std::chrono::seconds(static_cast<std::int64_t>(std::llround(delay * 60.0)));
    (io ? delays_io : delays_org).push_back(minutes_between(post.created_at, r.created_at));
    r.like_count = poisson(1.0);
    r.retweet_count = poisson(0.4);
    r.reply_count = poisson(0.3);
    bool org = organic_trait();
    r.mention_count = poisson(org ? 0.8 : 0.9);
    r.hashtag_count = poisson(org ? 0.3 : 0.4);
    r.url_count = poisson(0.2);
    bool templated = io ? !organic_trait() : uniform() < c_.organic_echo;
    r.text = templ && templated ? noisy(*templ) : organic_text();
    r.replier_label = io ? ReplierLabel::kIO : ReplierLabel::kNormal;
    replies.push_back(std::move(r));
    truth.repliers[replier] = io ? ReplierLabel::kIO : ReplierLabel::kNormal;
  };

  const std::size_t n_targeted = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(c_.posts_per_target) * c_.io_fraction_targeted)));
  const std::size_t n_control = c_.posts_per_target > n_targeted ? c_.posts_per_target - n_targeted : 0;
  std::vector<Post> posts;
  for (std::size_t t = 0; t < c_.n_targets; ++t) {
    std::size_t camp = t % c_.n_campaigns;
    Account target;
    target.user_id = pad("t", t + 1, 4);
    target.created_at = kReference - std::chrono::hours(24 * static_cast<std::int64_t>(range(1500, 4000)));
    target.followers_count = count(lognormal(20000, 1.5));
    target.following_count = count(lognormal(800, 1.0));
    target.activity_count = count(lognormal(20000, 1.0));
    must(builder.add_account(target));

    Timestamp clock = kReference + std::chrono::hours(static_cast<std::int64_t>(range(0, 24 * 30)));
    Timestamp last_io = clock;
    auto new_post = [&](PostLabel label) {
      Post p;
      p.tweet_id = pad("p", ++post_counter, 6);
      p.author_id = target.user_id;
      p.created_at = clock;
      p.campaign = campaigns[camp];
      p.label = label;
      p.text = organic_text();
      p.retweet_count = count(lognormal(20, 1.0));
      p.like_count = count(lognormal(60, 1.0));
      p.quote_count = count(lognormal(3, 1.0));
      return p;
    };
    for (std::size_t j = 0; j < n_targeted; ++j) {
      Post p = new_post(PostLabel::kTargeted);
      std::size_t k = 0;
      for (int attempt = 0; attempt < 16 && k < 5; ++attempt) k = range(c_.io_replies_min, c_.io_replies_max);
      k = std::min(k, io_by_campaign[camp].size());
      if (k < 5) throw DataError("synthetic config cannot give a targeted post 5 IO replies");
      const std::string& templ = templates[camp][range(0, templates[camp].size() - 1)];
      std::size_t first = replies.size();
      for (const auto& id : deal(io_dealers[camp], k)) add_reply(p, id, true, blend[id], &templ);
      for (const auto& id : deal(organic_dealer, range(c_.organic_replies_min, c_.organic_replies_max)))
        add_reply(p, id, false, 0.0, &templ);
      for (std::size_t i = first; i < replies.size(); ++i)
        if (replies[i].replier_label == ReplierLabel::kIO) last_io = std::max(last_io, replies[i].created_at);
      p.reply_count = (replies.size() - first) + poisson(3.0);
      truth.posts[p.tweet_id] = PostLabel::kTargeted;
      posts.push_back(std::move(p));
      clock += std::chrono::minutes(static_cast<std::int64_t>(range(12 * 60, 72 * 60)));
    }
    clock = std::max(clock, last_io) + std::chrono::minutes(static_cast<std::int64_t>(range(60, 24 * 60)));
    for (std::size_t j = 0; j < n_control; ++j) {
      Post p = new_post(PostLabel::kControl);
      std::size_t first = replies.size();
      for (const auto& id : deal(organic_dealer, range(c_.organic_replies_min, c_.organic_replies_max)))
        add_reply(p, id, false, 0.0, nullptr);
      p.reply_count = (replies.size() - first) + poisson(3.0);
      truth.posts[p.tweet_id] = PostLabel::kControl;
      posts.push_back(std::move(p));
      clock += std::chrono::minutes(static_cast<std::int64_t>(range(12 * 60, 72 * 60)));
    }
  }
  for (auto& p : posts) must(builder.add_post(std::move(p)));
  for (auto& r : replies) must(builder.add_reply(std::move(r)));

  SynthResult result{std::move(builder).build(), std::move(truth), {}};

  // Self-check of the planted contrasts.
  HashingEmbedder embedder;
  std::vector<double> cos_io, cos_org;
  const std::size_t cap = 20000;
  for (const auto& [post_id, idx] : result.corpus.replies_by_post()) {
    const Post* p = result.corpus.post(post_id);
    bool targeted = p && p->label == PostLabel::kTargeted;
    std::vector<const ReplyRecord*> group;
    for (std::size_t i : idx) {
      const auto& r = result.corpus.replies()[i];
      bool io = r.replier_label == ReplierLabel::kIO;
      if (targeted == io) group.push_back(&r);
    }
    auto& sink = targeted ? cos_io : cos_org;
    for (std::size_t a = 0; a < group.size() && sink.size() < cap; ++a) {
      auto ea = embedder.embed(*group[a]->text);
      for (std::size_t b = a + 1; b < group.size() && sink.size() < cap; ++b)
        sink.push_back(cosine(ea, embedder.embed(*group[b]->text)));
    }
  }
  auto& ch = result.checks;
  ch.median_age_io = median(ages_io);
  ch.median_age_organic = median(ages_org);
  ch.median_delay_io = median(delays_io);
  ch.median_delay_organic = median(delays_org);
  ch.median_cosine_io = median(cos_io);
  ch.median_cosine_organic = median(cos_org);
  ch.rank_sum_p = rank_sum_p_greater(cos_io, cos_org);
  if (!(ch.median_age_io < ch.median_age_organic)) throw DataError("synthetic self-check failed: IO accounts not younger");
  if (!(ch.median_delay_io < ch.median_delay_organic)) throw DataError("synthetic self-check failed: IO replies not faster");
  if (!(ch.median_cosine_io > ch.median_cosine_organic) || !(ch.rank_sum_p < 0.01))
    throw DataError("synthetic self-check failed: IO replies not more similar");
  return result;
}

}  // namespace

SynthResult generate(const SynthConfig& config) { return Gen(config).run(); }

OracleLabels oracle_labels(const Corpus& corpus) {
  if (!corpus.synthetic()) throw DataError("oracle labels exist only for synthetic corpora");
  OracleLabels out;
  for (const auto& [id, p] : corpus.posts())
    if (p.label != PostLabel::kUnlabeled) out.posts[id] = p.label;
  for (const auto& r : corpus.replies()) {
    const Account* a = corpus.account(r.replier_id);
    out.repliers[r.replier_id] = a && a->is_io ? ReplierLabel::kIO : ReplierLabel::kNormal;
  }
  return out;
}

std::vector<std::string> write_synthetic_corpus(const SynthResult& result, const SynthConfig& config,
                                                const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  std::vector<std::string> out = {path("accounts_full.csv"), path("posts_full.csv"), path("replies_full.csv"),
                                  path("synthetic.csv")};
  write_accounts_csv(result.corpus, out[0]);
  write_posts_csv(result.corpus, out[1]);
  write_replies_csv(result.corpus, out[2]);
  csv::Writer w(out[3]);
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a64(format_synth_config(config))));
  w.row({"generator", "seed", "config_digest"});
  w.row({"reply-sentinel-synth", std::to_string(config.seed), digest});
  w.flush();
  return out;
}

}  // namespace sentinel
