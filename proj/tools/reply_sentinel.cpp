// reply-sentinel: command-line driver for the detection pipeline.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sentinel/corpus.hpp"
#include "sentinel/csv.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/features.hpp"
#include "sentinel/hash.hpp"
#include "sentinel/models.hpp"
#include "sentinel/report.hpp"
#include "sentinel/similarity.hpp"
#include "sentinel/simd.hpp"
#include "sentinel/sweeps.hpp"
#include "sentinel/synth.hpp"
#include "sentinel/timeutil.hpp"

namespace fs = std::filesystem;
using namespace sentinel;

namespace {

constexpr const char* kVersion = "1.0.0";

// Bad flag values detected after parsing; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  std::string features;
  std::string out = ".";
  std::uint64_t seed = 7;
  std::string model = "random_forest";
  std::size_t folds = 10;
  std::size_t min_io_replies = 5;
  std::size_t min_total_replies = 5;
  std::string sampling = "none";
  std::string embedder = "hashing";
  std::string sweep_range;
  std::string sweep_type = "threshold";
  std::size_t sweep_step = 0;
  std::size_t repeats = 10;
  std::size_t datasets = 10;
  std::string model_path;
  std::string synth_config;
  std::string spill_dir;
  std::string config;
};

void progress(const std::string& msg) { std::cerr << "[reply-sentinel] " << msg << '\n'; }

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

ModelKind model_kind(const std::string& name) {
  auto k = parse_model_kind(name);
  if (!k) throw UsageError("unknown model '" + name + "'");
  return *k;
}

Sampling sampling_of(const std::string& name) {
  auto s = parse_sampling(name);
  if (!s) throw UsageError("unknown sampling '" + name + "'");
  return *s;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text, std::pair<std::size_t, std::size_t> dflt) {
  if (text.empty()) return dflt;
  auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("sweep range must look like a..b");
  try {
    std::size_t pos = 0;
    long a = std::stol(text.substr(0, dots), &pos);
    if (pos != dots) throw UsageError("bad sweep range");
    std::string rest = text.substr(dots + 2);
    long b = std::stol(rest, &pos);
    if (pos != rest.size() || a <= 0 || b < a) throw UsageError("bad sweep range '" + text + "'");
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  } catch (const std::logic_error&) {
    throw UsageError("bad sweep range '" + text + "'");
  }
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Collects outputs and writes run_manifest.json last.
class Run {
 public:
  Run(std::string subcommand, const Options& opts) : subcommand_(std::move(subcommand)), opts_(opts) {
    fs::create_directories(opts.out);
  }
  std::string output(const std::string& name) {
    outputs_.insert(name);
    return join_path(opts_.out, name);
  }
  void input(const std::string& path) { inputs_.insert(path); }
  void note(const std::string& key, Json value) { notes_[key] = std::move(value); }

  void finish() {
    Json config;
    config["subcommand"] = subcommand_;
    config["inputs"] = opts_.inputs;
    config["features"] = opts_.features;
    config["out"] = opts_.out;
    config["seed"] = opts_.seed;
    config["model"] = opts_.model;
    config["folds"] = opts_.folds;
    config["min_io_replies"] = opts_.min_io_replies;
    config["min_total_replies"] = opts_.min_total_replies;
    config["sampling"] = opts_.sampling;
    config["embedder"] = opts_.embedder;
    config["sweep_type"] = opts_.sweep_type;
    config["sweep_range"] = opts_.sweep_range;
    config["sweep_step"] = opts_.sweep_step;
    config["repeats"] = opts_.repeats;
    config["datasets"] = opts_.datasets;
    config["model_path"] = opts_.model_path;
    config["synth_config"] = opts_.synth_config;
    config["config_file"] = opts_.config;
    config["threshold_policy"] = kThresholdPolicy;
    Json inputs = Json::array();
    for (const auto& p : inputs_) {
      std::error_code ec;
      auto size = fs::file_size(p, ec);
      inputs.push_back({{"path", p}, {"bytes", ec ? 0 : size}, {"fnv1a64", file_digest(p)}});
    }
    Json m;
    m["tool"] = "reply-sentinel";
    m["version"] = kVersion;
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = std::vector<std::string>(outputs_.begin(), outputs_.end());
    m["notes"] = notes_;
    m["simd"] = simd::active().name;
    auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    m["timestamp"] = format_timestamp(now);
    write_json(m, join_path(opts_.out, "run_manifest.json"));
  }

 private:
  std::string subcommand_;
  const Options& opts_;
  std::set<std::string> inputs_;
  std::set<std::string> outputs_;
  Json notes_ = Json::object();
};

Corpus load_inputs(const Options& o, Run& run) {
  if (o.inputs.empty()) throw UsageError("--input is required");
  for (const auto& p : o.inputs) run.input(p);
  progress("loading " + std::to_string(o.inputs.size()) + " file(s)");
  Corpus c = load_corpus(o.inputs);
  write_rejects_csv(c, run.output("rejects.csv"));
  if (!c.rejects().empty()) progress(std::to_string(c.rejects().size()) + " row(s) rejected, see rejects.csv");
  return c;
}

FeatureMatrix load_features(const Options& o, Run& run) {
  if (o.features.empty()) throw UsageError("--features is required");
  run.input(o.features);
  FeatureLoadReport rep;
  FeatureMatrix m = load_feature_csv(o.features, &rep);
  run.note("feature_rows", rep.rows);
  run.note("imputed_cells", rep.imputed_cells);
  run.note("label_column", rep.label_column);
  progress("loaded " + std::to_string(m.rows()) + " rows x " + std::to_string(m.names.size()) + " features");
  return m;
}

bool is_replier_table(const FeatureMatrix& m) {
  return std::any_of(m.names.begin(), m.names.end(), [](const std::string& n) { return n.starts_with("profile."); }) ||
         std::find(m.names.begin(), m.names.end(), "age") != m.names.end();
}

// Embedding source from --embedder.
struct Source {
  std::unique_ptr<EmbeddingProvider> provider;
  SimilaritySource source;
};

Source make_source(const Options& o, Run& run) {
  Source s;
  if (o.embedder == "hashing") {
    s.provider = std::make_unique<HashingEmbedder>();
  } else if (o.embedder.starts_with("file:")) {
    std::string path = o.embedder.substr(5);
    run.input(path);
    s.provider = std::make_unique<FileEmbeddingProvider>(path);
  } else if (o.embedder.starts_with("pairs:")) {
    s.source.pairs_path = o.embedder.substr(6);
    run.input(s.source.pairs_path);
  } else {
    throw UsageError("unknown embedder '" + o.embedder + "'");
  }
  s.source.provider = s.provider.get();
  return s;
}

EvalOptions eval_options(const Options& o) {
  EvalOptions e;
  e.folds = o.folds;
  e.sampling = sampling_of(o.sampling);
  e.n_datasets = o.datasets;
  return e;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_ingest(const Options& o) {
  Run run("ingest", o);
  Corpus c = load_inputs(o, run);
  Json j = to_json(corpus_summary(c));
  Json files = Json::array();
  for (const auto& m : c.provenance())
    files.push_back({{"path", m.path}, {"schema", m.schema}, {"rows", m.rows}, {"loaded", m.loaded},
                     {"rejected", m.rejected}});
  j["files"] = std::move(files);
  j["synthetic"] = c.synthetic();
  write_json(j, run.output("corpus_summary.json"));
  run.finish();
}

void cmd_build_dataset(const Options& o) {
  Run run("build-dataset", o);
  Corpus c = load_inputs(o, run);
  auto ds = build_classification_dataset(c, o.min_io_replies, o.min_total_replies);
  write_classification_dataset(ds, run.output("classification_dataset.csv"));
  write_engagement_csv(c, ds, run.output("RQ2_engagement.csv"));
  Json j{{"targeted", ds.positives.size()},
         {"control", ds.negatives.size()},
         {"targets", ds.per_target.size()},
         {"dropped_authors", ds.dropped_authors},
         {"unresolved_targeted", ds.unresolved_targeted.size()},
         {"min_io_replies", o.min_io_replies}};
  write_json(j, run.output("dataset_summary.json"));
  progress(std::to_string(ds.positives.size()) + " targeted / " + std::to_string(ds.negatives.size()) + " control");
  run.finish();
}

void cmd_similarity(const Options& o) {
  Run run("similarity", o);
  Corpus c = load_inputs(o, run);
  Source src = make_source(o, run);
  auto ds = build_classification_dataset(c, o.min_io_replies, o.min_total_replies);
  std::set<std::string> scope = ds.positives;
  scope.insert(ds.negatives.begin(), ds.negatives.end());
  PairTypeHistogram hist;
  PairCsvWriter writer(run.output("pairs.csv"));
  PairSink sink = [&](const PostPairs& b) {
    writer(b);
    hist(b);
  };
  JoinOptions jo;
  jo.seed = o.seed;
  JoinReport rep = src.source.provider ? coreply_pair_join(c, *src.source.provider, scope, sink, jo)
                                       : replay_pairs_file(src.source.pairs_path, scope, sink);
  write_gap_report(rep, run.output("similarity_gaps.csv"));
  hist.write_csv(run.output("fig8_similarity.csv"));
  Json j = to_json(rep);
  j["median_cosine"] = {{"io-io", hist.median(0)}, {"io-normal", hist.median(1)}, {"normal-normal", hist.median(2)}};
  write_json(j, run.output("join_report.json"));
  progress(std::to_string(rep.emitted_pairs) + " pairs emitted");
  run.finish();
}

void cmd_features(const Options& o) {
  Run run("features", o);
  Corpus c = load_inputs(o, run);
  Source src = make_source(o, run);
  auto ds = build_classification_dataset(c, o.min_io_replies, o.min_total_replies);
  ExtractionOptions eo;
  eo.min_total_replies = o.min_total_replies;
  eo.join.seed = o.seed;
  if (!o.spill_dir.empty()) eo.spill_dir = o.spill_dir;
  auto ex = extract_features(c, ds, src.source, eo);
  write_feature_csv(ex.tweets, run.output("tweet_features.csv"));
  write_feature_csv(ex.repliers, run.output("replier_features.csv"));
  write_json(to_json(ex.report), run.output("extraction_report.json"));
  progress(std::to_string(ex.tweets.rows()) + " tweet vectors, " + std::to_string(ex.repliers.rows()) +
           " replier vectors");
  run.finish();
}

void cmd_train(const Options& o) {
  Run run("train", o);
  FeatureMatrix m = load_features(o, run);
  ModelKind kind = model_kind(o.model);
  EvalOptions eo = eval_options(o);
  // Threshold from the CV protocol; final fit on the (resampled) full table.
  EvalReport cv = kfold_cv(m.x, m.y, kind, o.seed, eo);
  std::vector<std::size_t> rows(m.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  if (eo.sampling == Sampling::kOversample) rows = oversample_train(m.y, rows, o.seed);
  if (eo.sampling == Sampling::kDownsample) rows = downsample_balanced(m.y, 1, o.seed).front();
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = m.y[rows[i]];
  TrainedModel model = train(kind, m.x.select_rows(rows), y, o.seed, eo.hp, m.names);
  model.set_threshold(mean_of(cv.thresholds));
  save_model(model, run.output("model.txt"));
  write_json(to_json(cv), run.output("train_report.json"));
  run.finish();
}

void cmd_evaluate(const Options& o) {
  Run run("evaluate", o);
  FeatureMatrix m = load_features(o, run);
  EvalOptions eo = eval_options(o);
  std::vector<ModelKind> kinds;
  if (!o.model_path.empty()) {
    // Score a saved model on the given table.
    run.input(o.model_path);
    TrainedModel model = load_model(o.model_path);
    auto scores = model.predict_score(m.x);
    Metrics met = compute_metrics(scores, m.y, model.threshold());
    Json j{{"model", to_string(model.kind())}, {"threshold", model.threshold()}, {"metrics", to_json(met)}};
    write_json(j, run.output("scored.json"));
    csv::Writer w(run.output("scores.csv"));
    w.row({"entity_id", "score", "prediction", "label"});
    for (std::size_t i = 0; i < scores.size(); ++i)
      w.row({m.ids[i], csv::format_double(scores[i]), scores[i] >= model.threshold() ? "1" : "0",
             std::to_string(m.y[i])});
    w.flush();
    run.finish();
    return;
  }
  if (o.model == "all")
    kinds.assign(all_model_kinds().begin(), all_model_kinds().end());
  else
    kinds.push_back(model_kind(o.model));
  std::vector<EvalReport> reports;
  Json j;
  j["task"] = is_replier_table(m) ? "replier" : "tweet";
  Json results = Json::object();
  for (ModelKind k : kinds) {
    progress("evaluating " + to_string(k));
    reports.push_back(kfold_cv(m.x, m.y, k, o.seed, eo));
    results[to_string(k)] = to_json(reports.back());
  }
  j["results"] = std::move(results);
  write_json(j, run.output("table2.json"));
  write_metrics_csv(reports, run.output("table2.csv"));
  run.finish();
}

void cmd_importance(const Options& o) {
  Run run("importance", o);
  FeatureMatrix m = load_features(o, run);
  ModelKind kind = model_kind(o.model);
  EvalOptions eo = eval_options(o);
  bool replier = is_replier_table(m);
  Matrix x = m.x;
  std::vector<int> y = m.y;
  if (eo.sampling == Sampling::kDownsample) {
    // One balanced dataset; the groups are permuted within it.
    auto rows = downsample_balanced(m.y, 1, o.seed).front();
    x = m.x.select_rows(rows);
    y.assign(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = m.y[rows[i]];
    eo.sampling = Sampling::kNone;
  }
  auto rep = permutation_importance(x, y, feature_groups(m.names), kind, o.seed, eo, o.repeats);
  std::string stem = replier ? "fig9_importance" : "fig4_importance";
  write_importance_csv(rep, run.output(stem + ".csv"));
  write_json(to_json(rep), run.output(stem + ".json"));
  run.finish();
}

void cmd_sweep(const Options& o) {
  Run run("sweep", o);
  ModelKind kind = model_kind(o.model);
  EvalOptions eo = eval_options(o);
  if (o.sweep_type == "threshold") {
    Corpus c = load_inputs(o, run);
    Source src = make_source(o, run);
    auto [lo, hi] = parse_range(o.sweep_range, {5, 20});
    ThresholdSweepOptions so;
    so.lo = lo;
    so.hi = hi;
    so.min_total_replies = o.min_total_replies;
    so.join.seed = o.seed;
    so.eval = eo;
    auto rows = threshold_sweep(c, kind, o.seed, src.source, so);
    write_sweep_csv(rows, "min_io_replies", run.output("fig6_sweep.csv"));
    write_json(to_json(rows, "min_io_replies"), run.output("fig6_sweep.json"));
  } else if (o.sweep_type == "imbalance") {
    FeatureMatrix m = load_features(o, run);
    auto [lo, hi] = parse_range(o.sweep_range, {5, 45});
    std::size_t step = o.sweep_step ? o.sweep_step : 5;
    std::vector<std::size_t> ratios;
    for (std::size_t r = lo; r <= hi; r += step) ratios.push_back(r);
    auto rows = imbalance_sweep(m.x, m.y, ratios, kind, o.seed, eo, o.datasets);
    write_sweep_csv(rows, "negatives_per_positive", run.output("fig10_imbalance.csv"));
    write_json(to_json(rows, "negatives_per_positive"), run.output("fig10_imbalance.json"));
  } else {
    throw UsageError("unknown sweep type '" + o.sweep_type + "'");
  }
  run.finish();
}

void cmd_cross_campaign(const Options& o) {
  Run run("cross-campaign", o);
  FeatureMatrix m = load_features(o, run);
  auto rep = cross_campaign(m, model_kind(o.model), o.seed, eval_options(o));
  for (const auto& e : rep.excluded) progress("campaign '" + e + "' excluded (too few rows of a class)");
  std::string stem = is_replier_table(m) ? "replier_cross_campaign" : "table4_cross_campaign";
  write_cross_campaign_csv(rep, run.output(stem + ".csv"));
  write_json(to_json(rep), run.output(stem + ".json"));
  run.finish();
}

void cmd_synth(const Options& o, bool seed_given) {
  Run run("synth", o);
  SynthConfig cfg;
  if (!o.synth_config.empty()) {
    run.input(o.synth_config);
    cfg = load_synth_config(o.synth_config);
  }
  if (seed_given || o.synth_config.empty()) cfg.seed = o.seed;
  progress("generating synthetic corpus (seed " + std::to_string(cfg.seed) + ")");
  run.note("generator_seed", cfg.seed);
  SynthResult res = generate(cfg);
  for (const auto& p : write_synthetic_corpus(res, cfg, o.out)) run.output(fs::path(p).filename().string());
  {
    std::ofstream f(run.output("synth_config.conf"), std::ios::binary);
    f << format_synth_config(cfg);
  }
  {
    csv::Writer w(run.output("oracle_labels.csv"));
    w.row({"entity_type", "entity_id", "label"});
    for (const auto& [id, l] : res.truth.posts) w.row({"post", id, to_string(l)});
    for (const auto& [id, l] : res.truth.repliers) w.row({"replier", id, to_string(l)});
    w.flush();
  }
  write_json(to_json(res.checks), run.output("synth_checks.json"));
  auto ds = build_classification_dataset(res.corpus, o.min_io_replies, o.min_total_replies);
  HashingEmbedder embedder;
  ExtractionOptions eo;
  eo.min_total_replies = o.min_total_replies;
  eo.join.seed = o.seed;
  auto ex = extract_features(res.corpus, ds, SimilaritySource{&embedder, {}}, eo);
  write_feature_csv(ex.tweets, run.output("tweet_features.csv"));
  write_feature_csv(ex.repliers, run.output("replier_features.csv"));
  write_json(to_json(ex.report), run.output("extraction_report.json"));
  progress(std::to_string(ex.tweets.rows()) + " tweet vectors, " + std::to_string(ex.repliers.rows()) +
           " replier vectors");
  run.finish();
}

void cmd_rq1_report(const Options& o) {
  Run run("rq1-report", o);
  Corpus c = load_inputs(o, run);
  auto rep = rq1_report(c, {}, o.min_io_replies);
  write_rq1_report(rep, o.out);
  for (const auto& entry : fs::directory_iterator(o.out)) {
    auto name = entry.path().filename().string();
    if (name != "run_manifest.json") run.output(name);
  }
  run.finish();
}

// ---------------------------------------------------------------------------
// --config: key=value lines become flags unless that flag is already given.

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw UsageError("config line is not key=value: " + trim(line));
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    if (given("--" + key)) continue;
    extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void print_error(const std::string& kind, const std::string& message) {
  std::string flat = message;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  Json j{{"status", "error"}, {"kind", kind}, {"message", flat}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reply-sentinel: detect coordinated reply attacks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--config", o.config, "key=value file supplying flags not given on the command line");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--input", o.inputs, "Input CSV files (published or repo-defined schemas)")->expected(1, -1);
    sub->add_option("--min-io-replies", o.min_io_replies, "IO replies needed to call a post targeted")
        ->capture_default_str();
    sub->add_option("--min-total-replies", o.min_total_replies, "Reply floor for dataset posts")
        ->capture_default_str();
  };
  auto add_embedder = [&](CLI::App* sub) {
    sub->add_option("--embedder", o.embedder, "hashing | file:<vectors.csv> | pairs:<pairs.csv>")
        ->capture_default_str();
    sub->add_option("--spill-dir", o.spill_dir, "Directory for per-replier spill files");
  };
  auto add_model = [&](CLI::App* sub, bool allow_all) {
    sub->add_option("--model", o.model,
                    std::string("logistic_regression | random_forest | adaboost | decision_tree | naive_bayes") +
                        (allow_all ? " | all" : ""))
        ->capture_default_str();
    sub->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    sub->add_option("--sampling", o.sampling, "none | downsample | oversample")->capture_default_str();
    sub->add_option("--datasets", o.datasets, "Balanced datasets for downsampling; draws per imbalance ratio")->capture_default_str();
  };
  auto add_features = [&](CLI::App* sub) {
    sub->add_option("--features", o.features, "Feature CSV (ours or the published classifier files)");
  };

  auto* ingest = app.add_subcommand("ingest", "Load and validate CSVs; write corpus_summary.json and rejects.csv");
  add_common(ingest);
  add_inputs(ingest);

  auto* build = app.add_subcommand("build-dataset", "Select targeted and control posts");
  add_common(build);
  add_inputs(build);

  auto* sim = app.add_subcommand("similarity", "Co-reply pair cosines over the dataset posts");
  add_common(sim);
  add_inputs(sim);
  add_embedder(sim);

  auto* feats = app.add_subcommand("features", "Extract the 99 tweet and 76 replier features");
  add_common(feats);
  add_inputs(feats);
  add_embedder(feats);

  auto* trn = app.add_subcommand("train", "Fit a model on a feature table; write model.txt");
  add_common(trn);
  add_features(trn);
  add_model(trn, false);

  auto* evl = app.add_subcommand("evaluate", "k-fold evaluation; write table2.json");
  add_common(evl);
  add_features(evl);
  add_model(evl, true);
  evl->add_option("--model-file", o.model_path, "Score a saved model instead of cross-validating");

  auto* imp = app.add_subcommand("importance", "Grouped permutation importance");
  add_common(imp);
  add_features(imp);
  add_model(imp, false);
  imp->add_option("--repeats", o.repeats, "Permutations per group")->capture_default_str();

  auto* swp = app.add_subcommand("sweep", "IO-reply threshold sweep or class-imbalance sweep");
  add_common(swp);
  add_inputs(swp);
  add_embedder(swp);
  add_features(swp);
  add_model(swp, false);
  swp->add_option("--type", o.sweep_type, "threshold | imbalance")->capture_default_str();
  swp->add_option("--sweep-range", o.sweep_range, "a..b (threshold default 5..20, imbalance 5..45)");
  swp->add_option("--sweep-step", o.sweep_step, "Step between sweep points (imbalance default 5)");

  auto* cross = app.add_subcommand("cross-campaign", "Train on one campaign, test on another");
  add_common(cross);
  add_features(cross);
  add_model(cross, false);

  auto* syn = app.add_subcommand("synth", "Generate a synthetic corpus with planted coordination");
  add_common(syn);
  syn->add_option("--synth-config", o.synth_config, "Generator parameter file (key = value)");
  syn->add_option("--min-io-replies", o.min_io_replies, "IO replies needed to call a post targeted")
      ->capture_default_str();
  syn->add_option("--min-total-replies", o.min_total_replies, "Reply floor for dataset posts")->capture_default_str();

  auto* rq1 = app.add_subcommand("rq1-report", "Exploratory distributions, CCDFs and term frequencies");
  add_common(rq1);
  add_inputs(rq1);

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    std::vector<std::string> forward(args.rbegin(), args.rend());
    forward = expand_config(std::move(forward));
    args.assign(forward.rbegin(), forward.rend());
    app.parse(args);
    // Reject bad enumerations before any input is read.
    if (!(*evl && o.model == "all")) model_kind(o.model);
    sampling_of(o.sampling);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*ingest) cmd_ingest(o);
    else if (*build) cmd_build_dataset(o);
    else if (*sim) cmd_similarity(o);
    else if (*feats) cmd_features(o);
    else if (*trn) cmd_train(o);
    else if (*evl) cmd_evaluate(o);
    else if (*imp) cmd_importance(o);
    else if (*swp) cmd_sweep(o);
    else if (*cross) cmd_cross_campaign(o);
    else if (*syn) cmd_synth(o, syn->count("--seed") > 0);
    else if (*rq1) cmd_rq1_report(o);
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const DataError& e) {
    std::string msg = e.what();
    fs::path rejects = fs::path(o.out) / "rejects.csv";
    if (fs::exists(rejects)) msg += " (rejects: " + rejects.string() + ")";
    print_error("data", msg);
    return 1;
  } catch (const std::exception& e) {
    print_error("validation", e.what());
    return 1;
  }
  return 0;
}
