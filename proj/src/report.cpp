#include "sentinel/report.hpp"

#include <fstream>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

Json to_json(const Metrics& m) {
  return Json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"auc", m.auc}};
}

Json to_json(const EvalReport& r) {
  Json j;
  j["fingerprint"] = {{"model", to_string(r.kind)},
                      {"seed", r.seed},
                      {"sampling", to_string(r.sampling)},
                      {"folds", r.folds},
                      {"datasets", r.datasets},
                      {"threshold_policy", kThresholdPolicy}};
  j["rows"] = r.rows;
  j["positives"] = r.positives;
  j["thresholds"] = r.thresholds;
  j["mean"] = to_json(r.mean);
  j["stderr"] = to_json(r.stderr_);
  Json folds = Json::array();
  for (const auto& m : r.fold_metrics) folds.push_back(to_json(m));
  j["folds"] = std::move(folds);
  return j;
}

Json to_json(const ImportanceReport& r) {
  Json j;
  j["baseline_f1"] = r.baseline_f1;
  j["repeats"] = r.repeats;
  Json groups = Json::array();
  for (const auto& g : r.groups)
    groups.push_back({{"group", g.group}, {"columns", g.columns.size()}, {"median_drop", g.median}, {"drops", g.drops}});
  j["groups"] = std::move(groups);
  return j;
}

Json to_json(const CrossCampaignReport& r) {
  return Json{{"campaigns", r.campaigns}, {"f1", r.f1}, {"excluded", r.excluded}};
}

Json to_json(const std::vector<SweepRow>& rows, const std::string& value_name) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json j;
    j[value_name] = row.value;
    j["positives"] = row.positives;
    j["negatives"] = row.negatives;
    j["status"] = row.insufficient ? "insufficient" : "ok";
    if (row.report) j["report"] = to_json(*row.report);
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(const JoinReport& r) {
  std::size_t subsampled_posts = 0;
  for (const auto& g : r.gaps) subsampled_posts += g.subsampled;
  return Json{{"posts", r.posts},
              {"expected_pairs", r.expected_pairs},
              {"emitted_pairs", r.emitted_pairs},
              {"missing_pairs", r.missing_pairs},
              {"self_pairs", r.self_pairs},
              {"subsampled_out", r.subsampled_out},
              {"gap_posts", r.gaps.size()},
              {"subsampled_posts", subsampled_posts}};
}

Json to_json(const CorpusSummary& s) {
  return Json{{"accounts", s.accounts},
              {"io_accounts", s.io_accounts},
              {"normal_accounts", s.normal_accounts},
              {"posts", s.posts},
              {"targeted_posts", s.targeted_posts},
              {"control_posts", s.control_posts},
              {"replies", s.replies},
              {"io_replies", s.io_replies},
              {"io_repliers", s.io_repliers},
              {"normal_repliers", s.normal_repliers},
              {"distinct_targets", s.distinct_targets},
              {"skew_anomalous_replies", s.skew_anomalous_replies},
              {"rejects", s.rejects}};
}

Json to_json(const SynthChecks& c) {
  return Json{{"median_age_io", c.median_age_io},
              {"median_age_organic", c.median_age_organic},
              {"median_delay_io", c.median_delay_io},
              {"median_delay_organic", c.median_delay_organic},
              {"median_cosine_io", c.median_cosine_io},
              {"median_cosine_organic", c.median_cosine_organic},
              {"rank_sum_p", c.rank_sum_p}};
}

Json to_json(const ExtractionReport& r) {
  return Json{{"join", to_json(r.join)},
              {"tweets", r.tweets},
              {"repliers", r.repliers},
              {"below_floor", r.below_floor},
              {"excluded_repliers", r.excluded_repliers.size()},
              {"imputed_repliers", r.imputed_repliers.size()}};
}

Json to_json(const std::vector<EngagementPair>& pairs) {
  Json out = Json::array();
  for (const auto& p : pairs)
    out.push_back({{"tweet_field", p.tweet_field},
                   {"reply_field", p.reply_field},
                   {"mean_correlation", p.mean_correlation},
                   {"degenerate", p.degenerate}});
  return out;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path);
}

namespace {
std::vector<std::string> metric_cells(const EvalReport& r) {
  const auto& m = r.mean;
  const auto& s = r.stderr_;
  return {csv::format_double(m.precision), csv::format_double(s.precision), csv::format_double(m.recall),
          csv::format_double(s.recall),    csv::format_double(m.f1),        csv::format_double(s.f1),
          csv::format_double(m.auc),       csv::format_double(s.auc)};
}
const std::vector<std::string> kMetricColumns = {"precision", "precision_se", "recall", "recall_se",
                                                 "f1",        "f1_se",        "auc",    "auc_se"};
}  // namespace

void write_metrics_csv(const std::vector<EvalReport>& reports, const std::string& path) {
  csv::Writer w(path);
  std::vector<std::string> header = {"model"};
  header.insert(header.end(), kMetricColumns.begin(), kMetricColumns.end());
  w.row(header);
  for (const auto& r : reports) {
    std::vector<std::string> row = {to_string(r.kind)};
    auto cells = metric_cells(r);
    row.insert(row.end(), cells.begin(), cells.end());
    w.row(row);
  }
  w.flush();
}

void write_importance_csv(const ImportanceReport& r, const std::string& path) {
  csv::Writer w(path);
  w.row({"group", "median_drop", "repeat", "drop"});
  for (const auto& g : r.groups)
    for (std::size_t i = 0; i < g.drops.size(); ++i)
      w.row({g.group, csv::format_double(g.median), std::to_string(i), csv::format_double(g.drops[i])});
  w.flush();
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& value_name, const std::string& path) {
  csv::Writer w(path);
  std::vector<std::string> header = {value_name, "positives", "negatives", "status"};
  header.insert(header.end(), kMetricColumns.begin(), kMetricColumns.end());
  w.row(header);
  for (const auto& row : rows) {
    std::vector<std::string> cells = {std::to_string(row.value), std::to_string(row.positives),
                                      std::to_string(row.negatives), row.insufficient ? "insufficient" : "ok"};
    if (row.report) {
      auto m = metric_cells(*row.report);
      cells.insert(cells.end(), m.begin(), m.end());
    } else {
      cells.resize(cells.size() + kMetricColumns.size());
    }
    w.row(cells);
  }
  w.flush();
}

void write_cross_campaign_csv(const CrossCampaignReport& r, const std::string& path) {
  csv::Writer w(path);
  w.row({"train_campaign", "test_campaign", "f1"});
  for (std::size_t i = 0; i < r.campaigns.size(); ++i)
    for (std::size_t j = 0; j < r.campaigns.size(); ++j)
      w.row({r.campaigns[i], r.campaigns[j], csv::format_double(r.f1[i][j])});
  w.flush();
}

}  // namespace sentinel
