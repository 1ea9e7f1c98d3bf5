#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sentinel/corpus.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/features.hpp"
#include "sentinel/similarity.hpp"
#include "sentinel/sweeps.hpp"
#include "sentinel/synth.hpp"

namespace sentinel {

using Json = nlohmann::ordered_json;

Json to_json(const Metrics& m);
Json to_json(const EvalReport& r);
Json to_json(const ImportanceReport& r);
Json to_json(const CrossCampaignReport& r);
Json to_json(const std::vector<SweepRow>& rows, const std::string& value_name);
Json to_json(const JoinReport& r);
Json to_json(const CorpusSummary& s);
Json to_json(const SynthChecks& c);
Json to_json(const ExtractionReport& r);
Json to_json(const std::vector<EngagementPair>& pairs);

// Two-space indented, trailing newline.
void write_json(const Json& j, const std::string& path);

// model,precision,precision_se,recall,recall_se,f1,f1_se,auc,auc_se
void write_metrics_csv(const std::vector<EvalReport>& reports, const std::string& path);
// group,median_drop,repeat,drop (one row per repeat)
void write_importance_csv(const ImportanceReport& r, const std::string& path);
// <value_name>,positives,negatives,status,precision,...,auc_se
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& value_name, const std::string& path);
// train_campaign,test_campaign,f1
void write_cross_campaign_csv(const CrossCampaignReport& r, const std::string& path);

}  // namespace sentinel
