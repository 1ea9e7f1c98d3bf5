#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sentinel/corpus.hpp"

namespace sentinel {

struct ClassificationDataset {
  struct Pairing {
    std::vector<std::string> targeted;  // chronological
    std::vector<std::string> controls;  // chronological
  };

  std::set<std::string> positives;
  std::set<std::string> negatives;
  std::map<std::string, Pairing> per_target;  // by author id
  std::map<std::string, std::string> campaign;  // post id -> campaign tag
  std::vector<std::string> dropped_authors;     // no qualifying control posts
  std::vector<std::string> unresolved_targeted;  // targeted ids without a post record
};

// Direct IO replies per post, counted over full reply records plus pairing
// links whose reply id has no full record.
std::map<std::string, std::size_t> io_reply_counts(const Corpus& corpus);

// Posts with at least `min_io_replies` direct IO replies.
std::set<std::string> select_targeted(const Corpus& corpus, std::size_t min_io_replies = 5);

// Pairs each target author's targeted posts with that author's posts created
// strictly after the last IO reply the author received, in chronological order
// (ties by tweet id), each with at least `min_total_replies` reply records.
// When controls run short the author keeps only the most recent targeted posts.
ClassificationDataset select_controls(const Corpus& corpus, const std::set<std::string>& targeted,
                                      std::size_t min_total_replies = 5);

ClassificationDataset build_classification_dataset(const Corpus& corpus, std::size_t min_io_replies = 5,
                                                   std::size_t min_total_replies = 5);

// `tweetid,type,campaign` with type in {target, control}, sorted by tweet id.
void write_classification_dataset(const ClassificationDataset& ds, const std::string& path);
// Engagement of the dataset's posts in the published `RQ2_engagement.csv` layout.
void write_engagement_csv(const Corpus& corpus, const ClassificationDataset& ds, const std::string& path);

struct CcdfPoint {
  double value;
  double fraction;  // share of observations >= value
  bool operator==(const CcdfPoint&) const = default;
};

// One point per distinct value, ascending; the first fraction is 1.
std::vector<CcdfPoint> ccdf(std::span<const double> sample);

struct Distribution {
  std::string name;
  std::vector<double> values;
};

struct TermCount {
  std::string term;
  std::size_t count = 0;
  double frequency = 0.0;
};

struct Rq1Report {
  std::vector<Distribution> distributions;
  std::vector<TermCount> targeted_terms;
  std::vector<TermCount> non_targeted_terms;
  // Tables in the published layout, derived from full records when available.
  DerivedTables tables;
};

// Exploratory aggregates: target follower/following counts, targeted posts per
// target, IO replies per targeted post, IO reply delays (minutes), replier
// metadata by label, dataset engagement by type, and term frequencies of
// targeted versus other posts by targets after stop-word removal. Falls back
// to the shipped derived tables when full records are absent.
Rq1Report rq1_report(const Corpus& corpus, const std::set<std::string>& stop_words = {},
                     std::size_t min_io_replies = 5);

// Writes rq1_summary.json, one ccdf_<name>.csv per distribution, the RQ1 tables
// and term_frequency_{targeted,non_targeted}.csv into `dir`.
void write_rq1_report(const Rq1Report& report, const std::string& dir);

std::vector<std::string> tokenize(std::string_view text);

}  // namespace sentinel
