#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copeland/model.hpp"
#include "copeland/sample.hpp"

namespace copeland {

enum class Estimator { copeland, spectral_baseline };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct ExperimentConfig {
  ModelSpec model;
  std::string label;  // model column of the results; defaults to the kind name
  int n = 0;
  int k = 0;
  int h = 0;
  double p = 1.0;
  // Exactly one of these. With alpha, r = required_repetitions(n, p, delta, alpha)
  // where delta is the separation of `family` on the instantiated matrix.
  std::optional<double> alpha;
  std::optional<std::int64_t> r;
  int trials = 1;
  std::vector<Estimator> estimators{Estimator::copeland};
  std::string family = "exact";
  std::uint64_t master_seed = 0;
  // Re-create seeded models for every trial instead of once per experiment.
  bool reinstantiate = false;
  // Relabel items by a seeded permutation so the index tie rule carries no
  // information about the true order.
  bool shuffle_labels = true;
  // When false every elapsed_ns is written as 0, making results byte-stable.
  bool record_timing = true;
  int threads = 1;
};

// Throws InvalidArgument on inconsistent settings.
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
  int trial = 0;
  Estimator estimator = Estimator::copeland;
  bool exact_success = false;
  int hamming_error = 0;
  bool allowed_success = false;
  bool tie_broken = false;
  std::int64_t elapsed_ns = 0;
  std::uint64_t derived_seed = 0;
  // Set when the estimator threw; the trial then counts as failed on every
  // criterion with hamming_error = 2k.
  std::optional<std::string> error;
};

struct EstimatorSummary {
  Estimator estimator = Estimator::copeland;
  int trials = 0;
  int exact_failures = 0;
  int hamming_failures = 0;
  int allowed_failures = 0;
  int estimator_errors = 0;
  double exact_failure_fraction = 0.0;
  double hamming_failure_fraction = 0.0;
  double allowed_failure_fraction = 0.0;
  double mean_hamming_error = 0.0;
  std::int64_t time_min_ns = 0;
  std::int64_t time_max_ns = 0;
  double time_mean_ns = 0.0;
  double time_median_ns = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::int64_t r = 0;
  double delta = 0.0;        // separation that drove r (family-specific)
  double alpha = 0.0;        // target, or implied when r was given
  std::vector<double> quality;  // w actually used, empty for non-parametric kinds
  std::vector<TrialRecord> records;  // trial-major, estimators in config order
  std::vector<EstimatorSummary> summaries;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Recomputes the per-estimator summaries from a record list.
std::vector<EstimatorSummary> summarize(const std::vector<TrialRecord>& records,
                                        const std::vector<Estimator>& estimators, int k,
                                        int h);

// The six-model comparison: BTL, Thurstone, BTL with an outlier, SST by
// independent diagonals, BTL mixture, and BTL with alpha scaled down by 10.
// `base` supplies n, k, p, alpha, trials, estimators and seed.
std::vector<ExperimentConfig> six_model_suite(const ExperimentConfig& base);

inline constexpr std::string_view kResultsHeader =
    "model,n,k,h,p,r,alpha,trial,estimator,exact_success,hamming_error,"
    "allowed_success,tie_broken,elapsed_ns,derived_seed";

void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const ExperimentResult& result);
// JSON array with one object per experiment.
std::string summary_json(const std::vector<ExperimentResult>& results);

// Config text: `key = value` lines, `#` starts a comment.
std::map<std::string, std::string> parse_config_text(std::istream& in);
// Applies keys on top of defaults. Unknown keys throw InvalidArgument.
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
// The keys accepted by config_from_map.
const std::vector<std::string>& config_keys();
// Thread count from COPELAND_THREADS, or 1.
int default_threads();

struct RealDataRow {
  double q = 0.0;
  int trial = 0;
  Estimator estimator = Estimator::copeland;
  int hamming_error = 0;
  std::uint64_t derived_seed = 0;
  std::optional<std::string> error;
};

struct RealDataSummary {
  double q = 0.0;
  Estimator estimator = Estimator::copeland;
  double mean_hamming_error = 0.0;
  int estimator_errors = 0;
};

struct RealDataResult {
  int n = 0;
  int k = 0;
  std::vector<RealDataRow> rows;
  std::vector<RealDataSummary> summaries;  // per q, estimators in order
};

// Reads a truth file: one item identifier per line, best first. Returns the
// item indices of `items` in that order. Throws DataError on unknown,
// repeated or missing identifiers.
std::vector<int> read_truth_order(std::istream& in, const std::vector<std::string>& items);

// For each q and trial: subsample the data, run each estimator for the top k
// (default ceil(n/4)) and record the Hamming error against the truth order.
RealDataResult run_realdata(const LabeledObservations& data,
                            const std::vector<int>& truth_order, std::optional<int> k,
                            const std::vector<double>& q_grid, int trials,
                            std::uint64_t seed, const std::vector<Estimator>& estimators);

void write_realdata_csv(std::ostream& out, const RealDataResult& result);
std::string realdata_summary_json(const RealDataResult& result);

}  // namespace copeland
