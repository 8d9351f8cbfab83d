// copeland: command-line front end for the ranking library.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "copeland/analysis.hpp"
#include "copeland/csv.hpp"
#include "copeland/error.hpp"
#include "copeland/harness.hpp"
#include "copeland/model.hpp"
#include "copeland/rank.hpp"
#include "copeland/sample.hpp"
#include "copeland/setfamily.hpp"

namespace {

using namespace copeland;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

// Writes to the named file, or stdout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& f : csv::split(s)) out.push_back(csv::parse_double(f));
  return out;
}

std::vector<Estimator> parse_estimators(const std::string& s) {
  std::vector<Estimator> out;
  for (const auto& f : csv::split(s)) out.push_back(parse_estimator(f));
  return out;
}

// Options shared by gen-matrix; mirror the experiment config keys.
struct ModelOptions {
  std::string model = "btl";
  int n = 0;
  int k = 0;
  std::optional<double> quality_gap;
  std::optional<double> sst_gap;
  double lambda = 0.8;
  std::optional<double> delta;
  int outlier = -1;
  int swap_index = 0;
  std::string ordering;
  std::uint64_t seed = 0;
};

ModelSpec to_spec(const ModelOptions& o) {
  ModelSpec spec;
  spec.kind = parse_model_kind(o.model);
  spec.n = o.n;
  spec.k = o.k;
  switch (spec.kind) {
    case ModelKind::btl:
    case ModelKind::thurstone:
    case ModelKind::btl_outlier:
    case ModelKind::btl_mixture:
      if (o.n < 2) throw InvalidArgument("--n must be at least 2");
      spec.quality = equispaced_quality(o.n, o.quality_gap.value_or(5.0 / o.n)).values();
      break;
    case ModelKind::sst_diagonal:
      spec.gap = o.sst_gap.value_or(o.n > 0 ? 2.0 / o.n : 0.0);
      break;
    case ModelKind::planted:
    case ModelKind::hamming_planted:
      spec.gap = o.delta.value_or(0.1);
      break;
    case ModelKind::adjacent_swap:
      spec.gap = o.delta.value_or(o.n > 1 ? 1.0 / (9.0 * (o.n - 1)) : 0.0);
      break;
    case ModelKind::explicit_matrix:
      throw InvalidArgument("gen-matrix cannot generate an explicit model");
  }
  spec.lambda = o.lambda;
  spec.outlier = o.outlier;
  spec.swap_index = o.swap_index;
  spec.seed = o.seed;
  if (!o.ordering.empty()) {
    for (const auto& f : csv::split(o.ordering)) {
      spec.ordering.push_back(static_cast<int>(csv::parse_int(f)));
    }
  }
  return spec;
}

json report_json(const SeparationReport& rep) {
  json j;
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["h"] = rep.h;
  j["delta"] = rep.delta;
  j["alpha_implied"] = rep.alpha_implied ? json(*rep.alpha_implied) : json(nullptr);
  j["r_required"] = rep.r_required;
  return j;
}

// Numbers that are +infinity become the string "inf" in JSON output.
json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

int report_error(const std::string& kind, const std::string& message, int code,
                 bool as_json) {
  if (as_json) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "copeland: " << kind << ": " << message << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-k and full ranking from pairwise comparisons by win counting"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json, "Report errors as JSON on stderr");

  // gen-matrix
  ModelOptions mo;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-matrix", "Write a comparison matrix CSV");
  gen->add_option("--model", mo.model,
                  "btl|thurstone|btl_outlier|sst_diagonal|btl_mixture|planted|"
                  "adjacent_swap|hamming_planted")->required();
  gen->add_option("--n", mo.n, "Number of items")->required();
  gen->add_option("--k", mo.k, "Planted set size");
  gen->add_option("--quality-gap", mo.quality_gap, "Spacing of equispaced qualities");
  gen->add_option("--sst-gap", mo.sst_gap, "Upper bound of each diagonal increment");
  gen->add_option("--lambda", mo.lambda, "Mixture weight");
  gen->add_option("--delta", mo.delta, "Planted gap / adjacent-swap step");
  gen->add_option("--outlier", mo.outlier, "Outlier item (default: last)");
  gen->add_option("--swap-index", mo.swap_index, "Adjacent-swap position a");
  gen->add_option("--ordering", mo.ordering, "Comma-separated item order");
  gen->add_option("--seed", mo.seed, "Seed for randomized models");
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  // simulate
  std::string sim_matrix;
  std::string sim_out;
  std::string sim_format = "aggregated";
  double sim_p = 1.0;
  std::int64_t sim_r = 1;
  std::uint64_t sim_seed = 0;
  int sim_threads = default_threads();
  auto* sim = app.add_subcommand("simulate", "Draw comparison outcomes from a matrix");
  sim->add_option("--matrix", sim_matrix, "Matrix CSV")->required();
  sim->add_option("--p", sim_p, "Pair observation probability");
  sim->add_option("--r", sim_r, "Repetitions per pair");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--threads", sim_threads, "Sampling threads");
  sim->add_option("--format", sim_format, "aggregated|records")
      ->check(CLI::IsMember({"aggregated", "records"}));
  sim->add_option("-o,--output", sim_out, "Output file (default stdout)");

  // rank
  std::string rank_in;
  std::optional<int> rank_k;
  std::string rank_est = "copeland";
  bool rank_full = false;
  auto* rank = app.add_subcommand("rank", "Estimate the top k items");
  rank->add_option("--input", rank_in, "Observations or comparisons CSV")->required();
  rank->add_option("--k", rank_k, "Set size (default ceil(n/4))");
  rank->add_option("--estimator", rank_est, "copeland|spectral_baseline");
  rank->add_flag("--ranking", rank_full, "Also emit the full ranking");

  // thresholds
  std::string thr_matrix;
  int thr_k = 0;
  int thr_h = 0;
  double thr_p = 1.0;
  std::optional<std::int64_t> thr_r;
  double thr_alpha = 4.0;
  std::string thr_family;
  auto* thr = app.add_subcommand("thresholds", "Separation thresholds of a matrix");
  thr->add_option("--matrix", thr_matrix, "Matrix CSV")->required();
  thr->add_option("--k", thr_k, "Set size")->required();
  thr->add_option("--h", thr_h, "Hamming tolerance");
  thr->add_option("--p", thr_p, "Pair observation probability");
  thr->add_option("--r", thr_r, "Repetitions (adds the implied alpha)");
  thr->add_option("--alpha", thr_alpha, "Target alpha for r_required");
  thr->add_option("--family", thr_family, "Set-family requirement");

  // bench
  std::string bench_config;
  std::string bench_suite;
  std::string bench_out;
  std::string bench_summary;
  bool bench_no_timing = false;
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> override_opts;
  auto* bench = app.add_subcommand("bench", "Run a configured experiment");
  bench->add_option("--config", bench_config, "key = value config file");
  bench->add_option("--suite", bench_suite, "Preset suite (six-model)")
      ->check(CLI::IsMember({"", "six-model"}));
  bench->add_option("-o,--output", bench_out, "Results CSV (default stdout)");
  bench->add_option("--summary", bench_summary, "Summary JSON file");
  bench->add_flag("--no-timing", bench_no_timing, "Write elapsed_ns as 0");
  for (const auto& key : config_keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    override_opts[key] = bench->add_option("--" + flag, overrides[key], "Overrides " + key);
  }

  // eval-real
  std::string real_obs;
  std::string real_truth;
  std::optional<int> real_k;
  std::string real_q = "1";
  int real_trials = 1;
  std::uint64_t real_seed = 0;
  std::string real_est = "copeland";
  std::string real_out;
  std::string real_summary;
  auto* real = app.add_subcommand("eval-real", "Subsampling evaluation on recorded data");
  real->add_option("--observations", real_obs, "Observations or comparisons CSV")->required();
  real->add_option("--truth", real_truth, "Item ids, best first, one per line")->required();
  real->add_option("--k", real_k, "Set size (default ceil(n/4))");
  real->add_option("--q", real_q, "Comma-separated subsampling fractions");
  real->add_option("--trials", real_trials, "Trials per fraction");
  real->add_option("--seed", real_seed, "Master seed");
  real->add_option("--estimators", real_est, "Comma-separated estimators");
  real->add_option("-o,--output", real_out, "Per-trial CSV (default stdout)");
  real->add_option("--summary", real_summary, "Summary JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (error_json) return report_error("usage", e.what(), kUsage, true);
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) {
      const auto m = instantiate(to_spec(mo));
      Output out(gen_out);
      write_matrix_csv(out.stream(), m);
    } else if (*sim) {
      const auto m = read_matrix_csv_file(sim_matrix);
      LabeledObservations data{draw_observations(m, sim_p, sim_r, sim_seed, sim_threads),
                               default_item_ids(m.n())};
      Output out(sim_out);
      if (sim_format == "records") {
        write_comparisons_csv(out.stream(), data);
      } else {
        write_observations_csv(out.stream(), data);
      }
    } else if (*rank) {
      const auto data = read_observations_file(rank_in);
      const int n = data.obs.n();
      const int k = rank_k.value_or((n + 3) / 4);
      if (k < 1 || k > n) {
        throw InvalidArgument("--k must lie in [1, " + std::to_string(n) + "], got " +
                              std::to_string(k));
      }
      const Estimator est = parse_estimator(rank_est);
      json j;
      j["n"] = n;
      j["k"] = k;
      j["estimator"] = to_string(est);
      RankingEstimate order;
      TopKEstimate top;
      if (est == Estimator::copeland) {
        const auto wins = win_counts(data.obs);
        top = copeland_topk(wins, k);
        order = copeland_ranking(wins);
        j["win_counts"] = wins.counts;
      } else {
        order = spectral_baseline_ranking(data.obs);
        top = spectral_baseline_topk(data.obs, k);
      }
      std::vector<std::string> ids;
      for (int i : top.items) ids.push_back(data.items[static_cast<std::size_t>(i)]);
      j["topk"] = ids;
      j["tie_broken"] = top.tie_broken;
      if (rank_full) {
        std::vector<std::string> all;
        for (int i : order.order) all.push_back(data.items[static_cast<std::size_t>(i)]);
        j["ranking"] = all;
      }
      std::cout << j.dump(2) << '\n';
    } else if (*thr) {
      const auto m = read_matrix_csv_file(thr_matrix);
      const auto rep = separation_report(m, thr_k, thr_h, thr_p, thr_r, thr_alpha);
      json j = report_json(rep);
      if (!thr_family.empty()) {
        const auto fam = parse_family(thr_family, m.n(), thr_k);
        j["family"] = fam.describe();
        j["delta_family"] = finite_or_string(separation_family(scores(m), fam));
      }
      std::cout << j.dump(2) << '\n';
    } else if (*bench) {
      std::map<std::string, std::string> kv;
      if (!bench_config.empty()) {
        auto in = open_input(bench_config);
        kv = parse_config_text(in);
      }
      std::string suite = bench_suite;
      if (const auto it = kv.find("suite"); it != kv.end()) {
        if (bench_suite.empty()) suite = it->second;
        kv.erase(it);
      }
      for (const auto& [key, opt] : override_opts) {
        if (opt->count() > 0) kv[key] = overrides[key];
      }
      if (bench_no_timing) kv["record_timing"] = "false";
      if (suite == "six-model" && !kv.contains("estimators")) {
        kv["estimators"] = "copeland,spectral_baseline";
      }
      const auto base = config_from_map(kv);
      std::vector<ExperimentConfig> configs;
      if (suite.empty()) {
        configs.push_back(base);
      } else if (suite == "six-model") {
        configs = six_model_suite(base);
      } else {
        throw InvalidArgument("unknown suite '" + suite + "'");
      }
      std::vector<ExperimentResult> results;
      for (const auto& cfg : configs) results.push_back(run_experiment(cfg));
      {
        Output out(bench_out);
        write_results_header(out.stream());
        for (const auto& res : results) write_results_rows(out.stream(), res);
      }
      if (!bench_summary.empty()) {
        Output out(bench_summary);
        out.stream() << summary_json(results);
      }
    } else if (*real) {
      const auto data = read_observations_file(real_obs);
      auto truth_in = open_input(real_truth);
      const auto truth = read_truth_order(truth_in, data.items);
      const auto result = run_realdata(data, truth, real_k, parse_double_list(real_q),
                                       real_trials, real_seed, parse_estimators(real_est));
      {
        Output out(real_out);
        write_realdata_csv(out.stream(), result);
      }
      if (!real_summary.empty()) {
        Output out(real_summary);
        out.stream() << realdata_summary_json(result);
      }
    }
  } catch (const InvalidArgument& e) {
    return report_error("usage", e.what(), kUsage, error_json);
  } catch (const DataError& e) {
    return report_error("data", e.what(), kData, error_json);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), kRuntime, error_json);
  }
  return kOk;
}
