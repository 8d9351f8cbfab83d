#include "copeland/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "copeland/analysis.hpp"
#include "copeland/csv.hpp"
#include "copeland/error.hpp"
#include "copeland/metrics.hpp"
#include "copeland/random.hpp"
#include "copeland/rank.hpp"
#include "copeland/setfamily.hpp"

namespace copeland {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::copeland: return "copeland";
    case Estimator::spectral_baseline: return "spectral_baseline";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "copeland") return Estimator::copeland;
  if (name == "spectral_baseline" || name == "spectral") return Estimator::spectral_baseline;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw InvalidArgument("n must be at least 2");
  if (cfg.k < 1 || cfg.k >= cfg.n) throw InvalidArgument("k must satisfy 1 <= k < n");
  if (cfg.h < 0 || cfg.h >= cfg.k) throw InvalidArgument("h must satisfy 0 <= h < k");
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (cfg.alpha.has_value() == cfg.r.has_value()) {
    throw InvalidArgument("exactly one of alpha and r must be given");
  }
  if (cfg.alpha && !(*cfg.alpha > 0.0 && std::isfinite(*cfg.alpha))) {
    throw InvalidArgument("alpha must be positive");
  }
  if (cfg.r && *cfg.r < 1) throw InvalidArgument("r must be at least 1");
  if (cfg.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (cfg.estimators.empty()) throw InvalidArgument("no estimators selected");
  if (cfg.threads < 1) throw InvalidArgument("threads must be at least 1");
  if (cfg.model.n != cfg.n) throw InvalidArgument("model n differs from experiment n");
}

namespace {

struct Instance {
  ComparisonMatrix matrix;
  std::vector<double> quality;
};

Instance make_instance(const ExperimentConfig& cfg, int index) {
  ModelSpec spec = cfg.model;
  if (is_seeded(spec.kind)) spec.seed = derive_seed(cfg.master_seed, index, "model");
  ComparisonMatrix m = instantiate(spec);
  std::vector<double> quality = spec.quality;
  if (cfg.shuffle_labels) {
    std::vector<int> perm(static_cast<std::size_t>(cfg.n));
    std::iota(perm.begin(), perm.end(), 0);
    Xoshiro256 rng(derive_seed(cfg.master_seed, index, "labels"));
    std::shuffle(perm.begin(), perm.end(), rng);
    m = m.relabeled(perm);
    if (!quality.empty()) {
      std::vector<double> relabeled(quality.size());
      for (std::size_t i = 0; i < perm.size(); ++i) relabeled[i] = quality[perm[i]];
      quality = std::move(relabeled);
    }
  }
  return {std::move(m), std::move(quality)};
}

TopKEstimate run_estimator(Estimator e, const ObservationSet& obs, int k) {
  switch (e) {
    case Estimator::copeland: return copeland_topk(win_counts(obs), k);
    case Estimator::spectral_baseline: return spectral_baseline_topk(obs, k);
  }
  throw InvalidArgument("unhandled estimator");
}

double median(std::vector<std::int64_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? static_cast<double>(v[m])
                      : 0.5 * (static_cast<double>(v[m - 1]) + static_cast<double>(v[m]));
}

// Runs body(t) for t in [0, count) on up to `threads` workers; rethrows the
// first exception.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (int t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min(threads, count); ++w) {
      pool.emplace_back([&] {
        for (int t = next++; t < count; t = next++) {
          try {
            body(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<EstimatorSummary> summarize(const std::vector<TrialRecord>& records,
                                        const std::vector<Estimator>& estimators, int k,
                                        int h) {
  (void)k;
  std::vector<EstimatorSummary> out;
  for (Estimator e : estimators) {
    EstimatorSummary s;
    s.estimator = e;
    std::vector<std::int64_t> times;
    double hamming_sum = 0.0;
    for (const auto& rec : records) {
      if (rec.estimator != e) continue;
      ++s.trials;
      s.exact_failures += !rec.exact_success;
      s.hamming_failures += rec.hamming_error > 2 * h;
      s.allowed_failures += !rec.allowed_success;
      s.estimator_errors += rec.error.has_value();
      hamming_sum += rec.hamming_error;
      times.push_back(rec.elapsed_ns);
    }
    if (s.trials > 0) {
      const double t = s.trials;
      s.exact_failure_fraction = s.exact_failures / t;
      s.hamming_failure_fraction = s.hamming_failures / t;
      s.allowed_failure_fraction = s.allowed_failures / t;
      s.mean_hamming_error = hamming_sum / t;
      s.time_min_ns = *std::min_element(times.begin(), times.end());
      s.time_max_ns = *std::max_element(times.begin(), times.end());
      s.time_mean_ns =
          std::accumulate(times.begin(), times.end(), 0.0,
                          [](double acc, std::int64_t v) { return acc + static_cast<double>(v); }) /
          t;
      s.time_median_ns = median(times);
    }
    out.push_back(s);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult result;
  result.config = cfg;

  const auto family = parse_family(cfg.family, cfg.n, cfg.k);
  const Instance base = make_instance(cfg, 0);
  const auto base_tau = scores(base.matrix);
  result.delta = separation_family(base_tau, family);
  result.quality = base.quality;
  if (cfg.r) {
    result.r = *cfg.r;
    result.alpha = implied_alpha(cfg.n, cfg.p, result.r, result.delta);
  } else {
    result.alpha = *cfg.alpha;
    result.r = required_repetitions(cfg.n, cfg.p, result.delta, result.alpha);
  }

  const bool fresh = cfg.reinstantiate && is_seeded(cfg.model.kind);
  const std::size_t per_trial = cfg.estimators.size();
  result.records.resize(static_cast<std::size_t>(cfg.trials) * per_trial);

  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    std::optional<Instance> own;
    if (fresh) own = make_instance(cfg, t);
    const Instance& inst = own ? *own : base;
    const GroundTruth truth(own ? scores(inst.matrix) : base_tau, cfg.k);

    const std::uint64_t seed = derive_seed(cfg.master_seed, t, "observations");
    const ObservationSet obs = draw_observations(inst.matrix, cfg.p, result.r, seed);

    for (std::size_t e = 0; e < per_trial; ++e) {
      TrialRecord rec;
      rec.trial = t;
      rec.estimator = cfg.estimators[e];
      rec.derived_seed = seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const TopKEstimate est = run_estimator(rec.estimator, obs, cfg.k);
        const auto stop = std::chrono::steady_clock::now();
        rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
        const auto ham = hamming_success(est, truth, cfg.h);
        rec.exact_success = ham.distance == 0;
        rec.hamming_error = ham.distance;
        rec.allowed_success = allowed_success(est, truth, family);
        rec.tie_broken = est.tie_broken;
      } catch (const std::runtime_error& err) {
        const auto stop = std::chrono::steady_clock::now();
        rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
        rec.hamming_error = 2 * cfg.k;
        rec.error = err.what();
      }
      if (!cfg.record_timing) rec.elapsed_ns = 0;
      result.records[static_cast<std::size_t>(t) * per_trial + e] = std::move(rec);
    }
  });

  result.summaries = summarize(result.records, cfg.estimators, cfg.k, cfg.h);
  return result;
}

std::vector<ExperimentConfig> six_model_suite(const ExperimentConfig& base) {
  const int n = base.n;
  const double quality_gap = 5.0 / n;
  const double sst_gap = 2.0 / n;
  const auto parametric = [&](ModelKind kind, std::string label) {
    ExperimentConfig cfg = base;
    cfg.label = std::move(label);
    cfg.model = ModelSpec{};
    cfg.model.kind = kind;
    cfg.model.n = n;
    cfg.model.k = base.k;
    cfg.model.quality = equispaced_quality(n, quality_gap).values();
    return cfg;
  };

  std::vector<ExperimentConfig> suite;
  suite.push_back(parametric(ModelKind::btl, "I-btl"));
  suite.push_back(parametric(ModelKind::thurstone, "II-thurstone"));
  suite.push_back(parametric(ModelKind::btl_outlier, "III-btl_outlier"));
  {
    ExperimentConfig cfg = parametric(ModelKind::sst_diagonal, "IV-sst_diagonal");
    cfg.model.quality.clear();
    cfg.model.gap = sst_gap;
    suite.push_back(cfg);
  }
  suite.push_back(parametric(ModelKind::btl_mixture, "V-btl_mixture"));
  {
    ExperimentConfig cfg = parametric(ModelKind::btl, "VI-btl_low_alpha");
    if (cfg.alpha) {
      *cfg.alpha /= 10.0;
    } else {
      cfg.r = std::max<std::int64_t>(1, *cfg.r / 100);
    }
    suite.push_back(cfg);
  }
  for (std::size_t i = 0; i < suite.size(); ++i) {
    suite[i].master_seed = derive_seed(base.master_seed, i, "suite");
  }
  return suite;
}

void write_results_header(std::ostream& out) { out << kResultsHeader << '\n'; }

void write_results_rows(std::ostream& out, const ExperimentResult& result) {
  const auto& cfg = result.config;
  const std::string label = cfg.label.empty() ? std::string(to_string(cfg.model.kind)) : cfg.label;
  const std::string prefix = label + ',' + std::to_string(cfg.n) + ',' + std::to_string(cfg.k) +
                             ',' + std::to_string(cfg.h) + ',' + csv::format_double(cfg.p) + ',' +
                             std::to_string(result.r) + ',' + csv::format_double(result.alpha) +
                             ',';
  for (const auto& rec : result.records) {
    out << prefix << rec.trial << ',' << to_string(rec.estimator) << ','
        << int{rec.exact_success} << ',' << rec.hamming_error << ','
        << int{rec.allowed_success} << ',' << int{rec.tie_broken} << ',' << rec.elapsed_ns
        << ',' << rec.derived_seed << '\n';
  }
}

namespace {

nlohmann::ordered_json to_json(const EstimatorSummary& s) {
  nlohmann::ordered_json j;
  j["estimator"] = to_string(s.estimator);
  j["trials"] = s.trials;
  j["exact_failures"] = s.exact_failures;
  j["exact_failure_fraction"] = s.exact_failure_fraction;
  j["hamming_failures"] = s.hamming_failures;
  j["hamming_failure_fraction"] = s.hamming_failure_fraction;
  j["allowed_failures"] = s.allowed_failures;
  j["allowed_failure_fraction"] = s.allowed_failure_fraction;
  j["mean_hamming_error"] = s.mean_hamming_error;
  j["estimator_errors"] = s.estimator_errors;
  j["time_min_ns"] = s.time_min_ns;
  j["time_max_ns"] = s.time_max_ns;
  j["time_mean_ns"] = s.time_mean_ns;
  j["time_median_ns"] = s.time_median_ns;
  return j;
}

}  // namespace

std::string summary_json(const std::vector<ExperimentResult>& results) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& res : results) {
    const auto& cfg = res.config;
    nlohmann::ordered_json j;
    j["model"] = cfg.label.empty() ? std::string(to_string(cfg.model.kind)) : cfg.label;
    j["kind"] = to_string(cfg.model.kind);
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["h"] = cfg.h;
    j["p"] = cfg.p;
    j["r"] = res.r;
    j["alpha"] = res.alpha;
    j["delta"] = res.delta;
    j["family"] = cfg.family;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["shuffle_labels"] = cfg.shuffle_labels;
    j["quality"] = res.quality;
    auto ests = nlohmann::ordered_json::array();
    for (const auto& s : res.summaries) ests.push_back(to_json(s));
    j["estimators"] = std::move(ests);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = csv::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = csv::trim(body.substr(0, eq));
    if (key.empty()) throw DataError("config line " + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(csv::trim(body.substr(eq + 1)));
  }
  return kv;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "model",   "label",         "n",          "k",          "h",          "p",
      "alpha",   "r",             "trials",     "estimators", "family",     "master_seed",
      "quality_gap", "sst_gap",   "lambda",     "delta",      "outlier",    "swap_index",
      "matrix",  "reinstantiate", "shuffle_labels", "record_timing", "threads"};
  return keys;
}

int default_threads() {
  if (const char* env = std::getenv("COPELAND_THREADS")) {
    try {
      const auto v = csv::parse_int(env);
      if (v >= 1) return static_cast<int>(v);
    } catch (const DataError&) {
    }
  }
  return 1;
}

namespace {

bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument(key + " must be true or false");
}

}  // namespace

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  const auto& known = config_keys();
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
  const auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const auto num = [&](const std::string& key) -> std::optional<double> {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
      return csv::parse_double(*v);
    } catch (const DataError&) {
      throw InvalidArgument(key + " must be a number, got '" + *v + "'");
    }
  };
  const auto integer = [&](const std::string& key) -> std::optional<long long> {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
      return csv::parse_int(*v);
    } catch (const DataError&) {
      throw InvalidArgument(key + " must be an integer, got '" + *v + "'");
    }
  };

  ExperimentConfig cfg;
  ModelSpec& spec = cfg.model;
  spec.kind = parse_model_kind(get("model").value_or("btl"));
  if (spec.kind == ModelKind::explicit_matrix) {
    const auto path = get("matrix");
    if (!path) throw InvalidArgument("model = explicit needs matrix = <path>");
    spec.matrix = read_matrix_csv_file(*path);
    cfg.n = spec.matrix->n();
  } else {
    const auto n = integer("n");
    if (!n) throw InvalidArgument("n is required");
    cfg.n = static_cast<int>(*n);
  }
  if (const auto n = integer("n"); n && *n != cfg.n) {
    throw InvalidArgument("n differs from the matrix size");
  }
  cfg.k = static_cast<int>(integer("k").value_or((cfg.n + 3) / 4));
  cfg.h = static_cast<int>(integer("h").value_or(0));
  cfg.p = num("p").value_or(1.0);
  cfg.alpha = num("alpha");
  if (const auto r = integer("r")) cfg.r = *r;
  if (!cfg.alpha && !cfg.r) cfg.alpha = 4.0;
  cfg.trials = static_cast<int>(integer("trials").value_or(1));
  if (const auto ests = get("estimators")) {
    cfg.estimators.clear();
    for (const auto& name : csv::split(*ests)) cfg.estimators.push_back(parse_estimator(name));
  }
  cfg.family = get("family").value_or("exact");
  if (const auto s = get("master_seed")) {
    std::uint64_t seed = 0;
    const auto* end = s->data() + s->size();
    const auto [ptr, ec] = std::from_chars(s->data(), end, seed);
    if (ec != std::errc() || ptr != end) throw InvalidArgument("master_seed must be an unsigned integer");
    cfg.master_seed = seed;
  }
  cfg.label = get("label").value_or("");
  if (const auto v = get("reinstantiate")) cfg.reinstantiate = parse_bool("reinstantiate", *v);
  if (const auto v = get("shuffle_labels")) cfg.shuffle_labels = parse_bool("shuffle_labels", *v);
  if (const auto v = get("record_timing")) cfg.record_timing = parse_bool("record_timing", *v);
  cfg.threads = static_cast<int>(integer("threads").value_or(default_threads()));

  spec.n = cfg.n;
  spec.k = cfg.k;
  switch (spec.kind) {
    case ModelKind::btl:
    case ModelKind::thurstone:
    case ModelKind::btl_outlier:
    case ModelKind::btl_mixture:
      if (cfg.n < 2) throw InvalidArgument("n must be at least 2");
      spec.quality = equispaced_quality(cfg.n, num("quality_gap").value_or(5.0 / cfg.n)).values();
      spec.lambda = num("lambda").value_or(0.8);
      spec.outlier = static_cast<int>(integer("outlier").value_or(-1));
      break;
    case ModelKind::sst_diagonal:
      spec.gap = num("sst_gap").value_or(2.0 / cfg.n);
      break;
    case ModelKind::planted:
    case ModelKind::hamming_planted:
      spec.gap = num("delta").value_or(0.1);
      break;
    case ModelKind::adjacent_swap:
      spec.gap = num("delta").value_or(1.0 / (9.0 * (cfg.n - 1)));
      spec.swap_index = static_cast<int>(integer("swap_index").value_or(0));
      break;
    case ModelKind::explicit_matrix:
      break;
  }
  validate(cfg);
  return cfg;
}

std::vector<int> read_truth_order(std::istream& in, const std::vector<std::string>& items) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i], static_cast<int>(i));
  std::vector<int> order;
  std::vector<bool> seen(items.size(), false);
  for (const auto& line : csv::read_lines(in)) {
    const std::string id(csv::trim(line));
    const auto it = index.find(id);
    if (it == index.end()) throw DataError("truth file names unknown item '" + id + "'");
    if (seen[static_cast<std::size_t>(it->second)]) {
      throw DataError("truth file repeats item '" + id + "'");
    }
    seen[static_cast<std::size_t>(it->second)] = true;
    order.push_back(it->second);
  }
  if (order.size() != items.size()) {
    throw DataError("truth file lists " + std::to_string(order.size()) + " of " +
                    std::to_string(items.size()) + " items");
  }
  return order;
}

RealDataResult run_realdata(const LabeledObservations& data,
                            const std::vector<int>& truth_order, std::optional<int> k,
                            const std::vector<double>& q_grid, int trials,
                            std::uint64_t seed, const std::vector<Estimator>& estimators) {
  const int n = data.obs.n();
  RealDataResult out;
  out.n = n;
  out.k = k.value_or((n + 3) / 4);
  if (out.k < 1 || out.k > n) {
    throw InvalidArgument("k must satisfy 1 <= k <= n (n=" + std::to_string(n) + ")");
  }
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (estimators.empty()) throw InvalidArgument("no estimators selected");
  const GroundTruth truth(truth_order, out.k);

  for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
    const double q = q_grid[qi];
    const std::uint64_t q_seed = derive_seed(seed, qi, "q");
    std::vector<double> sums(estimators.size(), 0.0);
    std::vector<int> errors(estimators.size(), 0);
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(q_seed, t, "trial");
      const ObservationSet obs = subsample(data.obs, q, trial_seed);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        RealDataRow row;
        row.q = q;
        row.trial = t;
        row.estimator = estimators[e];
        row.derived_seed = trial_seed;
        try {
          const TopKEstimate est = run_estimator(estimators[e], obs, out.k);
          row.hamming_error = hamming_success(est, truth, 0).distance;
        } catch (const std::runtime_error& err) {
          row.hamming_error = 2 * out.k;
          row.error = err.what();
          ++errors[e];
        }
        sums[e] += row.hamming_error;
        out.rows.push_back(std::move(row));
      }
    }
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      out.summaries.push_back({q, estimators[e], sums[e] / trials, errors[e]});
    }
  }
  return out;
}

void write_realdata_csv(std::ostream& out, const RealDataResult& result) {
  out << "q,trial,estimator,k,hamming_error,failed,derived_seed\n";
  for (const auto& row : result.rows) {
    out << csv::format_double(row.q) << ',' << row.trial << ',' << to_string(row.estimator)
        << ',' << result.k << ',' << row.hamming_error << ',' << int{row.error.has_value()}
        << ',' << row.derived_seed << '\n';
  }
}

std::string realdata_summary_json(const RealDataResult& result) {
  nlohmann::ordered_json j;
  j["n"] = result.n;
  j["k"] = result.k;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : result.summaries) {
    nlohmann::ordered_json e;
    e["q"] = s.q;
    e["estimator"] = to_string(s.estimator);
    e["mean_hamming_error"] = s.mean_hamming_error;
    e["estimator_errors"] = s.estimator_errors;
    arr.push_back(std::move(e));
  }
  j["results"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace copeland
