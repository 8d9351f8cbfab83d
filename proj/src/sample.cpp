#include "copeland/sample.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "copeland/csv.hpp"
#include "copeland/error.hpp"
#include "copeland/random.hpp"

namespace copeland {

ObservationSet::ObservationSet(int n, std::int64_t r, std::optional<double> p)
    : n_(n), r_(r), p_(p) {
  if (n < 2) throw InvalidArgument("observation set needs n >= 2");
  if (r < 0) throw InvalidArgument("r must be non-negative");
  if (p && !(*p >= 0.0 && *p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  const auto pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  comparisons_.assign(pairs, 0);
  lower_wins_.assign(pairs, 0);
}

std::int64_t ObservationSet::comparisons(int i, int j) const {
  if (i == j) return 0;
  if (i > j) std::swap(i, j);
  return comparisons_[pair_index(i, j)];
}

std::int64_t ObservationSet::wins(int i, int j) const {
  if (i == j) return 0;
  if (i < j) return lower_wins_[pair_index(i, j)];
  const auto idx = pair_index(j, i);
  return comparisons_[idx] - lower_wins_[idx];
}

void ObservationSet::set_pair(int i, int j, std::int64_t comparisons,
                              std::int64_t wins_i) {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw InvalidArgument("invalid pair");
  }
  if (comparisons < 0 || wins_i < 0 || wins_i > comparisons) {
    throw InvalidArgument("invalid counts for pair");
  }
  if (comparisons > r_) throw InvalidArgument("pair compared more than r times");
  if (i > j) {
    std::swap(i, j);
    wins_i = comparisons - wins_i;
  }
  const auto idx = pair_index(i, j);
  comparisons_[idx] = comparisons;
  lower_wins_[idx] = wins_i;
}

std::int64_t ObservationSet::total_comparisons() const {
  std::int64_t total = 0;
  for (auto c : comparisons_) total += c;
  return total;
}

ObservationSet draw_observations(const ComparisonMatrix& m, double p,
                                 std::int64_t r, std::uint64_t seed,
                                 int threads) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (r < 1) throw InvalidArgument("r must be >= 1");
  const int n = m.n();
  ObservationSet obs(n, r, p);

  auto draw_rows = [&](int row_begin, int row_end, std::vector<std::int64_t>& comps,
                       std::vector<std::int64_t>& wins) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const auto idx = obs.pair_index(i, j);
        Xoshiro256 rng(derive_seed(seed, idx, "pair"));
        std::int64_t c = r;
        if (p < 1.0) c = std::binomial_distribution<std::int64_t>(r, p)(rng);
        const double q = m(i, j);
        std::int64_t w = 0;
        if (q >= 1.0) {
          w = c;
        } else if (q > 0.0 && c > 0) {
          w = std::binomial_distribution<std::int64_t>(c, q)(rng);
        }
        comps[idx] = c;
        wins[idx] = w;
      }
    }
  };

  std::vector<std::int64_t> comps(obs.num_pairs());
  std::vector<std::int64_t> wins(obs.num_pairs());
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    draw_rows(0, n, comps, wins);
  } else {
    // Rows are interleaved across workers; each pair writes only its own slot.
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (int i = t; i < n; i += threads) draw_rows(i, i + 1, comps, wins);
      });
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto idx = obs.pair_index(i, j);
      obs.set_pair(i, j, comps[idx], wins[idx]);
    }
  }
  return obs;
}

ObservationSet subsample(const ObservationSet& obs, double q, std::uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
  if (q == 1.0) return obs;
  std::optional<double> p = obs.p();
  if (p) *p *= q;
  ObservationSet out(obs.n(), obs.r(), p);
  if (q == 0.0) return out;
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j) {
      const auto idx = obs.pair_index(i, j);
      const auto c = obs.comparisons(i, j);
      if (c == 0) continue;
      Xoshiro256 rng(derive_seed(seed, idx, "subsample"));
      const auto wi = obs.wins(i, j);
      const auto keep_i = std::binomial_distribution<std::int64_t>(wi, q)(rng);
      const auto keep_j = std::binomial_distribution<std::int64_t>(c - wi, q)(rng);
      out.set_pair(i, j, keep_i + keep_j, keep_i);
    }
  }
  return out;
}

LabeledObservations ingest_comparisons(std::span<const ComparisonRecord> rows) {
  if (rows.empty()) throw DataError("no comparisons to ingest");
  std::vector<std::string> items;
  std::unordered_map<std::string, int> index;
  const auto id_of = [&](const std::string& name) {
    const auto [it, inserted] = index.emplace(name, static_cast<int>(items.size()));
    if (inserted) items.push_back(name);
    return it->second;
  };

  struct PairCount {
    std::int64_t comparisons = 0;
    std::int64_t lower_wins = 0;
  };
  std::vector<std::pair<std::pair<int, int>, bool>> outcomes;
  outcomes.reserve(rows.size());
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const auto& rec = rows[row];
    const auto line = "row " + std::to_string(row + 1);
    if (rec.item_a == rec.item_b) throw DataError(line + ": self-comparison");
    if (rec.winner != rec.item_a && rec.winner != rec.item_b) {
      throw DataError(line + ": winner '" + rec.winner + "' is not one of the items");
    }
    const int a = id_of(rec.item_a);
    const int b = id_of(rec.item_b);
    const int w = rec.winner == rec.item_a ? a : b;
    outcomes.push_back({{std::min(a, b), std::max(a, b)}, w == std::min(a, b)});
  }

  const int n = static_cast<int>(items.size());
  if (n < 2) throw DataError("need at least two distinct items");
  std::vector<PairCount> counts(static_cast<std::size_t>(n) * (n - 1) / 2);
  ObservationSet shape(n, 0, std::nullopt);
  std::int64_t r = 0;
  for (const auto& [pair, lower_won] : outcomes) {
    auto& pc = counts[shape.pair_index(pair.first, pair.second)];
    ++pc.comparisons;
    if (lower_won) ++pc.lower_wins;
    r = std::max(r, pc.comparisons);
  }
  ObservationSet obs(n, r, std::nullopt);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& pc = counts[obs.pair_index(i, j)];
      obs.set_pair(i, j, pc.comparisons, pc.lower_wins);
    }
  }
  return {std::move(obs), std::move(items)};
}

namespace {

std::vector<ComparisonRecord> parse_records(const std::vector<std::string>& lines) {
  std::vector<ComparisonRecord> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto f = csv::split(lines[l]);
    if (f.size() != 3) {
      throw DataError("comparisons CSV line " + std::to_string(l + 1) +
                      ": expected 3 fields");
    }
    rows.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2])});
  }
  return rows;
}

const std::vector<std::string> kRecordHeader{"item_a", "item_b", "winner"};
const std::vector<std::string> kAggregateHeader{"item_a", "item_b", "comparisons",
                                                "wins_a"};

}  // namespace

std::vector<ComparisonRecord> read_comparisons_csv(std::istream& in) {
  const auto lines = csv::read_lines(in);
  if (lines.empty()) throw DataError("empty comparisons file");
  if (csv::split(lines.front()) != kRecordHeader) {
    throw DataError("comparisons CSV must start with header item_a,item_b,winner");
  }
  return parse_records(lines);
}

void write_comparisons_csv(std::ostream& out, const LabeledObservations& data) {
  const auto& obs = data.obs;
  out << "item_a,item_b,winner\n";
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j) {
      const auto wi = obs.wins(i, j);
      const auto wj = obs.wins(j, i);
      for (std::int64_t t = 0; t < wi; ++t) {
        out << data.items[i] << ',' << data.items[j] << ',' << data.items[i] << '\n';
      }
      for (std::int64_t t = 0; t < wj; ++t) {
        out << data.items[i] << ',' << data.items[j] << ',' << data.items[j] << '\n';
      }
    }
  }
}

void write_observations_csv(std::ostream& out, const LabeledObservations& data) {
  const auto& obs = data.obs;
  out << "# n=" << obs.n() << " r=" << obs.r() << " p="
      << (obs.p() ? csv::format_double(*obs.p()) : std::string("absent")) << '\n';
  out << "item_a,item_b,comparisons,wins_a\n";
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j) {
      out << data.items[i] << ',' << data.items[j] << ','
          << obs.comparisons(i, j) << ',' << obs.wins(i, j) << '\n';
    }
  }
}

namespace {

LabeledObservations read_aggregated(const std::vector<std::string>& lines,
                                    std::optional<std::int64_t> meta_r,
                                    std::optional<double> meta_p) {
  struct Row {
    int a, b;
    std::int64_t c, w;
  };
  std::vector<std::string> items;
  std::unordered_map<std::string, int> index;
  const auto id_of = [&](const std::string& name) {
    const auto [it, inserted] = index.emplace(name, static_cast<int>(items.size()));
    if (inserted) items.push_back(name);
    return it->second;
  };
  std::vector<Row> rows;
  std::int64_t max_c = 0;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto f = csv::split(lines[l]);
    const auto where = "observations CSV line " + std::to_string(l + 1);
    if (f.size() != 4) throw DataError(where + ": expected 4 fields");
    if (f[0] == f[1]) throw DataError(where + ": self-comparison");
    Row row{id_of(f[0]), id_of(f[1]), csv::parse_int(f[2]), csv::parse_int(f[3])};
    if (row.c < 0 || row.w < 0 || row.w > row.c) {
      throw DataError(where + ": inconsistent counts");
    }
    max_c = std::max(max_c, row.c);
    rows.push_back(row);
  }
  const int n = static_cast<int>(items.size());
  if (n < 2) throw DataError("observations need at least two items");
  const std::int64_t r = meta_r.value_or(max_c);
  if (max_c > r) throw DataError("pair count exceeds declared r");
  ObservationSet obs(n, r, meta_p);
  std::vector<char> seen(obs.num_pairs(), 0);
  for (const auto& row : rows) {
    const auto idx = obs.pair_index(std::min(row.a, row.b), std::max(row.a, row.b));
    if (seen[idx]) throw DataError("duplicate pair in observations CSV");
    seen[idx] = 1;
    obs.set_pair(row.a, row.b, row.c, row.w);
  }
  return {std::move(obs), std::move(items)};
}

}  // namespace

LabeledObservations read_observations(std::istream& in) {
  std::optional<std::int64_t> meta_r;
  std::optional<double> meta_p;
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto t = csv::trim(raw);
    if (t.empty()) continue;
    if (t.front() == '#') {
      std::istringstream meta{std::string(t.substr(1))};
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "r") meta_r = csv::parse_int(val);
        if (key == "p" && val != "absent") meta_p = csv::parse_double(val);
      }
      continue;
    }
    lines.emplace_back(t);
  }
  if (lines.empty()) throw DataError("empty observations file");
  const auto header = csv::split(lines.front());
  if (header == kRecordHeader) return ingest_comparisons(parse_records(lines));
  if (header == kAggregateHeader) {
    return read_aggregated(lines, meta_r, meta_p);
  }
  throw DataError("unrecognized observations header '" + lines.front() + "'");
}

LabeledObservations read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open observations file '" + path + "'");
  return read_observations(in);
}

std::vector<std::string> default_item_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

}  // namespace copeland
