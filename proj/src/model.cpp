#include "copeland/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "copeland/csv.hpp"
#include "copeland/error.hpp"
#include "copeland/random.hpp"

namespace copeland {

namespace {

std::string where(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

// Two-block construction shared by the planted generators.
ComparisonMatrix block_matrix(const std::vector<char>& in_top, double delta) {
  const int n = static_cast<int>(in_top.size());
  return ComparisonMatrix::from_upper(n, [&](int i, int j) {
    if (in_top[i] == in_top[j]) return 0.5;
    return in_top[i] ? 0.5 + delta : 0.5 - delta;
  });
}

void check_permutation(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) {
    throw InvalidArgument("ordering must list all " + std::to_string(n) +
                          " items");
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v]) {
      throw InvalidArgument("ordering is not a permutation");
    }
    seen[v] = 1;
  }
}

}  // namespace

void ComparisonMatrix::check_size(int n) {
  if (n < 2) throw InvalidArgument("comparison matrix needs n >= 2");
}

void ComparisonMatrix::check_probability(double v, int i, int j) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidArgument("entry " + where(i, j) + " = " +
                          csv::format_double(v) + " is not a probability");
  }
}

ComparisonMatrix ComparisonMatrix::relabeled(std::span<const int> perm) const {
  check_permutation(perm, n_);
  return from_upper(n_, [&](int i, int j) { return (*this)(perm[i], perm[j]); });
}

ComparisonMatrix make_matrix(const std::vector<std::vector<double>>& grid) {
  const int n = static_cast<int>(grid.size());
  if (n < 2) throw DataError("comparison matrix needs n >= 2");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(grid[i].size()) != n) {
      throw DataError("row " + std::to_string(i + 1) + " has " +
                      std::to_string(grid[i].size()) + " entries, expected " +
                      std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      const double v = grid[i][j];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("entry " + where(i, j) + " is outside [0,1]");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(grid[i][i] - 0.5) > kSymmetryTolerance) {
      throw DataError("diagonal entry " + where(i, i) + " must be 1/2");
    }
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(grid[i][j] + grid[j][i] - 1.0) > kSymmetryTolerance) {
        throw DataError("entries " + where(i, j) + " and " + where(j, i) +
                        " do not sum to 1");
      }
    }
  }
  return ComparisonMatrix::from_upper(n, [&](int i, int j) { return grid[i][j]; });
}

QualityVector::QualityVector(std::vector<double> w) : w_(std::move(w)) {
  for (double v : w_) {
    if (!std::isfinite(v)) throw InvalidArgument("quality values must be finite");
  }
}

QualityVector equispaced_quality(int n, double gap) {
  std::vector<double> w(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) w[i] = gap * (n - 1 - i);
  return QualityVector(std::move(w));
}

double logistic_cdf(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ComparisonMatrix gen_parametric(const QualityVector& w, Cdf cdf) {
  const auto F = cdf == Cdf::logistic ? logistic_cdf : gaussian_cdf;
  return ComparisonMatrix::from_upper(
      w.size(), [&](int i, int j) { return F(w[i] - w[j]); });
}

ComparisonMatrix gen_btl_outlier(const QualityVector& w, int outlier) {
  const int n = w.size();
  if (outlier < 0 || outlier >= n) {
    throw InvalidArgument("outlier index out of range");
  }
  std::vector<int> others;
  for (int i = 0; i < n; ++i) {
    if (i != outlier) others.push_back(i);
  }
  std::stable_sort(others.begin(), others.end(),
                   [&](int a, int b) { return w[a] > w[b]; });
  std::vector<char> beaten(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n / 4; ++r) beaten[others[r]] = 1;

  return ComparisonMatrix::from_upper(n, [&](int i, int j) {
    if (i == outlier) return beaten[j] ? 1.0 : 0.0;
    if (j == outlier) return beaten[i] ? 0.0 : 1.0;
    return logistic_cdf(w[i] - w[j]);
  });
}

ComparisonMatrix gen_sst_diagonal(int n, double gap, std::uint64_t seed) {
  if (!(gap > 0.0 && gap <= 0.5)) {
    throw InvalidArgument("SST diagonal gap must lie in (0, 1/2]");
  }
  if (n < 2) throw InvalidArgument("comparison matrix needs n >= 2");
  Xoshiro256 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, gap);
  std::vector<double> level(static_cast<std::size_t>(n), 0.5);
  double cum = 0.5;
  for (int d = 1; d < n; ++d) {
    cum += unif(rng);
    level[d] = std::min(1.0, cum);
  }
  return ComparisonMatrix::from_upper(n, [&](int i, int j) { return level[j - i]; });
}

ComparisonMatrix gen_btl_mixture(const QualityVector& w, double lambda) {
  if (!(lambda > 0.5 && lambda <= 1.0)) {
    throw InvalidArgument("mixture weight must lie in (1/2, 1]");
  }
  return ComparisonMatrix::from_upper(w.size(), [&](int i, int j) {
    const double d = w[i] - w[j];
    return lambda * logistic_cdf(d) + (1.0 - lambda) * logistic_cdf(-d);
  });
}

ComparisonMatrix gen_planted(int n, int k, double delta) {
  if (k < 1 || k >= n) throw InvalidArgument("planted model needs 1 <= k < n");
  if (!(delta > 0.0 && delta < 0.5)) {
    throw InvalidArgument("planted gap must lie in (0, 1/2)");
  }
  std::vector<char> in_top(static_cast<std::size_t>(n), 0);
  std::fill_n(in_top.begin(), k, 1);
  return block_matrix(in_top, delta);
}

ComparisonMatrix gen_planted_member(int n, int k, double delta, int a) {
  if (k < 1 || k >= n) throw InvalidArgument("planted model needs 1 <= k < n");
  if (a < k - 1 || a >= n) {
    throw InvalidArgument("ensemble index must lie in [k-1, n-1]");
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    throw InvalidArgument("planted gap must lie in (0, 1/2)");
  }
  std::vector<char> in_top(static_cast<std::size_t>(n), 0);
  std::fill_n(in_top.begin(), k - 1, 1);
  in_top[a] = 1;
  return block_matrix(in_top, delta);
}

ComparisonMatrix gen_adjacent_swap(int n, double delta0, int a) {
  if (n < 2) throw InvalidArgument("comparison matrix needs n >= 2");
  if (a < 0 || a > n - 2) throw InvalidArgument("swap index must lie in [0, n-2]");
  if (!(delta0 > 0.0 && delta0 <= 1.0 / (9.0 * (n - 1)))) {
    throw InvalidArgument("adjacent-swap gap must lie in (0, 1/(9(n-1))]");
  }
  std::vector<int> pos(static_cast<std::size_t>(n));
  std::iota(pos.begin(), pos.end(), 1);
  std::swap(pos[a], pos[a + 1]);
  return ComparisonMatrix::from_upper(
      n, [&](int i, int j) { return 0.5 - (pos[i] - pos[j]) * delta0; });
}

ComparisonMatrix gen_hamming_planted(int n, int k, double delta0,
                                     std::span<const int> ordering) {
  if (k < 1 || k >= n) throw InvalidArgument("planted model needs 1 <= k < n");
  if (!(delta0 > 0.0 && delta0 < 1.0 / 3.0)) {
    throw InvalidArgument("planted gap must lie in (0, 1/3)");
  }
  check_permutation(ordering, n);
  std::vector<char> in_top(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < k; ++r) in_top[ordering[r]] = 1;
  return block_matrix(in_top, delta0);
}

bool satisfies_sst(const ComparisonMatrix& m, std::span<const int> order) {
  const int n = m.n();
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto hi = m.row(order[a]);
      const auto lo = m.row(order[b]);
      for (int l = 0; l < n; ++l) {
        if (hi[l] < lo[l]) return false;
      }
    }
  }
  return true;
}

namespace {
constexpr std::pair<ModelKind, std::string_view> kKindNames[] = {
    {ModelKind::btl, "btl"},
    {ModelKind::thurstone, "thurstone"},
    {ModelKind::btl_outlier, "btl_outlier"},
    {ModelKind::sst_diagonal, "sst_diagonal"},
    {ModelKind::btl_mixture, "btl_mixture"},
    {ModelKind::planted, "planted"},
    {ModelKind::adjacent_swap, "adjacent_swap"},
    {ModelKind::hamming_planted, "hamming_planted"},
    {ModelKind::explicit_matrix, "explicit"},
};
}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

bool is_seeded(ModelKind kind) { return kind == ModelKind::sst_diagonal; }

ComparisonMatrix instantiate(const ModelSpec& spec) {
  const auto quality = [&] {
    if (static_cast<int>(spec.quality.size()) != spec.n) {
      throw InvalidArgument("quality vector length must equal n");
    }
    return QualityVector(spec.quality);
  };
  switch (spec.kind) {
    case ModelKind::btl:
      return gen_parametric(quality(), Cdf::logistic);
    case ModelKind::thurstone:
      return gen_parametric(quality(), Cdf::gaussian);
    case ModelKind::btl_outlier:
      return gen_btl_outlier(quality(),
                             spec.outlier < 0 ? spec.n - 1 : spec.outlier);
    case ModelKind::sst_diagonal:
      return gen_sst_diagonal(spec.n, spec.gap, spec.seed);
    case ModelKind::btl_mixture:
      return gen_btl_mixture(quality(), spec.lambda);
    case ModelKind::planted:
      return gen_planted(spec.n, spec.k, spec.gap);
    case ModelKind::adjacent_swap:
      return gen_adjacent_swap(spec.n, spec.gap, spec.swap_index);
    case ModelKind::hamming_planted: {
      std::vector<int> order = spec.ordering;
      if (order.empty()) {
        order.resize(static_cast<std::size_t>(std::max(spec.n, 0)));
        std::iota(order.begin(), order.end(), 0);
      }
      return gen_hamming_planted(spec.n, spec.k, spec.gap, order);
    }
    case ModelKind::explicit_matrix:
      if (!spec.matrix) throw InvalidArgument("explicit model without a matrix");
      return *spec.matrix;
  }
  throw InvalidArgument("unhandled model kind");
}

void write_matrix_csv(std::ostream& out, const ComparisonMatrix& m) {
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (j) out << ',';
      out << csv::format_double(m(i, j));
    }
    out << '\n';
  }
}

ComparisonMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> grid;
  for (const auto& line : csv::read_lines(in)) {
    std::vector<double> row;
    for (const auto& f : csv::split(line)) row.push_back(csv::parse_double(f));
    grid.push_back(std::move(row));
  }
  return make_matrix(grid);
}

ComparisonMatrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix file '" + path + "'");
  return read_matrix_csv(in);
}

}  // namespace copeland
