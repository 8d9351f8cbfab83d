#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copeland {

// Maximum |entry(i,j) + entry(j,i) - 1| and |entry(i,i) - 1/2| accepted by
// make_matrix before it symmetrizes.
inline constexpr double kSymmetryTolerance = 1e-9;

// Pairwise win probabilities: entry(i, j) is the probability that item i beats
// item j. Always satisfies entry(i,j) + entry(j,i) == 1 and entry(i,i) == 1/2;
// the lower triangle is stored as the exact complement of the upper one.
class ComparisonMatrix {
 public:
  // Builds from the strict upper triangle, upper(i, j) for i < j.
  template <class UpperFn>
  static ComparisonMatrix from_upper(int n, UpperFn&& upper);

  int n() const { return n_; }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * n_,
            static_cast<std::size_t>(n_)};
  }

  // Relabels items: item i of the result is item perm[i] of this matrix.
  ComparisonMatrix relabeled(std::span<const int> perm) const;

  bool operator==(const ComparisonMatrix&) const = default;

 private:
  ComparisonMatrix(int n, std::vector<double> data)
      : n_(n), data_(std::move(data)) {}
  static void check_size(int n);
  static void check_probability(double v, int i, int j);

  friend ComparisonMatrix make_matrix(
      const std::vector<std::vector<double>>& grid);

  int n_ = 0;
  std::vector<double> data_;
};

// Validates a full n x n grid and returns the symmetrized matrix.
// Throws DataError on non-square input, n < 2, entries outside [0,1], or
// symmetry/diagonal violations beyond kSymmetryTolerance.
ComparisonMatrix make_matrix(const std::vector<std::vector<double>>& grid);

// Per-item quality parameters of a parametric model. All entries finite.
class QualityVector {
 public:
  explicit QualityVector(std::vector<double> w);
  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
};

// w_i = gap * (n - 1 - i): item 0 has the highest quality.
QualityVector equispaced_quality(int n, double gap);

enum class Cdf { logistic, gaussian };

double logistic_cdf(double x);
double gaussian_cdf(double x);

// entry(i,j) = F(w_i - w_j).
ComparisonMatrix gen_parametric(const QualityVector& w, Cdf cdf);

// BTL among all items except `outlier`. The outlier beats the floor(n/4)
// highest-quality other items with probability 1 and loses to the rest with
// probability 1. The outlier's own quality value is ignored.
ComparisonMatrix gen_btl_outlier(const QualityVector& w, int outlier);

// Toeplitz SST matrix: one uniform increment u_d in [0, gap] per diagonal
// d = 1..n-1, entry(i, i+d) = min(1, 1/2 + u_1 + ... + u_d). Item 0 is first
// in the generating order. gap must lie in (0, 1/2].
ComparisonMatrix gen_sst_diagonal(int n, double gap, std::uint64_t seed);

// entry(i,j) = lambda F(w_i - w_j) + (1 - lambda) F(w_j - w_i), logistic F,
// lambda in (1/2, 1].
ComparisonMatrix gen_btl_mixture(const QualityVector& w, double lambda);

// Two-block matrix with planted set {0, ..., k-1}: 1/2 + delta from planted
// to non-planted, 1/2 - delta the other way, 1/2 inside blocks.
ComparisonMatrix gen_planted(int n, int k, double delta);

// Member `a` of the lower-bound ensemble: same block structure with planted
// set {0, ..., k-2} + {a}, for a in [k-1, n-1].
ComparisonMatrix gen_planted_member(int n, int k, double delta, int a);

// Linear-score model in which items a and a+1 (0-based, a in [0, n-2]) trade
// places: entry(i,j) = 1/2 - (pos(i) - pos(j)) * delta0.
// Requires 0 < delta0 <= 1 / (9 (n - 1)).
ComparisonMatrix gen_adjacent_swap(int n, double delta0, int a);

// Planted block structure placed on an arbitrary ordering: the items
// ordering[0..k-1] form the top block. Requires 0 < delta0 < 1/3.
ComparisonMatrix gen_hamming_planted(int n, int k, double delta0,
                                     std::span<const int> ordering);

// True iff, for every i preceding j in `order`, entry(i,l) >= entry(j,l) for
// all l. O(n^3).
bool satisfies_sst(const ComparisonMatrix& m, std::span<const int> order);

enum class ModelKind {
  btl,
  thurstone,
  btl_outlier,
  sst_diagonal,
  btl_mixture,
  planted,
  adjacent_swap,
  hamming_planted,
  explicit_matrix,
};

std::string_view to_string(ModelKind kind);
// Throws InvalidArgument for unknown names.
ModelKind parse_model_kind(std::string_view name);
// True for kinds whose construction consumes a seed.
bool is_seeded(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::btl;
  int n = 0;
  int k = 0;
  std::vector<double> quality;  // parametric kinds
  double gap = 0.0;             // delta / delta0 / SST increment bound
  double lambda = 0.8;          // btl_mixture
  int outlier = -1;             // btl_outlier; -1 means last item
  int swap_index = 0;           // adjacent_swap
  std::vector<int> ordering;    // hamming_planted; empty means identity
  std::uint64_t seed = 0;       // sst_diagonal
  std::optional<ComparisonMatrix> matrix;  // explicit_matrix
};

ComparisonMatrix instantiate(const ModelSpec& spec);

// Plain CSV, n rows of n values, no header. Values are written with enough
// digits to round-trip exactly.
void write_matrix_csv(std::ostream& out, const ComparisonMatrix& m);
ComparisonMatrix read_matrix_csv(std::istream& in);
ComparisonMatrix read_matrix_csv_file(const std::string& path);

// ---------------------------------------------------------------------------

template <class UpperFn>
ComparisonMatrix ComparisonMatrix::from_upper(int n, UpperFn&& upper) {
  check_size(n);
  std::vector<double> data(static_cast<std::size_t>(n) * n, 0.5);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = upper(i, j);
      check_probability(v, i, j);
      data[static_cast<std::size_t>(i) * n + j] = v;
      data[static_cast<std::size_t>(j) * n + i] = 1.0 - v;
    }
  }
  return ComparisonMatrix(n, std::move(data));
}

}  // namespace copeland
