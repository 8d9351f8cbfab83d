#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copeland/analysis.hpp"

namespace copeland {

// A k-subset of rank positions {1, ..., n}, stored strictly increasing.
class PositionSet {
 public:
  // Throws InvalidArgument unless `positions` is strictly increasing and >= 1.
  explicit PositionSet(std::vector<int> positions);
  // Sorts first; throws on duplicates.
  static PositionSet from_unsorted(std::vector<int> positions);

  int size() const { return static_cast<int>(t_.size()); }
  int operator[](int j) const { return t_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& positions() const { return t_; }
  int max() const { return t_.empty() ? 0 : t_.back(); }

  // True iff this set lies in the monotone closure of `t`: s_j <= t_j for all j.
  bool dominated_by(const PositionSet& t) const;

  auto operator<=>(const PositionSet&) const = default;

 private:
  std::vector<int> t_;
};

enum class FamilyKind {
  exact,
  hamming,
  topband,
  multiplicative,
  additive,
  ranksum,
  explicit_list,
};

// How a non-integer band (1 + eps) k is turned into a position bound.
enum class BandRounding { floor, ceil };

enum class Requirement { topband, multiplicative, additive, ranksum };

// A monotone family of allowed position sets. Built-in kinds carry their
// defining inequality; when a generator basis (the maximal allowed sets) is
// available, membership is decided by domination against it.
class SetFamily {
 public:
  int n() const { return n_; }
  int k() const { return k_; }
  FamilyKind kind() const { return kind_; }
  int h() const { return h_; }
  double epsilon() const { return eps_; }
  BandRounding rounding() const { return rounding_; }

  // Absent when the basis could not be extracted within budget.
  const std::optional<std::vector<PositionSet>>& generators() const { return gens_; }

  // The defining inequality evaluated on a sorted k-set of positions.
  bool satisfies(std::span<const int> sorted_positions) const;

  // Round-trippable requirement string ("exact", "hamming:h=1", ...).
  std::string describe() const;

 private:
  friend SetFamily family_exact(int n, int k);
  friend SetFamily family_hamming(int n, int k, int h);
  friend SetFamily family_requirement(int n, int k, double epsilon,
                                      Requirement variant, BandRounding rounding);
  friend SetFamily family_explicit(int n, int k, std::vector<PositionSet> sets);

  SetFamily(int n, int k, FamilyKind kind) : n_(n), k_(k), kind_(kind) {}
  void set_generators(std::vector<PositionSet> gens);
  int band_bound() const;

  int n_;
  int k_;
  FamilyKind kind_;
  int h_ = 0;
  double eps_ = 0.0;
  BandRounding rounding_ = BandRounding::floor;
  std::optional<std::vector<PositionSet>> gens_;
};

// Generator extraction for requirement families is attempted for n up to this.
inline constexpr int kMaxExtractN = 64;
// Search-tree node budget for generator extraction.
inline constexpr std::size_t kExtractNodeBudget = 2'000'000;
// enumerate_allowed refuses instances with more k-subsets than this.
inline constexpr double kMaxEnumeration = 1e6;

SetFamily family_exact(int n, int k);
// At least k - h of the positions lie in the top k. Needs 0 <= h < k, k + h <= n.
SetFamily family_hamming(int n, int k, int h);
// topband:        max position <= round((1 + eps) k)
// multiplicative: max position <= (1 + eps) * (smallest position not chosen)
// additive:       max position <= (smallest position not chosen) + eps
// ranksum:        sum of positions <= (1 + eps) k (k + 1) / 2
SetFamily family_requirement(int n, int k, double epsilon, Requirement variant,
                             BandRounding rounding = BandRounding::floor);
// The union of the monotone closures of `sets`; the basis keeps only the
// maximal ones.
SetFamily family_explicit(int n, int k, std::vector<PositionSet> sets);

bool membership(const SetFamily& family, const PositionSet& s);

// All allowed k-subsets in lexicographic order. Throws TooLarge when
// C(n, k) > kMaxEnumeration.
std::vector<PositionSet> enumerate_allowed(const SetFamily& family);

// True iff every set obtained by moving one member's position to a better
// (smaller) free position is again a member, i.e. the list is closed under
// monotone transformations.
bool is_monotone(std::span<const PositionSet> family, int n, int k);

// max over generators T of min_j (tau_(j) - tau_(k + t_j - j + 1)), with
// tau_(m) = -infinity for m > n (those terms drop out of the min).
// Uses the generator basis when available and the predicate search otherwise.
// Returns +infinity when every k-set is allowed.
double separation_family(const ScoreVector& tau, const SetFamily& family);

// The max-min formula evaluated over an explicit list of generators.
double separation_by_generators(const ScoreVector& tau,
                                std::span<const PositionSet> generators, int k);

// Same quantity from the membership predicate alone: the largest threshold
// theta for which the smallest position set achieving every gap >= theta is
// allowed.
double separation_by_predicate(const ScoreVector& tau, const SetFamily& family);

// Maximal allowed sets of a monotone predicate, by depth-first search over
// positions with feasibility pruning. nullopt when the node budget runs out.
template <class Pred>
std::optional<std::vector<PositionSet>> extract_generators(int n, int k, Pred&& allows,
                                                           std::size_t budget);

// Requirement grammar: exact | hamming:h=H | topband:eps=E[,round=floor|ceil]
// | mult:eps=E | add:eps=E | ranksum:eps=E | explicit:@path.csv
SetFamily parse_family(std::string_view spec, int n, int k);

// One sorted position set per row, comma-separated.
std::vector<PositionSet> read_position_sets_csv(std::istream& in);

// ---------------------------------------------------------------------------

template <class Pred>
std::optional<std::vector<PositionSet>> extract_generators(int n, int k, Pred&& allows,
                                                           std::size_t budget) {
  std::vector<int> t(static_cast<std::size_t>(k));
  std::vector<PositionSet> found;
  std::size_t nodes = 0;
  bool exhausted = false;

  // Minimal completion of t[0..j]; allowed iff some completion is.
  const auto feasible = [&](int j) {
    for (int m = j + 1; m < k; ++m) t[m] = t[j] + (m - j);
    return t[k - 1] <= n && allows(std::span<const int>(t));
  };

  const auto visit = [&](auto&& self, int j, int start) -> void {
    if (exhausted) return;
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    if (j == k - 1) {
      // Largest allowed last position for this prefix.
      int lo = start;
      int hi = n;
      t[j] = lo;
      if (!allows(std::span<const int>(t))) return;
      while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        t[j] = mid;
        if (allows(std::span<const int>(t))) lo = mid; else hi = mid - 1;
      }
      t[j] = lo;
      for (int m = 0; m + 1 < k; ++m) {
        if (t[m] + 1 < t[m + 1]) {
          ++t[m];
          const bool bigger = allows(std::span<const int>(t));
          --t[m];
          if (bigger) return;
        }
      }
      found.emplace_back(t);
      return;
    }
    for (int v = start; v <= n - (k - 1 - j); ++v) {
      t[j] = v;
      if (!feasible(j)) break;
      self(self, j + 1, v + 1);
      if (exhausted) return;
    }
  };
  visit(visit, 0, 1);
  if (exhausted) return std::nullopt;
  return found;
}

}  // namespace copeland
