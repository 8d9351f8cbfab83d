#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copeland/model.hpp"

namespace copeland {

// Aggregated comparison outcomes per unordered pair: how often the pair was
// compared and how often the lower-indexed item won. Per-trial sequences are
// not kept; every estimator here depends on the counts only.
class ObservationSet {
 public:
  // All counts zero. p is absent for data of unknown provenance.
  ObservationSet(int n, std::int64_t r, std::optional<double> p);

  int n() const { return n_; }
  std::int64_t r() const { return r_; }
  std::optional<double> p() const { return p_; }
  std::size_t num_pairs() const { return comparisons_.size(); }

  // Row-major index over pairs i < j.
  std::size_t pair_index(int i, int j) const {
    return static_cast<std::size_t>(i) * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  std::int64_t comparisons(int i, int j) const;
  // Comparisons of the pair {i, j} won by i.
  std::int64_t wins(int i, int j) const;

  // Records `comparisons` comparisons of {i, j}, `wins_i` of them won by i.
  // Throws InvalidArgument if counts are negative, wins_i > comparisons, or
  // comparisons > r.
  void set_pair(int i, int j, std::int64_t comparisons, std::int64_t wins_i);

  std::int64_t total_comparisons() const;

  // Raw per-pair arrays in pair_index order; wins are for the lower index.
  std::span<const std::int64_t> comparison_counts() const { return comparisons_; }
  std::span<const std::int64_t> lower_wins() const { return lower_wins_; }

  bool operator==(const ObservationSet&) const = default;

 private:
  int n_;
  std::int64_t r_;
  std::optional<double> p_;
  std::vector<std::int64_t> comparisons_;
  std::vector<std::int64_t> lower_wins_;
};

// For every pair independently: comparisons ~ Binomial(r, p), each won by i
// with probability m(i, j). Pair {i, j} draws from its own engine seeded with
// derive_seed(seed, pair_index(i, j), "pair"), so the result is identical for
// any `threads` value.
ObservationSet draw_observations(const ComparisonMatrix& m, double p,
                                 std::int64_t r, std::uint64_t seed,
                                 int threads = 1);

// Keeps each individual comparison independently with probability q.
// The returned set records p * q when p is known.
ObservationSet subsample(const ObservationSet& obs, double q, std::uint64_t seed);

struct ComparisonRecord {
  std::string item_a;
  std::string item_b;
  std::string winner;
};

struct LabeledObservations {
  ObservationSet obs;
  std::vector<std::string> items;  // index -> identifier
};

// Items are indexed in order of first appearance; r is the largest per-pair
// count and p is left absent. Throws DataError on empty input, a
// self-comparison, or a winner that is neither item.
LabeledObservations ingest_comparisons(std::span<const ComparisonRecord> rows);

// Comparisons CSV: header `item_a,item_b,winner`, one comparison per row.
std::vector<ComparisonRecord> read_comparisons_csv(std::istream& in);
void write_comparisons_csv(std::ostream& out, const LabeledObservations& data);

// Aggregated observations CSV:
//   # n=<n> r=<r> p=<p|absent>
//   item_a,item_b,comparisons,wins_a
// with one row per unordered pair.
void write_observations_csv(std::ostream& out, const LabeledObservations& data);

// Reads either format, dispatching on the header line.
LabeledObservations read_observations(std::istream& in);
LabeledObservations read_observations_file(const std::string& path);

// Identifiers "1".."n".
std::vector<std::string> default_item_ids(int n);

}  // namespace copeland
