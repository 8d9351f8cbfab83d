#pragma once

#include <span>
#include <vector>

#include "copeland/analysis.hpp"
#include "copeland/rank.hpp"
#include "copeland/setfamily.hpp"

namespace copeland {

// Scores closer than this (between neighbours in sorted order) are tied.
inline constexpr double kTieTolerance = 1e-12;

// The true ordering of the items and its tie structure.
class GroundTruth {
 public:
  // Orders by descending score, ties toward the smaller index.
  GroundTruth(const ScoreVector& tau, int k);
  // A strict order given best-first; every item is its own tie class.
  GroundTruth(std::vector<int> true_order, int k);

  int n() const { return static_cast<int>(order_.size()); }
  int k() const { return k_; }
  const std::vector<int>& true_order() const { return order_; }
  // The first k items of true_order.
  std::vector<int> true_topk() const;
  // Tie classes as contiguous blocks of true_order, best first.
  std::vector<std::vector<int>> tie_classes() const;
  // 1-based position of `item` in true_order.
  int position(int item) const { return pos_[static_cast<std::size_t>(item)]; }

  // Positions of `items` with each tie class handing its smallest positions
  // to the chosen members. Sorted ascending. Throws InvalidArgument on
  // duplicates or out-of-range items.
  std::vector<int> favorable_positions(std::span<const int> items) const;

 private:
  void index(int k);

  int k_ = 0;
  std::vector<int> order_;
  std::vector<int> pos_;          // item -> 1-based position
  std::vector<int> class_start_;  // item -> first position of its tie class
};

// Size of the symmetric difference of two item sets (duplicates ignored).
int hamming_distance(std::span<const int> a, std::span<const int> b);

bool exact_success(const TopKEstimate& est, const GroundTruth& truth);

struct HammingOutcome {
  bool success = false;
  int distance = 0;
};

// Smallest distance from the estimate to any top-k set consistent with the
// tie classes; success iff it is at most 2h.
HammingOutcome hamming_success(const TopKEstimate& est, const GroundTruth& truth, int h);

bool allowed_success(const TopKEstimate& est, const GroundTruth& truth,
                     const SetFamily& family);

}  // namespace copeland
