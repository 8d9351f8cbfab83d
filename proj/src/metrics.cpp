#include "copeland/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "copeland/error.hpp"

namespace copeland {

GroundTruth::GroundTruth(const ScoreVector& tau, int k) : order_(order_by_score(tau)) {
  index(k);
  // Ties chain through neighbours in sorted order.
  const int n = this->n();
  int start = 1;
  for (int p = 1; p <= n; ++p) {
    if (p > 1 && std::abs(tau[order_[p - 2]] - tau[order_[p - 1]]) > kTieTolerance) start = p;
    class_start_[static_cast<std::size_t>(order_[p - 1])] = start;
  }
}

GroundTruth::GroundTruth(std::vector<int> true_order, int k) : order_(std::move(true_order)) {
  index(k);
  for (int p = 1; p <= n(); ++p) class_start_[static_cast<std::size_t>(order_[p - 1])] = p;
}

void GroundTruth::index(int k) {
  const int n = this->n();
  if (k < 1 || k > n) throw InvalidArgument("ground truth needs 1 <= k <= n");
  k_ = k;
  pos_.assign(static_cast<std::size_t>(n), 0);
  class_start_.assign(static_cast<std::size_t>(n), 0);
  for (int p = 1; p <= n; ++p) {
    const int item = order_[p - 1];
    if (item < 0 || item >= n || pos_[static_cast<std::size_t>(item)] != 0) {
      throw InvalidArgument("true order must be a permutation of [0, n)");
    }
    pos_[static_cast<std::size_t>(item)] = p;
  }
}

std::vector<int> GroundTruth::true_topk() const {
  return {order_.begin(), order_.begin() + k_};
}

std::vector<std::vector<int>> GroundTruth::tie_classes() const {
  std::vector<std::vector<int>> out;
  for (int item : order_) {
    if (out.empty() || class_start_[static_cast<std::size_t>(item)] == position(item)) {
      out.emplace_back();
    }
    out.back().push_back(item);
  }
  return out;
}

std::vector<int> GroundTruth::favorable_positions(std::span<const int> items) const {
  const int n = this->n();
  std::vector<int> taken(static_cast<std::size_t>(n) + 1, 0);  // class start -> used
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> out;
  out.reserve(items.size());
  for (int item : items) {
    if (item < 0 || item >= n || seen[static_cast<std::size_t>(item)]) {
      throw InvalidArgument("estimate items must be distinct indices in [0, n)");
    }
    seen[static_cast<std::size_t>(item)] = true;
    const int start = class_start_[static_cast<std::size_t>(item)];
    out.push_back(start + taken[static_cast<std::size_t>(start)]++);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int hamming_distance(std::span<const int> a, std::span<const int> b) {
  std::vector<int> x(a.begin(), a.end());
  std::vector<int> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::sort(y.begin(), y.end());
  y.erase(std::unique(y.begin(), y.end()), y.end());
  std::vector<int> diff;
  std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(),
                                std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

namespace {

void check_estimate(const TopKEstimate& est, const GroundTruth& truth) {
  if (static_cast<int>(est.items.size()) != truth.k()) {
    throw InvalidArgument("estimate has " + std::to_string(est.items.size()) +
                          " items, truth has k=" + std::to_string(truth.k()));
  }
}

}  // namespace

HammingOutcome hamming_success(const TopKEstimate& est, const GroundTruth& truth, int h) {
  if (h < 0) throw InvalidArgument("h must be >= 0");
  check_estimate(est, truth);
  const auto pos = truth.favorable_positions(est.items);
  const auto inside = std::count_if(pos.begin(), pos.end(), [&](int p) { return p <= truth.k(); });
  const int distance = 2 * (truth.k() - static_cast<int>(inside));
  return {distance <= 2 * h, distance};
}

bool exact_success(const TopKEstimate& est, const GroundTruth& truth) {
  return hamming_success(est, truth, 0).success;
}

bool allowed_success(const TopKEstimate& est, const GroundTruth& truth,
                     const SetFamily& family) {
  check_estimate(est, truth);
  if (family.n() != truth.n() || family.k() != truth.k()) {
    throw InvalidArgument("set family dimensions differ from the ground truth");
  }
  return membership(family, PositionSet(truth.favorable_positions(est.items)));
}

}  // namespace copeland
