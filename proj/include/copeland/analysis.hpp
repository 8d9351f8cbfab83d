#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "copeland/model.hpp"

namespace copeland {

// tau_i = probability that item i beats an item drawn uniformly from all n
// items (itself included).
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<double> tau);
  int size() const { return static_cast<int>(tau_.size()); }
  double operator[](int i) const { return tau_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return tau_; }

 private:
  std::vector<double> tau_;
};

ScoreVector scores(const ComparisonMatrix& m);

// Items by descending score; equal scores keep the smaller index first.
std::vector<int> order_by_score(const ScoreVector& tau);
// tau_(1) >= tau_(2) >= ... >= tau_(n).
std::vector<double> sorted_scores(const ScoreVector& tau);

// tau_(k) - tau_(k+1), 1 <= k < n.
double separation_topk(const ScoreVector& tau, int k);
double separation_topk(const ComparisonMatrix& m, int k);

// tau_(k-h) - tau_(k+h+1), 0 <= h < k, k + h + 1 <= n.
double separation_hamming(const ScoreVector& tau, int k, int h);
double separation_hamming(const ComparisonMatrix& m, int k, int h);

// The scale sqrt(log n / (n p r)) against which separations are measured.
double separation_scale(int n, double p, double r);

// Smallest r >= 1 with delta >= alpha * sqrt(log n / (n p r)).
// Throws InvalidArgument when delta <= 0 (no r works) or p is outside (0,1].
std::int64_t required_repetitions(int n, double p, double delta, double alpha);

// alpha such that delta = alpha * sqrt(log n / (n p r)).
double implied_alpha(int n, double p, std::int64_t r, double delta);

struct SeparationReport {
  int n = 0;
  int k = 0;
  int h = 0;
  double delta = 0.0;
  std::optional<double> alpha_implied;  // present when r is known
  std::int64_t r_required = 1;          // for the target alpha
};

// delta = separation_hamming(k, h) (which is separation_topk when h == 0).
SeparationReport separation_report(const ComparisonMatrix& m, int k, int h,
                                   double p, std::optional<std::int64_t> r,
                                   double alpha_target);

// KL divergence between the observation laws induced by `a` and `b` under
// the (p, r) sampling design. Each pair contributes r times the divergence
// of its three-outcome law {not compared, i wins, j wins}. Returns +infinity
// when `b` assigns probability zero to an outcome `a` can produce.
double kl_divergence(const ComparisonMatrix& a, const ComparisonMatrix& b,
                     double p, std::int64_t r);

// max(0, 1 - (max_kl + log 2) / log L) for L >= 2 hypotheses.
double fano_lower_bound(double hypotheses, double max_kl);

// Upper bound on the KL divergence between two members of the planted
// ensemble: 2 n p r / (1 / (4 delta^2) - 1).
double planted_kl_bound(int n, double p, std::int64_t r, double delta);

// Upper bound on the KL divergence between two adjacent-swap models:
// 50 n p r delta0^2.
double adjacent_swap_kl_bound(int n, double p, std::int64_t r, double delta0);

}  // namespace copeland
