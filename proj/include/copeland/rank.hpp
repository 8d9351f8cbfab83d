#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "copeland/sample.hpp"

namespace copeland {

// N_i: number of comparisons won by item i.
struct WinCountVector {
  std::vector<std::int64_t> counts;
};

WinCountVector win_counts(const ObservationSet& obs);

// k items, ordered by descending win count with ties resolved toward the
// smaller index. tie_broken is set iff the k-th and (k+1)-th counts are equal.
struct TopKEstimate {
  std::vector<int> items;
  bool tie_broken = false;
};

// A permutation of [0, n): best item first.
struct RankingEstimate {
  std::vector<int> order;
};

TopKEstimate copeland_topk(const WinCountVector& wins, int k);
TopKEstimate copeland_topk(const ObservationSet& obs, int k);
RankingEstimate copeland_ranking(const WinCountVector& wins);
RankingEstimate copeland_ranking(const ObservationSet& obs);

// Stationary distribution of the comparison random walk: from i, move to j
// with probability wins(j over i) / (comparisons(i,j) * d_max), stay otherwise.
// d_max is the largest number of distinct opponents of any item. Power
// iteration from the uniform vector until successive iterates differ by less
// than `tol` in max norm.
// Throws DisconnectedGraph if the comparison graph is disconnected and
// NonConvergence if `max_iters` is reached first.
std::vector<double> rank_centrality(const ObservationSet& obs, double tol,
                                    int max_iters);

// BTL log-likelihood of the counts at log-weights w.
double btl_log_likelihood(const ObservationSet& obs, std::span<const double> w);

// Coordinate-wise BTL maximum-likelihood refinement. `init` holds positive
// scores (weights are their logs); each sweep maximizes the likelihood over
// one coordinate at a time with safeguarded Newton steps. Returns positive
// scores normalized to sum to one. If `trace` is given it receives the
// log-likelihood before the first sweep and after each sweep.
std::vector<double> mle_refine(const ObservationSet& obs, std::span<const double> init,
                               int sweeps, std::vector<double>* trace = nullptr);

struct SpectralBaselineOptions {
  double tol = 1e-12;
  int max_iters = 200000;
  int sweeps = 20;
};

// rank_centrality followed by mle_refine; the "spectral-mle-like" comparator.
// Items ordered by descending refined weight, ties toward the smaller index.
RankingEstimate spectral_baseline_ranking(const ObservationSet& obs,
                                          const SpectralBaselineOptions& opts = {});
TopKEstimate spectral_baseline_topk(const ObservationSet& obs, int k,
                                    const SpectralBaselineOptions& opts = {});

}  // namespace copeland
