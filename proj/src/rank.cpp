#include "copeland/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "copeland/error.hpp"

namespace copeland {

WinCountVector win_counts(const ObservationSet& obs) {
  const int n = obs.n();
  WinCountVector out{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)};
  const auto comps = obs.comparison_counts();
  const auto lower = obs.lower_wins();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++idx) {
      out.counts[i] += lower[idx];
      out.counts[j] += comps[idx] - lower[idx];
    }
  }
  return out;
}

RankingEstimate copeland_ranking(const WinCountVector& wins) {
  const auto& c = wins.counts;
  RankingEstimate est{std::vector<int>(c.size())};
  std::iota(est.order.begin(), est.order.end(), 0);
  std::stable_sort(est.order.begin(), est.order.end(),
                   [&](int a, int b) { return c[a] > c[b]; });
  return est;
}

RankingEstimate copeland_ranking(const ObservationSet& obs) {
  return copeland_ranking(win_counts(obs));
}

TopKEstimate copeland_topk(const WinCountVector& wins, int k) {
  const int n = static_cast<int>(wins.counts.size());
  if (k < 1 || k > n) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(n) + "]");
  }
  auto order = copeland_ranking(wins).order;
  TopKEstimate est;
  est.tie_broken = k < n && wins.counts[order[k - 1]] == wins.counts[order[k]];
  order.resize(static_cast<std::size_t>(k));
  est.items = std::move(order);
  return est;
}

TopKEstimate copeland_topk(const ObservationSet& obs, int k) {
  return copeland_topk(win_counts(obs), k);
}

namespace {

void require_connected(const ObservationSet& obs) {
  const int n = obs.n();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int j = 0; j < n; ++j) {
      if (!seen[j] && obs.comparisons(i, j) > 0) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  if (reached != n) {
    throw DisconnectedGraph("comparison graph is disconnected (" +
                            std::to_string(reached) + " of " + std::to_string(n) +
                            " items reachable from item 1)");
  }
}

// log F(x) for logistic F, stable on both tails.
double log_logistic(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Everything the one-coordinate problem needs for item i.
struct CoordinateTerms {
  std::vector<int> opponents;
  std::vector<double> won;
  std::vector<double> lost;
};

std::vector<CoordinateTerms> coordinate_terms(const ObservationSet& obs) {
  const int n = obs.n();
  std::vector<CoordinateTerms> terms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || obs.comparisons(i, j) == 0) continue;
      terms[i].opponents.push_back(j);
      terms[i].won.push_back(static_cast<double>(obs.wins(i, j)));
      terms[i].lost.push_back(static_cast<double>(obs.wins(j, i)));
    }
  }
  return terms;
}

class Coordinate {
 public:
  Coordinate(const CoordinateTerms& t, const std::vector<double>& w)
      : t_(t), w_(w) {
    for (std::size_t e = 0; e < t.opponents.size(); ++e) total_ += t.won[e] + t.lost[e];
  }

  // Number of comparisons the item took part in.
  double total() const { return total_; }

  double loglik(double x) const {
    double s = 0.0;
    for (std::size_t e = 0; e < t_.opponents.size(); ++e) {
      const double d = x - w_[t_.opponents[e]];
      s += t_.won[e] * log_logistic(d) + t_.lost[e] * log_logistic(-d);
    }
    return s;
  }

  // First and second derivative of loglik at x.
  std::pair<double, double> derivatives(double x) const {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t e = 0; e < t_.opponents.size(); ++e) {
      const double f = logistic(x - w_[t_.opponents[e]]);
      const double c = t_.won[e] + t_.lost[e];
      g += t_.won[e] - c * f;
      h -= c * f * (1.0 - f);
    }
    return {g, h};
  }

 private:
  const CoordinateTerms& t_;
  const std::vector<double>& w_;
  double total_ = 0.0;
};

constexpr double kMaxBracket = 64.0;
constexpr double kFlatDerivative = 1e-14;

// Maximizes the concave one-dimensional likelihood starting from x.
double maximize_coordinate(const Coordinate& coord, double x) {
  auto [g, h] = coord.derivatives(x);
  if (g == 0.0) return x;

  // Bracket the root of the (decreasing) derivative by doubling steps.
  const double dir = g > 0 ? 1.0 : -1.0;
  double inner = x;
  double step = 1.0;
  double outer = x + dir * step;
  while (coord.derivatives(outer).first * dir > 0) {
    if (step >= kMaxBracket) return outer;  // increasing all the way out
    inner = outer;
    step *= 2.0;
    outer = x + dir * step;
  }
  double lo = std::min(inner, outer);
  double hi = std::max(inner, outer);

  double cur = inner;
  for (int it = 0; it < 100; ++it) {
    std::tie(g, h) = coord.derivatives(cur);
    if (g > 0) lo = std::max(lo, cur); else hi = std::min(hi, cur);
    if (std::abs(g) < 1e-12 * coord.total() || hi - lo < 1e-13) break;
    double next = 0.5 * (lo + hi);
    if (std::abs(h) >= kFlatDerivative) {
      const double newton = cur - g / h;
      if (newton > lo && newton < hi) next = newton;
    }
    if (std::abs(next - cur) < 1e-14) {
      cur = next;
      break;
    }
    cur = next;
  }
  return cur;
}

std::vector<double> refine_log_weights(const ObservationSet& obs, std::vector<double> w,
                                       int sweeps, std::vector<double>* trace) {
  const auto terms = coordinate_terms(obs);
  const auto check = [&](double ll) {
    if (!std::isfinite(ll)) throw NumericalError("BTL log-likelihood is not finite");
    return ll;
  };
  if (trace) trace->assign(1, check(btl_log_likelihood(obs, w)));
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < obs.n(); ++i) {
      if (terms[i].opponents.empty()) continue;
      const Coordinate coord(terms[i], w);
      const double proposal = maximize_coordinate(coord, w[i]);
      // Accept only non-decreasing moves so the sweep is a strict ascent step.
      if (coord.loglik(proposal) >= coord.loglik(w[i])) w[i] = proposal;
    }
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / obs.n();
    for (double& v : w) v -= mean;
    if (trace) trace->push_back(check(btl_log_likelihood(obs, w)));
  }
  return w;
}

std::vector<double> log_of_positive(std::span<const double> init, int n) {
  if (static_cast<int>(init.size()) != n) {
    throw InvalidArgument("initial score vector has wrong length");
  }
  std::vector<double> w(init.size());
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (!(init[i] > 0.0) || !std::isfinite(init[i])) {
      throw InvalidArgument("initial scores must be positive and finite");
    }
    w[i] = std::log(init[i]);
  }
  return w;
}

std::vector<int> order_desc(const std::vector<double>& v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v[a] > v[b]; });
  return order;
}

std::vector<double> baseline_log_weights(const ObservationSet& obs,
                                         const SpectralBaselineOptions& opts) {
  auto pi = rank_centrality(obs, opts.tol, opts.max_iters);
  // Items that never lose absorb the walk; give them a floor so logs exist.
  const double floor = 1e-12 * *std::max_element(pi.begin(), pi.end());
  for (double& v : pi) v = std::max(v, floor);
  return refine_log_weights(obs, log_of_positive(pi, obs.n()), opts.sweeps, nullptr);
}

}  // namespace

std::vector<double> rank_centrality(const ObservationSet& obs, double tol,
                                    int max_iters) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  require_connected(obs);
  const int n = obs.n();
  const auto un = static_cast<std::size_t>(n);

  int d_max = 0;
  for (int i = 0; i < n; ++i) {
    int deg = 0;
    for (int j = 0; j < n; ++j) deg += (i != j && obs.comparisons(i, j) > 0);
    d_max = std::max(d_max, deg);
  }

  std::vector<double> transition(un * un, 0.0);
  for (int i = 0; i < n; ++i) {
    double out = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto c = obs.comparisons(i, j);
      if (i == j || c == 0) continue;
      const double pij = static_cast<double>(obs.wins(j, i)) /
                         (static_cast<double>(c) * d_max);
      transition[i * un + j] = pij;
      out += pij;
    }
    transition[i * un + i] = 1.0 - out;
  }

  std::vector<double> pi(un, 1.0 / n);
  std::vector<double> next(un);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < un; ++i) {
      const double mass = pi[i];
      const double* row = &transition[i * un];
      for (std::size_t j = 0; j < un; ++j) next[j] += mass * row[j];
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double diff = 0.0;
    for (std::size_t j = 0; j < un; ++j) {
      next[j] /= total;
      diff = std::max(diff, std::abs(next[j] - pi[j]));
    }
    pi.swap(next);
    if (diff < tol) return pi;
  }
  throw NonConvergence("rank centrality did not converge in " +
                       std::to_string(max_iters) + " iterations");
}

double btl_log_likelihood(const ObservationSet& obs, std::span<const double> w) {
  if (static_cast<int>(w.size()) != obs.n()) {
    throw InvalidArgument("weight vector has wrong length");
  }
  const auto comps = obs.comparison_counts();
  const auto lower = obs.lower_wins();
  double ll = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j, ++idx) {
      if (comps[idx] == 0) continue;
      const double d = w[i] - w[j];
      ll += static_cast<double>(lower[idx]) * log_logistic(d) +
            static_cast<double>(comps[idx] - lower[idx]) * log_logistic(-d);
    }
  }
  return ll;
}

std::vector<double> mle_refine(const ObservationSet& obs, std::span<const double> init,
                               int sweeps, std::vector<double>* trace) {
  if (sweeps < 0) throw InvalidArgument("sweeps must be non-negative");
  const auto w = refine_log_weights(obs, log_of_positive(init, obs.n()), sweeps, trace);
  const double top = *std::max_element(w.begin(), w.end());
  std::vector<double> s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = std::exp(w[i] - top);
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  for (double& v : s) v /= total;
  return s;
}

RankingEstimate spectral_baseline_ranking(const ObservationSet& obs,
                                          const SpectralBaselineOptions& opts) {
  return {order_desc(baseline_log_weights(obs, opts))};
}

TopKEstimate spectral_baseline_topk(const ObservationSet& obs, int k,
                                    const SpectralBaselineOptions& opts) {
  const int n = obs.n();
  if (k < 1 || k > n) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(n) + "]");
  }
  const auto w = baseline_log_weights(obs, opts);
  auto order = order_desc(w);
  TopKEstimate est;
  est.tie_broken = k < n && w[order[k - 1]] == w[order[k]];
  order.resize(static_cast<std::size_t>(k));
  est.items = std::move(order);
  return est;
}

}  // namespace copeland
