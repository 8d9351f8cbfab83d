#include "copeland/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "copeland/error.hpp"

namespace copeland {

ScoreVector::ScoreVector(std::vector<double> tau) : tau_(std::move(tau)) {
  for (double t : tau_) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("score outside [0,1]");
  }
}

ScoreVector scores(const ComparisonMatrix& m) {
  const int n = m.n();
  std::vector<double> tau(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto row = m.row(i);
    tau[i] = std::accumulate(row.begin(), row.end(), 0.0) / n;
  }
  return ScoreVector(std::move(tau));
}

std::vector<int> order_by_score(const ScoreVector& tau) {
  std::vector<int> order(static_cast<std::size_t>(tau.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return tau[a] > tau[b]; });
  return order;
}

std::vector<double> sorted_scores(const ScoreVector& tau) {
  std::vector<double> s = tau.values();
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double separation_topk(const ScoreVector& tau, int k) {
  if (k < 1 || k >= tau.size()) {
    throw InvalidArgument("separation_topk needs 1 <= k < n");
  }
  const auto s = sorted_scores(tau);
  return s[k - 1] - s[k];
}

double separation_topk(const ComparisonMatrix& m, int k) {
  return separation_topk(scores(m), k);
}

double separation_hamming(const ScoreVector& tau, int k, int h) {
  if (h < 0 || h >= k || k + h + 1 > tau.size()) {
    throw InvalidArgument("separation_hamming needs 0 <= h < k and k + h + 1 <= n");
  }
  const auto s = sorted_scores(tau);
  return s[k - h - 1] - s[k + h];
}

double separation_hamming(const ComparisonMatrix& m, int k, int h) {
  return separation_hamming(scores(m), k, h);
}

double separation_scale(int n, double p, double r) {
  return std::sqrt(std::log(static_cast<double>(n)) / (n * p * r));
}

std::int64_t required_repetitions(int n, double p, double delta, double alpha) {
  if (n < 2) throw InvalidArgument("required_repetitions needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (!(delta > 0.0)) {
    throw InvalidArgument("separation is zero; no repetition count suffices");
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
  if (std::isinf(delta) || alpha == 0.0) return 1;

  const auto ok = [&](std::int64_t r) {
    return delta >= alpha * separation_scale(n, p, static_cast<double>(r));
  };
  const double exact = alpha * alpha * std::log(static_cast<double>(n)) /
                       (n * p * delta * delta);
  if (exact > 4e18) throw InvalidArgument("required repetitions overflow");
  auto r = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(exact)));
  // ceil() of a rounded quotient can land one off; settle on the exact boundary.
  while (r > 1 && ok(r - 1)) --r;
  while (!ok(r)) ++r;
  return r;
}

double implied_alpha(int n, double p, std::int64_t r, double delta) {
  return delta / separation_scale(n, p, static_cast<double>(r));
}

SeparationReport separation_report(const ComparisonMatrix& m, int k, int h,
                                   double p, std::optional<std::int64_t> r,
                                   double alpha_target) {
  SeparationReport rep;
  rep.n = m.n();
  rep.k = k;
  rep.h = h;
  rep.delta = separation_hamming(m, k, h);
  if (r) rep.alpha_implied = implied_alpha(rep.n, p, *r, rep.delta);
  rep.r_required = required_repetitions(rep.n, p, rep.delta, alpha_target);
  return rep;
}

namespace {

// sum over outcomes of P log(P/Q), with 0 log 0 = 0.
double bernoulli_kl(double a, double b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double kl = 0.0;
  if (a > 0.0) kl += b > 0.0 ? a * std::log(a / b) : inf;
  if (a < 1.0) kl += b < 1.0 ? (1.0 - a) * std::log((1.0 - a) / (1.0 - b)) : inf;
  return kl;
}

}  // namespace

double kl_divergence(const ComparisonMatrix& a, const ComparisonMatrix& b,
                     double p, std::int64_t r) {
  if (a.n() != b.n()) throw InvalidArgument("kl_divergence: dimension mismatch");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (r < 1) throw InvalidArgument("r must be >= 1");
  double total = 0.0;
  for (int i = 0; i < a.n(); ++i) {
    for (int j = i + 1; j < a.n(); ++j) {
      if (a(i, j) == b(i, j)) continue;
      total += bernoulli_kl(a(i, j), b(i, j));
    }
  }
  // The "not compared" outcome has equal mass 1 - p under both laws.
  return static_cast<double>(r) * p * total;
}

double fano_lower_bound(double hypotheses, double max_kl) {
  if (!(hypotheses >= 2.0)) throw InvalidArgument("Fano bound needs L >= 2");
  if (!(max_kl >= 0.0)) throw InvalidArgument("KL divergence must be >= 0");
  return std::max(0.0, 1.0 - (max_kl + std::log(2.0)) / std::log(hypotheses));
}

double planted_kl_bound(int n, double p, std::int64_t r, double delta) {
  return 2.0 * n * p * static_cast<double>(r) / (1.0 / (4.0 * delta * delta) - 1.0);
}

double adjacent_swap_kl_bound(int n, double p, std::int64_t r, double delta0) {
  return 50.0 * n * p * static_cast<double>(r) * delta0 * delta0;
}

}  // namespace copeland
