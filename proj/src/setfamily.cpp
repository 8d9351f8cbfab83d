#include "copeland/setfamily.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "copeland/csv.hpp"
#include "copeland/error.hpp"

namespace copeland {

namespace {

constexpr double kSlack = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(int n, int k) {
  if (n < 1 || k < 1 || k > n) {
    throw InvalidArgument("set family needs 1 <= k <= n (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
}

// Smallest position not in the sorted set, or n + 1 if there is none.
int first_gap(std::span<const int> t) {
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] != static_cast<int>(j) + 1) return static_cast<int>(j) + 1;
  }
  return static_cast<int>(t.size()) + 1;
}

bool dominated(std::span<const int> s, std::span<const int> t) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] > t[j]) return false;
  }
  return true;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

std::vector<PositionSet> maximal_only(std::vector<PositionSet> sets) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<PositionSet> out;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    bool covered = false;
    for (std::size_t b = 0; b < sets.size() && !covered; ++b) {
      covered = a != b && sets[a].dominated_by(sets[b]);
    }
    if (!covered) out.push_back(sets[a]);
  }
  return out;
}

}  // namespace

PositionSet::PositionSet(std::vector<int> positions) : t_(std::move(positions)) {
  for (std::size_t j = 0; j < t_.size(); ++j) {
    if (t_[j] < 1 || (j > 0 && t_[j] <= t_[j - 1])) {
      throw InvalidArgument("position set must be strictly increasing and >= 1");
    }
  }
}

PositionSet PositionSet::from_unsorted(std::vector<int> positions) {
  std::sort(positions.begin(), positions.end());
  return PositionSet(std::move(positions));
}

bool PositionSet::dominated_by(const PositionSet& t) const {
  return t_.size() == t.t_.size() && dominated(t_, t.t_);
}

void SetFamily::set_generators(std::vector<PositionSet> gens) {
  for (const auto& g : gens) {
    if (g.size() != k_ || g.max() > n_) {
      throw InvalidArgument("generator must be a " + std::to_string(k_) +
                            "-subset of [" + std::to_string(n_) + "]");
    }
  }
  if (gens.size() <= 2000) {
    for (std::size_t a = 0; a < gens.size(); ++a) {
      for (std::size_t b = 0; b < gens.size(); ++b) {
        if (a != b && gens[a].dominated_by(gens[b])) {
          throw InvalidArgument("generator list is not an antichain");
        }
      }
    }
  }
  gens_ = std::move(gens);
}

int SetFamily::band_bound() const {
  const double raw = (1.0 + eps_) * k_;
  const double b = rounding_ == BandRounding::floor ? std::floor(raw + kSlack)
                                                     : std::ceil(raw - kSlack);
  return static_cast<int>(std::clamp(b, static_cast<double>(k_), static_cast<double>(n_)));
}

bool SetFamily::satisfies(std::span<const int> t) const {
  if (static_cast<int>(t.size()) != k_) return false;
  const int top = t.back();
  switch (kind_) {
    case FamilyKind::exact:
      return top == k_;
    case FamilyKind::hamming: {
      const auto inside = std::count_if(t.begin(), t.end(), [&](int v) { return v <= k_; });
      return inside >= k_ - h_;
    }
    case FamilyKind::topband:
      return top <= band_bound();
    case FamilyKind::multiplicative: {
      const int c = first_gap(t);
      return c > n_ || top <= (1.0 + eps_) * c + kSlack;
    }
    case FamilyKind::additive: {
      const int c = first_gap(t);
      return c > n_ || top <= c + eps_ + kSlack;
    }
    case FamilyKind::ranksum: {
      const double sum = std::accumulate(t.begin(), t.end(), 0.0);
      return sum <= (1.0 + eps_) * 0.5 * k_ * (k_ + 1) + kSlack;
    }
    case FamilyKind::explicit_list:
      return std::any_of(gens_->begin(), gens_->end(),
                         [&](const PositionSet& g) { return dominated(t, g.positions()); });
  }
  return false;
}

std::string SetFamily::describe() const {
  const auto eps = csv::format_double(eps_);
  switch (kind_) {
    case FamilyKind::exact: return "exact";
    case FamilyKind::hamming: return "hamming:h=" + std::to_string(h_);
    case FamilyKind::topband:
      return "topband:eps=" + eps + (rounding_ == BandRounding::ceil ? ",round=ceil" : "");
    case FamilyKind::multiplicative: return "mult:eps=" + eps;
    case FamilyKind::additive: return "add:eps=" + eps;
    case FamilyKind::ranksum: return "ranksum:eps=" + eps;
    case FamilyKind::explicit_list: return "explicit";
  }
  return "";
}

SetFamily family_exact(int n, int k) {
  check_dims(n, k);
  SetFamily f(n, k, FamilyKind::exact);
  std::vector<int> t(static_cast<std::size_t>(k));
  std::iota(t.begin(), t.end(), 1);
  f.set_generators({PositionSet(std::move(t))});
  return f;
}

SetFamily family_hamming(int n, int k, int h) {
  check_dims(n, k);
  if (h < 0 || h >= k || k + h > n) {
    throw InvalidArgument("hamming family needs 0 <= h < k and k + h <= n");
  }
  SetFamily f(n, k, FamilyKind::hamming);
  f.h_ = h;
  std::vector<int> t;
  for (int v = h + 1; v <= k; ++v) t.push_back(v);
  for (int v = n - h + 1; v <= n; ++v) t.push_back(v);
  f.set_generators({PositionSet(std::move(t))});
  return f;
}

SetFamily family_requirement(int n, int k, double epsilon, Requirement variant,
                             BandRounding rounding) {
  check_dims(n, k);
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("requirement epsilon must be finite and >= 0");
  }
  FamilyKind kind = FamilyKind::topband;
  switch (variant) {
    case Requirement::topband: kind = FamilyKind::topband; break;
    case Requirement::multiplicative: kind = FamilyKind::multiplicative; break;
    case Requirement::additive: kind = FamilyKind::additive; break;
    case Requirement::ranksum: kind = FamilyKind::ranksum; break;
  }
  SetFamily f(n, k, kind);
  f.eps_ = epsilon;
  f.rounding_ = rounding;

  if (kind == FamilyKind::topband) {
    const int b = f.band_bound();
    std::vector<int> t(static_cast<std::size_t>(k));
    std::iota(t.begin(), t.end(), b - k + 1);
    f.set_generators({PositionSet(std::move(t))});
  } else if (n <= kMaxExtractN) {
    auto gens = extract_generators(
        n, k, [&f](std::span<const int> t) { return f.satisfies(t); }, kExtractNodeBudget);
    if (gens) f.set_generators(std::move(*gens));
  }
  return f;
}

SetFamily family_explicit(int n, int k, std::vector<PositionSet> sets) {
  check_dims(n, k);
  if (sets.empty()) throw InvalidArgument("explicit family needs at least one set");
  for (const auto& s : sets) {
    if (s.size() != k || s.max() > n) {
      throw InvalidArgument("explicit family sets must be " + std::to_string(k) +
                            "-subsets of [" + std::to_string(n) + "]");
    }
  }
  SetFamily f(n, k, FamilyKind::explicit_list);
  f.set_generators(maximal_only(std::move(sets)));
  return f;
}

bool membership(const SetFamily& family, const PositionSet& s) {
  if (s.size() != family.k() || s.max() > family.n()) {
    throw InvalidArgument("position set does not match family dimensions");
  }
  if (const auto& gens = family.generators()) {
    return std::any_of(gens->begin(), gens->end(),
                       [&](const PositionSet& g) { return s.dominated_by(g); });
  }
  return family.satisfies(s.positions());
}

std::vector<PositionSet> enumerate_allowed(const SetFamily& family) {
  const int n = family.n();
  const int k = family.k();
  if (binomial(n, k) > kMaxEnumeration) {
    throw TooLarge("C(" + std::to_string(n) + ", " + std::to_string(k) +
                   ") subsets exceed the enumeration limit");
  }
  std::vector<PositionSet> out;
  std::vector<int> t(static_cast<std::size_t>(k));
  std::iota(t.begin(), t.end(), 1);
  while (true) {
    PositionSet s(t);
    if (membership(family, s)) out.push_back(std::move(s));
    int j = k - 1;
    while (j >= 0 && t[j] == n - k + j + 1) --j;
    if (j < 0) break;
    ++t[j];
    for (int m = j + 1; m < k; ++m) t[m] = t[m - 1] + 1;
  }
  return out;
}

bool is_monotone(std::span<const PositionSet> family, int n, int k) {
  check_dims(n, k);
  if (static_cast<double>(family.size()) > kMaxEnumeration) {
    throw TooLarge("family list exceeds the enumeration limit");
  }
  std::set<std::vector<int>> members;
  for (const auto& s : family) {
    if (s.size() != k || s.max() > n) {
      throw InvalidArgument("family member does not match dimensions");
    }
    members.insert(s.positions());
  }
  // Every element of the closure is reached by single-step moves of one
  // position to the next smaller free slot, so checking those suffices.
  for (const auto& t : members) {
    for (int j = 0; j < k; ++j) {
      const int lower = j == 0 ? 0 : t[j - 1];
      if (t[j] - 1 > lower) {
        auto down = t;
        --down[j];
        if (!members.contains(down)) return false;
      }
    }
  }
  return true;
}

double separation_by_generators(const ScoreVector& tau,
                                std::span<const PositionSet> generators, int k) {
  if (generators.empty()) throw InvalidArgument("separation needs at least one generator");
  const int n = tau.size();
  const auto s = sorted_scores(tau);
  double best = -kInf;
  for (const auto& g : generators) {
    if (g.size() != k || g.max() > n) {
      throw InvalidArgument("generator does not match score vector dimensions");
    }
    double worst = kInf;
    for (int j = 1; j <= k; ++j) {
      const int idx = k + g[j - 1] - j + 1;
      if (idx <= n) worst = std::min(worst, s[j - 1] - s[idx - 1]);
    }
    best = std::max(best, worst);
  }
  return best;
}

double separation_by_predicate(const ScoreVector& tau, const SetFamily& family) {
  const int n = family.n();
  const int k = family.k();
  if (tau.size() != n) throw InvalidArgument("score vector length differs from family n");
  const auto s = sorted_scores(tau);

  const auto gap = [&](int j, int t) {
    const int idx = k + t - j + 1;
    return idx > n ? kInf : s[j - 1] - s[idx - 1];
  };
  // Coordinatewise smallest position set whose every gap reaches theta.
  std::vector<int> least(static_cast<std::size_t>(k));
  const auto allowed_at = [&](double theta) {
    int prev = 0;
    for (int j = 1; j <= k; ++j) {
      int lo = std::max(j, prev + 1);
      int hi = n - k + j;
      while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (gap(j, mid) >= theta) hi = mid; else lo = mid + 1;
      }
      least[j - 1] = lo;
      prev = lo;
    }
    return family.satisfies(least);
  };

  if (allowed_at(kInf)) return kInf;
  std::vector<double> cand;
  cand.reserve(static_cast<std::size_t>(k) * (n - k));
  for (int j = 1; j <= k; ++j) {
    for (int m = k + 1; m <= n; ++m) cand.push_back(s[j - 1] - s[m - 1]);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  // cand[0] = tau_(k) - tau_(k+1) always admits [k].
  std::size_t lo = 0;
  std::size_t hi = cand.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (allowed_at(cand[mid])) lo = mid; else hi = mid - 1;
  }
  return cand[lo];
}

double separation_family(const ScoreVector& tau, const SetFamily& family) {
  if (tau.size() != family.n()) {
    throw InvalidArgument("score vector length differs from family n");
  }
  if (const auto& gens = family.generators()) {
    return separation_by_generators(tau, *gens, family.k());
  }
  return separation_by_predicate(tau, family);
}

std::vector<PositionSet> read_position_sets_csv(std::istream& in) {
  std::vector<PositionSet> out;
  for (const auto& line : csv::read_lines(in)) {
    std::vector<int> t;
    for (const auto& field : csv::split(line)) {
      t.push_back(static_cast<int>(csv::parse_int(field)));
    }
    try {
      out.push_back(PositionSet::from_unsorted(std::move(t)));
    } catch (const InvalidArgument& e) {
      throw DataError(std::string("bad position set row '") + line + "': " + e.what());
    }
  }
  return out;
}

SetFamily parse_family(std::string_view spec, int n, int k) {
  const auto colon = spec.find(':');
  const auto name = csv::trim(spec.substr(0, colon));
  const std::string_view rest = colon == std::string_view::npos ? "" : spec.substr(colon + 1);

  if (name == "explicit") {
    const auto path = csv::trim(rest);
    if (path.empty() || path.front() != '@') {
      throw InvalidArgument("explicit family expects explicit:@file.csv");
    }
    std::ifstream in{std::string(path.substr(1))};
    if (!in) throw DataError("cannot open " + std::string(path.substr(1)));
    return family_explicit(n, k, read_position_sets_csv(in));
  }

  std::optional<double> eps;
  std::optional<int> h;
  BandRounding rounding = BandRounding::floor;
  if (!rest.empty()) {
    for (const auto& kv : csv::split(rest)) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("expected key=value in '" + kv + "'");
      const auto key = csv::trim(std::string_view(kv).substr(0, eq));
      const auto val = csv::trim(std::string_view(kv).substr(eq + 1));
      try {
        if (key == "eps") {
          eps = csv::parse_double(val);
        } else if (key == "h") {
          h = static_cast<int>(csv::parse_int(val));
        } else if (key == "round") {
          if (val == "floor") rounding = BandRounding::floor;
          else if (val == "ceil") rounding = BandRounding::ceil;
          else throw InvalidArgument("round must be floor or ceil");
        } else {
          throw InvalidArgument("unknown family parameter '" + std::string(key) + "'");
        }
      } catch (const DataError& e) {
        throw InvalidArgument(e.what());
      }
    }
  }

  if (name == "exact") return family_exact(n, k);
  if (name == "hamming") {
    if (!h) throw InvalidArgument("family 'hamming' needs h=");
    return family_hamming(n, k, *h);
  }
  const auto need_eps = [&] {
    if (!eps) throw InvalidArgument("family '" + std::string(name) + "' needs eps=");
    return *eps;
  };
  if (name == "topband") return family_requirement(n, k, need_eps(), Requirement::topband, rounding);
  if (name == "mult") return family_requirement(n, k, need_eps(), Requirement::multiplicative);
  if (name == "add") return family_requirement(n, k, need_eps(), Requirement::additive);
  if (name == "ranksum") return family_requirement(n, k, need_eps(), Requirement::ranksum);
  throw InvalidArgument("unknown set family '" + std::string(name) + "'");
}

}  // namespace copeland
