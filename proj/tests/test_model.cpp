#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "copeland/analysis.hpp"
#include "copeland/error.hpp"
#include "copeland/model.hpp"

using namespace copeland;

namespace {

std::vector<ComparisonMatrix> generator_zoo(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = 5 + static_cast<int>(rng() % 8);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& v : w) v = u(rng);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const QualityVector q(w);
  return {gen_parametric(q, Cdf::logistic),
          gen_parametric(q, Cdf::gaussian),
          gen_btl_outlier(q, static_cast<int>(rng() % n)),
          gen_sst_diagonal(n, 0.5 / n + 0.01, seed),
          gen_btl_mixture(q, 0.8),
          gen_planted(n, 2, 0.2),
          gen_planted_member(n, 3, 0.1, n - 1),
          gen_adjacent_swap(n, 1.0 / (9.0 * (n - 1)), static_cast<int>(rng() % (n - 1))),
          gen_hamming_planted(n, 3, 0.25, order)};
}

std::vector<int> identity(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(MakeMatrix, AcceptsValidGrid) {
  const auto m = make_matrix({{0.5, 0.7}, {0.3, 0.5}});
  EXPECT_EQ(m.n(), 2);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.7);
  EXPECT_EQ(m(1, 0), 1.0 - 0.7);
}

TEST(MakeMatrix, RejectsBrokenSymmetry) {
  EXPECT_THROW(make_matrix({{0.5, 0.7}, {0.4, 0.5}}), DataError);
}

TEST(MakeMatrix, RejectsBadDiagonal) {
  EXPECT_THROW(make_matrix({{0.6, 0.7}, {0.3, 0.5}}), DataError);
}

TEST(MakeMatrix, RejectsShapeAndRange) {
  EXPECT_THROW(make_matrix({{0.5, 0.7}}), DataError);
  EXPECT_THROW(make_matrix({{0.5}}), DataError);
  EXPECT_THROW(make_matrix({{0.5, 1.2}, {-0.2, 0.5}}), DataError);
  EXPECT_THROW(make_matrix({{0.5, 0.7, 0.1}, {0.3, 0.5}, {0.9, 0.5, 0.5}}), DataError);
}

TEST(MakeMatrix, SymmetrizesWithinTolerance) {
  const auto m = make_matrix({{0.5, 0.7 + 4e-10}, {0.3, 0.5 - 5e-10}});
  EXPECT_EQ(m(1, 0), 1.0 - m(0, 1));
  EXPECT_EQ(m(1, 1), 0.5);
}

TEST(GenParametric, EqualQualityGivesHalf) {
  const QualityVector w({0.3, 0.3, -1.0});
  for (Cdf cdf : {Cdf::logistic, Cdf::gaussian}) {
    EXPECT_DOUBLE_EQ(gen_parametric(w, cdf)(0, 1), 0.5);
  }
}

TEST(GenParametric, LogisticValue) {
  // 1 / (1 + e^-1) to 7 digits.
  const auto m = gen_parametric(QualityVector({1.0, 0.0}), Cdf::logistic);
  EXPECT_NEAR(m(0, 1), 0.7310586, 1e-7);
}

TEST(GenParametric, GaussianMatchesBoostNormal) {
  const boost::math::normal_distribution<double> z;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> w(12);
  for (double& v : w) v = u(rng);
  const auto m = gen_parametric(QualityVector(w), Cdf::gaussian);
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) {
      EXPECT_NEAR(m(i, j), boost::math::cdf(z, w[i] - w[j]), 1e-14);
    }
  }
}

TEST(GenParametric, ScoreOrderMatchesQualityOrder) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 2; n <= 12; ++n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (double& v : w) v = u(rng);
    std::vector<int> by_w = identity(n);
    std::stable_sort(by_w.begin(), by_w.end(), [&](int a, int b) { return w[a] > w[b]; });
    for (Cdf cdf : {Cdf::logistic, Cdf::gaussian}) {
      EXPECT_EQ(order_by_score(scores(gen_parametric(QualityVector(w), cdf))), by_w);
    }
  }
}

TEST(GenParametric, RowsDominateByQuality) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 2; n <= 10; ++n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (double& v : w) v = u(rng);
    const auto m = gen_parametric(QualityVector(w), Cdf::logistic);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!(w[i] > w[j])) continue;
        for (int l = 0; l < n; ++l) EXPECT_GT(m(i, l), m(j, l));
      }
    }
  }
}

TEST(GenBtlOutlier, BeatsTopQuarterLosesToRest) {
  const auto w = equispaced_quality(8, 0.5);
  const auto m = gen_btl_outlier(w, 7);
  EXPECT_EQ(m(7, 0), 1.0);
  EXPECT_EQ(m(7, 1), 1.0);
  for (int j = 2; j < 7; ++j) EXPECT_EQ(m(7, j), 0.0);
  EXPECT_DOUBLE_EQ(m(2, 4), logistic_cdf(w[2] - w[4]));
  EXPECT_THROW(gen_btl_outlier(w, 8), InvalidArgument);
}

TEST(GenBtlOutlier, OutlierInsideRankingSkipsItself) {
  const auto w = equispaced_quality(9, 0.5);
  const auto m = gen_btl_outlier(w, 0);
  // Top quarter of the others (floor(9/4) = 2) is items 1 and 2.
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(0, 2), 1.0);
  EXPECT_EQ(m(0, 3), 0.0);
}

TEST(GenSstDiagonal, SatisfiesSstAndScoresDecrease) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 3 + static_cast<int>(seed % 15);
    const auto m = gen_sst_diagonal(n, 0.4, seed);
    EXPECT_TRUE(satisfies_sst(m, identity(n)));
    const auto tau = scores(m);
    for (int i = 0; i + 1 < n; ++i) EXPECT_GE(tau[i], tau[i + 1]);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        EXPECT_GE(m(i, j), 0.5);
        EXPECT_LE(m(i, j), 1.0);
        if (j + 1 < n) EXPECT_EQ(m(i, j + 1) - m(i, j), m(0, j - i + 1) - m(0, j - i));
      }
    }
  }
}

TEST(GenSstDiagonal, DeterministicInSeed) {
  EXPECT_EQ(gen_sst_diagonal(4, 0.2, 99), gen_sst_diagonal(4, 0.2, 99));
  EXPECT_FALSE(gen_sst_diagonal(30, 0.2, 1) == gen_sst_diagonal(30, 0.2, 2));
  EXPECT_THROW(gen_sst_diagonal(5, 0.0, 1), InvalidArgument);
  EXPECT_THROW(gen_sst_diagonal(5, 0.6, 1), InvalidArgument);
}

TEST(GenBtlMixture, Values) {
  const QualityVector w({1.0, 0.0, 0.0});
  const auto m = gen_btl_mixture(w, 0.8);
  EXPECT_NEAR(m(0, 1), 0.8 * 0.7310585786 + 0.2 * 0.2689414214, 1e-9);
  EXPECT_NEAR(m(0, 1), 0.638635, 1e-6);
  EXPECT_DOUBLE_EQ(m(1, 2), 0.5);
  EXPECT_EQ(gen_btl_mixture(w, 1.0), gen_parametric(w, Cdf::logistic));
  EXPECT_THROW(gen_btl_mixture(w, 0.5), InvalidArgument);
  EXPECT_THROW(gen_btl_mixture(w, 1.1), InvalidArgument);
}

TEST(GenPlanted, BlockEntriesAndScores) {
  const int n = 12;
  const int k = 4;
  const double delta = 0.15;
  const auto m = gen_planted(n, k, delta);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool pi = i < k;
      const bool pj = j < k;
      const double want = i == j || pi == pj ? 0.5 : (pi ? 0.5 + delta : 0.5 - delta);
      EXPECT_DOUBLE_EQ(m(i, j), want);
    }
  }
  const auto tau = scores(m);
  for (int i = 0; i < n; ++i) {
    const double want = i < k ? 0.5 + delta * (n - k) / n : 0.5 - delta * k / n;
    EXPECT_NEAR(tau[i], want, 1e-15);
  }
  EXPECT_NEAR(separation_topk(m, k), delta, 1e-12);
  EXPECT_TRUE(satisfies_sst(m, identity(n)));
  EXPECT_THROW(gen_planted(n, k, 0.5), InvalidArgument);
  EXPECT_THROW(gen_planted(n, n, 0.1), InvalidArgument);
}

TEST(GenPlanted, TinyGapApproachesUniform) {
  const auto tau = scores(gen_planted(10, 3, 1e-12));
  for (double t : tau.values()) EXPECT_NEAR(t, 0.5, 1e-11);
}

TEST(GenPlantedMember, PlantedSetIsPrefixPlusA) {
  const auto m = gen_planted_member(9, 4, 0.1, 6);
  const auto top = order_by_score(scores(m));
  std::vector<int> got(top.begin(), top.begin() + 4);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<int>{0, 1, 2, 6}));
  EXPECT_EQ(gen_planted_member(9, 4, 0.1, 3), gen_planted(9, 4, 0.1));
  EXPECT_THROW(gen_planted_member(9, 4, 0.1, 2), InvalidArgument);
}

TEST(GenAdjacentSwap, ScoresAreLinearInPosition) {
  const int n = 10;
  const double d0 = 1.0 / (9.0 * (n - 1));
  for (int a = 0; a + 1 < n; ++a) {
    const auto m = gen_adjacent_swap(n, d0, a);
    const auto tau = scores(m);
    for (int i = 0; i < n; ++i) {
      const int pos = i == a ? a + 2 : i == a + 1 ? a + 1 : i + 1;
      EXPECT_NEAR(tau[i], 0.5 - (pos - (n + 1) / 2.0) * d0, 1e-15);
    }
    const auto s = sorted_scores(tau);
    for (int j = 0; j + 1 < n; ++j) EXPECT_NEAR(s[j] - s[j + 1], d0, 1e-12);
    for (int k = 1; k < n; ++k) EXPECT_NEAR(separation_topk(m, k), d0, 1e-12);
  }
  EXPECT_THROW(gen_adjacent_swap(n, 1.01 / (9.0 * (n - 1)), 0), InvalidArgument);
  EXPECT_THROW(gen_adjacent_swap(n, d0, n - 1), InvalidArgument);
}

TEST(GenAdjacentSwap, NeighbouringSwapsDifferLocally) {
  const int n = 8;
  const double d0 = 0.01;
  const auto a = gen_adjacent_swap(n, d0, 0);
  const auto b = gen_adjacent_swap(n, d0, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i > 2 && j > 2) EXPECT_EQ(a(i, j), b(i, j));
    }
  }
  EXPECT_FALSE(a == b);
}

TEST(GenHammingPlanted, IdentityOrderingIsPlanted) {
  EXPECT_EQ(gen_hamming_planted(9, 3, 0.2, identity(9)), gen_planted(9, 3, 0.2));
}

TEST(GenHammingPlanted, TwoScoreLevelsAndTopSetDependence) {
  const int n = 11;
  const int k = 4;
  const double d0 = 0.3;
  std::vector<int> order{5, 2, 9, 0, 1, 3, 4, 6, 7, 8, 10};
  const auto m = gen_hamming_planted(n, k, d0, order);
  const auto s = sorted_scores(scores(m));
  for (int j = 1; j < k; ++j) EXPECT_NEAR(s[j], s[0], 1e-15);
  for (int j = k + 1; j < n; ++j) EXPECT_NEAR(s[j], s[k], 1e-15);
  // 1/2 + d0 (n-k)/n minus 1/2 - d0 k/n.
  EXPECT_NEAR(s[k - 1] - s[k], d0, 1e-12);
  EXPECT_TRUE(satisfies_sst(m, order));

  std::vector<int> same_top{0, 9, 2, 5, 10, 8, 7, 6, 4, 3, 1};
  EXPECT_EQ(gen_hamming_planted(n, k, d0, same_top), m);
  EXPECT_THROW(gen_hamming_planted(n, k, 1.0 / 3.0, order), InvalidArgument);
  std::vector<int> bad = order;
  bad[0] = bad[1];
  EXPECT_THROW(gen_hamming_planted(n, k, d0, bad), InvalidArgument);
}

TEST(Generators, InvariantsHoldAcrossZoo) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& m : generator_zoo(seed)) {
      const int n = m.n();
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        EXPECT_EQ(m(i, i), 0.5);
        for (int j = 0; j < n; ++j) {
          EXPECT_GE(m(i, j), 0.0);
          EXPECT_LE(m(i, j), 1.0);
          EXPECT_NEAR(m(i, j) + m(j, i), 1.0, 1e-15);
          total += m(i, j);
        }
      }
      EXPECT_NEAR(total, n * n / 2.0, 1e-9);
      std::vector<std::vector<double>> grid(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) grid[i].assign(m.row(i).begin(), m.row(i).end());
      EXPECT_EQ(make_matrix(grid), m);
    }
  }
}

TEST(Generators, Deterministic) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = generator_zoo(seed);
    const auto b = generator_zoo(seed);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(MatrixCsv, RoundTripsExactly) {
  for (const auto& m : generator_zoo(42)) {
    std::stringstream buf;
    write_matrix_csv(buf, m);
    EXPECT_EQ(read_matrix_csv(buf), m);
  }
}

TEST(MatrixCsv, RejectsGarbage) {
  std::stringstream buf("0.5,abc\n0.5,0.5\n");
  EXPECT_THROW(read_matrix_csv(buf), DataError);
}

TEST(Relabel, MovesRowsAndColumns) {
  const auto m = gen_parametric(QualityVector({2.0, 1.0, 0.0}), Cdf::logistic);
  const std::vector<int> perm{2, 0, 1};
  const auto r = m.relabeled(perm);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(r(i, j), m(perm[i], perm[j]));
  }
}

TEST(ModelSpec, KindNamesRoundTrip) {
  for (auto kind : {ModelKind::btl, ModelKind::thurstone, ModelKind::btl_outlier,
                    ModelKind::sst_diagonal, ModelKind::btl_mixture, ModelKind::planted,
                    ModelKind::adjacent_swap, ModelKind::hamming_planted,
                    ModelKind::explicit_matrix}) {
    EXPECT_EQ(parse_model_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_model_kind("nope"), InvalidArgument);
  EXPECT_TRUE(is_seeded(ModelKind::sst_diagonal));
  EXPECT_FALSE(is_seeded(ModelKind::btl));
}

TEST(ModelSpec, InstantiateMatchesGenerators) {
  ModelSpec spec;
  spec.kind = ModelKind::planted;
  spec.n = 10;
  spec.k = 3;
  spec.gap = 0.2;
  EXPECT_EQ(instantiate(spec), gen_planted(10, 3, 0.2));

  spec.kind = ModelKind::btl_outlier;
  spec.quality = equispaced_quality(10, 0.3).values();
  EXPECT_EQ(instantiate(spec), gen_btl_outlier(equispaced_quality(10, 0.3), 9));

  spec.kind = ModelKind::thurstone;
  spec.quality.pop_back();
  EXPECT_THROW(instantiate(spec), InvalidArgument);
}

TEST(QualityVector, RejectsNonFinite) {
  EXPECT_THROW(QualityVector({1.0, std::nan("")}), InvalidArgument);
  EXPECT_THROW(QualityVector({1.0, INFINITY}), InvalidArgument);
}
