#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "copeland/error.hpp"
#include "copeland/model.hpp"
#include "copeland/random.hpp"
#include "copeland/sample.hpp"

using namespace copeland;

namespace {

ComparisonMatrix btl(int n) { return gen_parametric(equispaced_quality(n, 0.3), Cdf::logistic); }

// Pearson goodness of fit of integer draws against Binomial(trials, prob),
// pooling cells until each expected count is at least 5. Returns the p-value.
double binomial_gof_pvalue(const std::vector<std::int64_t>& draws, int trials, double prob) {
  const boost::math::binomial_distribution<double> law(trials, prob);
  std::vector<double> observed(static_cast<std::size_t>(trials) + 1, 0.0);
  for (auto d : draws) observed[static_cast<std::size_t>(d)] += 1.0;
  const double total = static_cast<double>(draws.size());
  double chi2 = 0.0;
  int cells = 0;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (int x = 0; x <= trials; ++x) {
    obs_acc += observed[static_cast<std::size_t>(x)];
    exp_acc += total * boost::math::pdf(law, x);
    if (exp_acc >= 5.0 && total * boost::math::cdf(boost::math::complement(law, x)) >= 5.0) {
      chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      ++cells;
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0) {
    chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared_distribution<double> ref(cells - 1);
  return boost::math::cdf(boost::math::complement(ref, chi2));
}

}  // namespace

TEST(ObservationSet, PairIndexIsDenseRowMajor) {
  ObservationSet obs(6, 1, std::nullopt);
  std::size_t expected = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) EXPECT_EQ(obs.pair_index(i, j), expected++);
  }
  EXPECT_EQ(obs.num_pairs(), expected);
}

TEST(ObservationSet, SetPairBothOrientations) {
  ObservationSet obs(3, 10, 0.5);
  obs.set_pair(2, 0, 7, 5);
  EXPECT_EQ(obs.comparisons(0, 2), 7);
  EXPECT_EQ(obs.wins(2, 0), 5);
  EXPECT_EQ(obs.wins(0, 2), 2);
  EXPECT_EQ(obs.wins(1, 1), 0);
  EXPECT_EQ(obs.total_comparisons(), 7);
}

TEST(ObservationSet, RejectsBadCounts) {
  ObservationSet obs(3, 4, std::nullopt);
  EXPECT_THROW(obs.set_pair(0, 0, 1, 0), InvalidArgument);
  EXPECT_THROW(obs.set_pair(0, 3, 1, 0), InvalidArgument);
  EXPECT_THROW(obs.set_pair(0, 1, 5, 0), InvalidArgument);
  EXPECT_THROW(obs.set_pair(0, 1, 2, 3), InvalidArgument);
  EXPECT_THROW(obs.set_pair(0, 1, -1, 0), InvalidArgument);
  EXPECT_THROW(ObservationSet(1, 1, std::nullopt), InvalidArgument);
  EXPECT_THROW(ObservationSet(3, 1, 1.5), InvalidArgument);
}

TEST(Draw, FullProbabilityComparesEveryPairRTimes) {
  const auto m = btl(12);
  const auto obs = draw_observations(m, 1.0, 37, 5);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (i == j) continue;
      EXPECT_EQ(obs.comparisons(i, j), 37);
      EXPECT_EQ(obs.wins(i, j) + obs.wins(j, i), 37);
    }
  }
  EXPECT_EQ(obs.p(), 1.0);
  EXPECT_EQ(obs.r(), 37);
}

TEST(Draw, CertainEntriesAlwaysWin) {
  const auto m = make_matrix({{0.5, 1.0, 0.0}, {0.0, 0.5, 1.0}, {1.0, 0.0, 0.5}});
  const auto obs = draw_observations(m, 0.7, 50, 11);
  EXPECT_EQ(obs.wins(0, 1), obs.comparisons(0, 1));
  EXPECT_EQ(obs.wins(1, 2), obs.comparisons(1, 2));
  EXPECT_EQ(obs.wins(2, 0), obs.comparisons(0, 2));
}

TEST(Draw, MeanComparisonCountMatchesRP) {
  const int n = 40;
  const std::int64_t r = 20;
  const double p = 0.3;
  const auto m = btl(n);
  double sum = 0.0;
  std::int64_t count = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto obs = draw_observations(m, p, r, s);
    for (auto c : obs.comparison_counts()) {
      sum += static_cast<double>(c);
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double se = std::sqrt(r * p * (1 - p) / static_cast<double>(count));
  EXPECT_NEAR(mean, r * p, 3 * se);
}

TEST(Draw, PairCountsFollowBinomial) {
  const auto m = make_matrix({{0.5, 0.8}, {0.2, 0.5}});
  std::vector<std::int64_t> comps, wins_given_full;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    comps.push_back(draw_observations(m, 0.4, 12, s).comparisons(0, 1));
    wins_given_full.push_back(draw_observations(m, 1.0, 12, s + 100000).wins(0, 1));
  }
  EXPECT_GT(binomial_gof_pvalue(comps, 12, 0.4), 1e-3);
  EXPECT_GT(binomial_gof_pvalue(wins_given_full, 12, 0.8), 1e-3);
}

TEST(Draw, IdenticalAcrossThreadCounts) {
  const auto m = btl(33);
  const auto ref = draw_observations(m, 0.6, 100, 99, 1);
  for (int t : {2, 3, 4, 8, 64}) EXPECT_EQ(draw_observations(m, 0.6, 100, 99, t), ref);
  EXPECT_NE(draw_observations(m, 0.6, 100, 98, 1), ref);
}

TEST(Draw, RejectsBadParameters) {
  const auto m = btl(4);
  EXPECT_THROW(draw_observations(m, 0.0, 10, 1), InvalidArgument);
  EXPECT_THROW(draw_observations(m, 1.2, 10, 1), InvalidArgument);
  EXPECT_THROW(draw_observations(m, 0.5, 0, 1), InvalidArgument);
}

TEST(Draw, WinFrequencyConvergesToMatrix) {
  const int n = 10;
  const auto m = btl(n);
  const std::int64_t r = 20000;
  int good = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto obs = draw_observations(m, 1.0, r, s);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double f = static_cast<double>(obs.wins(i, j)) / static_cast<double>(r);
        const double sd = std::sqrt(m(i, j) * (1 - m(i, j)) / static_cast<double>(r));
        if (std::abs(f - m(i, j)) > 5 * sd) {
          ok = false;
          break;
        }
      }
    }
    good += ok;
  }
  EXPECT_GE(good, 99);
}

TEST(Subsample, EdgeRates) {
  const auto obs = draw_observations(btl(9), 0.8, 30, 3);
  EXPECT_EQ(subsample(obs, 1.0, 7), obs);
  const auto none = subsample(obs, 0.0, 7);
  EXPECT_EQ(none.total_comparisons(), 0);
  EXPECT_DOUBLE_EQ(*none.p(), 0.0);
  EXPECT_EQ(none.r(), obs.r());
  EXPECT_THROW(subsample(obs, -0.1, 7), InvalidArgument);
  EXPECT_THROW(subsample(obs, 1.1, 7), InvalidArgument);
}

TEST(Subsample, KeepsHalfOnAverage) {
  const auto obs = draw_observations(btl(30), 1.0, 40, 4);
  const double total = static_cast<double>(obs.total_comparisons());
  const auto half = subsample(obs, 0.5, 12);
  const double se = std::sqrt(total * 0.25);
  EXPECT_NEAR(static_cast<double>(half.total_comparisons()), total / 2, 3 * se);
  EXPECT_DOUBLE_EQ(*half.p(), 0.5);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      if (i == j) continue;
      EXPECT_LE(half.wins(i, j), obs.wins(i, j));
    }
  }
}

TEST(Subsample, ThinnedDrawMatchesDirectDraw) {
  // Thinning Binomial(r, p) by q gives Binomial(r, pq); the kept wins are
  // Binomial(r, pq * m).
  const auto m = make_matrix({{0.5, 0.7}, {0.3, 0.5}});
  const int r = 15;
  std::vector<std::int64_t> thin_c, thin_w, direct_c;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const auto obs = subsample(draw_observations(m, 0.8, r, s), 0.5, s + 7);
    thin_c.push_back(obs.comparisons(0, 1));
    thin_w.push_back(obs.wins(0, 1));
    direct_c.push_back(draw_observations(m, 0.4, r, s + 50000).comparisons(0, 1));
  }
  EXPECT_GT(binomial_gof_pvalue(thin_c, r, 0.4), 1e-3);
  EXPECT_GT(binomial_gof_pvalue(thin_w, r, 0.4 * 0.7), 1e-3);
  EXPECT_GT(binomial_gof_pvalue(direct_c, r, 0.4), 1e-3);

  // Two-sample homogeneity of the count histograms.
  std::map<std::int64_t, std::pair<double, double>> table;
  for (auto c : thin_c) table[c].first += 1;
  for (auto c : direct_c) table[c].second += 1;
  double chi2 = 0.0;
  int cells = 0;
  double a = 0, b = 0;
  for (const auto& [value, counts] : table) {
    a += counts.first;
    b += counts.second;
    if (a + b >= 20) {
      const double e = (a + b) / 2;
      chi2 += (a - e) * (a - e) / e + (b - e) * (b - e) / e;
      ++cells;
      a = b = 0;
    }
  }
  if (a + b > 0) {
    const double e = (a + b) / 2;
    chi2 += (a - e) * (a - e) / e + (b - e) * (b - e) / e;
    ++cells;
  }
  const boost::math::chi_squared_distribution<double> ref(cells - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(ref, chi2)), 1e-3);
}

TEST(Ingest, CountsAndFirstAppearanceOrder) {
  const std::vector<ComparisonRecord> rows{
      {"b", "a", "a"}, {"a", "b", "a"}, {"a", "c", "c"}, {"b", "a", "b"}, {"c", "b", "c"}};
  const auto data = ingest_comparisons(rows);
  EXPECT_EQ(data.items, (std::vector<std::string>{"b", "a", "c"}));
  const auto& obs = data.obs;
  EXPECT_EQ(obs.n(), 3);
  EXPECT_EQ(obs.r(), 3);
  EXPECT_FALSE(obs.p().has_value());
  EXPECT_EQ(obs.comparisons(0, 1), 3);
  EXPECT_EQ(obs.wins(1, 0), 2);
  EXPECT_EQ(obs.wins(2, 1), 1);
  EXPECT_EQ(obs.wins(2, 0), 1);
  EXPECT_EQ(obs.total_comparisons(), 5);
}

TEST(Ingest, Errors) {
  EXPECT_THROW(ingest_comparisons(std::vector<ComparisonRecord>{}), DataError);
  EXPECT_THROW(ingest_comparisons(std::vector<ComparisonRecord>{{"a", "a", "a"}}), DataError);
  EXPECT_THROW(ingest_comparisons(std::vector<ComparisonRecord>{{"a", "b", "c"}}), DataError);
}

TEST(ObservationsCsv, AggregatedRoundTrip) {
  const auto obs = draw_observations(btl(7), 0.35, 25, 8);
  const LabeledObservations data{obs, default_item_ids(7)};
  std::stringstream ss;
  write_observations_csv(ss, data);
  const auto back = read_observations(ss);
  EXPECT_EQ(back.obs, obs);
  EXPECT_EQ(back.items, data.items);
}

TEST(ObservationsCsv, RecordRoundTripKeepsCounts) {
  const auto obs = draw_observations(btl(5), 1.0, 6, 2);
  const LabeledObservations data{obs, {"v", "w", "x", "y", "z"}};
  std::stringstream ss;
  write_comparisons_csv(ss, data);
  const auto text = ss.str();
  std::istringstream first(text);
  EXPECT_EQ(read_comparisons_csv(first).size(), static_cast<std::size_t>(obs.total_comparisons()));
  std::istringstream second(text);
  const auto back = read_observations(second);
  EXPECT_EQ(back.items, data.items);
  EXPECT_EQ(back.obs.comparison_counts().size(), obs.comparison_counts().size());
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ(back.obs.wins(i, j), obs.wins(i, j));
  }
}

TEST(ObservationsCsv, MetadataAndErrors) {
  std::istringstream absent("# n=2 r=9 p=absent\nitem_a,item_b,comparisons,wins_a\nx,y,4,1\n");
  const auto d = read_observations(absent);
  EXPECT_EQ(d.obs.r(), 9);
  EXPECT_FALSE(d.obs.p().has_value());
  EXPECT_EQ(d.obs.wins(1, 0), 3);

  const auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return read_observations(in);
  };
  EXPECT_THROW(bad(""), DataError);
  EXPECT_THROW(bad("a,b,c\n"), DataError);
  EXPECT_THROW(bad("item_a,item_b,comparisons,wins_a\nx,y,2,3\n"), DataError);
  EXPECT_THROW(bad("item_a,item_b,comparisons,wins_a\nx,x,2,1\n"), DataError);
  EXPECT_THROW(bad("item_a,item_b,comparisons,wins_a\nx,y,2,1\ny,x,1,0\n"), DataError);
  EXPECT_THROW(bad("# r=1\nitem_a,item_b,comparisons,wins_a\nx,y,2,1\n"), DataError);
  EXPECT_THROW(bad("item_a,item_b,winner\nx,y\n"), DataError);
  EXPECT_THROW(read_observations_file("/nonexistent/obs.csv"), DataError);
}
