#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rspde/errors.hpp"
#include "rspde/fbm.hpp"
#include "rspde/rng.hpp"
#include "rspde/variation.hpp"

using namespace rspde;

namespace {

// Lifted fBm on m steps; m need not be a power of two.
RoughPath lift(std::uint64_t seed, std::size_t channels, std::size_t m, double h = 0.4) {
  std::size_t big = 2;
  while (big < m) big *= 2;
  const GridPath p = sample_fbm(h, channels, big, 1.0, seed);
  RowMatrix v = p.values().topRows(static_cast<Eigen::Index>(m + 1));
  return lift_piecewise_linear(GridPath(static_cast<double>(m) / static_cast<double>(big), std::move(v)));
}

// Cost of one partition interval, built from the same primitives as the
// dynamic program.
double interval_cost(const RoughPath& r, double gamma, double eta1, std::size_t a, std::size_t b) {
  const double gap = gamma - eta1;
  ChenWalker w(r, a);
  while (w.right() < b) w.advance();
  const double weight = std::pow(static_cast<double>(b - a) * r.dt(), -eta1 / gap);
  return weight * (std::pow(w.first_norm(), 1.0 / gap) + std::pow(w.second_norm(), 1.0 / (2.0 * gap)));
}

// Exhaustive search over all partitions of [s, t] (subsets of interior points).
double brute_control(const RoughPath& r, double gamma, double eta1, std::size_t s, std::size_t t) {
  const std::size_t interior = t - s - 1;
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    double sum = 0.0;
    std::size_t prev = s;
    for (std::size_t k = 0; k < interior; ++k) {
      if (mask >> k & 1) {
        sum = sum + interval_cost(r, gamma, eta1, prev, s + 1 + k);
        prev = s + 1 + k;
      }
    }
    sum = sum + interval_cost(r, gamma, eta1, prev, t);
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

TEST(Hoelder, MatchesPairwiseScan) {
  const RoughPath r = lift(1, 2, 32);
  const double gamma = 0.4;
  const HoelderNorms n = hoelder_norms(r, gamma, {0, 32});
  double path = 0.0, second = 0.0;
  for (std::size_t a = 0; a < 32; ++a) {
    for (std::size_t b = a + 1; b <= 32; ++b) {
      const double dt = (b - a) * r.dt();
      path = std::max(path, r.increment(a, b).norm() / std::pow(dt, gamma));
      second = std::max(second, r.second_level(a, b).norm() / std::pow(dt, 2 * gamma));
    }
  }
  EXPECT_NEAR(n.path, path, 1e-12 * path);
  EXPECT_NEAR(n.second, second, 1e-12 * second);
  EXPECT_DOUBLE_EQ(n.rho, 1.0 + n.path + n.second);
}

TEST(Hoelder, RoughPolynomial) {
  HoelderNorms n;
  n.path = 2.0;
  n.second = 3.0;
  EXPECT_DOUBLE_EQ(rough_polynomial(n), 1.0 + 3.0 + 2.0 + 2.0 * (4.0 + 3.0));
}

TEST(Control, DynamicProgramEqualsExhaustiveSearch) {
  Engine e = make_engine(5, 0);
  for (int inst = 0; inst < 60; ++inst) {
    const std::size_t points = 2 + static_cast<std::size_t>(uniform01(e) * 11);  // 2..12
    const std::size_t m = points - 1;
    const RoughPath r = lift(100 + inst, 1 + inst % 2, 16);
    const std::size_t s = static_cast<std::size_t>(uniform01(e) * (17 - points));
    const double gamma = 0.45;
    const double eta1 = 0.05 + 0.3 * uniform01(e);
    EXPECT_EQ(control_value(r, gamma, eta1, s, s + m), brute_control(r, gamma, eta1, s, s + m))
        << "instance " << inst;
  }
}

TEST(Control, SuperadditiveOnRandomTriples) {
  const RoughPath r = lift(9, 2, 48);
  Engine e = make_engine(9, 1);
  const double gamma = 0.45, eta1 = 0.15;
  for (int k = 0; k < 300; ++k) {
    std::size_t a = static_cast<std::size_t>(uniform01(e) * 49);
    std::size_t b = static_cast<std::size_t>(uniform01(e) * 49);
    std::size_t c = static_cast<std::size_t>(uniform01(e) * 49);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const double whole = control_value(r, gamma, eta1, a, c);
    const double parts = control_value(r, gamma, eta1, a, b) + control_value(r, gamma, eta1, b, c);
    EXPECT_LE(parts, whole + 1e-12 * (1.0 + whole));
  }
}

TEST(Control, SweepPrefixesAgreeWithPointQueries) {
  const RoughPath r = lift(3, 1, 24);
  const ControlSweep sw = control_sweep(r, 0.45, 0.1, 4, 24, std::numeric_limits<double>::infinity());
  ASSERT_EQ(sw.values.size(), 21u);
  for (std::size_t k = 0; k <= 20; ++k) EXPECT_EQ(sw.values[k], control_value(r, 0.45, 0.1, 4, 4 + k));
}

TEST(Control, RejectsBadExponents) {
  const RoughPath r = lift(3, 1, 8);
  EXPECT_THROW(control_value(r, 0.4, 0.4, 0, 8), ConfigError);
  EXPECT_THROW(control_value(r, 0.4, -0.1, 0, 8), ConfigError);
}

TEST(CameronMartin, StraightLineIsOneInterval) {
  RowMatrix v(17, 1);
  for (int i = 0; i <= 16; ++i) v(i, 0) = 0.5 * i / 16.0;
  const GridPath h(1.0, v);
  EXPECT_NEAR(cm_variation(h, 0.9, 0.0), std::pow(0.5, 1.0 / 0.9), 1e-14);
}

TEST(Greedy, LargeChiGivesOneInterval) {
  const RoughPath r = lift(2, 1, 64);
  const double w = control_value(r, 0.45, 0.1, 0, 64);
  const GreedyPartition g = greedy_partition(r, 0.45, 0.1, std::pow(w, 0.35) * 1.01, {0, 64});
  EXPECT_EQ(g.count(), 1u);
  EXPECT_EQ(g.points, (std::vector<std::size_t>{0, 64}));
}

TEST(Greedy, TinyChiNamesOffendingStep) {
  const RoughPath r = lift(2, 1, 64);
  try {
    greedy_partition(r, 0.45, 0.1, 1e-6, {0, 64});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("grid step [0, 1]"), std::string::npos);
  }
}

TEST(Greedy, MonotoneInChi) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RoughPath r = lift(seed, 1, 128, 0.45);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (int k = 0; k < 12; ++k) {
      const double chi = 1.5 * std::pow(1.25, k);
      const std::size_t n = greedy_partition(r, 0.45, 0.15, chi, {0, 128}).count();
      EXPECT_LE(n, prev) << "seed " << seed << " chi " << chi;
      prev = n;
    }
  }
}

TEST(Greedy, IntervalsAreMaximal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RoughPath r = lift(seed, 2, 15, 0.45);
    const double gamma = 0.45, eta1 = 0.15, chi = 2.0;
    const GreedyPartition g = greedy_partition(r, gamma, eta1, chi, {0, 15});
    ASSERT_EQ(g.points.front(), 0u);
    ASSERT_EQ(g.points.back(), 15u);
    for (std::size_t n = 0; n + 1 < g.points.size(); ++n) {
      const std::size_t a = g.points[n], b = g.points[n + 1];
      EXPECT_LE(std::pow(control_value(r, gamma, eta1, a, b), gamma - eta1), chi);
      if (b < 15) {
        EXPECT_GT(std::pow(control_value(r, gamma, eta1, a, b + 1), gamma - eta1), chi);
      }
    }
  }
}

TEST(Greedy, RefinementCannotLowerCount) {
  const RoughPath fine = lift(4, 1, 256, 0.45);
  const RoughPath coarse = fine.restrict(4);
  for (double chi : {1.0, 1.5, 2.5}) {
    EXPECT_GE(greedy_partition(fine, 0.45, 0.15, chi, {0, 256}).count(),
              greedy_partition(coarse, 0.45, 0.15, chi, {0, 64}).count());
  }
}
