#include <gtest/gtest.h>

#include <cmath>

#include "rspde/errors.hpp"
#include "rspde/fbm.hpp"
#include "rspde/grid_path.hpp"
#include "rspde/rng.hpp"

using namespace rspde;

namespace {

RoughPath random_lift(std::uint64_t seed, std::size_t channels = 2, std::size_t m = 64) {
  return lift_piecewise_linear(sample_fbm(0.4, channels, m, 1.0, seed));
}

}  // namespace

TEST(GridPath, ZerosAndIncrements) {
  const GridPath z = GridPath::zeros(2.0, 8, 3);
  EXPECT_EQ(z.steps(), 8u);
  EXPECT_EQ(z.channels(), 3u);
  EXPECT_DOUBLE_EQ(z.dt(), 0.25);
  EXPECT_EQ(z.increment(1, 7).norm(), 0.0);
}

TEST(GridPath, SubsampleKeepsEndpoints) {
  const GridPath p = sample_fbm(0.45, 1, 64, 1.0, 4);
  const GridPath q = p.subsample(4);
  EXPECT_EQ(q.steps(), 16u);
  EXPECT_EQ(q.value(16, 0), p.value(64, 0));
  EXPECT_EQ(q.value(3, 0), p.value(12, 0));
}

TEST(RoughPath, HandComputedArea) {
  RowMatrix v(3, 2);
  v << 0, 0, 1, 0, 1, 1;
  const RoughPath r = lift_piecewise_linear(GridPath(1.0, v));
  const Eigen::MatrixXd xx = r.second_level(0, 2);
  EXPECT_DOUBLE_EQ(xx(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(xx(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(xx(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(xx(1, 0), 0.0);
}

TEST(RoughPath, ChenRelationOnRandomTriples) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RoughPath r = random_lift(seed);
    Engine e = make_engine(seed, 99);
    for (int k = 0; k < 20; ++k) {
      std::size_t a = static_cast<std::size_t>(uniform01(e) * 65);
      std::size_t b = static_cast<std::size_t>(uniform01(e) * 65);
      std::size_t c = static_cast<std::size_t>(uniform01(e) * 65);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      EXPECT_LE(chen_defect(r, a, b, c), 1e-12);
    }
  }
}

TEST(RoughPath, SymmetricPartIsHalfTensorSquare) {
  const RoughPath r = random_lift(3, 3);
  for (std::size_t a : {0u, 5u, 17u}) {
    for (std::size_t b : {20u, 40u, 64u}) {
      const Eigen::VectorXd dx = r.increment(a, b);
      const Eigen::MatrixXd xx = r.second_level(a, b);
      const Eigen::MatrixXd sym = 0.5 * (xx + xx.transpose());
      EXPECT_LE((sym - 0.5 * dx * dx.transpose()).norm(), 1e-12 * (1.0 + dx.squaredNorm()));
    }
  }
}

TEST(RoughPath, WalkerMatchesSecondLevel) {
  const RoughPath r = random_lift(5);
  ChenWalker w(r, 7);
  for (std::size_t b = 8; b <= 40; ++b) {
    w.advance();
    ASSERT_EQ(w.right(), b);
    const Eigen::MatrixXd xx = r.second_level(7, b);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_EQ(w.second()[i * 2 + j], xx(i, j));
    }
  }
}

TEST(RoughPath, RestrictComposesFineSegments) {
  const RoughPath r = random_lift(8);
  const RoughPath c = r.restrict(8);
  EXPECT_EQ(c.steps(), 8u);
  for (std::size_t j = 0; j < 8; ++j) {
    const Eigen::MatrixXd fine = r.second_level(8 * j, 8 * j + 8);
    const double* blk = c.segment(j);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(blk[k], fine(k / 2, k % 2), 1e-14);
  }
  EXPECT_LE((c.second_level(0, 8) - r.second_level(0, 64)).norm(), 1e-12);
  EXPECT_THROW(r.restrict(3), ConfigError);
}

TEST(RoughPath, ShiftRebasesTime) {
  const RoughPath r = random_lift(2);
  const RoughPath s = r.shift(16, 48);
  EXPECT_EQ(s.steps(), 32u);
  EXPECT_NEAR(s.time(32), r.time(48) - r.time(16), 1e-15);
  EXPECT_LE((s.increment(0, 32) - r.increment(16, 48)).norm(), 1e-14);
  EXPECT_LE((s.second_level(4, 20) - r.second_level(20, 36)).norm(), 1e-13);
}

TEST(RoughPath, TranslationByZeroIsIdentity) {
  const RoughPath r = random_lift(6);
  const RoughPath t = translate(r, GridPath::zeros(1.0, 64, 2), 0.4, 0.9);
  EXPECT_LE((t.second_level(0, 64) - r.second_level(0, 64)).norm(), 1e-14);
}

TEST(RoughPath, TranslationIsGeometricAndShiftsFirstLevel) {
  const RoughPath r = random_lift(7);
  RowMatrix hv(65, 2);
  for (int i = 0; i <= 64; ++i) {
    hv(i, 0) = std::sin(i / 10.0);
    hv(i, 1) = 0.1 * i / 64.0;
  }
  const GridPath h(1.0, hv);
  const RoughPath t = translate(r, h, 0.4, 0.9);
  EXPECT_LE((t.increment(3, 50) - r.increment(3, 50) - h.increment(3, 50)).norm(), 1e-13);
  for (std::size_t u : {10u, 31u, 55u}) EXPECT_LE(chen_defect(t, 2, u, 64), 1e-12);
  const Eigen::VectorXd dx = t.increment(0, 64);
  const Eigen::MatrixXd xx = t.second_level(0, 64);
  EXPECT_LE((0.5 * (xx + xx.transpose()) - 0.5 * dx * dx.transpose()).norm(), 1e-12);
}

TEST(RoughPath, TranslationRequiresComplementaryRegularity) {
  const RoughPath r = random_lift(7);
  EXPECT_THROW(translate(r, GridPath::zeros(1.0, 64, 2), 0.4, 0.5), ConfigError);
}

TEST(RoughPath, RejectsMismatchedLevy) {
  EXPECT_THROW(RoughPath(GridPath::zeros(1.0, 4, 2), std::vector<double>(3)), ConfigError);
}
