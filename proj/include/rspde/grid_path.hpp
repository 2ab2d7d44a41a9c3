#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rspde {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Values of an R^n-valued path on the uniform grid t_i = i*T/m, i = 0..m.
class GridPath {
 public:
  GridPath() = default;
  /// `values` has m+1 rows and n columns. Throws ConfigError on a
  /// non-positive horizon, fewer than two rows or non-finite entries.
  GridPath(double horizon, RowMatrix values, std::uint64_t seed = 0);

  static GridPath zeros(double horizon, std::size_t steps, std::size_t channels);

  std::size_t steps() const { return static_cast<std::size_t>(values_.rows()) - 1; }
  std::size_t channels() const { return static_cast<std::size_t>(values_.cols()); }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / static_cast<double>(steps()); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt(); }
  std::uint64_t seed() const { return seed_; }

  const RowMatrix& values() const { return values_; }
  double value(std::size_t i, std::size_t channel) const { return values_(i, channel); }
  /// X_b - X_a.
  Eigen::VectorXd increment(std::size_t a, std::size_t b) const;

  /// Every `stride`-th grid value; steps() must be divisible by stride.
  GridPath subsample(std::size_t stride) const;

  GridPath operator+(const GridPath& other) const;
  GridPath operator-() const;
  GridPath scaled(double factor) const;

 private:
  double horizon_ = 1.0;
  RowMatrix values_;
  std::uint64_t seed_ = 0;
};

/// A discrete rough path: grid values plus one second-level block
/// XX_{t_i,t_{i+1}} (n x n, row-major, entry (a,b) ~ int dX^a dX^b) per
/// grid segment. Second-level values over longer grid intervals are defined
/// by Chen composition.
class RoughPath {
 public:
  RoughPath() = default;
  /// `segment_levy` holds steps()*n*n doubles, segment-major.
  RoughPath(GridPath base, std::vector<double> segment_levy, double gamma_cap = 0.5);

  const GridPath& base() const { return base_; }
  std::size_t steps() const { return base_.steps(); }
  std::size_t channels() const { return base_.channels(); }
  double dt() const { return base_.dt(); }
  double time(std::size_t i) const { return base_.time(i); }
  double gamma_cap() const { return gamma_cap_; }

  /// Pointer to the n*n block of segment j (row-major).
  const double* segment(std::size_t j) const { return levy_.data() + j * channels() * channels(); }
  const std::vector<double>& segment_levy() const { return levy_; }

  Eigen::VectorXd increment(std::size_t a, std::size_t b) const { return base_.increment(a, b); }
  /// XX_{t_a,t_b} by forward Chen composition from a; zero when a == b.
  Eigen::MatrixXd second_level(std::size_t a, std::size_t b) const;

  /// Coarse rough path on every `stride`-th grid point with second levels
  /// composed exactly from the fine segments.
  RoughPath restrict(std::size_t stride) const;
  /// The rough path restricted to grid points [a, b], re-based at time 0
  /// (the shifted driver used when restarting a flow at t_a).
  RoughPath shift(std::size_t a, std::size_t b) const;

 private:
  GridPath base_;
  std::vector<double> levy_;
  double gamma_cap_ = 0.5;
};

/// Walks right endpoints b = a, a+1, ... and keeps (dX_{a,b}, XX_{a,b}).
/// All code that needs second levels over growing intervals goes through
/// this type so that every consumer performs the identical floating-point
/// sequence.
class ChenWalker {
 public:
  ChenWalker(const RoughPath& path, std::size_t start);

  void advance();
  std::size_t left() const { return start_; }
  std::size_t right() const { return end_; }
  /// dX_{a,b}, length n.
  const std::vector<double>& first() const { return first_; }
  /// XX_{a,b}, n*n row-major.
  const std::vector<double>& second() const { return second_; }
  double first_norm() const;
  double second_norm() const;

 private:
  const RoughPath* path_;
  std::size_t start_;
  std::size_t end_;
  std::vector<double> first_;
  std::vector<double> second_;
};

/// Canonical lift of the piecewise-linear interpolant: XX on a segment is
/// 1/2 dX (x) dX.
RoughPath lift_piecewise_linear(const GridPath& path, double gamma_cap = 0.5);

/// Translation T_h(X) = (h + X, XX + int h dh + int h dX + int X dh) for
/// piecewise-linear h on the same grid. Requires gamma + gamma_prime > 1.
RoughPath translate(const RoughPath& rough, const GridPath& h, double gamma,
                    double gamma_prime);

/// Relative Chen defect of (s, u, t): |XX_{s,u} + XX_{u,t} + dX_{s,u} (x)
/// dX_{u,t} - XX_{s,t}|_F divided by |XX_{s,t}|_F + |dX_{s,t}|^2 (the
/// natural scale of the second level; zero scale yields the absolute
/// defect).
double chen_defect(const RoughPath& rough, std::size_t s, std::size_t u, std::size_t t);

}  // namespace rspde
