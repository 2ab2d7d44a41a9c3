#include "rspde/grid_path.hpp"

#include <cmath>
#include <string>

#include "rspde/errors.hpp"

namespace rspde {

GridPath::GridPath(double horizon, RowMatrix values, std::uint64_t seed)
    : horizon_(horizon), values_(std::move(values)), seed_(seed) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ConfigError("GridPath: horizon must be positive and finite");
  }
  if (values_.rows() < 2 || values_.cols() < 1) {
    throw ConfigError("GridPath: need at least one step and one channel");
  }
  if (!values_.allFinite()) {
    throw ConfigError("GridPath: non-finite path value");
  }
}

GridPath GridPath::zeros(double horizon, std::size_t steps, std::size_t channels) {
  return GridPath(horizon, RowMatrix::Zero(static_cast<Eigen::Index>(steps + 1),
                                           static_cast<Eigen::Index>(channels)));
}

Eigen::VectorXd GridPath::increment(std::size_t a, std::size_t b) const {
  return (values_.row(static_cast<Eigen::Index>(b)) - values_.row(static_cast<Eigen::Index>(a)))
      .transpose();
}

GridPath GridPath::subsample(std::size_t stride) const {
  if (stride == 0 || steps() % stride != 0) {
    throw ConfigError("GridPath::subsample: stride must divide the step count");
  }
  const std::size_t coarse = steps() / stride;
  RowMatrix v(static_cast<Eigen::Index>(coarse + 1), values_.cols());
  for (std::size_t i = 0; i <= coarse; ++i) {
    v.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(i * stride));
  }
  return GridPath(horizon_, std::move(v), seed_);
}

GridPath GridPath::operator+(const GridPath& other) const {
  if (other.steps() != steps() || other.channels() != channels() ||
      other.horizon() != horizon()) {
    throw ConfigError("GridPath: grid mismatch");
  }
  return GridPath(horizon_, values_ + other.values_, seed_);
}

GridPath GridPath::operator-() const { return GridPath(horizon_, -values_, seed_); }

GridPath GridPath::scaled(double factor) const {
  return GridPath(horizon_, values_ * factor, seed_);
}

RoughPath::RoughPath(GridPath base, std::vector<double> segment_levy, double gamma_cap)
    : base_(std::move(base)), levy_(std::move(segment_levy)), gamma_cap_(gamma_cap) {
  const std::size_t n = base_.channels();
  if (levy_.size() != base_.steps() * n * n) {
    throw ConfigError("RoughPath: second-level block count does not match the grid");
  }
  for (double v : levy_) {
    if (!std::isfinite(v)) throw ConfigError("RoughPath: non-finite second level");
  }
}

Eigen::MatrixXd RoughPath::second_level(std::size_t a, std::size_t b) const {
  if (b < a || b > steps()) throw ConfigError("RoughPath::second_level: bad interval");
  ChenWalker walker(*this, a);
  while (walker.right() < b) walker.advance();
  const auto n = static_cast<Eigen::Index>(channels());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = walker.second()[static_cast<std::size_t>(i * n + j)];
  }
  return out;
}

RoughPath RoughPath::restrict(std::size_t stride) const {
  if (stride == 0 || steps() % stride != 0) {
    throw ConfigError("RoughPath::restrict: stride must divide the step count");
  }
  const std::size_t coarse = steps() / stride;
  const std::size_t nn = channels() * channels();
  std::vector<double> levy(coarse * nn);
  for (std::size_t j = 0; j < coarse; ++j) {
    ChenWalker walker(*this, j * stride);
    while (walker.right() < (j + 1) * stride) walker.advance();
    std::copy(walker.second().begin(), walker.second().end(), levy.begin() + static_cast<std::ptrdiff_t>(j * nn));
  }
  return RoughPath(base_.subsample(stride), std::move(levy), gamma_cap_);
}

RoughPath RoughPath::shift(std::size_t a, std::size_t b) const {
  if (!(a < b) || b > steps()) throw ConfigError("RoughPath::shift: bad interval");
  const std::size_t len = b - a;
  const auto n = static_cast<Eigen::Index>(channels());
  RowMatrix v(static_cast<Eigen::Index>(len + 1), n);
  for (std::size_t i = 0; i <= len; ++i) {
    v.row(static_cast<Eigen::Index>(i)) =
        base_.values().row(static_cast<Eigen::Index>(a + i)) - base_.values().row(static_cast<Eigen::Index>(a));
  }
  const std::size_t nn = channels() * channels();
  std::vector<double> levy(levy_.begin() + static_cast<std::ptrdiff_t>(a * nn),
                           levy_.begin() + static_cast<std::ptrdiff_t>(b * nn));
  return RoughPath(GridPath(static_cast<double>(len) * dt(), std::move(v), base_.seed()),
                   std::move(levy), gamma_cap_);
}

ChenWalker::ChenWalker(const RoughPath& path, std::size_t start)
    : path_(&path),
      start_(start),
      end_(start),
      first_(path.channels(), 0.0),
      second_(path.channels() * path.channels(), 0.0) {
  if (start > path.steps()) throw ConfigError("ChenWalker: start beyond grid");
}

void ChenWalker::advance() {
  if (end_ >= path_->steps()) throw ConfigError("ChenWalker: cannot advance past the grid end");
  const std::size_t n = path_->channels();
  const auto& v = path_->base().values();
  const double* seg = path_->segment(end_);
  // XX_{a,b+1} = XX_{a,b} + XX_{b,b+1} + dX_{a,b} (x) dX_{b,b+1}
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dxj = v(static_cast<Eigen::Index>(end_ + 1), static_cast<Eigen::Index>(j)) -
                         v(static_cast<Eigen::Index>(end_), static_cast<Eigen::Index>(j));
      second_[i * n + j] += seg[i * n + j] + first_[i] * dxj;
    }
  }
  ++end_;
  for (std::size_t i = 0; i < n; ++i) {
    first_[i] = v(static_cast<Eigen::Index>(end_), static_cast<Eigen::Index>(i)) -
                v(static_cast<Eigen::Index>(start_), static_cast<Eigen::Index>(i));
  }
}

double ChenWalker::first_norm() const {
  double s = 0.0;
  for (double x : first_) s += x * x;
  return std::sqrt(s);
}

double ChenWalker::second_norm() const {
  double s = 0.0;
  for (double x : second_) s += x * x;
  return std::sqrt(s);
}

RoughPath lift_piecewise_linear(const GridPath& path, double gamma_cap) {
  const std::size_t m = path.steps();
  const std::size_t n = path.channels();
  std::vector<double> levy(m * n * n);
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd d = path.increment(k, k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        levy[k * n * n + i * n + j] = 0.5 * d(static_cast<Eigen::Index>(i)) * d(static_cast<Eigen::Index>(j));
      }
    }
  }
  return RoughPath(path, std::move(levy), gamma_cap);
}

RoughPath translate(const RoughPath& rough, const GridPath& h, double gamma, double gamma_prime) {
  if (!(gamma + gamma_prime > 1.0)) {
    throw ConfigError("translate: requires gamma + gamma_prime > 1");
  }
  if (h.steps() != rough.steps() || h.channels() != rough.channels() ||
      h.horizon() != rough.base().horizon()) {
    throw ConfigError("translate: grid mismatch between path and shift");
  }
  const std::size_t m = rough.steps();
  const std::size_t n = rough.channels();
  std::vector<double> levy(rough.segment_levy());
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd dh = h.increment(k, k + 1);
    const Eigen::VectorXd dx = rough.increment(k, k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = static_cast<Eigen::Index>(j);
        // int h dh + int h dX + int X dh, each exact for linear pieces.
        levy[k * n * n + i * n + j] += 0.5 * dh(a) * dh(b) + 0.5 * dh(a) * dx(b) + 0.5 * dx(a) * dh(b);
      }
    }
  }
  GridPath shifted(rough.base().horizon(), rough.base().values() + h.values(), rough.base().seed());
  return RoughPath(std::move(shifted), std::move(levy), rough.gamma_cap());
}

double chen_defect(const RoughPath& rough, std::size_t s, std::size_t u, std::size_t t) {
  if (!(s <= u && u <= t) || t > rough.steps()) throw ConfigError("chen_defect: need s <= u <= t on the grid");
  const Eigen::MatrixXd left = rough.second_level(s, u);
  const Eigen::MatrixXd right = rough.second_level(u, t);
  const Eigen::MatrixXd whole = rough.second_level(s, t);
  const Eigen::VectorXd d1 = rough.increment(s, u);
  const Eigen::VectorXd d2 = rough.increment(u, t);
  const Eigen::VectorXd d = rough.increment(s, t);
  const Eigen::MatrixXd composed = left + right + d1 * d2.transpose();
  const double scale = whole.norm() + d.squaredNorm();
  const double defect = (composed - whole).norm();
  return scale > 0.0 ? defect / scale : defect;
}

}  // namespace rspde
