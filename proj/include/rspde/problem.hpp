#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "rspde/spectral.hpp"

namespace rspde {

/// Scalar nonlinearity with its first two derivatives.
enum class ScalarMap { identity, sine, tanh, cube };

std::string to_string(ScalarMap f);
ScalarMap scalar_map_from_string(const std::string& name);
double scalar_value(ScalarMap f, double u);
double scalar_first(ScalarMap f, double u);
double scalar_second(ScalarMap f, double u);

/// u -> v(x) (-Laplacian)^beta u.
struct LinearDrift {
  SpectralField potential;
  double beta = 0.0;
};

/// Noise coefficient of one channel.
struct Diffusion {
  enum class Kind { zero, additive, linear, nemytskii };
  Kind kind = Kind::zero;
  /// additive: the constant field; linear: g in g(x)(-Laplacian)^eta u;
  /// nemytskii: amplitude g in g(x) f(u(x)).
  SpectralField field;
  double eta = 0.0;
  ScalarMap map = ScalarMap::identity;
};

std::string to_string(Diffusion::Kind kind);
Diffusion::Kind diffusion_kind_from_string(const std::string& name);

/// Semilinear problem du = (nu Laplacian u + F(u)) dt + sum_i G_i(u) dX^i on
/// a spectral basis, with the exponents of the standing assumptions.
struct ProblemSpec {
  BasisPtr basis;
  double diffusivity = 1.0;
  double alpha = 0.0;
  double gamma = 0.45;
  double sigma = 0.5;
  double eta = 0.1;
  double theta = 0.0;
  /// F(u) = sum of linear terms + sum_k poly[k] u^k (pointwise).
  std::vector<LinearDrift> linear;
  std::vector<double> poly;
  std::vector<Diffusion> diffusion;
};

struct Violation {
  std::string constraint;
  std::string message;
};

/// Every violated parameter inequality; empty when the spec is admissible.
std::vector<Violation> validate(const ProblemSpec& spec);

/// Degrees of the polynomials bounding |DF(u)| and the derivatives of G in
/// |u|_alpha, for the shipped drift and diffusion families.
struct GrowthDegrees {
  std::size_t drift = 0;
  std::size_t noise = 0;
};
GrowthDegrees growth_degrees(const ProblemSpec& spec);

/// A validated problem with dense operator caches. Vectors are dof
/// coordinates of the spec's basis.
class Problem {
 public:
  /// Throws ConfigError listing every violation.
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const BasisPtr& basis() const { return spec_.basis; }
  const Semigroup& semigroup() const { return semigroup_; }
  std::size_t dofs() const { return spec_.basis->dofs(); }
  std::size_t channels() const { return spec_.diffusion.size(); }
  double alpha() const { return spec_.alpha; }
  double gamma() const { return spec_.gamma; }
  double eta() const { return spec_.eta; }

  bool drift_is_zero() const { return !has_linear_ && !has_poly_; }
  bool diffusion_is_zero() const;
  /// F(0) = 0 and G(0) = 0.
  bool zero_is_stationary() const;

  Eigen::VectorXd drift(const Eigen::VectorXd& u) const;
  /// D F(u), dense dofs x dofs.
  Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& u) const;

  Eigen::VectorXd noise(std::size_t channel, const Eigen::VectorXd& u) const;
  /// D G_i(u)[v].
  Eigen::VectorXd noise_derivative(std::size_t channel, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) const;
  /// D G_i(u), dense.
  Eigen::MatrixXd noise_jacobian(std::size_t channel, const Eigen::VectorXd& u) const;
  /// D^2 G_i(u)[v, w].
  Eigen::VectorXd noise_second(std::size_t channel, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
  /// Matrix of w -> D^2 G_i(u)[v, w].
  Eigen::MatrixXd noise_second_matrix(std::size_t channel, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v) const;

 private:
  ProblemSpec spec_;
  Semigroup semigroup_;
  bool has_linear_ = false;
  bool has_poly_ = false;
  Eigen::MatrixXd linear_matrix_;
  std::vector<Eigen::MatrixXd> noise_matrix_;
  std::vector<Eigen::VectorXd> amplitude_grid_;
};

}  // namespace rspde
