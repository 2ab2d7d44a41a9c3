#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>

namespace rspde {

enum class BasisKind { periodic, dirichlet };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

/// Truncated spectral basis of -Laplacian on [0, l).
///
/// Coefficients are stored as real "degrees of freedom" that are
/// orthonormal in the normalized L^2 inner product (1/l) int u v:
///   periodic:  u = c_0 + sum_{k=1..K} sqrt2 (a_k cos(2 pi k x/l) + b_k sin(2 pi k x/l)),
///              dof order [c_0,] a_1, b_1, a_2, b_2, ...; zero_mean drops c_0.
///   dirichlet: u = sum_{k=1..K} sqrt2 b_k sin(pi k x/l), dof order b_1..b_K.
/// The complex exponential coefficient is c_k = (a_k - i b_k)/sqrt2.
///
/// The basis also owns a collocation grid with M >= 3K+1 points, used for
/// pointwise products (dealiased for quadratic terms).
class Basis {
 public:
  static std::shared_ptr<const Basis> make(BasisKind kind, double length, std::size_t modes,
                                           bool zero_mean = false);

  BasisKind kind() const { return kind_; }
  double length() const { return length_; }
  std::size_t modes() const { return modes_; }
  bool zero_mean() const { return zero_mean_; }
  std::size_t dofs() const { return static_cast<std::size_t>(eigenvalues_.size()); }

  /// Eigenvalue mu of -Laplacian attached to each dof.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  int wavenumber(std::size_t dof) const { return wavenumbers_[dof]; }
  /// Periodic only: true for the sine (imaginary) component.
  bool is_sine(std::size_t dof) const { return sine_[dof]; }
  /// Dof index of (k, sine?) or -1 when not represented.
  long dof_of(int k, bool sine) const;

  /// (1 + mu)^alpha per dof.
  Eigen::VectorXd weights(double alpha) const;
  /// mu^eta per dof, with 0^0 = 1.
  Eigen::VectorXd fractional_laplacian(double eta) const;

  std::size_t grid_size() const { return static_cast<std::size_t>(grid_.size()); }
  const Eigen::VectorXd& grid() const { return grid_; }
  /// Grid values = synthesis * dofs (grid_size x dofs).
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  /// dofs = analysis * grid values (dofs x grid_size).
  const Eigen::MatrixXd& analysis() const { return analysis_; }

  bool compatible(const Basis& other) const;
  /// Same kind, length and truncation (hence the same collocation grid);
  /// the mean mode may differ.
  bool shares_grid(const Basis& other) const;
  std::string describe() const;

 private:
  Basis() = default;
  BasisKind kind_ = BasisKind::periodic;
  double length_ = 1.0;
  std::size_t modes_ = 0;
  bool zero_mean_ = false;
  Eigen::VectorXd eigenvalues_;
  std::vector<int> wavenumbers_;
  std::vector<bool> sine_;
  Eigen::VectorXd grid_;
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd analysis_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Element of the scale B_alpha: a truncated spectral expansion.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(BasisPtr basis, Eigen::VectorXd coeffs);

  static SpectralField zero(BasisPtr basis);
  /// Collocation projection of a function of x.
  static SpectralField from_function(BasisPtr basis, const std::function<double(double)>& f);
  static SpectralField from_grid(BasisPtr basis, const Eigen::VectorXd& values);
  /// Unit vector along dof j.
  static SpectralField unit(BasisPtr basis, std::size_t dof);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  /// Periodic: exponential coefficient c_k, k in [-K, K] (conjugate
  /// symmetric). Dirichlet: sine-series coefficient s_k, k in [1, K].
  std::complex<double> coefficient(int k) const;
  Eigen::VectorXd grid_values() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

/// (sum_k (1+mu_k)^{2 alpha} |c_k|^2)^{1/2}.
double norm_alpha(const SpectralField& field, double alpha);
double norm_alpha(const Basis& basis, const Eigen::VectorXd& coeffs, double alpha);

/// Analytic semigroup S_t = exp(-t nu (-Laplacian)) on a basis. diffusivity
/// nu = 0 gives the trivial semigroup.
class Semigroup {
 public:
  Semigroup() = default;
  explicit Semigroup(BasisPtr basis, double diffusivity = 1.0);

  const BasisPtr& basis() const { return basis_; }
  double diffusivity() const { return diffusivity_; }
  /// nu * mu_k per dof.
  const Eigen::VectorXd& rates() const { return rates_; }
  /// exp(-rates * t); throws ConfigError for t < 0.
  Eigen::VectorXd factors(double t) const;
  /// Smallest retained rate.
  double slowest_rate() const;

 private:
  BasisPtr basis_;
  double diffusivity_ = 1.0;
  Eigen::VectorXd rates_;
};

SpectralField apply_semigroup(const Semigroup& semigroup, const SpectralField& field, double t);

/// Nemytskii map u -> f(u(x)) through the collocation grid. Throws
/// NumericalError when f produces a non-finite value.
SpectralField apply_pointwise(const SpectralField& field, const std::function<double(double)>& f);

/// u -> g(x) (-Laplacian)^eta u. Throws ConfigError for eta < 0 or a basis
/// mismatch.
SpectralField apply_multiplier(const SpectralField& field, const SpectralField& g, double eta);

/// Dense matrix of u -> g(x) (-Laplacian)^eta u in dof coordinates.
Eigen::MatrixXd multiplier_matrix(const SpectralField& g, double eta);

/// Dense matrix of v -> w(x) v(x) for given grid values w.
Eigen::MatrixXd grid_multiplication_matrix(const Basis& basis, const Eigen::VectorXd& grid_weights);

}  // namespace rspde
