#include "rspde/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

std::string to_string(BasisKind kind) {
  return kind == BasisKind::periodic ? "periodic" : "dirichlet";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "periodic") return BasisKind::periodic;
  if (name == "dirichlet") return BasisKind::dirichlet;
  throw ConfigError("unknown basis kind '" + name + "' (expected periodic or dirichlet)");
}

std::shared_ptr<const Basis> Basis::make(BasisKind kind, double length, std::size_t modes,
                                         bool zero_mean) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("Basis: length must be positive");
  if (kind == BasisKind::dirichlet && modes == 0) throw ConfigError("Basis: Dirichlet basis needs K >= 1");
  if (kind == BasisKind::periodic && zero_mean && modes == 0) {
    throw ConfigError("Basis: zero-mean periodic basis needs K >= 1");
  }
  std::shared_ptr<Basis> b(new Basis());
  b->kind_ = kind;
  b->length_ = length;
  b->modes_ = modes;
  b->zero_mean_ = kind == BasisKind::periodic && zero_mean;

  const double pi = std::numbers::pi;
  std::vector<double> mu;
  if (kind == BasisKind::periodic) {
    if (!b->zero_mean_) {
      mu.push_back(0.0);
      b->wavenumbers_.push_back(0);
      b->sine_.push_back(false);
    }
    for (std::size_t k = 1; k <= modes; ++k) {
      const double w = 2.0 * pi * static_cast<double>(k) / length;
      for (bool s : {false, true}) {
        mu.push_back(w * w);
        b->wavenumbers_.push_back(static_cast<int>(k));
        b->sine_.push_back(s);
      }
    }
  } else {
    for (std::size_t k = 1; k <= modes; ++k) {
      const double w = pi * static_cast<double>(k) / length;
      mu.push_back(w * w);
      b->wavenumbers_.push_back(static_cast<int>(k));
      b->sine_.push_back(true);
    }
  }
  b->eigenvalues_ = Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));

  const std::size_t big_m = 3 * modes + 3;
  const std::size_t dofs = mu.size();
  const double sqrt2 = std::numbers::sqrt2;
  if (kind == BasisKind::periodic) {
    b->grid_.resize(static_cast<Eigen::Index>(big_m));
    for (std::size_t j = 0; j < big_m; ++j) b->grid_(static_cast<Eigen::Index>(j)) = length * static_cast<double>(j) / static_cast<double>(big_m);
  } else {
    b->grid_.resize(static_cast<Eigen::Index>(big_m - 1));
    for (std::size_t j = 1; j < big_m; ++j) b->grid_(static_cast<Eigen::Index>(j - 1)) = length * static_cast<double>(j) / static_cast<double>(big_m);
  }
  const auto rows = b->grid_.size();
  b->synthesis_.resize(rows, static_cast<Eigen::Index>(dofs));
  for (Eigen::Index j = 0; j < rows; ++j) {
    const double x = b->grid_(j);
    for (std::size_t d = 0; d < dofs; ++d) {
      const int k = b->wavenumbers_[d];
      double v;
      if (kind == BasisKind::periodic) {
        const double arg = 2.0 * pi * k * x / length;
        v = k == 0 ? 1.0 : sqrt2 * (b->sine_[d] ? std::sin(arg) : std::cos(arg));
      } else {
        v = sqrt2 * std::sin(pi * k * x / length);
      }
      b->synthesis_(j, static_cast<Eigen::Index>(d)) = v;
    }
  }
  // Discrete orthogonality: (1/M) sum_j phi_d(x_j) phi_e(x_j) = delta_de.
  b->analysis_ = b->synthesis_.transpose() / static_cast<double>(big_m);
  return b;
}

long Basis::dof_of(int k, bool sine) const {
  for (std::size_t d = 0; d < dofs(); ++d) {
    if (wavenumbers_[d] == k && (k == 0 || kind_ == BasisKind::dirichlet || sine_[d] == sine)) {
      return static_cast<long>(d);
    }
  }
  return -1;
}

Eigen::VectorXd Basis::weights(double alpha) const {
  return (1.0 + eigenvalues_.array()).pow(alpha).matrix();
}

Eigen::VectorXd Basis::fractional_laplacian(double eta) const {
  Eigen::VectorXd out(eigenvalues_.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::pow(eigenvalues_(i), eta);
  return out;
}

bool Basis::compatible(const Basis& other) const {
  return kind_ == other.kind_ && length_ == other.length_ && modes_ == other.modes_ &&
         zero_mean_ == other.zero_mean_;
}

bool Basis::shares_grid(const Basis& other) const {
  return kind_ == other.kind_ && length_ == other.length_ && modes_ == other.modes_;
}

std::string Basis::describe() const {
  std::ostringstream os;
  os << "basis=" << to_string(kind_) << " l=" << length_ << " K=" << modes_
     << " zero_mean=" << (zero_mean_ ? 1 : 0);
  return os.str();
}

SpectralField::SpectralField(BasisPtr basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ConfigError("SpectralField: null basis");
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->dofs()) {
    throw ConfigError("SpectralField: coefficient count does not match the basis");
  }
}

SpectralField SpectralField::zero(BasisPtr basis) {
  const auto n = static_cast<Eigen::Index>(basis->dofs());
  return SpectralField(std::move(basis), Eigen::VectorXd::Zero(n));
}

SpectralField SpectralField::from_function(BasisPtr basis, const std::function<double(double)>& f) {
  Eigen::VectorXd values(basis->grid().size());
  for (Eigen::Index j = 0; j < values.size(); ++j) values(j) = f(basis->grid()(j));
  return from_grid(std::move(basis), values);
}

SpectralField SpectralField::from_grid(BasisPtr basis, const Eigen::VectorXd& values) {
  if (values.size() != basis->grid().size()) throw ConfigError("SpectralField: grid size mismatch");
  Eigen::VectorXd c = basis->analysis() * values;
  return SpectralField(std::move(basis), std::move(c));
}

SpectralField SpectralField::unit(BasisPtr basis, std::size_t dof) {
  SpectralField f = zero(std::move(basis));
  f.coeffs_(static_cast<Eigen::Index>(dof)) = 1.0;
  return f;
}

std::complex<double> SpectralField::coefficient(int k) const {
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  if (basis_->kind() == BasisKind::dirichlet) {
    const long d = basis_->dof_of(k, true);
    return d < 0 ? 0.0 : std::numbers::sqrt2 * coeffs_(d);
  }
  if (k == 0) {
    const long d = basis_->dof_of(0, false);
    return d < 0 ? 0.0 : coeffs_(d);
  }
  const int ak = std::abs(k);
  const long dc = basis_->dof_of(ak, false);
  const long ds = basis_->dof_of(ak, true);
  if (dc < 0) return 0.0;
  const std::complex<double> c(coeffs_(dc) * inv_sqrt2, -coeffs_(ds) * inv_sqrt2);
  return k > 0 ? c : std::conj(c);
}

Eigen::VectorXd SpectralField::grid_values() const { return basis_->synthesis() * coeffs_; }

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!basis_->compatible(*other.basis_)) throw ConfigError("SpectralField: basis mismatch");
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!basis_->compatible(*other.basis_)) throw ConfigError("SpectralField: basis mismatch");
  coeffs_ -= other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

double norm_alpha(const Basis& basis, const Eigen::VectorXd& coeffs, double alpha) {
  return basis.weights(alpha).cwiseProduct(coeffs).norm();
}

double norm_alpha(const SpectralField& field, double alpha) {
  return norm_alpha(*field.basis(), field.coeffs(), alpha);
}

Semigroup::Semigroup(BasisPtr basis, double diffusivity)
    : basis_(std::move(basis)), diffusivity_(diffusivity) {
  if (!(diffusivity >= 0.0)) throw ConfigError("Semigroup: diffusivity must be nonnegative");
  rates_ = diffusivity_ * basis_->eigenvalues();
}

Eigen::VectorXd Semigroup::factors(double t) const {
  if (!(t >= 0.0)) throw ConfigError("Semigroup: negative time");
  return (-rates_.array() * t).exp().matrix();
}

double Semigroup::slowest_rate() const { return rates_.size() == 0 ? 0.0 : rates_.minCoeff(); }

SpectralField apply_semigroup(const Semigroup& semigroup, const SpectralField& field, double t) {
  if (!semigroup.basis()->compatible(*field.basis())) throw ConfigError("apply_semigroup: basis mismatch");
  return SpectralField(field.basis(), semigroup.factors(t).cwiseProduct(field.coeffs()));
}

SpectralField apply_pointwise(const SpectralField& field, const std::function<double(double)>& f) {
  Eigen::VectorXd values = field.grid_values();
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double v = f(values(j));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "apply_pointwise: non-finite value f(" << values(j) << ")";
      throw NumericalError(msg.str());
    }
    values(j) = v;
  }
  return SpectralField::from_grid(field.basis(), values);
}

SpectralField apply_multiplier(const SpectralField& field, const SpectralField& g, double eta) {
  if (!(eta >= 0.0)) throw ConfigError("apply_multiplier: eta must be nonnegative");
  if (!field.basis()->compatible(*g.basis())) throw ConfigError("apply_multiplier: basis mismatch");
  const Basis& b = *field.basis();
  const Eigen::VectorXd scaled = b.fractional_laplacian(eta).cwiseProduct(field.coeffs());
  const Eigen::VectorXd values = (b.synthesis() * scaled).cwiseProduct(g.grid_values());
  return SpectralField(field.basis(), b.analysis() * values);
}

Eigen::MatrixXd grid_multiplication_matrix(const Basis& basis, const Eigen::VectorXd& grid_weights) {
  return basis.analysis() * grid_weights.asDiagonal() * basis.synthesis();
}

Eigen::MatrixXd multiplier_matrix(const SpectralField& g, double eta) {
  if (!(eta >= 0.0)) throw ConfigError("multiplier_matrix: eta must be nonnegative");
  const Basis& b = *g.basis();
  return grid_multiplication_matrix(b, g.grid_values()) * b.fractional_laplacian(eta).asDiagonal();
}

}  // namespace rspde
