#include "rspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

double SolverConfig::resolved_epsilon(double gamma, double eta) const {
  return epsilon < 0.0 ? (gamma - eta) / 4.0 : epsilon;
}

StepWeights step_weights(const Semigroup& semigroup, double dt) {
  if (!(dt > 0.0)) throw ConfigError("step_weights: dt must be positive");
  const Eigen::VectorXd& rates = semigroup.rates();
  StepWeights w;
  w.decay.resize(rates.size());
  w.left.resize(rates.size());
  w.right.resize(rates.size());
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    const double z = rates(k) * dt;
    const double e = std::exp(-z);
    w.decay(k) = e;
    if (z < 1e-3) {
      w.left(k) = dt * (0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0 + z * z * z * z / 144.0);
      w.right(k) = dt * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0 + z * z * z * z / 720.0);
    } else {
      w.left(k) = dt * (1.0 - e - z * e) / (z * z);
      w.right(k) = dt * (z - 1.0 + e) / (z * z);
    }
  }
  return w;
}

namespace {

// F, G and the one-step rough germ at every column of an iterate.
struct Evaluation {
  Eigen::MatrixXd drift;
  std::vector<Eigen::MatrixXd> noise;
  std::vector<Eigen::MatrixXd> noise_correction;  // [i*n + l] = DG_i[G_l]
  Eigen::MatrixXd germ;
};

Evaluation evaluate(const Problem& problem, const RoughPath& rough, const Eigen::MatrixXd& z,
                    std::size_t first, bool corrections) {
  const std::size_t n = problem.channels();
  const Eigen::Index d = z.rows();
  const Eigen::Index cols = z.cols();
  Evaluation ev;
  if (!problem.drift_is_zero()) {
    ev.drift.resize(d, cols);
    for (Eigen::Index j = 0; j < cols; ++j) ev.drift.col(j) = problem.drift(z.col(j));
  }
  ev.noise.assign(n, Eigen::MatrixXd(d, cols));
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) ev.noise[i].col(j) = problem.noise(i, z.col(j));
  }
  if (corrections) ev.noise_correction.assign(n * n, Eigen::MatrixXd(d, cols));
  ev.germ = Eigen::MatrixXd::Zero(d, std::max<Eigen::Index>(cols - 1, 0));
  const RowMatrix& xv = rough.base().values();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto g = static_cast<Eigen::Index>(first) + j;
    const bool step = j + 1 < cols;
    const double* levy = step ? rough.segment(static_cast<std::size_t>(g)) : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      if (step) ev.germ.col(j) += (xv(g + 1, static_cast<Eigen::Index>(i)) - xv(g, static_cast<Eigen::Index>(i))) * ev.noise[i].col(j);
      for (std::size_t l = 0; l < n; ++l) {
        const Eigen::VectorXd c = problem.noise_derivative(i, z.col(j), ev.noise[l].col(j));
        if (corrections) ev.noise_correction[i * n + l].col(j) = c;
        if (step) ev.germ.col(j) += levy[l * n + i] * c;
      }
    }
  }
  return ev;
}

void check_ceiling(const Eigen::VectorXd& weights, const Eigen::VectorXd& z, double ceiling,
                   std::size_t grid_index) {
  const double norm = weights.cwiseProduct(z).norm();
  if (!std::isfinite(norm) || norm > ceiling) {
    std::ostringstream msg;
    msg << "solver: |Z|_alpha = " << norm << " exceeds the blow-up ceiling " << ceiling
        << " at grid index " << grid_index;
    throw NumericalError(msg.str());
  }
}

// One application of the discrete mild map given an evaluation of the
// previous iterate.
Eigen::MatrixXd mild_map(const StepWeights& w, const Evaluation& ev, const Eigen::VectorXd& start,
                         Eigen::Index cols, const Eigen::VectorXd& alpha_weights, double ceiling,
                         std::size_t first) {
  Eigen::MatrixXd out(start.size(), cols);
  out.col(0) = start;
  const bool drift = ev.drift.size() > 0;
  for (Eigen::Index j = 0; j + 1 < cols; ++j) {
    out.col(j + 1) = w.decay.cwiseProduct(out.col(j) + ev.germ.col(j));
    if (drift) {
      out.col(j + 1) += w.left.cwiseProduct(ev.drift.col(j)) + w.right.cwiseProduct(ev.drift.col(j + 1));
    }
    check_ceiling(alpha_weights, out.col(j + 1), ceiling, first + static_cast<std::size_t>(j + 1));
  }
  return out;
}

Eigen::MatrixXd initial_guess(const StepWeights& w, const Eigen::VectorXd& start, Eigen::Index cols) {
  Eigen::MatrixXd out(start.size(), cols);
  out.col(0) = start;
  for (Eigen::Index j = 0; j + 1 < cols; ++j) out.col(j + 1) = w.decay.cwiseProduct(out.col(j));
  return out;
}

struct PicardResult {
  bool converged = false;
  std::string reason;
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> noise;
  std::size_t iterations = 0;
  double change = 0.0;
};

PicardResult picard(const Problem& problem, const RoughPath& rough, const StepWeights& w,
                    const Eigen::VectorXd& start, std::size_t a, std::size_t b,
                    const SolverConfig& config) {
  const Eigen::VectorXd aw = problem.basis()->weights(problem.alpha());
  const auto cols = static_cast<Eigen::Index>(b - a + 1);
  PicardResult out;
  try {
    Eigen::MatrixXd z = initial_guess(w, start, cols);
    Evaluation ev = evaluate(problem, rough, z, a, false);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= config.max_iterations; ++k) {
      Eigen::MatrixXd next = mild_map(w, ev, start, cols, aw, config.ceiling, a);
      Evaluation next_ev = evaluate(problem, rough, next, a, false);
      double change = 0.0;
      double scale = 0.0;
      for (Eigen::Index j = 0; j < cols; ++j) {
        change = std::max(change, aw.cwiseProduct(next.col(j) - z.col(j)).norm());
        scale = std::max(scale, aw.cwiseProduct(next.col(j)).norm());
      }
      const double threshold = std::max(config.tol, 1e-15 * (1.0 + scale));
      const bool stagnated = k > 2 && change <= 1e-11 * (1.0 + scale) && change >= 0.5 * previous;
      bool done = change <= threshold || stagnated;
      if (done && change > 0.0 && !stagnated && b - a <= config.dnorm_max_steps) {
        ControlledPath diff;
        diff.basis = problem.basis();
        diff.first = a;
        diff.values = next - z;
        diff.alpha = problem.alpha();
        diff.gamma = problem.gamma();
        for (std::size_t i = 0; i < problem.channels(); ++i) diff.derivative.push_back(next_ev.noise[i] - ev.noise[i]);
        done = dnorm(diff, rough, {a, b}).value <= threshold;
      }
      z = std::move(next);
      ev = std::move(next_ev);
      out.iterations = k;
      out.change = change;
      if (done) {
        out.converged = true;
        break;
      }
      previous = change;
    }
    if (!out.converged) {
      std::ostringstream msg;
      msg << "no contraction after " << out.iterations << " iterations (last change " << out.change << ")";
      out.reason = msg.str();
    }
    out.values = std::move(z);
    out.noise = std::move(ev.noise);
  } catch (const NumericalError& e) {
    out.converged = false;
    out.reason = e.what();
  }
  return out;
}

struct Assembler {
  const Problem& problem;
  const RoughPath& rough;
  const StepWeights& weights;
  const SolverConfig& config;
  MildSolution& solution;

  void solve(std::size_t a, std::size_t b, bool bisected) {
    const auto& traj = solution.trajectory;
    const Eigen::VectorXd start = traj.values.col(static_cast<Eigen::Index>(a - traj.first));
    PicardResult r = picard(problem, rough, weights, start, a, b, config);
    if (r.converged) {
      const auto c0 = static_cast<Eigen::Index>(a - traj.first);
      const auto len = static_cast<Eigen::Index>(b - a + 1);
      solution.trajectory.values.middleCols(c0, len) = r.values;
      for (std::size_t i = 0; i < problem.channels(); ++i) {
        solution.trajectory.derivative[i].middleCols(c0, len) = r.noise[i];
      }
      solution.intervals.push_back({a, b, r.iterations, r.change, bisected});
      return;
    }
    if (b - a >= 2 * std::max<std::size_t>(config.min_steps, 1)) {
      const std::size_t mid = a + (b - a) / 2;
      solve(a, mid, true);
      solve(mid, b, true);
      return;
    }
    std::ostringstream msg;
    msg << "solve_mild: Picard failure on grid interval [" << a << ", " << b
        << "] at the bisection floor: " << r.reason;
    throw NumericalError(msg.str());
  }
};

MildSolution empty_solution(const Problem& problem, const RoughPath& rough, const SpectralField& z0,
                            GridInterval interval) {
  if (!z0.basis() || !z0.basis()->compatible(*problem.basis())) {
    throw ConfigError("solve_mild: initial condition lives on a different basis");
  }
  if (rough.channels() != problem.channels()) {
    throw ConfigError("solve_mild: noise channel count differs from the rough path dimension");
  }
  if (interval.first >= interval.last || interval.last > rough.steps()) {
    throw ConfigError("solve_mild: empty or off-grid interval");
  }
  MildSolution s;
  const auto d = static_cast<Eigen::Index>(problem.dofs());
  const auto cols = static_cast<Eigen::Index>(interval.steps() + 1);
  s.trajectory.basis = problem.basis();
  s.trajectory.first = interval.first;
  s.trajectory.values = Eigen::MatrixXd::Zero(d, cols);
  s.trajectory.values.col(0) = z0.coeffs();
  s.trajectory.derivative.assign(problem.channels(), Eigen::MatrixXd::Zero(d, cols));
  s.trajectory.alpha = problem.alpha();
  s.trajectory.gamma = problem.gamma();
  return s;
}

// Independent evaluation of the mild identity from stored Z.
class ResidualEvaluator {
 public:
  ResidualEvaluator(const MildSolution& solution, const Problem& problem, const RoughPath& rough)
      : solution_(solution), problem_(problem), rough_(rough),
        weights_(step_weights(problem.semigroup(), rough.dt())) {
    const ControlledPath& z = solution.trajectory;
    const Evaluation ev = evaluate(problem, rough, z.values, z.first, true);
    drift_ = ev.drift;
    const std::size_t n = problem.channels();
    for (std::size_t i = 0; i < n; ++i) {
      ControlledPath cp;
      cp.basis = z.basis;
      cp.first = z.first;
      cp.values = ev.noise[i];
      cp.alpha = z.alpha;
      cp.gamma = z.gamma;
      for (std::size_t l = 0; l < n; ++l) cp.derivative.push_back(ev.noise_correction[i * n + l]);
      integrand_.push_back(std::move(cp));
    }
  }

  double operator()(std::size_t s, std::size_t t) const {
    const ControlledPath& z = solution_.trajectory;
    if (s > t || s < z.first || t > z.last()) throw ConfigError("mild_residual: checkpoints outside the solution");
    const Semigroup& sg = problem_.semigroup();
    const double tt = rough_.time(t);
    Eigen::VectorXd r = z.at(t).coeffs() - sg.factors(tt - rough_.time(s)).cwiseProduct(z.at(s).coeffs());
    if (drift_.size() > 0) {
      for (std::size_t j = s; j < t; ++j) {
        const auto c = static_cast<Eigen::Index>(j - z.first);
        const Eigen::VectorXd local =
            weights_.left.cwiseProduct(drift_.col(c)) + weights_.right.cwiseProduct(drift_.col(c + 1));
        r -= sg.factors(tt - rough_.time(j + 1)).cwiseProduct(local);
      }
    }
    if (!integrand_.empty() && t > s) r -= grid_sewing_sum(integrand_, rough_, sg, s, t).coeffs();
    return norm_alpha(*z.basis, r, z.alpha);
  }

 private:
  const MildSolution& solution_;
  const Problem& problem_;
  const RoughPath& rough_;
  StepWeights weights_;
  Eigen::MatrixXd drift_;
  std::vector<ControlledPath> integrand_;
};

void record_residuals(MildSolution& solution, const Problem& problem, const RoughPath& rough,
                      std::size_t count) {
  if (count == 0) return;
  const ResidualEvaluator residual(solution, problem, rough);
  const GridInterval iv = solution.interval();
  std::size_t previous = iv.first;
  for (std::size_t k = 1; k <= count; ++k) {
    const std::size_t c = iv.first + (iv.steps() * k) / count;
    if (c == previous) continue;
    solution.residuals.emplace_back(c, residual(iv.first, c));
    previous = c;
  }
}

}  // namespace

MildSolution solve_mild(const Problem& problem, const RoughPath& rough, const SpectralField& z0,
                        GridInterval interval, const SolverConfig& config) {
  if (!(config.tol >= 0.0)) throw ConfigError("solve_mild: tolerance must be nonnegative");
  if (config.max_iterations == 0) throw ConfigError("solve_mild: max_iterations must be positive");
  if (!(config.ceiling > 0.0)) throw ConfigError("solve_mild: ceiling must be positive");
  MildSolution solution = empty_solution(problem, rough, z0, interval);
  const double eps = config.resolved_epsilon(problem.gamma(), problem.eta());
  const double eta1 = problem.eta() + eps;
  if (!(eps > 0.0 && eta1 < problem.gamma())) {
    throw ConfigError("solve_mild: epsilon must satisfy 0 < epsilon < gamma - eta");
  }
  solution.epsilon = eps;
  solution.tol = config.tol;
  if (config.greedy) {
    solution.partition = greedy_partition(rough, problem.gamma(), eta1, config.chi, interval);
  } else {
    solution.partition.points = {interval.first, interval.last};
    solution.partition.chi = config.chi;
    solution.partition.eta1 = eta1;
    solution.partition.gamma = problem.gamma();
  }
  check_ceiling(problem.basis()->weights(problem.alpha()), z0.coeffs(), config.ceiling, interval.first);
  const StepWeights weights = step_weights(problem.semigroup(), rough.dt());
  Assembler assembler{problem, rough, weights, config, solution};
  const auto& pts = solution.partition.points;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) assembler.solve(pts[k], pts[k + 1], false);
  record_residuals(solution, problem, rough, config.checkpoints);
  return solution;
}

MildSolution picard_truncated(const Problem& problem, const RoughPath& rough,
                              const SpectralField& z0, GridInterval interval,
                              std::size_t iterations) {
  MildSolution solution = empty_solution(problem, rough, z0, interval);
  const StepWeights w = step_weights(problem.semigroup(), rough.dt());
  const Eigen::VectorXd aw = problem.basis()->weights(problem.alpha());
  const auto cols = static_cast<Eigen::Index>(interval.steps() + 1);
  Eigen::MatrixXd z = initial_guess(w, z0.coeffs(), cols);
  Evaluation ev = evaluate(problem, rough, z, interval.first, false);
  for (std::size_t k = 0; k < iterations; ++k) {
    z = mild_map(w, ev, z0.coeffs(), cols, aw, std::numeric_limits<double>::infinity(), interval.first);
    ev = evaluate(problem, rough, z, interval.first, false);
  }
  solution.trajectory.values = z;
  solution.trajectory.derivative = ev.noise;
  solution.partition.points = {interval.first, interval.last};
  solution.intervals.push_back({interval.first, interval.last, iterations, 0.0, false});
  return solution;
}

double mild_residual(const MildSolution& solution, const Problem& problem, const RoughPath& rough,
                     std::size_t s, std::size_t t) {
  return ResidualEvaluator(solution, problem, rough)(s, t);
}

double sup_norm(const MildSolution& solution) {
  const ControlledPath& z = solution.trajectory;
  const Eigen::VectorXd w = z.basis->weights(z.alpha);
  double out = 0.0;
  for (Eigen::Index j = 0; j < z.values.cols(); ++j) out = std::max(out, w.cwiseProduct(z.values.col(j)).norm());
  return out;
}

}  // namespace rspde
