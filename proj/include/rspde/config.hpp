#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rspde/experiments.hpp"
#include "rspde/problem.hpp"
#include "rspde/solver.hpp"

namespace rspde {

/// Experiment identifiers accepted in the "experiment" key.
const std::vector<std::string>& experiment_ids();

/// Built-in defaults for an experiment id (the EX_1 torus problem unless the
/// id selects another example). Throws ConfigError for an unknown id.
nlohmann::json default_config(const std::string& experiment);

/// Field descriptor: a number (constant field) or an object with optional
/// keys "constant", "cos": [[k, a], ...], "sin": [[k, a], ...] (functions of
/// the basis' natural wavenumber) and "coefficients": [[k, re, im], ...]
/// (exponential or sine coefficients, added after projection).
SpectralField parse_field(const nlohmann::json& value, const BasisPtr& basis);

struct StabilitySettings {
  double rho = 1e-3;
  std::size_t paths = 0;
  double fit_start = 0.5;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t replicates = 0;
  std::size_t threads = 1;
  ProblemSpec problem;
  SpectralField z0;
  DriverConfig driver;
  SolverConfig solver;
  LyapunovConfig lyapunov;
  StabilitySettings stability;
  bool stable_directions = false;
  StableDirectionConfig stable;
  MomentConfig moments;
  std::size_t convergence_levels = 4;
  /// Effective configuration after merging defaults and the user's file.
  nlohmann::json effective;
};

/// Merges `user` over the defaults of its experiment id and parses the
/// result. Throws ConfigError on malformed input or a missing seed; the
/// problem inequalities are checked separately (validate / Problem).
ExperimentConfig load_config(const nlohmann::json& user);

/// Every problem with a configuration: parse failures (constraint
/// "config"), driver constraints and the parameter inequalities.
std::vector<Violation> validate_config(const nlohmann::json& user);

}  // namespace rspde
