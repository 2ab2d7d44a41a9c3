#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rspde/bounds.hpp"
#include "rspde/experiments.hpp"
#include "rspde/lyapunov.hpp"
#include "rspde/solver.hpp"

namespace rspde {

/// Shortest-round-trip formatting (%.17g).
std::string format_double(double v);

/// CSV with header t,x_1,...,x_n.
void write_path_csv(const GridPath& path, const std::string& file);
GridPath read_path_csv(const std::string& file, std::uint64_t seed = 0);

/// CSV with header i,a,b,XX_ab: segment index i (0-based) and 1-based
/// channels a, b.
void write_levy_csv(const RoughPath& rough, const std::string& file);
/// Pairs a path CSV with its Levy CSV.
RoughPath read_rough_csv(const std::string& path_file, const std::string& levy_file);

/// Binary layout (little-endian host order): magic "RPG1", uint64 m,
/// uint64 n, double T, uint64 seed, (m+1)*n path values (row-major),
/// m*n*n Levy values.
void write_rough_binary(const RoughPath& rough, const std::string& file);
RoughPath read_rough_binary(const std::string& file);

/// CSV k,re,im: periodic exponential coefficients c_k for k = 0..K, or
/// Dirichlet sine coefficients for k = 1..K.
void write_field_csv(const SpectralField& field, const std::string& file);

/// CSV t, then one column per dof (c0, re1, im1, ... periodic; s1, ...
/// Dirichlet) expressed as exponential/sine coefficients.
void write_trajectory_csv(const ControlledPath& path, const RoughPath& rough, const std::string& file);

/// CSV m,defect_i0,defect_i1,defect_i2.
void write_defect_csv(const std::vector<std::array<double, 3>>& defects, const std::string& file);

/// CSV path_id,rho,fitted_rate,r2.
void write_decay_csv(const std::vector<DecayRecord>& records, const std::string& file);

nlohmann::json to_json(const LyapunovReport& report);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const MomentTable& table);
nlohmann::json to_json(const StableDirectionReport& report);
nlohmann::json to_json(const ConvergenceReport& report);

void write_json(const nlohmann::json& value, const std::string& file);

}  // namespace rspde
