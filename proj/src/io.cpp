#include "rspde/io.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

namespace {

std::ofstream open_out(const std::string& file, bool binary = false) {
  std::ofstream out(file, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot open '" + file + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& file, bool binary = false) {
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ConfigError("cannot open '" + file + "' for reading");
  return in;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& file, std::size_t& columns) {
  std::ifstream in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + file + "' is empty");
  columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError("'" + file + "': malformed number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != columns) throw ConfigError("'" + file + "': ragged row");
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_path_csv(const GridPath& path, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "t";
  for (std::size_t c = 0; c < path.channels(); ++c) out << ",x_" << c + 1;
  out << "\n";
  for (std::size_t i = 0; i <= path.steps(); ++i) {
    out << format_double(path.time(i));
    for (std::size_t c = 0; c < path.channels(); ++c) out << "," << format_double(path.value(i, c));
    out << "\n";
  }
}

GridPath read_path_csv(const std::string& file, std::uint64_t seed) {
  std::size_t cols = 0;
  const auto rows = read_numeric_csv(file, cols);
  if (rows.size() < 2 || cols < 2) throw ConfigError("'" + file + "': need two rows and one channel");
  RowMatrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 1; c < cols; ++c) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c - 1)) = rows[i][c];
  }
  return GridPath(rows.back()[0], std::move(values), seed);
}

void write_levy_csv(const RoughPath& rough, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "i,a,b,XX_ab\n";
  const std::size_t n = rough.channels();
  for (std::size_t j = 0; j < rough.steps(); ++j) {
    const double* block = rough.segment(j);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        out << j << "," << a + 1 << "," << b + 1 << "," << format_double(block[a * n + b]) << "\n";
      }
    }
  }
}

RoughPath read_rough_csv(const std::string& path_file, const std::string& levy_file) {
  GridPath base = read_path_csv(path_file);
  std::size_t cols = 0;
  const auto rows = read_numeric_csv(levy_file, cols);
  const std::size_t n = base.channels();
  if (cols != 4) throw ConfigError("'" + levy_file + "': expected columns i,a,b,XX_ab");
  std::vector<double> levy(base.steps() * n * n, 0.0);
  std::vector<char> seen(levy.size(), 0);
  for (const auto& r : rows) {
    const auto j = static_cast<std::size_t>(r[0]);
    const auto a = static_cast<std::size_t>(r[1]);
    const auto b = static_cast<std::size_t>(r[2]);
    if (j >= base.steps() || a < 1 || a > n || b < 1 || b > n) throw ConfigError("'" + levy_file + "': index out of range");
    const std::size_t k = j * n * n + (a - 1) * n + (b - 1);
    levy[k] = r[3];
    seen[k] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ConfigError("'" + levy_file + "': missing blocks");
  return RoughPath(std::move(base), std::move(levy));
}

void write_rough_binary(const RoughPath& rough, const std::string& file) {
  std::ofstream out = open_out(file, true);
  const std::uint64_t m = rough.steps();
  const std::uint64_t n = rough.channels();
  const double t = rough.base().horizon();
  const std::uint64_t seed = rough.base().seed();
  out.write("RPG1", 4);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&t), sizeof t);
  out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
  const RowMatrix& v = rough.base().values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  const auto& levy = rough.segment_levy();
  out.write(reinterpret_cast<const char*>(levy.data()), static_cast<std::streamsize>(levy.size() * sizeof(double)));
  if (!out) throw ConfigError("failed writing '" + file + "'");
}

RoughPath read_rough_binary(const std::string& file) {
  std::ifstream in = open_in(file, true);
  char magic[4];
  std::uint64_t m = 0, n = 0, seed = 0;
  double t = 0.0;
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RPG1", 4) != 0) throw ConfigError("'" + file + "' is not an RPG1 file");
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&t), sizeof t);
  in.read(reinterpret_cast<char*>(&seed), sizeof seed);
  if (!in || m == 0 || n == 0 || m > (1ull << 32) || n > 1024) throw ConfigError("'" + file + "': bad header");
  RowMatrix v(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  std::vector<double> levy(m * n * n);
  in.read(reinterpret_cast<char*>(levy.data()), static_cast<std::streamsize>(levy.size() * sizeof(double)));
  if (!in) throw ConfigError("'" + file + "': truncated");
  return RoughPath(GridPath(t, std::move(v), seed), std::move(levy));
}

void write_field_csv(const SpectralField& field, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "k,re,im\n";
  const Basis& b = *field.basis();
  const int lo = b.kind() == BasisKind::periodic ? 0 : 1;
  for (int k = lo; k <= static_cast<int>(b.modes()); ++k) {
    const std::complex<double> c = field.coefficient(k);
    out << k << "," << format_double(c.real()) << "," << format_double(c.imag()) << "\n";
  }
}

void write_trajectory_csv(const ControlledPath& path, const RoughPath& rough, const std::string& file) {
  std::ofstream out = open_out(file);
  const Basis& b = *path.basis;
  const bool periodic = b.kind() == BasisKind::periodic;
  out << "t";
  for (std::size_t d = 0; d < b.dofs(); ++d) {
    const int k = b.wavenumber(d);
    if (!periodic) out << ",s" << k;
    else if (k == 0) out << ",c0";
    else out << (b.is_sine(d) ? ",im" : ",re") << k;
  }
  out << "\n";
  const double inv = 1.0 / std::numbers::sqrt2;
  for (std::size_t j = 0; j < path.points(); ++j) {
    out << format_double(rough.time(path.first + j));
    for (std::size_t d = 0; d < b.dofs(); ++d) {
      const double v = path.values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j));
      double c;
      if (!periodic) c = std::numbers::sqrt2 * v;
      else if (b.wavenumber(d) == 0) c = v;
      else c = b.is_sine(d) ? -v * inv : v * inv;
      out << "," << format_double(c);
    }
    out << "\n";
  }
}

void write_defect_csv(const std::vector<std::array<double, 3>>& defects, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "m,defect_i0,defect_i1,defect_i2\n";
  for (std::size_t m = 0; m < defects.size(); ++m) {
    out << m << "," << format_double(defects[m][0]) << "," << format_double(defects[m][1]) << ","
        << format_double(defects[m][2]) << "\n";
  }
}

void write_decay_csv(const std::vector<DecayRecord>& records, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "path_id,rho,fitted_rate,r2\n";
  for (const auto& r : records) {
    out << r.path_id << "," << format_double(r.rho) << "," << format_double(r.fitted_rate) << ","
        << format_double(r.r2) << "\n";
  }
}

nlohmann::json to_json(const LyapunovReport& report) {
  nlohmann::json j;
  j["t0"] = report.t0;
  j["K"] = report.K;
  j["W"] = report.W;
  j["lambdas"] = numbers(report.lambdas);
  j["ci"] = numbers(report.ci);
  nlohmann::json trace = nlohmann::json::array();
  for (std::size_t w = 0; w < report.W; ++w) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(w + 1);
    for (const auto& t : report.trace) row.push_back(number(t[w]));
    trace.push_back(row);
  }
  j["trace"] = trace;
  return j;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["N"] = r.N;
  j["x"] = number(r.x);
  j["y"] = number(r.y);
  j["P_value"] = number(r.P_value);
  j["chi"] = r.chi;
  j["epsilon"] = r.epsilon;
  j["eta1"] = r.eta1;
  j["M_eps"] = number(r.M_eps);
  j["M_tilde"] = number(r.M_tilde);
  j["step_condition"] = r.step_condition;
  j["bound"] = number(r.bound);
  j["observed"] = number(r.observed);
  j["holds"] = r.holds;
  j["interval_dnorms"] = numbers(r.interval_dnorms);
  j["glue"] = number(r.glue);
  j["bound_dnorm"] = number(r.bound_dnorm);
  j["observed_dnorm"] = r.observed_dnorm < 0.0 ? nlohmann::json(nullptr) : number(r.observed_dnorm);
  j["holds_dnorm"] = r.holds_dnorm;
  return j;
}

nlohmann::json to_json(const MomentTable& t) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : t.moments) {
    rows.push_back({{"p", m.p}, {"estimate", number(m.estimate)}, {"ci_low", number(m.ci.low)}, {"ci_high", number(m.ci.high)}});
  }
  j["moments"] = rows;
  nlohmann::json surv = nlohmann::json::array();
  for (const auto& s : t.survival.table) surv.push_back({{"n", s.n}, {"survival", s.survival}});
  j["survival"] = surv;
  j["tail_exponent"] = number(t.survival.exponent);
  j["tail_ci"] = {number(t.survival.ci.low), number(t.survival.ci.high)};
  j["epsilon"] = t.epsilon.epsilon;
  j["epsilon_reduced"] = t.epsilon.reduced;
  return j;
}

nlohmann::json to_json(const StableDirectionReport& r) {
  nlohmann::json j;
  j["proxy"] = r.proxy;
  j["note"] = "directions are right singular vectors of the product cocycle (proxy for the stable subspace)";
  j["lambdas"] = numbers(r.lambdas);
  j["j0"] = r.j0;
  j["upsilon"] = r.upsilon;
  j["magnitudes"] = numbers(r.magnitudes);
  j["sup_ratio"] = numbers(r.sup_ratio);
  j["pass"] = r.pass;
  j["largest_passing"] = r.largest_passing;
  return j;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"steps", row.steps}, {"sup", number(row.sup)}, {"terminal_error", number(row.terminal_error)},
                    {"sup_error", number(row.sup_error)}});
  }
  j["rows"] = rows;
  j["observed_order"] = number(r.observed_order);
  return j;
}

void write_json(const nlohmann::json& value, const std::string& file) {
  std::ofstream out = open_out(file);
  out << value.dump(2) << "\n";
}

}  // namespace rspde
