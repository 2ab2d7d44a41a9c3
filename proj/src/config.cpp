#include "rspde/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rspde/errors.hpp"

namespace rspde {

using nlohmann::json;

namespace {

json ex1_defaults() {
  return {
      {"experiment", "ex1-periodic"},
      {"output", "out"},
      {"replicates", 100},
      {"threads", 1},
      {"problem",
       {{"basis", "periodic"},
        {"l", 1.0},
        {"K", 32},
        {"zero_mean", true},
        {"nu", 1.0},
        {"alpha", 0.0},
        {"gamma", 0.45},
        {"sigma", 0.5},
        {"eta", 0.1},
        {"theta", 0.0},
        {"F", {{"poly", {0.0, 1.0, 0.0, -1.0}}, {"linear", json::array()}}},
        {"G", json::array({{{"kind", "linear"}, {"field", {{"constant", 0.5}, {"cos", {{1, 0.25}}}}}, {"eta", 0.1}}})},
        {"z0", {{"cos", {{1, 1.0}}}, {"sin", {{2, 0.5}}}}}}},
      {"driver", {{"H", 0.45}, {"m", 4096}, {"T", 1.0}, {"scale", 1.0}}},
      {"solver",
       {{"chi", 1.0},
        {"epsilon", -1.0},
        {"tol", 1e-10},
        {"max_iterations", 60},
        {"min_steps", 1},
        {"ceiling", 1e6},
        {"dnorm_max_steps", 256},
        {"greedy", true},
        {"checkpoints", 8}}},
      {"lyapunov", {{"t0", 0.03125}, {"windows", 20}, {"K", 8}, {"frame_seed", 0}}},
      {"stability", {{"rho", 1e-3}, {"paths", 0}, {"fit_start", 0.5}}},
      {"stable_directions",
       {{"enabled", false},
        {"t0", 0.03125},
        {"windows", 10},
        {"upsilon", 0.5},
        {"magnitudes", {1e-4, 1e-3, 1e-2, 1e-1, 1.0}},
        {"cap", 10.0},
        {"j0", -1}}},
      {"moments",
       {{"p", {1.0, 2.0, 4.0}}, {"gamma_prime", 0.9}, {"bootstrap", 500}, {"level", 0.95}, {"dnorm_max_steps", 4096}}},
      {"convergence", {{"levels", 4}}},
  };
}

template <class T>
T get(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& obj, const char* key) {
  const auto v = get<long long>(obj, key);
  if (v < 0) throw ConfigError(std::string("key '") + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

ProblemSpec parse_problem(const json& p) {
  ProblemSpec spec;
  const BasisKind kind = basis_kind_from_string(get<std::string>(p, "basis"));
  const auto modes = get_count(p, "K");
  const auto length = get<double>(p, "l");
  if (modes == 0) throw ConfigError("problem.K must be positive");
  if (!(length > 0.0)) throw ConfigError("problem.l must be positive");
  spec.basis = Basis::make(kind, length, modes, p.value("zero_mean", false));
  // Multipliers keep their mean even when the solution space drops it.
  const BasisPtr coefficients = spec.basis->zero_mean() ? Basis::make(kind, length, modes, false) : spec.basis;
  spec.diffusivity = get<double>(p, "nu");
  spec.alpha = get<double>(p, "alpha");
  spec.gamma = get<double>(p, "gamma");
  spec.sigma = get<double>(p, "sigma");
  spec.eta = get<double>(p, "eta");
  spec.theta = get<double>(p, "theta");
  if (p.contains("F")) {
    const json& f = p.at("F");
    if (f.contains("poly")) spec.poly = f.at("poly").get<std::vector<double>>();
    if (f.contains("linear")) {
      for (const json& l : f.at("linear")) {
        LinearDrift d;
        d.potential = parse_field(l.at("potential"), coefficients);
        d.beta = l.value("beta", 0.0);
        spec.linear.push_back(std::move(d));
      }
    }
  }
  const json& g = p.at("G");
  if (!g.is_array() || g.empty()) throw ConfigError("problem.G must list at least one noise channel");
  for (const json& c : g) {
    Diffusion d;
    d.kind = diffusion_kind_from_string(get<std::string>(c, "kind"));
    const BasisPtr& on = d.kind == Diffusion::Kind::additive ? spec.basis : coefficients;
    d.field = c.contains("field") ? parse_field(c.at("field"), on) : SpectralField::zero(on);
    d.eta = c.value("eta", 0.0);
    d.map = scalar_map_from_string(c.value("map", std::string("identity")));
    spec.diffusion.push_back(std::move(d));
  }
  return spec;
}

void check_driver(const DriverConfig& d) {
  if (!(d.hurst > 0.0 && d.hurst < 1.0)) throw ConfigError("driver.H must lie in (0, 1)");
  if (d.steps < 2 || (d.steps & (d.steps - 1)) != 0) throw ConfigError("driver.m must be a power of two");
  if (!(d.horizon > 0.0)) throw ConfigError("driver.T must be positive");
  if (!std::isfinite(d.scale)) throw ConfigError("driver.scale must be finite");
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"ex1-periodic", "ex2-dirichlet", "ex3-generic", "moments",
                                            "lyapunov",     "greedy-stats",  "convergence"};
  return ids;
}

json default_config(const std::string& experiment) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  json c = ex1_defaults();
  c["experiment"] = experiment;
  if (experiment == "ex2-dirichlet") {
    c["problem"]["basis"] = "dirichlet";
    c["problem"]["zero_mean"] = false;
    c["problem"]["G"][0]["field"] = {{"constant", 0.5}, {"sin", {{1, 0.25}}}};
    c["problem"]["z0"] = {{"sin", {{1, 1.0}, {2, 0.5}}}};
  } else if (experiment == "ex3-generic") {
    c["problem"]["zero_mean"] = false;
    c["problem"]["F"]["poly"] = {0.0, 0.5, 0.0, -1.0};
    c["problem"]["G"] = json::array({{{"kind", "nemytskii"}, {"map", "sin"}, {"field", {{"constant", 0.5}}}}});
    c["problem"]["z0"] = {{"constant", 0.25}, {"cos", {{1, 1.0}}}};
  }
  return c;
}

SpectralField parse_field(const json& value, const BasisPtr& basis) {
  if (value.is_number()) {
    const double c = value.get<double>();
    return SpectralField::from_function(basis, [c](double) { return c; });
  }
  if (!value.is_object()) throw ConfigError("field must be a number or an object");
  for (const auto& [key, _] : value.items()) {
    if (key != "constant" && key != "cos" && key != "sin" && key != "coefficients") {
      throw ConfigError("field: unknown key '" + key + "'");
    }
  }
  const double base = basis->kind() == BasisKind::periodic ? 2.0 * std::numbers::pi : std::numbers::pi;
  const double wave = base / basis->length();
  const double constant = value.value("constant", 0.0);
  std::vector<std::pair<double, double>> cosines, sines;
  if (value.contains("cos")) {
    for (const json& t : value.at("cos")) cosines.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
  }
  if (value.contains("sin")) {
    for (const json& t : value.at("sin")) sines.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
  }
  SpectralField field = SpectralField::from_function(basis, [&](double x) {
    double v = constant;
    for (const auto& [k, a] : cosines) v += a * std::cos(k * wave * x);
    for (const auto& [k, a] : sines) v += a * std::sin(k * wave * x);
    return v;
  });
  if (value.contains("coefficients")) {
    for (const json& t : value.at("coefficients")) {
      const int k = t.at(0).get<int>();
      const double re = t.at(1).get<double>();
      const double im = t.size() > 2 ? t.at(2).get<double>() : 0.0;
      if (basis->kind() == BasisKind::dirichlet) {
        const long d = basis->dof_of(k, true);
        if (d < 0) throw ConfigError("field: wavenumber " + std::to_string(k) + " not in basis");
        field.coeffs()(d) += re / std::numbers::sqrt2;
      } else if (k == 0) {
        const long d = basis->dof_of(0, false);
        if (d < 0) throw ConfigError("field: the basis has no mean mode");
        field.coeffs()(d) += re;
      } else {
        const long dc = basis->dof_of(k, false);
        const long ds = basis->dof_of(k, true);
        if (dc < 0 || ds < 0) throw ConfigError("field: wavenumber " + std::to_string(k) + " not in basis");
        field.coeffs()(dc) += std::numbers::sqrt2 * re;
        field.coeffs()(ds) -= std::numbers::sqrt2 * im;
      }
    }
  }
  return field;
}

ExperimentConfig load_config(const json& user) {
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  const std::string id = user.value("experiment", std::string("ex1-periodic"));
  json merged = default_config(id);
  merged.merge_patch(user);
  if (!user.contains("seed")) throw ConfigError("missing key 'seed' (seeds are mandatory)");

  ExperimentConfig c;
  c.experiment = id;
  c.seed = get<std::uint64_t>(merged, "seed");
  c.output = get<std::string>(merged, "output");
  c.replicates = get_count(merged, "replicates");
  c.threads = std::max<std::size_t>(1, get_count(merged, "threads"));

  const json& p = merged.at("problem");
  c.problem = parse_problem(p);
  c.z0 = parse_field(p.at("z0"), c.problem.basis);

  const json& d = merged.at("driver");
  c.driver.hurst = get<double>(d, "H");
  c.driver.steps = get_count(d, "m");
  c.driver.horizon = get<double>(d, "T");
  c.driver.scale = d.value("scale", 1.0);
  c.driver.channels = c.problem.diffusion.size();
  c.driver.seed = c.seed;
  check_driver(c.driver);

  const json& s = merged.at("solver");
  c.solver.chi = get<double>(s, "chi");
  c.solver.epsilon = get<double>(s, "epsilon");
  c.solver.tol = get<double>(s, "tol");
  c.solver.max_iterations = get_count(s, "max_iterations");
  c.solver.min_steps = std::max<std::size_t>(1, get_count(s, "min_steps"));
  c.solver.ceiling = get<double>(s, "ceiling");
  c.solver.dnorm_max_steps = get_count(s, "dnorm_max_steps");
  c.solver.greedy = get<bool>(s, "greedy");
  c.solver.checkpoints = get_count(s, "checkpoints");
  if (!(c.solver.chi > 0.0)) throw ConfigError("solver.chi must be positive");

  const json& l = merged.at("lyapunov");
  c.lyapunov.t0 = get<double>(l, "t0");
  c.lyapunov.windows = get_count(l, "windows");
  c.lyapunov.K = get_count(l, "K");
  c.lyapunov.frame_seed = get<std::uint64_t>(l, "frame_seed");

  const json& st = merged.at("stability");
  c.stability.rho = get<double>(st, "rho");
  c.stability.paths = get_count(st, "paths");
  c.stability.fit_start = get<double>(st, "fit_start");

  const json& sd = merged.at("stable_directions");
  c.stable_directions = get<bool>(sd, "enabled");
  c.stable.t0 = get<double>(sd, "t0");
  c.stable.windows = get_count(sd, "windows");
  c.stable.upsilon = get<double>(sd, "upsilon");
  c.stable.magnitudes = get<std::vector<double>>(sd, "magnitudes");
  c.stable.cap = get<double>(sd, "cap");
  c.stable.j0 = get<long>(sd, "j0");

  const json& m = merged.at("moments");
  c.moments.replicates = c.replicates;
  c.moments.p = get<std::vector<double>>(m, "p");
  c.moments.gamma_prime = get<double>(m, "gamma_prime");
  c.moments.bootstrap = get_count(m, "bootstrap");
  c.moments.level = get<double>(m, "level");
  c.moments.dnorm_max_steps = get_count(m, "dnorm_max_steps");

  c.convergence_levels = get_count(merged.at("convergence"), "levels");
  c.effective = merged;
  return c;
}

std::vector<Violation> validate_config(const json& user) {
  std::vector<Violation> out;
  try {
    if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
    json merged = default_config(user.value("experiment", std::string("ex1-periodic")));
    merged.merge_patch(user);
    out = validate(parse_problem(merged.at("problem")));
    load_config(user);
  } catch (const ConfigError& e) {
    out.push_back({"config", e.what()});
  } catch (const json::exception& e) {
    out.push_back({"config", e.what()});
  }
  return out;
}

}  // namespace rspde
