#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rspde/config.hpp"
#include "rspde/errors.hpp"
#include "rspde/io.hpp"

#ifndef RSPDE_VERSION
#define RSPDE_VERSION "0.1.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rspde;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> replicates;
  std::string input;
};

/// Runs fn(0..n-1) on a pool; results land at their own index so the
/// reduction order never depends on scheduling. The first failure by index
/// is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

json read_user_config(const Options& opt, const std::string& command) {
  json user = json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw ConfigError("cannot open config '" + opt.config + "'");
    try {
      user = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config '" + opt.config + "': " + e.what());
    }
  }
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!user.contains("experiment")) {
    if (command == "moments" || command == "lyapunov" || command == "greedy-stats" || command == "convergence") {
      user["experiment"] = command;
    }
  }
  if (opt.seed) user["seed"] = *opt.seed;
  if (opt.out) user["output"] = *opt.out;
  if (opt.threads) user["threads"] = *opt.threads;
  if (opt.replicates) user["replicates"] = *opt.replicates;
  return user;
}

json violations_json(const std::vector<Violation>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"constraint", x.constraint}, {"message", x.message}});
  return out;
}

class Run {
 public:
  Run(std::string command, ExperimentConfig config)
      : command_(std::move(command)), config_(std::move(config)), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(config_.output);
  }

  const ExperimentConfig& config() const { return config_; }
  std::string file(const std::string& name) {
    outputs_.push_back(name);
    return (fs::path(config_.output) / name).string();
  }

  void finish(const json& summary) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest;
    manifest["command"] = command_;
    manifest["version"] = RSPDE_VERSION;
    manifest["config"] = config_.effective;
    manifest["outputs"] = outputs_;
    manifest["summary"] = summary;
    manifest["wall_time_seconds"] = wall;
    write_json(manifest, (fs::path(config_.output) / "manifest.json").string());
    std::cout << summary.dump(2) << "\n";
  }

 private:
  std::string command_;
  ExperimentConfig config_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

void write_residuals(const MildSolution& s, const RoughPath& rough, const std::string& file) {
  std::ofstream out(file);
  out << "index,t,residual\n";
  for (const auto& [j, r] : s.residuals) out << j << "," << format_double(rough.time(j)) << "," << format_double(r) << "\n";
}

json cmd_sample(Run& run, const Options& opt) {
  const Driver driver(run.config().driver);
  const std::size_t count = opt.replicates.value_or(1);
  for (std::size_t r = 0; r < count; ++r) {
    write_path_csv(driver.path(r), run.file("path_" + std::to_string(r) + ".csv"));
  }
  return {{"paths", count}, {"steps", run.config().driver.steps}, {"hurst", run.config().driver.hurst}};
}

json cmd_lift(Run& run, const Options& opt) {
  RoughPath rough;
  if (!opt.input.empty()) {
    rough = lift_piecewise_linear(read_path_csv(opt.input, run.config().seed));
  } else {
    rough = Driver(run.config().driver).rough(0);
  }
  write_path_csv(rough.base(), run.file("path.csv"));
  write_levy_csv(rough, run.file("levy.csv"));
  write_rough_binary(rough, run.file("rough.rpg"));
  double worst = 0.0;
  const std::size_t m = rough.steps();
  if (m >= 2) worst = chen_defect(rough, 0, m / 2, m);
  return {{"steps", m}, {"channels", rough.channels()}, {"chen_defect_midpoint", worst}};
}

json cmd_solve(Run& run, const Options&) {
  const auto& c = run.config();
  const Problem problem(c.problem);
  const RoughPath rough = Driver(c.driver).rough(0);
  const MildSolution sol = solve_mild(problem, rough, c.z0, {0, rough.steps()}, c.solver);
  write_field_csv(c.z0, run.file("z0.csv"));
  write_trajectory_csv(sol.trajectory, rough, run.file("trajectory.csv"));
  write_residuals(sol, rough, run.file("residuals.csv"));
  const BoundReport bound = apriori_bound(sol, rough, c.solver);
  write_json(to_json(bound), run.file("bound.json"));
  double worst = 0.0;
  for (const auto& [j, r] : sol.residuals) worst = std::max(worst, r);
  return {{"experiment", c.experiment},
          {"greedy_points", sol.partition.count()},
          {"sup_norm", sup_norm(sol)},
          {"max_residual", worst},
          {"bound_holds", bound.holds}};
}

json cmd_lyapunov(Run& run, const Options&) {
  const auto& c = run.config();
  const Problem problem(c.problem);
  const Driver driver(c.driver);
  const LyapunovReport rep = lyapunov_spectrum(problem, driver, c.lyapunov);
  write_json(to_json(rep), run.file("lyapunov.json"));
  json summary{{"lambdas", rep.lambdas}, {"ci", rep.ci}};
  if (c.stability.paths > 0) {
    auto records = parallel_map<DecayRecord>(c.stability.paths, c.threads, [&](std::size_t p) {
      return stability_path(problem, driver, c.solver, c.stability.rho, p, c.stability.fit_start);
    });
    write_decay_csv(records, run.file("decay.csv"));
    const StabilityReport st = summarize_stability(std::move(records));
    summary["decay_fraction"] = st.decay_fraction;
    summary["median_rate"] = st.median_rate;
  }
  if (c.stable_directions) {
    const StableDirectionReport sd = stable_direction_check(problem, driver.rough(0), c.solver, c.stable);
    write_json(to_json(sd), run.file("stable_directions.json"));
    summary["stable_direction_largest_passing"] = sd.largest_passing;
  }
  return summary;
}

json cmd_moments(Run& run, const Options&) {
  const auto& c = run.config();
  const Problem problem(c.problem);
  const Driver driver(c.driver);
  if (c.replicates < 100) throw ConfigError("moments: at least 100 replicates are required");
  const auto samples = parallel_map<MomentSample>(c.replicates, c.threads, [&](std::size_t r) {
    return moment_replicate(problem, driver, c.solver, c.z0, c.moments, r);
  });
  {
    std::ofstream out(run.file("samples.csv"));
    out << "replicate,dnorm,sup,N\n";
    for (const auto& s : samples) {
      out << s.replicate << "," << format_double(s.dnorm) << "," << format_double(s.sup) << "," << s.N << "\n";
    }
  }
  MomentTable table = summarize_moments(samples, c.moments, c.seed);
  table.epsilon = moment_epsilon(problem.gamma(), c.moments.gamma_prime, problem.eta(),
                                 c.solver.resolved_epsilon(problem.gamma(), problem.eta()));
  {
    std::ofstream out(run.file("moments.csv"));
    out << "p,estimate,ci_low,ci_high\n";
    for (const auto& m : table.moments) {
      out << format_double(m.p) << "," << format_double(m.estimate) << "," << format_double(m.ci.low) << ","
          << format_double(m.ci.high) << "\n";
    }
  }
  write_json(to_json(table), run.file("moments.json"));
  return {{"replicates", samples.size()}, {"tail_exponent", table.survival.exponent},
          {"epsilon", table.epsilon.epsilon}, {"epsilon_reduced", table.epsilon.reduced}};
}

json cmd_greedy_stats(Run& run, const Options&) {
  const auto& c = run.config();
  const Problem problem(c.problem);
  const Driver driver(c.driver);
  const EpsilonChoice eps = moment_epsilon(problem.gamma(), c.moments.gamma_prime, problem.eta(),
                                           c.solver.resolved_epsilon(problem.gamma(), problem.eta()));
  const double eta1 = problem.eta() + eps.epsilon;
  const auto counts = parallel_map<std::size_t>(c.replicates, c.threads, [&](std::size_t r) {
    return greedy_count(driver, problem.gamma(), eta1, c.solver.chi, r);
  });
  {
    std::ofstream out(run.file("counts.csv"));
    out << "replicate,N\n";
    for (std::size_t r = 0; r < counts.size(); ++r) out << r << "," << counts[r] << "\n";
  }
  const SurvivalFit fit = survival_fit(counts, c.moments.bootstrap, c.moments.level, c.seed);
  {
    std::ofstream out(run.file("survival.csv"));
    out << "n,survival\n";
    for (const auto& s : fit.table) out << s.n << "," << format_double(s.survival) << "\n";
  }
  json j{{"eta1", eta1},
         {"epsilon_reduced", eps.reduced},
         {"tail_exponent", fit.exponent},
         {"tail_ci", {fit.ci.low, fit.ci.high}},
         {"fit_points", fit.points}};
  write_json(j, run.file("greedy_stats.json"));
  return j;
}

json cmd_convergence(Run& run, const Options&) {
  const auto& c = run.config();
  const Problem problem(c.problem);
  const ConvergenceReport rep =
      convergence_study(problem, Driver(c.driver), c.solver, c.z0, c.convergence_levels);
  {
    std::ofstream out(run.file("convergence.csv"));
    out << "steps,sup,terminal_error,sup_error\n";
    for (const auto& r : rep.rows) {
      out << r.steps << "," << format_double(r.sup) << "," << format_double(r.terminal_error) << ","
          << format_double(r.sup_error) << "\n";
    }
  }
  write_json(to_json(rep), run.file("convergence.json"));
  return {{"observed_order", rep.observed_order}};
}

void report_error(const std::string& kind, const std::string& message, const json& violations,
                  const std::optional<std::string>& dir) {
  json err{{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!violations.empty()) err["violations"] = violations;
  std::cerr << err.dump(2) << "\n";
  if (dir) {
    std::error_code ec;
    fs::create_directories(*dir, ec);
    std::ofstream out(fs::path(*dir) / "error.json");
    if (out) out << err.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough semilinear SPDE experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 1;
  std::size_t replicates = 0;
  app.add_option("--config", opt.config, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* rep_opt = app.add_option("--replicates", replicates, "Monte Carlo replicates");
  app.set_version_flag("--version", RSPDE_VERSION);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "Sample fBm driver paths"},
      {"lift", "Lift a driver to a rough path (--input path.csv or a sampled driver)"},
      {"solve", "Solve the configured example and report the a priori bound"},
      {"lyapunov", "Lyapunov spectrum along Y = 0, optional stability probe"},
      {"moments", "Monte Carlo moments of the solution norm and greedy-count tail"},
      {"greedy-stats", "Greedy-point counts and survival fit"},
      {"convergence", "Grid refinement study"},
      {"validate", "List violated parameter inequalities"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) subs.push_back(app.add_subcommand(name, help));
  subs[1]->add_option("--input", opt.input, "Path CSV (t,x_1..x_n) to lift");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.out = out;
  if (*threads_opt) opt.threads = threads;
  if (*rep_opt) opt.replicates = replicates;

  std::string command;
  for (auto* s : subs) {
    if (s->parsed()) command = s->get_name();
  }

  std::optional<std::string> dir = opt.out;
  try {
    const json user = read_user_config(opt, command);
    if (!dir && user.contains("output") && user["output"].is_string()) dir = user["output"].get<std::string>();
    const auto violations = validate_config(user);
    if (command == "validate") {
      json rep{{"valid", violations.empty()}, {"violations", violations_json(violations)}};
      if (violations.empty()) {
        const GrowthDegrees g = growth_degrees(load_config(user).problem);
        rep["growth_degrees"] = {{"drift", g.drift}, {"noise", g.noise}};
      }
      std::cout << rep.dump(2) << "\n";
      return violations.empty() ? kOk : kConfigError;
    }
    if (!violations.empty()) {
      report_error("config", "configuration violates " + std::to_string(violations.size()) + " constraint(s)",
                   violations_json(violations), dir);
      return kConfigError;
    }
    ExperimentConfig config = load_config(user);
    dir = config.output;
    Run run(command, std::move(config));
    json summary;
    if (command == "sample") summary = cmd_sample(run, opt);
    else if (command == "lift") summary = cmd_lift(run, opt);
    else if (command == "solve") summary = cmd_solve(run, opt);
    else if (command == "lyapunov") summary = cmd_lyapunov(run, opt);
    else if (command == "moments") summary = cmd_moments(run, opt);
    else if (command == "greedy-stats") summary = cmd_greedy_stats(run, opt);
    else if (command == "convergence") summary = cmd_convergence(run, opt);
    run.finish(summary);
    return kOk;
  } catch (const ConfigError& e) {
    report_error("config", std::string(command) + ": " + e.what(), json::array(), dir);
    return kConfigError;
  } catch (const NumericalError& e) {
    report_error("numerical", std::string(command) + ": " + e.what(), json::array(), dir);
    return kNumericalError;
  } catch (const std::exception& e) {
    report_error("internal", std::string(command) + ": " + e.what(), json::array(), dir);
    return 1;
  }
}
