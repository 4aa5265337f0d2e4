// defire: batch front door for degrade-and-fire population experiments.
// One JSON config in, deterministic CSV/JSON artifacts out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "defire/firing.hpp"
#include "defire/io.hpp"
#include "defire/params.hpp"
#include "defire/periodic.hpp"
#include "defire/profile.hpp"
#include "defire/spectral.hpp"
#include "defire/trace.hpp"
#include "defire/weak_coupling.hpp"

namespace fs = std::filesystem;
using defire::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool g_verbose = false;

void note(const std::string& message) {
  if (g_verbose) std::cerr << "defire: " << message << "\n";
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

template <typename T>
T require_field(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config missing required field: " + key);
  try {
    return config.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config field has the wrong type: " + key);
  }
}

template <typename T>
T field_or(const json& config, const std::string& key, T fallback) {
  if (!config.contains(key) || config.at(key).is_null()) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config field has the wrong type: " + key);
  }
}

defire::Params params_from(const json& config) {
  const json p = require_field<json>(config, "params");
  const double epsilon = require_field<double>(p, "epsilon");
  const double eta = require_field<double>(p, "eta");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta out of range");
  if (!(epsilon > 0.0 && epsilon < 1.0 / eta)) throw ConfigError("epsilon out of range");
  return defire::Params(epsilon, eta);
}

defire::StepProfile profile_from(const json& config, const defire::Params& params) {
  if (!config.contains("profile")) throw ConfigError("config missing required field: profile");
  defire::StepProfile profile;
  try {
    profile = defire::io::profile_from_json(config.at("profile"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad profile: ") + e.what());
  }
  const auto report = defire::validate_profile(profile, params);
  if (!report.ok()) throw ConfigError("invalid profile: " + report.message());
  return profile;
}

defire::Trace trace_from(const json& config) {
  if (!config.contains("trace")) throw ConfigError("config missing required field: trace");
  try {
    return defire::io::trace_from_json(config.at("trace"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad trace: ") + e.what());
  }
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("DEFIRE_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) n = static_cast<std::size_t>(parsed);
  }
  if (n < 1) n = 1;
  return std::min(n, jobs);
}

// Index-chunked fan-out; results land in caller-owned slots, so the output
// order never depends on scheduling. The first worker exception is rethrown
// on the orchestrator thread.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

fs::path out_path(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return fs::path(out_dir) / name;
}

int cmd_simulate(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const defire::StepProfile profile = profile_from(config, params);

  defire::SimulateOptions options;
  options.n_cycles = field_or<std::size_t>(config, "n_cycles", 100);
  options.tol = field_or<double>(config, "tol", 1e-12);
  options.stop_when_converged = field_or<bool>(config, "stop_when_converged", false);
  options.record_events = field_or<bool>(config, "record_events", false);
  options.repressor_samples = field_or<std::size_t>(config, "repressor_samples", 0);
  options.max_firings_per_cycle = field_or<std::size_t>(config, "max_firings_per_cycle", 1000000);
  if (options.n_cycles < 1) throw ConfigError("n_cycles must be >= 1");

  const defire::SimulationResult result = defire::simulate(profile, params, options);
  note("simulated " + std::to_string(result.cycles.size()) + " cycles");

  defire::io::write_file(out_path(out_dir, "cycles.csv").string(),
                         defire::io::cycles_csv(result));

  json summary{{"n_cycles", result.cycles.size()},
               {"converged", result.converged},
               {"merge_events", result.merge_event_count},
               {"total_firings", result.total_firings},
               {"branches_seen",
                [&] {
                  json seen = json::array();
                  if (result.branch_plus_seen) seen.push_back("plus");
                  if (result.branch_minus_seen) seen.push_back("minus");
                  return seen;
                }()},
               {"final_return_time", result.cycles.back().return_time},
               {"final_l1_delta", result.l1_deltas.back()},
               {"final_profile", defire::io::to_json(result.final_profile())}};
  if (options.repressor_samples > 0) {
    summary["min_sampled_repressor"] = result.min_sampled_repressor;
  }
  std::vector<std::string> warnings;
  for (const auto& cycle : result.cycles) {
    warnings.insert(warnings.end(), cycle.warnings.begin(), cycle.warnings.end());
  }
  summary["warnings"] = warnings;
  defire::io::write_file(out_path(out_dir, "summary.json").string(),
                         defire::io::dump(summary));

  if (options.record_events) {
    defire::io::write_file(out_path(out_dir, "events.json").string(),
                           defire::io::dump(defire::io::events_to_json(result.events)));
  }
  return kExitOk;
}

int cmd_periodic(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const defire::Trace trace = trace_from(config);

  const defire::ConstructOutcome outcome = defire::construct_periodic(trace, params);
  json j{{"exists", outcome.orbit.has_value()},
         {"ghost_candidate", outcome.ghost_candidate},
         {"bound", outcome.bound.bound},
         {"strict", outcome.bound.strict}};
  if (outcome.orbit) {
    j["orbit"] = defire::io::to_json(*outcome.orbit);
    j["fixed_point_residual"] = defire::verify_fixed_point(*outcome.orbit, params);
  } else {
    j["orbit"] = nullptr;
  }
  defire::io::write_file(out_path(out_dir, "orbit.json").string(), defire::io::dump(j));
  return kExitOk;
}

int cmd_scan(const json& config, const std::string& out_dir) {
  const defire::Trace trace = trace_from(config);
  const double eta = require_field<double>(config, "eta");
  const auto grid = require_field<std::vector<double>>(config, "grid");
  if (grid.empty()) throw ConfigError("grid must be non-empty");
  for (double eps : grid) {
    if (!(eta > 0.0 && eta < 1.0 && eps > 0.0 && eps < 1.0 / eta)) {
      throw ConfigError("grid value outside (0, 1/eta)");
    }
  }

  // Grid points are independent closed-form evaluations; fan them out.
  std::vector<defire::ScanRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const defire::ScanResult one = defire::scan_epsilon(trace, eta, {grid[i]});
    rows[i] = one.rows.front();
  });
  defire::ScanResult scan;
  scan.rows = std::move(rows);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    if (scan.rows[i - 1].exists != scan.rows[i].exists) {
      scan.transition_bracket = {scan.rows[i - 1].epsilon, scan.rows[i].epsilon};
      break;
    }
  }

  defire::io::write_file(out_path(out_dir, "scan.csv").string(), defire::io::scan_csv(scan));
  defire::io::write_file(out_path(out_dir, "scan.json").string(),
                         defire::io::dump(defire::io::to_json(scan)));
  return kExitOk;
}

defire::BranchSet branch_set_from(const json& config) {
  const std::string branches = field_or<std::string>(config, "branches", "both");
  if (branches == "both") return defire::BranchSet::both;
  if (branches == "plus") return defire::BranchSet::plus_only;
  if (branches == "minus") return defire::BranchSet::minus_only;
  throw ConfigError("branches must be one of: plus, minus, both");
}

int cmd_spectral(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const auto lengths = require_field<std::vector<double>>(config, "lengths");
  const std::size_t k = field_or<std::size_t>(config, "k", 8);
  const std::size_t trials = field_or<std::size_t>(config, "trials", 100);
  const std::uint64_t seed = field_or<std::uint64_t>(config, "seed", 1);
  const defire::BranchSet branches = branch_set_from(config);
  if (k < 1 || trials < 1) throw ConfigError("k and trials must be >= 1");

  defire::ContractionEstimate estimate;
  {
    const defire::RatioBound bound = defire::jsr_ratio_bound(lengths, params, branches);
    estimate.ratio_bound = bound.bound;
    estimate.flagged = bound.flagged;
  }

  // Trials derive their generator from seed + index, so chunked fan-out
  // reproduces the sequential output bit for bit.
  estimate.samples.resize(trials);
  const std::size_t chunk = 32;
  const std::size_t chunks = (trials + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t count = std::min(chunk, trials - begin);
    const auto part =
        defire::sample_product_radius(lengths, params, k, count, seed + begin, branches);
    for (std::size_t i = 0; i < count; ++i) estimate.samples[begin + i] = part[i];
  });

  // Optional empirical decay estimate against the constructed orbit.
  if (config.contains("profile")) {
    const defire::StepProfile profile = profile_from(config, params);
    defire::SimulateOptions options;
    options.n_cycles = field_or<std::size_t>(config, "n_cycles", 200);
    options.tol = 0.0;
    options.stop_when_converged = false;
    const defire::SimulationResult run = defire::simulate(profile, params, options);
    const auto orbit = defire::construct_periodic(defire::compute_traces(profile), params);
    if (orbit.orbit) {
      estimate.empirical_rho = defire::empirical_contraction(run.cycles, orbit.orbit->profile);
    }
  }

  defire::io::write_file(out_path(out_dir, "report.json").string(),
                         defire::io::dump(defire::io::to_json(estimate)));
  return kExitOk;
}

int cmd_weakcoupling(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const defire::StepProfile profile = profile_from(config, params);
  const double tol = field_or<double>(config, "tol", 1e-13);
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");

  const defire::NeumannResult result = defire::solve_T1_neumann(profile, params, tol);
  json j = defire::io::to_json(result.firing);
  j["iterations"] = result.iterations;
  j["mu_critical"] = defire::mu_critical();
  j["contraction_constant"] = defire::contraction_constant(params.mu());
  defire::io::write_file(out_path(out_dir, "firing_profile.json").string(),
                         defire::io::dump(j));
  return kExitOk;
}

int cmd_oracle_check(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const defire::StepProfile profile = profile_from(config, params);
  const double dt = field_or<double>(config, "dt", 1e-6);
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");

  const defire::FiringOutcome outcome = defire::first_firing(profile, params);
  const double oracle = defire::oracle_firing_time(profile, params, dt);
  json j{{"engine_time", outcome.firing_time},
         {"oracle_time", oracle},
         {"abs_diff", std::abs(outcome.firing_time - oracle)},
         {"dt", dt},
         {"merge_extent", outcome.merge_extent},
         {"branch", defire::to_string(outcome.branch)}};
  defire::io::write_file(out_path(out_dir, "oracle.json").string(), defire::io::dump(j));
  return kExitOk;
}

int cmd_demo_discontinuity(const json& config, const std::string& out_dir) {
  const defire::Params params = params_from(config);
  const double x1 = require_field<double>(config, "x1");
  const double base_level = require_field<double>(config, "base_level");
  const std::uint64_t n = field_or<std::uint64_t>(config, "n", 1000000);

  const defire::DiscontinuityDemo demo = defire::discontinuity_limit(x1, base_level, params, n);
  defire::io::write_file(out_path(out_dir, "discontinuity.json").string(),
                         defire::io::dump(defire::io::to_json(demo)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact event-driven simulation and analysis of globally coupled "
               "degrade-and-fire oscillator populations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  app.add_flag("--verbose", g_verbose, "Print progress notes to stderr");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const json&, const std::string&);
  };
  const Sub subs[] = {
      {"simulate", "Run full firing cycles, write cycles.csv and summary.json", cmd_simulate},
      {"periodic", "Construct the periodic profile for a trace, write orbit.json", cmd_periodic},
      {"scan", "Tabulate orbit existence across a coupling grid, write scan.csv", cmd_scan},
      {"spectral", "Companion-family ratio bound and sampled product radii", cmd_spectral},
      {"weakcoupling", "Solve the firing-time equation by fixed-point iteration", cmd_weakcoupling},
      {"oracle-check", "Cross-check a firing time against the marching oracle", cmd_oracle_check},
      {"demo-discontinuity", "First-firing discontinuity under plateau perturbations",
       cmd_demo_discontinuity},
  };
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--out", out_dir, "Output directory (default: current)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const json config = load_config(config_path);
    for (const Sub& sub : subs) {
      if (app.get_subcommand(sub.name)->parsed()) return sub.run(config, out_dir);
    }
    std::cerr << "defire: no subcommand selected\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "defire: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "defire: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "defire: error: " << e.what() << "\n";
    return kExitDomain;
  }
}
