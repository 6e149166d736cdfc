// tierpac: command-line front end for the feasibility checks, the removal
// algorithms and the Monte Carlo harness.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tierpac/feasibility.hpp"
#include "tierpac/harness.hpp"
#include "tierpac/io.hpp"
#include "tierpac/jpac.hpp"
#include "tierpac/scenario.hpp"

using namespace tierpac;

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;

struct ScenarioArgs {
  std::string scenario = "three_tier";
  std::string spec_file;

  ScenarioSpec resolve() const {
    ScenarioSpec base = scenario_by_name(scenario);
    if (spec_file.empty()) return base;
    return io::scenario_from_json(io::read_json_file(spec_file), std::move(base));
  }
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario builder")
      ->check(CLI::IsMember(scenario_names()))
      ->capture_default_str();
  cmd->add_option("--spec-file", args.spec_file, "JSON overrides applied on top of the scenario")
      ->check(CLI::ExistingFile);
}

struct ExperimentArgs {
  ScenarioArgs scenario;
  std::string algorithm = "mespa";
  std::string direction = "uplink";
  std::size_t snapshots = 200;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  bool timing = false;
  bool restrict_bs = false;
  bool noise_term = false;
  std::string param = "users";
  std::vector<double> values;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args) {
  add_scenario_flags(cmd, args.scenario);
  cmd->add_option("--algorithm", args.algorithm)->check(CLI::IsMember({"mespa", "mlspa", "oracle"}))->capture_default_str();
  cmd->add_option("--direction", args.direction)->check(CLI::IsMember({"uplink", "downlink"}))->capture_default_str();
  cmd->add_option("--snapshots", args.snapshots)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", args.seed)->capture_default_str();
  cmd->add_option("--out", args.out, "Output prefix for <out>.snapshots.csv and <out>.summary.csv");
  cmd->add_option("--workers", args.workers)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--timing", args.timing, "Record per-snapshot runtime (makes CSVs non-reproducible)");
  cmd->add_flag("--restrict-bs", args.restrict_bs, "Only remove users served by the candidate BS");
  cmd->add_flag("--downlink-noise-term", args.noise_term, "Include the effective-noise term in downlink MLSPA");
}

RunConfig make_config(const ExperimentArgs& args) {
  RunConfig config;
  config.scenario = args.scenario.scenario;
  config.spec = args.scenario.resolve();
  config.algorithm = algorithm_from_string(args.algorithm);
  config.direction = direction_from_string(args.direction);
  config.snapshots = args.snapshots;
  config.seed = args.seed;
  config.workers = args.workers;
  config.timing = args.timing;
  config.options.restrict_to_candidate_bs = args.restrict_bs;
  config.options.downlink_noise_term = args.noise_term;
  return config;
}

void print_summary(const OutageStats& stats, std::ostream& os) {
  os << std::setw(12) << "sweep" << std::setw(6) << "tier" << std::setw(6) << "prio" << std::setw(10) << "users"
     << std::setw(10) << "outage" << std::setw(10) << "solves" << '\n';
  os << std::fixed;
  for (const auto& s : stats.summary) {
    os << std::setprecision(2) << std::setw(12) << s.sweep_value << std::setw(6) << s.tier << std::setw(6)
       << s.priority << std::setw(10) << s.mean_total << std::setprecision(4) << std::setw(10) << s.mean_outage
       << std::setprecision(1) << std::setw(10) << s.mean_solves << '\n';
  }
  os << std::defaultfloat << "total solves " << stats.total_solves << ", " << std::setprecision(3)
     << stats.wall_seconds << " s\n";
}

int run_experiment_command(const RunConfig& config, const std::string& out) {
  const auto stats = run_experiment(config);
  if (!out.empty()) {
    write_csv_files(out, stats);
    std::cerr << "wrote " << out << ".snapshots.csv and " << out << ".summary.csv\n";
  }
  print_summary(stats, std::cout);
  return 0;
}

SinrAssignment parse_assignment(const NetworkTopology& topo, Direction d, const std::vector<std::size_t>& users,
                                bool given) {
  if (!given) return SinrAssignment::all(topo, d);
  for (std::size_t i : users) {
    if (i >= topo.num_users()) throw std::invalid_argument("user " + std::to_string(i) + " out of range");
  }
  return SinrAssignment::of(topo, d, users);
}

void print_vector(std::ostream& os, const char* label, const std::vector<double>& v) {
  os << label;
  for (double x : v) os << ' ' << x;
  os << '\n';
}

int feascheck(const NetworkTopology& topo, const SinrAssignment& assignment, const std::string& method, bool json) {
  const Direction d = assignment.direction();
  std::cout << std::setprecision(10);
  if (method == "reduced") {
    const auto report = check_reduced(topo, assignment);
    std::optional<PowerAllocation> powers;
    if (report.overall) powers = power_from_aggregates(topo, assignment, report);
    if (json) {
      auto j = io::report_to_json(report);
      if (powers) j["powers"] = io::allocation_to_json(*powers);
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << (report.overall ? "feasible" : "infeasible") << (report.singular ? " (singular)" : "") << '\n';
      if (!report.singular) {
        print_vector(std::cout, d == Direction::Uplink ? "aggregate" : "bs_power", report.aggregate);
        print_vector(std::cout, "bound", report.upper_bound);
        std::cout << "verdict";
        for (auto v : report.verdict_per_bs) std::cout << ' ' << to_string(v);
        std::cout << '\n';
      }
      if (powers) print_vector(std::cout, "power", powers->per_user);
    }
    return report.overall ? kExitFeasible : kExitInfeasible;
  }

  const auto solution = classic_power(topo, assignment);
  if (json) {
    io::Json j{{"direction", std::string(to_string(d))},
               {"overall", solution.feasible},
               {"singular", solution.singular}};
    if (!solution.singular) j["powers"] = io::allocation_to_json(solution.allocation);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << (solution.feasible ? "feasible" : "infeasible") << (solution.singular ? " (singular)" : "") << '\n';
    if (!solution.singular) {
      print_vector(std::cout, "power", solution.allocation.per_user);
      print_vector(std::cout, "bs_total", solution.allocation.per_bs_total);
    }
  }
  return solution.feasible ? kExitFeasible : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint power and admission control for multi-tier cellular networks"};
  app.require_subcommand(1);

  ExperimentArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo experiment at the scenario's nominal load");
  add_experiment_flags(run_cmd, run_args);

  ExperimentArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo experiment over a parameter sweep");
  add_experiment_flags(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--param", sweep_args.param, "Swept parameter")
      ->check(CLI::IsMember({"users", "gamma", "shadowing"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", sweep_args.values, "Comma-separated sweep values")->delimiter(',');

  std::string topo_file;
  std::string direction = "uplink";
  std::vector<std::size_t> admit_users;
  std::string method = "reduced";
  bool json = false;
  auto* feas_cmd = app.add_subcommand("feascheck", "Check feasibility of an admitted set (exit 0 feasible, 1 not)");
  feas_cmd->add_option("--topology", topo_file, "Topology JSON")->required();
  feas_cmd->add_option("--direction", direction)->check(CLI::IsMember({"uplink", "downlink"}))->capture_default_str();
  auto* admit_opt = feas_cmd->add_option("--admit", admit_users, "Comma-separated admitted users (default: all)")
                        ->delimiter(',');
  feas_cmd->add_option("--method", method)->check(CLI::IsMember({"classic", "reduced"}))->capture_default_str();
  feas_cmd->add_flag("--json", json);

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive maximum feasible set (at most 14 users)");
  oracle_cmd->add_option("--topology", topo_file, "Topology JSON")->required();
  oracle_cmd->add_option("--direction", direction)->check(CLI::IsMember({"uplink", "downlink"}))->capture_default_str();

  std::string algorithm = "mespa";
  bool restrict_bs = false;
  bool noise_term = false;
  auto* admit_cmd = app.add_subcommand("admit", "Run one removal algorithm on a topology and print its trace");
  admit_cmd->add_option("--topology", topo_file, "Topology JSON")->required();
  admit_cmd->add_option("--direction", direction)->check(CLI::IsMember({"uplink", "downlink"}))->capture_default_str();
  admit_cmd->add_option("--algorithm", algorithm)->check(CLI::IsMember({"mespa", "mlspa"}))->capture_default_str();
  admit_cmd->add_flag("--restrict-bs", restrict_bs);
  admit_cmd->add_flag("--downlink-noise-term", noise_term);

  ScenarioArgs topo_scenario;
  std::uint64_t seed = 1;
  std::size_t snapshot = 0;
  std::string out;
  auto* topo_cmd = app.add_subcommand("topology", "Sample one snapshot and write its topology JSON");
  add_scenario_flags(topo_cmd, topo_scenario);
  topo_cmd->add_option("--seed", seed)->capture_default_str();
  topo_cmd->add_option("--snapshot", snapshot, "Snapshot index within the seed")->capture_default_str();
  topo_cmd->add_option("--out", out, "Output file (default: stdout)");

  ScenarioArgs spec_scenario;
  auto* spec_cmd = app.add_subcommand("spec", "Print a scenario spec as JSON");
  add_scenario_flags(spec_cmd, spec_scenario);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*run_cmd) return run_experiment_command(make_config(run_args), run_args.out);

    if (*sweep_cmd) {
      RunConfig config = make_config(sweep_args);
      config.sweep.parameter = sweep_parameter_from_string(sweep_args.param);
      config.sweep.values =
          sweep_args.values.empty() ? default_sweep_values(config.sweep.parameter) : sweep_args.values;
      return run_experiment_command(config, sweep_args.out);
    }

    if (*feas_cmd) {
      const auto topo = io::topology_from_json(io::read_json_file(topo_file));
      const auto assignment = parse_assignment(topo, direction_from_string(direction), admit_users, admit_opt->count() > 0);
      return feascheck(topo, assignment, method, json);
    }

    if (*oracle_cmd) {
      const auto topo = io::topology_from_json(io::read_json_file(topo_file));
      std::cout << io::oracle_to_json(brute_force_oracle(topo, direction_from_string(direction))).dump(2) << '\n';
      return 0;
    }

    if (*admit_cmd) {
      const auto topo = io::topology_from_json(io::read_json_file(topo_file));
      JpacOptions options{restrict_bs, noise_term};
      const Direction d = direction_from_string(direction);
      const auto trace = algorithm == "mespa" ? run_mespa(topo, d, options) : run_mlspa(topo, d, options);
      std::cout << io::trace_to_json(trace).dump(2) << '\n';
      return 0;
    }

    if (*topo_cmd) {
      const auto spec = topo_scenario.resolve();
      const auto topo = sample_topology(spec, derive_seed(seed, snapshot));
      const auto j = io::topology_to_json(topo);
      if (out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        io::write_json_file(out, j);
      }
      return 0;
    }

    if (*spec_cmd) {
      std::cout << io::scenario_to_json(spec_scenario.resolve()).dump(2) << '\n';
      return 0;
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
