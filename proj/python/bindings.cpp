#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tierpac/feasibility.hpp"
#include "tierpac/harness.hpp"
#include "tierpac/io.hpp"
#include "tierpac/jpac.hpp"
#include "tierpac/scenario.hpp"

namespace py = pybind11;
using namespace tierpac;

namespace {

// Everything crosses the boundary as JSON text; the Python side decodes it.

NetworkTopology parse_topology(const std::string& text) { return io::topology_from_json(io::Json::parse(text)); }

SinrAssignment assignment(const NetworkTopology& topo, Direction d, const std::optional<std::vector<std::size_t>>& admit) {
  if (!admit) return SinrAssignment::all(topo, d);
  for (std::size_t i : *admit) {
    if (i >= topo.num_users()) throw py::index_error("user " + std::to_string(i) + " out of range");
  }
  return SinrAssignment::of(topo, d, *admit);
}

std::string check(const std::string& topology, const std::string& direction,
                  const std::optional<std::vector<std::size_t>>& admit, const std::string& method) {
  const auto topo = parse_topology(topology);
  const auto a = assignment(topo, direction_from_string(direction), admit);
  if (method == "reduced") {
    const auto report = check_reduced(topo, a);
    auto j = io::report_to_json(report);
    if (report.overall) j["powers"] = io::allocation_to_json(power_from_aggregates(topo, a, report));
    return j.dump();
  }
  if (method != "classic") throw py::value_error("method must be 'reduced' or 'classic'");
  const auto s = classic_power(topo, a);
  io::Json j{{"direction", direction}, {"overall", s.feasible}, {"singular", s.singular}};
  if (!s.singular) j["powers"] = io::allocation_to_json(s.allocation);
  return j.dump();
}

std::string admit(const std::string& topology, const std::string& algorithm, const std::string& direction,
                  bool restrict_bs, bool noise_term) {
  const auto topo = parse_topology(topology);
  const Direction d = direction_from_string(direction);
  const JpacOptions options{.restrict_to_candidate_bs = restrict_bs, .downlink_noise_term = noise_term};
  switch (algorithm_from_string(algorithm)) {
    case Algorithm::Mespa: return io::trace_to_json(run_mespa(topo, d, options)).dump();
    case Algorithm::Mlspa: return io::trace_to_json(run_mlspa(topo, d, options)).dump();
    case Algorithm::Oracle: return io::oracle_to_json(brute_force_oracle(topo, d)).dump();
  }
  return {};
}

std::string scenario_spec(const std::string& name) { return io::scenario_to_json(scenario_by_name(name)).dump(); }

ScenarioSpec resolve_spec(const std::string& scenario, const std::optional<std::string>& overrides) {
  auto spec = scenario_by_name(scenario);
  if (overrides) spec = io::scenario_from_json(io::Json::parse(*overrides), spec);
  return spec;
}

std::string sample(const std::string& scenario, std::uint64_t seed, std::uint64_t snapshot,
                   const std::optional<std::string>& overrides) {
  const auto spec = resolve_spec(scenario, overrides);
  return io::topology_to_json(sample_topology(spec, derive_seed(seed, snapshot))).dump();
}

py::dict experiment(const std::string& scenario, const std::string& algorithm, const std::string& direction,
                    std::size_t snapshots, std::uint64_t seed, const std::string& parameter,
                    const std::optional<std::vector<double>>& values, std::size_t workers,
                    const std::optional<std::string>& overrides) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.spec = resolve_spec(scenario, overrides);
  cfg.algorithm = algorithm_from_string(algorithm);
  cfg.direction = direction_from_string(direction);
  cfg.snapshots = snapshots;
  cfg.seed = seed;
  cfg.sweep.parameter = sweep_parameter_from_string(parameter);
  cfg.sweep.values = values ? *values
                     : cfg.sweep.parameter == SweepParameter::None ? std::vector<double>{0.0}
                                                                   : default_sweep_values(cfg.sweep.parameter);
  cfg.workers = workers;
  OutageStats stats;
  {
    py::gil_scoped_release release;
    stats = run_experiment(cfg);
  }
  std::ostringstream snap;
  std::ostringstream summary;
  write_snapshot_csv(snap, stats);
  write_summary_csv(summary, stats);
  py::dict out;
  out["snapshots_csv"] = snap.str();
  out["summary_csv"] = summary.str();
  out["total_solves"] = stats.total_solves;
  out["wall_seconds"] = stats.wall_seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint power and admission control for multi-tier cellular networks";

  py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def("check", &check, py::arg("topology"), py::arg("direction") = "uplink", py::arg("admit") = py::none(),
        py::arg("method") = "reduced");
  m.def("admit", &admit, py::arg("topology"), py::arg("algorithm") = "mespa", py::arg("direction") = "uplink",
        py::arg("restrict_bs") = false, py::arg("noise_term") = false);
  m.def("scenario_spec", &scenario_spec, py::arg("name"));
  m.def("scenario_names", &scenario_names);
  m.def("sample_topology", &sample, py::arg("scenario"), py::arg("seed") = 1, py::arg("snapshot") = 0,
        py::arg("overrides") = py::none());
  m.def("run_experiment", &experiment, py::arg("scenario") = "three_tier", py::arg("algorithm") = "mespa",
        py::arg("direction") = "uplink", py::arg("snapshots") = 200, py::arg("seed") = 1,
        py::arg("parameter") = "none", py::arg("values") = py::none(), py::arg("workers") = 1,
        py::arg("overrides") = py::none());
}
