#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tierpac/feasibility.hpp"
#include "tierpac/jpac.hpp"
#include "tierpac/model.hpp"
#include "tierpac/scenario.hpp"

namespace tierpac::io {

using Json = nlohmann::json;

/// Topology document. Gains are written as nested row-major arrays
/// (uplink_gain is B rows of M, downlink_gain M rows of B); a flat
/// row-major array is also accepted on input. Targets may be given in dB
/// via target_sinr_up_db / target_sinr_down_db.
Json topology_to_json(const NetworkTopology& topo);
NetworkTopology topology_from_json(const Json& j);

Json scenario_to_json(const ScenarioSpec& spec);
/// Missing keys keep the values of `base`.
ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec base = {});

Json report_to_json(const FeasibilityReport& report);
Json allocation_to_json(const PowerAllocation& alloc);
Json trace_to_json(const RemovalTrace& trace);
Json oracle_to_json(const OracleResult& result);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace tierpac::io
