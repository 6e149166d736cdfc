#include "tierpac/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tierpac::io {

namespace {

// JSON has no infinity; unbounded values are written as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_or_nulls(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

Json matrix_to_json(const numerics::Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

numerics::Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols, const char* name) {
  numerics::Matrix m(rows, cols);
  if (!j.is_array()) throw TopologyError(std::string(name) + " must be an array");
  const bool nested = !j.empty() && j.front().is_array();
  if (nested) {
    if (j.size() != rows) throw TopologyError(std::string(name) + ": expected " + std::to_string(rows) + " rows");
    for (std::size_t r = 0; r < rows; ++r) {
      if (j[r].size() != cols) {
        throw TopologyError(std::string(name) + ": row " + std::to_string(r) + " must have " + std::to_string(cols) +
                            " entries");
      }
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
  } else {
    if (j.size() != rows * cols) {
      throw TopologyError(std::string(name) + ": expected " + std::to_string(rows * cols) + " entries");
    }
    for (std::size_t k = 0; k < rows * cols; ++k) m(k / cols, k % cols) = j[k].get<double>();
  }
  return m;
}

std::vector<double> targets(const Json& j, const char* linear_key, const char* db_key) {
  if (j.contains(linear_key)) return j.at(linear_key).get<std::vector<double>>();
  if (j.contains(db_key)) {
    auto v = j.at(db_key).get<std::vector<double>>();
    for (double& x : v) x = db_to_linear(x);
    return v;
  }
  throw TopologyError(std::string("missing ") + linear_key);
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Json topology_to_json(const NetworkTopology& topo) {
  const auto& f = topo.fields();
  return Json{
      {"num_users", f.num_users},
      {"num_bs", f.num_bs},
      {"num_tiers", f.num_tiers},
      {"num_priorities", f.num_priorities},
      {"serving_bs", f.serving_bs},
      {"tier_of_bs", f.tier_of_bs},
      {"priority_of_tier", f.priority_of_tier},
      {"uplink_gain", matrix_to_json(f.uplink_gain)},
      {"downlink_gain", matrix_to_json(f.downlink_gain)},
      {"uplink_noise", f.uplink_noise},
      {"downlink_noise", f.downlink_noise},
      {"p_max", f.p_max},
      {"bs_p_max", f.bs_p_max},
      {"target_sinr_up", f.target_sinr_up},
      {"target_sinr_down", f.target_sinr_down},
  };
}

NetworkTopology topology_from_json(const Json& j) {
  try {
    TopologyFields f;
    f.num_users = j.at("num_users").get<std::size_t>();
    f.num_bs = j.at("num_bs").get<std::size_t>();
    f.num_tiers = j.at("num_tiers").get<std::size_t>();
    f.num_priorities = j.at("num_priorities").get<std::size_t>();
    f.serving_bs = j.at("serving_bs").get<std::vector<std::size_t>>();
    f.tier_of_bs = j.at("tier_of_bs").get<std::vector<std::size_t>>();
    f.priority_of_tier = j.at("priority_of_tier").get<std::vector<int>>();
    f.uplink_gain = matrix_from_json(j.at("uplink_gain"), f.num_bs, f.num_users, "uplink_gain");
    f.downlink_gain = matrix_from_json(j.at("downlink_gain"), f.num_users, f.num_bs, "downlink_gain");
    f.uplink_noise = j.at("uplink_noise").get<std::vector<double>>();
    f.downlink_noise = j.at("downlink_noise").get<std::vector<double>>();
    f.p_max = j.at("p_max").get<std::vector<double>>();
    f.bs_p_max = j.at("bs_p_max").get<std::vector<double>>();
    f.target_sinr_up = targets(j, "target_sinr_up", "target_sinr_up_db");
    f.target_sinr_down = targets(j, "target_sinr_down", "target_sinr_down_db");
    return NetworkTopology::build(std::move(f));
  } catch (const Json::exception& e) {
    throw TopologyError(std::string("malformed topology document: ") + e.what());
  }
}

namespace {

Json point_to_json(Point p) { return Json::array({p.x, p.y}); }
Point point_from_json(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

Json scenario_to_json(const ScenarioSpec& s) {
  Json tiers = Json::array();
  for (const auto& t : s.tiers) {
    tiers.push_back(Json{{"name", t.name},
                         {"priority", t.priority},
                         {"mean_users_per_cell", t.mean_users_per_cell},
                         {"user_max_power_w", t.user_max_power_w},
                         {"bs_max_power_w", t.bs_max_power_w},
                         {"target_sinr_db", t.target_sinr_db},
                         {"indoor", t.indoor}});
  }
  Json cells = Json::array();
  for (const auto& c : s.cells) {
    Json cell{{"name", c.name},
              {"tier", c.tier},
              {"shape", std::string(to_string(c.shape))},
              {"center", point_to_json(c.center)},
              {"bs_height", c.bs_height}};
    if (c.shape == CellShape::Rectangle) {
      cell["width"] = c.width;
      cell["height"] = c.height;
    } else {
      cell["radius"] = c.radius;
    }
    if (c.bs_position) cell["bs_position"] = point_to_json(*c.bs_position);
    if (c.parent) cell["parent"] = *c.parent;
    cells.push_back(std::move(cell));
  }
  Json j{{"name", s.name},
         {"tiers", tiers},
         {"cells", cells},
         {"placement", std::string(to_string(s.placement))},
         {"carrier_hz", s.carrier_hz},
         {"pathloss_exponent", s.pathloss_exponent},
         {"reference_distance_m", s.reference_distance_m},
         {"shadowing_db", s.shadowing_db},
         {"shadowing_indoor_db", s.shadowing_indoor_db},
         {"noise_w", s.noise_w},
         {"user_height_m", s.user_height_m},
         {"load_tiers", s.load_tiers},
         {"extra_users_per_tier", s.extra_users_per_tier},
         {"seed", s.seed}};
  if (s.area) j["area"] = Json{{"min", point_to_json(s.area->min)}, {"max", point_to_json(s.area->max)}};
  return j;
}

ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec s) {
  read_if(j, "name", s.name);
  if (j.contains("tiers")) {
    s.tiers.clear();
    for (const auto& t : j.at("tiers")) {
      TierSpec tier;
      read_if(t, "name", tier.name);
      read_if(t, "priority", tier.priority);
      read_if(t, "mean_users_per_cell", tier.mean_users_per_cell);
      read_if(t, "user_max_power_w", tier.user_max_power_w);
      read_if(t, "bs_max_power_w", tier.bs_max_power_w);
      read_if(t, "target_sinr_db", tier.target_sinr_db);
      read_if(t, "indoor", tier.indoor);
      s.tiers.push_back(std::move(tier));
    }
  }
  if (j.contains("cells")) {
    s.cells.clear();
    for (const auto& c : j.at("cells")) {
      CellSpec cell;
      read_if(c, "name", cell.name);
      read_if(c, "tier", cell.tier);
      if (c.contains("shape")) cell.shape = cell_shape_from_string(c.at("shape").get<std::string>());
      if (c.contains("center")) cell.center = point_from_json(c.at("center"));
      read_if(c, "width", cell.width);
      read_if(c, "height", cell.height);
      read_if(c, "radius", cell.radius);
      read_if(c, "bs_height", cell.bs_height);
      if (c.contains("bs_position")) cell.bs_position = point_from_json(c.at("bs_position"));
      if (c.contains("parent")) cell.parent = c.at("parent").get<std::size_t>();
      s.cells.push_back(std::move(cell));
    }
  }
  if (j.contains("placement")) s.placement = user_placement_from_string(j.at("placement").get<std::string>());
  if (j.contains("area")) {
    const auto& a = j.at("area");
    s.area = Rect{point_from_json(a.at("min")), point_from_json(a.at("max"))};
  }
  read_if(j, "carrier_hz", s.carrier_hz);
  read_if(j, "pathloss_exponent", s.pathloss_exponent);
  read_if(j, "reference_distance_m", s.reference_distance_m);
  read_if(j, "shadowing_db", s.shadowing_db);
  read_if(j, "shadowing_indoor_db", s.shadowing_indoor_db);
  read_if(j, "noise_w", s.noise_w);
  read_if(j, "user_height_m", s.user_height_m);
  read_if(j, "load_tiers", s.load_tiers);
  read_if(j, "extra_users_per_tier", s.extra_users_per_tier);
  read_if(j, "seed", s.seed);
  validate(s);
  return s;
}

Json report_to_json(const FeasibilityReport& r) {
  Json verdicts = Json::array();
  for (auto v : r.verdict_per_bs) verdicts.push_back(std::string(to_string(v)));
  return Json{{"direction", std::string(to_string(r.direction))},
              {"overall", r.overall},
              {"singular", r.singular},
              {"aggregate", vector_or_nulls(r.aggregate)},
              {"upper_bound", vector_or_nulls(r.upper_bound)},
              {"verdict_per_bs", verdicts}};
}

Json allocation_to_json(const PowerAllocation& a) {
  return Json{{"direction", std::string(to_string(a.direction))},
              {"per_user", a.per_user},
              {"per_bs_total", a.per_bs_total}};
}

Json trace_to_json(const RemovalTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back(Json{{"user", s.user},
                         {"candidate_bs", s.candidate_bs},
                         {"metric", number_or_null(s.metric)},
                         {"priority", s.priority},
                         {"candidates", s.candidates},
                         {"singular_fallback", s.singular_fallback}});
  }
  return Json{{"algorithm", std::string(to_string(t.algorithm))},
              {"direction", std::string(to_string(t.direction))},
              {"removals", steps},
              {"admitted", t.admitted.members()},
              {"solve_count", t.solve_count},
              {"powers", allocation_to_json(t.powers)},
              {"final_report", report_to_json(t.final_report)}};
}

Json oracle_to_json(const OracleResult& r) {
  return Json{{"optimum", r.optimum},
              {"admitted", r.best.members()},
              {"direction", std::string(to_string(r.best.direction()))},
              {"subsets_checked", r.subsets_checked},
              {"powers", allocation_to_json(r.powers)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace tierpac::io
