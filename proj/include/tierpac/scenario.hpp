#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tierpac/model.hpp"

namespace tierpac {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class CellShape { Rectangle, Disk, Hexagon };
std::string_view to_string(CellShape s);
CellShape cell_shape_from_string(std::string_view s);

/// Where a cell's users are dropped.
enum class UserPlacement {
  Cell,     // uniformly inside the cell geometry
  Area,     // uniformly over the whole scenario area
  Voronoi,  // uniformly over the area points closest to the serving BS
};
std::string_view to_string(UserPlacement p);
UserPlacement user_placement_from_string(std::string_view s);

struct CellSpec {
  std::string name;
  std::size_t tier = 0;
  CellShape shape = CellShape::Disk;
  Point center;
  double width = 0.0;   // rectangle
  double height = 0.0;  // rectangle
  double radius = 0.0;  // disk radius or hexagon circumradius (flat sides left/right)
  std::optional<Point> bs_position;  // defaults to the cell center
  double bs_height = 20.0;
  /// When set, the cell center is redrawn uniformly inside this parent cell
  /// on every snapshot, with the whole cell kept inside the parent.
  std::optional<std::size_t> parent;

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

struct TierSpec {
  std::string name;
  int priority = 1;
  double mean_users_per_cell = 0.0;
  double user_max_power_w = 0.1;
  double bs_max_power_w = 1.0;
  std::vector<double> target_sinr_db;
  /// Indoor tiers use the indoor shadowing deviation on links whose other
  /// endpoint is outdoor.
  bool indoor = false;

  friend bool operator==(const TierSpec&, const TierSpec&) = default;
};

struct Rect {
  Point min;
  Point max;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct ScenarioSpec {
  std::string name;
  std::vector<TierSpec> tiers;
  std::vector<CellSpec> cells;
  UserPlacement placement = UserPlacement::Cell;
  std::optional<Rect> area;  // required for Area / Voronoi placement

  double carrier_hz = 1.9e9;
  double pathloss_exponent = 3.0;
  double reference_distance_m = 1.0;
  double shadowing_db = 4.0;
  double shadowing_indoor_db = 6.0;
  double noise_w = 5e-13;
  double user_height_m = 1.5;

  /// Tiers that receive `extra_users_per_tier` additional users on average,
  /// spread evenly across the tier's cells.
  std::vector<std::size_t> load_tiers;
  double extra_users_per_tier = 0.0;

  std::uint64_t seed = 1;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Throws std::invalid_argument on an unusable spec.
void validate(const ScenarioSpec& spec);

/// Expected initial number of users per tier.
std::vector<double> expected_users_per_tier(const ScenarioSpec& spec);

/// Mean user count for one cell, including the load-sweep share.
double mean_users_in_cell(const ScenarioSpec& spec, std::size_t cell);

using Rng = std::mt19937_64;

/// Independent per-snapshot seed derived from (master seed, snapshot index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct Position {
  Point xy;
  double height = 0.0;
};

/// Shadowing class of a link.
enum class LinkClass { Outdoor, IndoorOutdoor };

/// Linear path gain: free-space reference at d0, power-law decay with the
/// path-loss exponent beyond it, and log-normal shadowing.
double path_gain(const Position& tx, const Position& rx, LinkClass link, const ScenarioSpec& spec, Rng& rng);

/// Deterministic part of path_gain (no shadowing).
double mean_path_gain(double distance_m, const ScenarioSpec& spec);

bool contains(const CellSpec& cell, Point p);
bool inside_hexagon(Point center, double circumradius, Point p);

/// Geometry realised for one snapshot.
struct SnapshotLayout {
  std::vector<Point> cell_centers;
  std::vector<Point> bs_positions;
  std::vector<Point> user_positions;
  std::vector<std::size_t> user_cell;
};

struct Snapshot {
  NetworkTopology topology;
  SnapshotLayout layout;
};

/// Draws one topology: Poisson user counts per cell, uniform placement,
/// all uplink and downlink gains, targets drawn from each tier's set.
Snapshot sample_snapshot(const ScenarioSpec& spec, std::uint64_t seed);
inline NetworkTopology sample_topology(const ScenarioSpec& spec, std::uint64_t seed) {
  return sample_snapshot(spec, seed).topology;
}

struct ThreeTierOptions {
  double macro_bs_distance_m = 300.0;
  std::size_t picocells_per_macro = 3;
  std::size_t femtocells_per_macro = 5;
  double macro_users_per_cell = 10.0;
  double pico_users_per_cell = 2.0;
  double femto_users_per_cell = 2.0;
  std::vector<double> target_sinr_db = {-13.0, -19.0};
};

/// Two adjacent 1000 m x 1000 m macrocells with picocells and femtocells
/// dropped inside them.
ScenarioSpec build_three_tier(const ThreeTierOptions& options = {});

enum class FourCellVariant { Spread, NearServing };

struct TwoTierOptions {
  double bs_distance_m = 150.0;
  double primary_users_per_cell = 8.0;
  double secondary_users_per_cell = 8.0;
  std::optional<std::vector<double>> target_sinr_db;  // defaults depend on the layout
};

/// Primary/secondary network on a 1000 m x 1000 m area with two BSs each.
ScenarioSpec build_two_tier_4cell(FourCellVariant variant, const TwoTierOptions& options = {});

/// Seven hexagonal cells of radius 600 m; cells 1, 3, 5, 7 primary.
ScenarioSpec build_hex_7cell(const TwoTierOptions& options = {});

/// Builder lookup: three_tier, two_tier_a, two_tier_b, hex7.
ScenarioSpec scenario_by_name(std::string_view name);
std::vector<std::string> scenario_names();

}  // namespace tierpac
