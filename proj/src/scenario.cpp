#include "tierpac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tierpac {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr std::size_t kMaxRejections = 100000;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument("scenario: " + message); }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct Box {
  Point min;
  Point max;
};

Box bounding_box(const CellSpec& cell, Point center) {
  switch (cell.shape) {
    case CellShape::Rectangle:
      return {{center.x - cell.width / 2, center.y - cell.height / 2},
              {center.x + cell.width / 2, center.y + cell.height / 2}};
    case CellShape::Disk:
      return {{center.x - cell.radius, center.y - cell.radius}, {center.x + cell.radius, center.y + cell.radius}};
    case CellShape::Hexagon: {
      const double half_width = cell.radius * std::numbers::sqrt3 / 2;
      return {{center.x - half_width, center.y - cell.radius}, {center.x + half_width, center.y + cell.radius}};
    }
  }
  return {};
}

bool contains_at(const CellSpec& cell, Point center, Point p) {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  switch (cell.shape) {
    case CellShape::Rectangle: return std::abs(dx) <= cell.width / 2 && std::abs(dy) <= cell.height / 2;
    case CellShape::Disk: return dx * dx + dy * dy <= cell.radius * cell.radius;
    case CellShape::Hexagon: return inside_hexagon(center, cell.radius, p);
  }
  return false;
}

Point sample_in_cell(const CellSpec& cell, Point center, Rng& rng) {
  const Box box = bounding_box(cell, center);
  if (cell.shape == CellShape::Rectangle) return {uniform(rng, box.min.x, box.max.x), uniform(rng, box.min.y, box.max.y)};
  for (std::size_t k = 0; k < kMaxRejections; ++k) {
    const Point p{uniform(rng, box.min.x, box.max.x), uniform(rng, box.min.y, box.max.y)};
    if (contains_at(cell, center, p)) return p;
  }
  fail("rejection sampling inside cell '" + cell.name + "' did not terminate");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t nearest_bs(const std::vector<Point>& bs, Point p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < bs.size(); ++k) {
    if (distance(bs[k], p) < distance(bs[best], p)) best = k;
  }
  return best;
}

}  // namespace

std::string_view to_string(CellShape s) {
  switch (s) {
    case CellShape::Rectangle: return "rectangle";
    case CellShape::Disk: return "disk";
    case CellShape::Hexagon: return "hexagon";
  }
  return "?";
}

CellShape cell_shape_from_string(std::string_view s) {
  if (s == "rectangle") return CellShape::Rectangle;
  if (s == "disk") return CellShape::Disk;
  if (s == "hexagon") return CellShape::Hexagon;
  fail("unknown cell shape '" + std::string(s) + "'");
}

std::string_view to_string(UserPlacement p) {
  switch (p) {
    case UserPlacement::Cell: return "cell";
    case UserPlacement::Area: return "area";
    case UserPlacement::Voronoi: return "voronoi";
  }
  return "?";
}

UserPlacement user_placement_from_string(std::string_view s) {
  if (s == "cell") return UserPlacement::Cell;
  if (s == "area") return UserPlacement::Area;
  if (s == "voronoi") return UserPlacement::Voronoi;
  fail("unknown user placement '" + std::string(s) + "'");
}

bool inside_hexagon(Point center, double circumradius, Point p) {
  const double ax = std::abs(p.x - center.x);
  const double ay = std::abs(p.y - center.y);
  return ax <= circumradius * std::numbers::sqrt3 / 2 && ay <= circumradius - ax / std::numbers::sqrt3;
}

bool contains(const CellSpec& cell, Point p) { return contains_at(cell, cell.center, p); }

void validate(const ScenarioSpec& spec) {
  if (spec.tiers.empty()) fail("at least one tier is required");
  if (spec.cells.empty()) fail("at least one cell is required");
  if (!(spec.pathloss_exponent > 2.0)) fail("path-loss exponent must exceed 2");
  if (!(spec.shadowing_db >= 0.0) || !(spec.shadowing_indoor_db >= 0.0)) fail("shadowing deviation must be >= 0");
  if (!(spec.carrier_hz > 0.0)) fail("carrier frequency must be positive");
  if (!(spec.reference_distance_m > 0.0)) fail("reference distance must be positive");
  if (!(spec.noise_w > 0.0)) fail("noise power must be positive");
  if (spec.placement != UserPlacement::Cell && !spec.area) fail("area placement needs an area");

  int max_priority = 0;
  std::vector<bool> used(spec.tiers.size() + 1, false);
  for (const auto& t : spec.tiers) {
    if (t.priority < 1 || static_cast<std::size_t>(t.priority) > spec.tiers.size()) {
      fail("tier '" + t.name + "' priority out of range");
    }
    used[t.priority] = true;
    max_priority = std::max(max_priority, t.priority);
    if (!(t.mean_users_per_cell >= 0.0)) fail("tier '" + t.name + "' has a negative intensity");
    if (!(t.user_max_power_w > 0.0) || !(t.bs_max_power_w > 0.0)) fail("tier '" + t.name + "' power caps must be positive");
    if (t.target_sinr_db.empty()) fail("tier '" + t.name + "' needs at least one target SINR");
  }
  for (int q = 1; q <= max_priority; ++q) {
    if (!used[q]) fail("priority levels must be contiguous from 1");
  }
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    const auto& cell = spec.cells[c];
    if (cell.tier >= spec.tiers.size()) fail("cell '" + cell.name + "' refers to a missing tier");
    if (cell.parent && *cell.parent >= c) fail("cell '" + cell.name + "' parent must precede it");
    const bool sized = cell.shape == CellShape::Rectangle ? (cell.width > 0 && cell.height > 0) : cell.radius > 0;
    if (!sized) fail("cell '" + cell.name + "' has no extent");
  }
  for (std::size_t t : spec.load_tiers) {
    if (t >= spec.tiers.size()) fail("load tier out of range");
  }
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    if (mean_users_in_cell(spec, c) < 0.0) fail("negative mean user count after load adjustment");
  }
}

double mean_users_in_cell(const ScenarioSpec& spec, std::size_t cell) {
  const std::size_t tier = spec.cells.at(cell).tier;
  double mean = spec.tiers.at(tier).mean_users_per_cell;
  if (std::find(spec.load_tiers.begin(), spec.load_tiers.end(), tier) != spec.load_tiers.end()) {
    const auto cells_in_tier = static_cast<double>(
        std::count_if(spec.cells.begin(), spec.cells.end(), [&](const CellSpec& c) { return c.tier == tier; }));
    mean += spec.extra_users_per_tier / cells_in_tier;
  }
  return mean;
}

std::vector<double> expected_users_per_tier(const ScenarioSpec& spec) {
  std::vector<double> out(spec.tiers.size(), 0.0);
  for (std::size_t c = 0; c < spec.cells.size(); ++c) out[spec.cells[c].tier] += mean_users_in_cell(spec, c);
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over a combination of both inputs
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mean_path_gain(double distance_m, const ScenarioSpec& spec) {
  const double d0 = spec.reference_distance_m;
  const double d = std::max(distance_m, d0);
  const double wavelength = kSpeedOfLight / spec.carrier_hz;
  const double reference = std::pow(wavelength / (4.0 * std::numbers::pi * d0), 2.0);
  return reference * std::pow(d / d0, -spec.pathloss_exponent);
}

double path_gain(const Position& tx, const Position& rx, LinkClass link, const ScenarioSpec& spec, Rng& rng) {
  const double dz = tx.height - rx.height;
  const double planar = distance(tx.xy, rx.xy);
  const double d = std::sqrt(planar * planar + dz * dz);
  const double sigma = link == LinkClass::IndoorOutdoor ? spec.shadowing_indoor_db : spec.shadowing_db;
  double shadow_db = 0.0;
  if (sigma > 0.0) shadow_db = std::normal_distribution<double>(0.0, sigma)(rng);
  return mean_path_gain(d, spec) * std::pow(10.0, shadow_db / 10.0);
}

namespace {

// Every random quantity comes from its own sub-stream keyed by what it
// describes, so the k-th user of a cell keeps its position, target and
// shadowing when another cell's load changes. Sweeps then compare like with
// like (common random numbers).
enum StreamTag : std::uint64_t { kLayoutStream = 1, kCountStream = 2, kUserStream = 3 };

Rng sub_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(derive_seed(derive_seed(derive_seed(seed, tag), a), b));
}

// Inversion sampling from a single uniform: a larger mean never yields a
// smaller count for the same uniform.
long poisson_count(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  if (mean > 500.0) return std::poisson_distribution<long>(mean)(rng);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double term = std::exp(-mean);
  double cdf = term;
  long k = 0;
  while (u > cdf && term > 0.0) {
    ++k;
    term *= mean / static_cast<double>(k);
    cdf += term;
  }
  return k;
}

}  // namespace

Snapshot sample_snapshot(const ScenarioSpec& spec, std::uint64_t seed) {
  validate(spec);
  const std::size_t C = spec.cells.size();

  SnapshotLayout layout;
  layout.cell_centers.resize(C);
  layout.bs_positions.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& cell = spec.cells[c];
    Point center = cell.center;
    if (cell.parent) {
      Rng rng = sub_stream(seed, kLayoutStream, c);
      const auto& parent = spec.cells[*cell.parent];
      const Point parent_center = layout.cell_centers[*cell.parent];
      const Box own = bounding_box(cell, {0.0, 0.0});
      bool placed = false;
      for (std::size_t k = 0; k < kMaxRejections && !placed; ++k) {
        center = sample_in_cell(parent, parent_center, rng);
        placed = contains_at(parent, parent_center, {center.x + own.min.x, center.y + own.min.y}) &&
                 contains_at(parent, parent_center, {center.x + own.max.x, center.y + own.max.y}) &&
                 contains_at(parent, parent_center, {center.x + own.min.x, center.y + own.max.y}) &&
                 contains_at(parent, parent_center, {center.x + own.max.x, center.y + own.min.y});
      }
      if (!placed) fail("cell '" + cell.name + "' does not fit inside its parent");
    }
    layout.cell_centers[c] = center;
    if (cell.bs_position && !cell.parent) {
      layout.bs_positions[c] = *cell.bs_position;
    } else if (cell.bs_position) {
      layout.bs_positions[c] = {center.x + cell.bs_position->x - cell.center.x,
                                center.y + cell.bs_position->y - cell.center.y};
    } else {
      layout.bs_positions[c] = center;
    }
  }

  const std::size_t B = C;
  TopologyFields f;
  f.num_bs = B;
  f.num_tiers = spec.tiers.size();
  f.num_priorities = 0;
  for (const auto& t : spec.tiers) {
    f.priority_of_tier.push_back(t.priority);
    f.num_priorities = std::max<std::size_t>(f.num_priorities, static_cast<std::size_t>(t.priority));
  }
  for (const auto& cell : spec.cells) {
    f.tier_of_bs.push_back(cell.tier);
    f.bs_p_max.push_back(spec.tiers[cell.tier].bs_max_power_w);
  }

  // Per user: position, target, then one reciprocal gain per BS.
  std::vector<double> gains;  // row-major M x B
  for (std::size_t c = 0; c < C; ++c) {
    Rng count_rng = sub_stream(seed, kCountStream, c);
    const long count = poisson_count(mean_users_in_cell(spec, c), count_rng);
    const auto& tier = spec.tiers[spec.cells[c].tier];
    for (long k = 0; k < count; ++k) {
      Rng rng = sub_stream(seed, kUserStream, c, static_cast<std::uint64_t>(k));
      Point p;
      switch (spec.placement) {
        case UserPlacement::Cell: p = sample_in_cell(spec.cells[c], layout.cell_centers[c], rng); break;
        case UserPlacement::Area:
          p = {uniform(rng, spec.area->min.x, spec.area->max.x), uniform(rng, spec.area->min.y, spec.area->max.y)};
          break;
        case UserPlacement::Voronoi: {
          bool placed = false;
          for (std::size_t r = 0; r < kMaxRejections && !placed; ++r) {
            p = {uniform(rng, spec.area->min.x, spec.area->max.x), uniform(rng, spec.area->min.y, spec.area->max.y)};
            placed = nearest_bs(layout.bs_positions, p) == c;
          }
          if (!placed) fail("Voronoi region of cell '" + spec.cells[c].name + "' is empty");
          break;
        }
      }
      layout.user_positions.push_back(p);
      layout.user_cell.push_back(c);

      f.p_max.push_back(tier.user_max_power_w);
      const auto pick = std::uniform_int_distribution<std::size_t>(0, tier.target_sinr_db.size() - 1)(rng);
      const double target = db_to_linear(tier.target_sinr_db[pick]);
      f.target_sinr_up.push_back(target);
      f.target_sinr_down.push_back(target);

      const Position user{p, spec.user_height_m};
      for (std::size_t m = 0; m < B; ++m) {
        const bool bs_indoor = spec.tiers[spec.cells[m].tier].indoor;
        const Position bs{layout.bs_positions[m], spec.cells[m].bs_height};
        const LinkClass link = tier.indoor != bs_indoor ? LinkClass::IndoorOutdoor : LinkClass::Outdoor;
        // Reciprocal channel: one draw serves both directions.
        gains.push_back(path_gain(user, bs, link, spec, rng));
      }
    }
  }

  const std::size_t M = layout.user_positions.size();
  f.num_users = M;
  f.serving_bs = layout.user_cell;
  f.uplink_noise.assign(B, spec.noise_w);
  f.downlink_noise.assign(M, spec.noise_w);
  f.uplink_gain = numerics::Matrix(B, M);
  f.downlink_gain = numerics::Matrix(M, B);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t m = 0; m < B; ++m) {
      f.uplink_gain(m, i) = gains[i * B + m];
      f.downlink_gain(i, m) = gains[i * B + m];
    }
  }

  return Snapshot{NetworkTopology::build(std::move(f)), std::move(layout)};
}

ScenarioSpec build_three_tier(const ThreeTierOptions& o) {
  ScenarioSpec s;
  s.name = "three_tier";
  s.tiers = {
      TierSpec{"macro", 1, o.macro_users_per_cell, 0.1, 50.0, o.target_sinr_db, false},
      TierSpec{"pico", 2, o.pico_users_per_cell, 0.1, 0.5, o.target_sinr_db, false},
      TierSpec{"femto", 3, o.femto_users_per_cell, 0.1, 0.1, o.target_sinr_db, true},
  };
  const double half = o.macro_bs_distance_m / 2;
  for (int k = 0; k < 2; ++k) {
    CellSpec macro;
    macro.name = k == 0 ? "macro-west" : "macro-east";
    macro.tier = 0;
    macro.shape = CellShape::Rectangle;
    macro.center = {k == 0 ? -500.0 : 500.0, 0.0};
    macro.width = 1000.0;
    macro.height = 1000.0;
    macro.bs_position = Point{k == 0 ? -half : half, 0.0};
    macro.bs_height = 20.0;
    s.cells.push_back(macro);
  }
  for (std::size_t parent = 0; parent < 2; ++parent) {
    for (std::size_t k = 0; k < o.picocells_per_macro; ++k) {
      CellSpec pico;
      pico.name = "pico-" + std::to_string(parent) + "-" + std::to_string(k);
      pico.tier = 1;
      pico.shape = CellShape::Disk;
      pico.radius = 100.0;
      pico.bs_height = 20.0;
      pico.parent = parent;
      s.cells.push_back(pico);
    }
    for (std::size_t k = 0; k < o.femtocells_per_macro; ++k) {
      CellSpec femto;
      femto.name = "femto-" + std::to_string(parent) + "-" + std::to_string(k);
      femto.tier = 2;
      femto.shape = CellShape::Rectangle;
      femto.width = 20.0;
      femto.height = 20.0;
      femto.bs_height = 0.0;
      femto.parent = parent;
      s.cells.push_back(femto);
    }
  }
  s.placement = UserPlacement::Cell;
  s.shadowing_db = 4.0;
  s.shadowing_indoor_db = 6.0;
  s.load_tiers = {0, 1, 2};
  return s;
}

namespace {

ScenarioSpec two_tier_base(std::string name, const TwoTierOptions& o, std::vector<double> default_targets) {
  ScenarioSpec s;
  s.name = std::move(name);
  const auto targets = o.target_sinr_db.value_or(std::move(default_targets));
  s.tiers = {
      TierSpec{"primary", 1, o.primary_users_per_cell, 0.1, 1.0, targets, false},
      TierSpec{"secondary", 2, o.secondary_users_per_cell, 0.1, 1.0, targets, false},
  };
  s.shadowing_db = 4.0;
  s.shadowing_indoor_db = 4.0;
  s.load_tiers = {1};
  return s;
}

}  // namespace

ScenarioSpec build_two_tier_4cell(FourCellVariant variant, const TwoTierOptions& o) {
  const bool spread = variant == FourCellVariant::Spread;
  ScenarioSpec s = two_tier_base(spread ? "two_tier_a" : "two_tier_b", o,
                                 spread ? std::vector<double>{-16.0, -22.0} : std::vector<double>{-10.0, -16.0});
  s.area = Rect{{-500.0, -500.0}, {500.0, 500.0}};
  s.placement = spread ? UserPlacement::Area : UserPlacement::Voronoi;
  const double h = o.bs_distance_m / 2;
  // Primary BSs on one diagonal of a square of side d, secondary on the other.
  const std::vector<std::pair<std::size_t, Point>> bss = {
      {0, {-h, -h}}, {0, {h, h}}, {1, {-h, h}}, {1, {h, -h}}};
  int k = 0;
  for (const auto& [tier, pos] : bss) {
    CellSpec cell;
    cell.name = (tier == 0 ? "pbs-" : "sbs-") + std::to_string(k++);
    cell.tier = tier;
    cell.shape = CellShape::Rectangle;
    cell.center = {0.0, 0.0};
    cell.width = 1000.0;
    cell.height = 1000.0;
    cell.bs_position = pos;
    cell.bs_height = 20.0;
    s.cells.push_back(cell);
  }
  return s;
}

ScenarioSpec build_hex_7cell(const TwoTierOptions& o) {
  ScenarioSpec s = two_tier_base("hex7", o, {-10.0, -16.0});
  constexpr double radius = 600.0;
  const double spacing = radius * std::numbers::sqrt3;
  for (int k = 0; k < 7; ++k) {
    CellSpec cell;
    cell.name = "cell-" + std::to_string(k + 1);
    // Cells 1, 3, 5, 7 primary; 2, 4, 6 secondary.
    cell.tier = (k % 2 == 0) ? 0 : 1;
    cell.shape = CellShape::Hexagon;
    cell.radius = radius;
    if (k > 0) {
      const double angle = std::numbers::pi / 3.0 * (k - 1);
      cell.center = {spacing * std::cos(angle), spacing * std::sin(angle)};
    }
    cell.bs_height = 20.0;
    s.cells.push_back(cell);
  }
  const double extent = spacing + radius;
  s.area = Rect{{-extent, -extent}, {extent, extent}};
  s.placement = UserPlacement::Cell;
  return s;
}

ScenarioSpec scenario_by_name(std::string_view name) {
  if (name == "three_tier") return build_three_tier();
  if (name == "two_tier_a") return build_two_tier_4cell(FourCellVariant::Spread);
  if (name == "two_tier_b") return build_two_tier_4cell(FourCellVariant::NearServing);
  if (name == "hex7") return build_hex_7cell();
  fail("unknown scenario '" + std::string(name) + "'");
}

std::vector<std::string> scenario_names() { return {"three_tier", "two_tier_a", "two_tier_b", "hex7"}; }

}  // namespace tierpac
