#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tierpac/jpac.hpp"
#include "tierpac/scenario.hpp"

namespace tierpac {

enum class SweepParameter { None, Users, Gamma, Shadowing };
std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view s);

struct Sweep {
  SweepParameter parameter = SweepParameter::None;
  std::vector<double> values = {0.0};
};

/// Values used by `tierpac sweep` when none are given.
std::vector<double> default_sweep_values(SweepParameter p);

/// Spec for one sweep point.
///  users:     extra users per load tier (on average, spread over its cells)
///  gamma:     every tier's target set becomes {v, v - 6} dB
///  shadowing: both shadowing deviations become v dB
ScenarioSpec apply_sweep(const ScenarioSpec& base, SweepParameter p, double value);

struct RunConfig {
  std::string scenario = "three_tier";
  ScenarioSpec spec = build_three_tier();
  Algorithm algorithm = Algorithm::Mespa;
  Direction direction = Direction::Uplink;
  std::size_t snapshots = 200;
  std::uint64_t seed = 1;
  Sweep sweep;
  std::size_t workers = 1;
  /// Record per-snapshot wall time. Off by default so CSVs stay reproducible.
  bool timing = false;
  JpacOptions options;
};

/// Throws std::invalid_argument.
void validate(const RunConfig& config);

struct TierOutcome {
  std::size_t tier = 0;
  int priority = 0;
  std::size_t total = 0;
  std::size_t supported = 0;
  double outage() const { return total == 0 ? 0.0 : 1.0 - static_cast<double>(supported) / total; }
};

struct SnapshotRecord {
  std::size_t sweep_index = 0;
  std::size_t snapshot = 0;
  std::size_t users = 0;
  std::size_t removals = 0;
  std::size_t solves = 0;
  std::int64_t runtime_us = 0;
  std::vector<TierOutcome> tiers;  // tiers with at least one user
};

struct TierSummary {
  double sweep_value = 0.0;
  std::size_t tier = 0;
  int priority = 0;
  std::size_t snapshots = 0;  // snapshots in which the tier had users
  double mean_total = 0.0;
  double mean_supported = 0.0;
  double mean_outage = 0.0;
  double mean_solves = 0.0;
};

struct OutageStats {
  std::vector<double> sweep_values;
  std::vector<SnapshotRecord> records;  // ordered by (sweep_index, snapshot)
  std::vector<TierSummary> summary;     // ordered by (sweep_index, tier)
  std::size_t total_solves = 0;
  double wall_seconds = 0.0;

  /// Mean outage of `tier` at sweep point `sweep_index`; NaN if it never had users.
  double mean_outage(std::size_t sweep_index, std::size_t tier) const;
};

/// Raised when an algorithm output fails a hard check.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of one algorithm run, reduced to what the checks need.
struct AdmissionOutcome {
  SinrAssignment admitted;
  PowerAllocation powers;
  std::size_t solves = 0;
  std::size_t removals = 0;
};

AdmissionOutcome run_admission(const NetworkTopology& topo, Algorithm algorithm, Direction d,
                               const JpacOptions& options = {});

/// Hard checks on an algorithm output: reduced and classic feasibility agree,
/// admitted users sit exactly on target, powers respect the caps, priority
/// constraints hold, and the per-tier outages form a staircase. Returns the
/// list of problems; empty when everything holds.
std::vector<std::string> check_outcome(const NetworkTopology& topo, const AdmissionOutcome& outcome, Direction d);

/// Solve-count bounds for a removal trace: MLSPA uses at most 2 per removal
/// plus the final check, MESPA one check per iteration plus one solve per
/// candidate.
std::vector<std::string> check_solve_count(const RemovalTrace& trace);

std::vector<TierOutcome> tier_outcomes(const NetworkTopology& topo, const PowerAllocation& powers, Direction d);

/// True when a partially served tier has every higher-priority tier fully
/// served and every lower-priority tier fully in outage.
bool staircase_holds(std::span<const TierOutcome> tiers);

OutageStats run_experiment(const RunConfig& config);

void write_snapshot_csv(std::ostream& out, const OutageStats& stats);
void write_summary_csv(std::ostream& out, const OutageStats& stats);

/// Writes `<prefix>.snapshots.csv` and `<prefix>.summary.csv`.
void write_csv_files(const std::string& prefix, const OutageStats& stats);

}  // namespace tierpac
