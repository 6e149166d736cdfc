#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tierpac/feasibility.hpp"
#include "tierpac/model.hpp"

namespace tierpac {

enum class Algorithm { Mespa, Mlspa, Oracle };
std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

struct JpacOptions {
  /// Only consider removal candidates served by the candidate BS (falls back
  /// to the whole priority level when that BS has none).
  bool restrict_to_candidate_bs = false;
  /// Add the first-order change of the downlink effective noise N* to the
  /// MLSPA downlink sensitivity.
  bool downlink_noise_term = false;
};

struct RemovalStep {
  std::size_t user = 0;
  std::size_t candidate_bs = 0;
  double metric = 0.0;
  int priority = 0;
  std::size_t candidates = 0;
  bool singular_fallback = false;
};

struct RemovalTrace {
  Algorithm algorithm = Algorithm::Mespa;
  Direction direction = Direction::Uplink;
  std::vector<RemovalStep> steps;
  SinrAssignment admitted;
  PowerAllocation powers;
  FeasibilityReport final_report;
  /// Number of B x B solves (solve or one-row inversion) performed.
  std::size_t solve_count = 0;
};

/// BS with maximum infeasibility measure. Lower-bound violations take
/// precedence; ties go to the lowest index. The report must be infeasible
/// and non-singular.
std::size_t select_candidate_bs(const FeasibilityReport& report);

/// BS with the largest diagonal load, used when the current system is
/// singular and the aggregates are undefined.
std::size_t most_loaded_bs(const ReducedSystem& system);

/// Admitted users of priority q, optionally narrowed to BS `bs`.
std::vector<std::size_t> removal_candidates(const NetworkTopology& topo, const SinrAssignment& assignment, int q,
                                            std::optional<std::size_t> bs = std::nullopt);

/// Lowest priority level (largest q) with at least one admitted user; 0 if none.
int deepest_active_priority(const NetworkTopology& topo, const SinrAssignment& assignment);

struct CandidateChoice {
  std::size_t user = 0;
  double metric = 0.0;
  std::size_t solves = 0;
};

/// Exact re-solve for each candidate; picks the one whose removal brings
/// BS n* closest to its feasible band.
CandidateChoice mespa_choose(const NetworkTopology& topo, const ReducedSystem& system,
                             std::span<const std::size_t> candidates, std::size_t n_star);

CandidateChoice mespa_removal_candidate(const NetworkTopology& topo, const SinrAssignment& assignment, int q,
                                        std::size_t n_star, const JpacOptions& options = {});

/// First-order change of Phi_{n*} when `user` is removed, given row n* of
/// A^{-1} and the current aggregates. Removal increases A.
double mlspa_sensitivity_uplink(const NetworkTopology& topo, const ReducedSystem& system,
                                std::span<const double> aggregates, std::span<const double> inverse_row,
                                std::size_t user);

/// First-order change of the downlink BS power P_{n*} when `user` is removed.
double mlspa_sensitivity_downlink(const NetworkTopology& topo, const ReducedSystem& system,
                                  std::span<const double> aggregates, std::span<const double> inverse_row,
                                  std::size_t user, bool include_noise_term = false);

RemovalTrace run_mespa(const NetworkTopology& topo, Direction d, const JpacOptions& options = {});
RemovalTrace run_mlspa(const NetworkTopology& topo, Direction d, const JpacOptions& options = {});

struct OracleResult {
  std::size_t optimum = 0;
  SinrAssignment best;
  PowerAllocation powers;
  std::size_t subsets_checked = 0;
};

inline constexpr std::size_t kOracleMaxUsers = 14;

/// Exhaustive search for a maximum-cardinality feasible admitted set that
/// respects the priority constraints. Among optimal sets the one with the
/// smallest bitmask wins. Throws std::invalid_argument above kOracleMaxUsers.
OracleResult brute_force_oracle(const NetworkTopology& topo, Direction d);

}  // namespace tierpac
