#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tierpac/model.hpp"
#include "tierpac/numerics.hpp"

namespace tierpac {

/// B-dimensional interference system (I - H) x = rhs whose solution is the
/// per-BS aggregate: received power plus noise at each BS in the uplink,
/// total transmit power of each BS in the downlink.
struct ReducedSystem {
  Direction direction = Direction::Uplink;
  numerics::Matrix a;          // I - H
  std::vector<double> rhs;     // uplink noise N, or downlink effective noise N*
  std::vector<double> theta;   // gamma / (gamma + 1) per user, 0 when not admitted

  std::size_t num_bs() const { return rhs.size(); }
  /// Diagonal load H_mm = sum of theta over BS m's admitted users.
  double load(std::size_t bs) const { return 1.0 - a(bs, bs); }
};

/// theta = gamma / (gamma + 1).
inline double sinr_share(double sinr) { return sinr / (sinr + 1.0); }

ReducedSystem build_reduced_uplink(const NetworkTopology& topo, const SinrAssignment& assignment);
ReducedSystem build_reduced_downlink(const NetworkTopology& topo, const SinrAssignment& assignment);
ReducedSystem build_reduced(const NetworkTopology& topo, const SinrAssignment& assignment);

/// The system obtained by dropping `user` from the admitted set. O(B) update.
ReducedSystem without_user(const NetworkTopology& topo, const ReducedSystem& system, std::size_t user);

enum class BsVerdict { Feasible, LowerViolation, UpperViolation };
std::string_view to_string(BsVerdict v);

struct FeasibilityReport {
  Direction direction = Direction::Uplink;
  std::vector<double> aggregate;    // Phi_m (uplink) or P_m (downlink); NaN when singular
  std::vector<double> upper_bound;  // Phi_m^max (uplink, +inf for idle BS) or P_m^max
  std::vector<BsVerdict> verdict_per_bs;  // empty when singular
  bool overall = false;
  bool singular = false;
};

/// Solves the reduced system and grades every BS against [0, bound].
FeasibilityReport reduced_aggregates(const NetworkTopology& topo, const ReducedSystem& system);

/// build_reduced + reduced_aggregates.
FeasibilityReport check_reduced(const NetworkTopology& topo, const SinrAssignment& assignment);

/// Raised when powers are requested from an infeasible report.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

PowerAllocation uplink_power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                             const FeasibilityReport& report);
PowerAllocation downlink_power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                               const FeasibilityReport& report);
PowerAllocation power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                      const FeasibilityReport& report);

/// Result of the M-dimensional (I - F) p = U solve over the admitted users.
struct ClassicSolution {
  bool feasible = false;
  bool singular = false;
  /// Exact-target powers when not singular, even when out of bounds.
  PowerAllocation allocation;
};

ClassicSolution classic_power(const NetworkTopology& topo, const SinrAssignment& assignment);

}  // namespace tierpac
