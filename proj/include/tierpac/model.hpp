#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tierpac/numerics.hpp"

namespace tierpac {

enum class Direction { Uplink, Downlink };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Raised when raw topology fields are inconsistent.
class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raw, unvalidated network description. Users, BSs and tiers are 0-based;
/// priority levels are 1-based with 1 the highest.
struct TopologyFields {
  std::size_t num_users = 0;
  std::size_t num_bs = 0;
  std::size_t num_tiers = 0;
  std::size_t num_priorities = 0;

  std::vector<std::size_t> serving_bs;  // user -> BS
  std::vector<std::size_t> tier_of_bs;  // BS -> tier
  std::vector<int> priority_of_tier;    // tier -> priority in 1..K

  numerics::Matrix uplink_gain;    // B x M, (m, i) = gain from user i to BS m
  numerics::Matrix downlink_gain;  // M x B, (i, m) = gain from BS m to user i

  std::vector<double> uplink_noise;    // per BS, W
  std::vector<double> downlink_noise;  // per user, W
  std::vector<double> p_max;           // per user, W
  std::vector<double> bs_p_max;        // per BS, W

  std::vector<double> target_sinr_up;    // linear
  std::vector<double> target_sinr_down;  // linear

  friend bool operator==(const TopologyFields&, const TopologyFields&) = default;
};

/// Derived membership sets. Priority-indexed vectors are indexed by q - 1.
struct IndexSets {
  std::vector<std::vector<std::size_t>> users_of_bs;
  std::vector<std::vector<std::size_t>> users_of_tier;
  std::vector<std::vector<std::size_t>> users_of_priority;
  std::vector<std::vector<std::size_t>> bs_of_tier;
  std::vector<std::vector<std::size_t>> bs_of_priority;
};

/// Validated, immutable network snapshot.
class NetworkTopology {
 public:
  /// Validates `fields` and derives the index sets. Throws TopologyError.
  static NetworkTopology build(TopologyFields fields);

  const TopologyFields& fields() const { return fields_; }
  const IndexSets& index() const { return index_; }

  std::size_t num_users() const { return fields_.num_users; }
  std::size_t num_bs() const { return fields_.num_bs; }
  std::size_t num_tiers() const { return fields_.num_tiers; }
  std::size_t num_priorities() const { return fields_.num_priorities; }

  std::size_t serving_bs(std::size_t user) const { return fields_.serving_bs[user]; }
  std::size_t tier_of_user(std::size_t user) const { return fields_.tier_of_bs[serving_bs(user)]; }
  int priority_of_user(std::size_t user) const { return priority_of_user_[user]; }
  int priority_of_tier(std::size_t tier) const { return fields_.priority_of_tier[tier]; }

  /// Gain from user i to BS m.
  double uplink_gain(std::size_t bs, std::size_t user) const { return fields_.uplink_gain(bs, user); }
  /// Gain from BS m to user i.
  double downlink_gain(std::size_t user, std::size_t bs) const { return fields_.downlink_gain(user, bs); }

  std::span<const double> target_sinr(Direction d) const {
    return d == Direction::Uplink ? std::span<const double>(fields_.target_sinr_up)
                                  : std::span<const double>(fields_.target_sinr_down);
  }

 private:
  NetworkTopology(TopologyFields f, IndexSets idx, std::vector<int> prio)
      : fields_(std::move(f)), index_(std::move(idx)), priority_of_user_(std::move(prio)) {}

  TopologyFields fields_;
  IndexSets index_;
  std::vector<int> priority_of_user_;
};

/// An admitted-user set for one link direction. Admitted users are pinned
/// to their target SINR, everyone else to zero.
class SinrAssignment {
 public:
  SinrAssignment() = default;
  SinrAssignment(Direction direction, std::vector<bool> admitted)
      : direction_(direction), admitted_(std::move(admitted)) {}

  static SinrAssignment all(const NetworkTopology& topo, Direction d) {
    return {d, std::vector<bool>(topo.num_users(), true)};
  }
  static SinrAssignment none(const NetworkTopology& topo, Direction d) {
    return {d, std::vector<bool>(topo.num_users(), false)};
  }
  static SinrAssignment of(const NetworkTopology& topo, Direction d, std::span<const std::size_t> users);

  Direction direction() const { return direction_; }
  std::size_t size() const { return admitted_.size(); }
  bool contains(std::size_t user) const { return admitted_[user]; }
  void admit(std::size_t user) { admitted_.at(user) = true; }
  void remove(std::size_t user) { admitted_.at(user) = false; }
  std::size_t count() const;
  std::vector<std::size_t> members() const;
  const std::vector<bool>& mask() const { return admitted_; }

  /// SINR the assignment pins user i to: its target when admitted, else 0.
  double sinr(const NetworkTopology& topo, std::size_t user) const {
    return admitted_[user] ? topo.target_sinr(direction_)[user] : 0.0;
  }
  std::vector<double> sinr_vector(const NetworkTopology& topo) const;

  friend bool operator==(const SinrAssignment&, const SinrAssignment&) = default;

 private:
  Direction direction_ = Direction::Uplink;
  std::vector<bool> admitted_;
};

/// Per-user transmit powers. per_bs_total[m] sums the powers of users
/// served by BS m, which is the BS transmit power in the downlink.
struct PowerAllocation {
  Direction direction = Direction::Uplink;
  std::vector<double> per_user;
  std::vector<double> per_bs_total;
};

PowerAllocation make_allocation(const NetworkTopology& topo, Direction d, std::vector<double> per_user);

/// Relative slack on the SINR >= target comparison.
inline constexpr double kSinrTolerance = 1e-9;

/// Achieved SINR of every user under `powers`.
std::vector<double> achieved_sinr(const NetworkTopology& topo, std::span<const double> powers, Direction d);

/// Users whose achieved SINR meets their target (within kSinrTolerance).
std::vector<std::size_t> supported_set(const NetworkTopology& topo, std::span<const double> powers, Direction d);

/// True iff every member at priority q > 1 implies every user of each
/// priority q' < q is also a member.
bool priority_constraints_hold(const NetworkTopology& topo, const std::vector<bool>& members);
bool priority_constraints_hold(const NetworkTopology& topo, const SinrAssignment& assignment);
bool priority_constraints_hold(const NetworkTopology& topo, std::span<const double> powers, Direction d);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace tierpac
