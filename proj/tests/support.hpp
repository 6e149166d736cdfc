#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "tierpac/model.hpp"

namespace tierpac::testing {

/// Unit gains and noise, generous caps, target 1, every user at BS 0,
/// a single tier of priority 1. Tests overwrite what they need.
inline TopologyFields make_fields(std::size_t users, std::size_t bs = 1) {
  TopologyFields f;
  f.num_users = users;
  f.num_bs = bs;
  f.num_tiers = 1;
  f.num_priorities = 1;
  f.serving_bs.assign(users, 0);
  f.tier_of_bs.assign(bs, 0);
  f.priority_of_tier = {1};
  f.uplink_gain = numerics::Matrix(bs, users, 1.0);
  f.downlink_gain = numerics::Matrix(users, bs, 1.0);
  f.uplink_noise.assign(bs, 1.0);
  f.downlink_noise.assign(users, 1.0);
  f.p_max.assign(users, 1e6);
  f.bs_p_max.assign(bs, 1e6);
  f.target_sinr_up.assign(users, 1.0);
  f.target_sinr_down.assign(users, 1.0);
  return f;
}

/// Sets the same gain on both directions of the user-BS link.
inline void set_gain(TopologyFields& f, std::size_t user, std::size_t bs, double g) {
  f.uplink_gain(bs, user) = g;
  f.downlink_gain(user, bs) = g;
}

struct RandomInstanceOptions {
  std::size_t min_bs = 1;
  std::size_t max_bs = 6;
  std::size_t min_users = 1;
  std::size_t max_users = 30;
  std::size_t priorities = 1;
  double gain_decades = 6.0;
  double target_db_min = -20.0;
  double target_db_max = 0.0;
  double noise = 1e-9;
  double p_max = 1.0;
  double bs_p_max = 2.0;
};

/// Log-uniform gains over `gain_decades`, independent per direction, each
/// user served by its strongest uplink BS; tiers (one per priority level)
/// assigned to BSs at random.
inline NetworkTopology random_instance(std::mt19937_64& rng, const RandomInstanceOptions& o = {}) {
  std::uniform_int_distribution<std::size_t> bs_count(o.min_bs, o.max_bs);
  std::uniform_int_distribution<std::size_t> user_count(o.min_users, o.max_users);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t B = bs_count(rng);
  const std::size_t M = user_count(rng);
  auto gain = [&] { return std::pow(10.0, -o.gain_decades * unit(rng)); };

  TopologyFields f = make_fields(M, B);
  f.num_tiers = o.priorities;
  f.num_priorities = o.priorities;
  f.priority_of_tier.clear();
  for (std::size_t t = 0; t < o.priorities; ++t) f.priority_of_tier.push_back(static_cast<int>(t) + 1);
  std::uniform_int_distribution<std::size_t> tier(0, o.priorities - 1);
  for (auto& t : f.tier_of_bs) t = tier(rng);

  for (std::size_t i = 0; i < M; ++i) {
    std::size_t best = 0;
    for (std::size_t m = 0; m < B; ++m) {
      f.uplink_gain(m, i) = gain();
      f.downlink_gain(i, m) = gain();
      if (f.uplink_gain(m, i) > f.uplink_gain(best, i)) best = m;
    }
    f.serving_bs[i] = best;
    f.target_sinr_up[i] = db_to_linear(o.target_db_min + (o.target_db_max - o.target_db_min) * unit(rng));
    f.target_sinr_down[i] = db_to_linear(o.target_db_min + (o.target_db_max - o.target_db_min) * unit(rng));
  }
  f.uplink_noise.assign(B, o.noise);
  f.downlink_noise.assign(M, o.noise);
  f.p_max.assign(M, o.p_max);
  f.bs_p_max.assign(B, o.bs_p_max);
  return NetworkTopology::build(std::move(f));
}

/// Each user admitted independently with a probability drawn per call.
inline SinrAssignment random_subset(std::mt19937_64& rng, const NetworkTopology& topo, Direction d) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep = unit(rng);
  std::vector<bool> mask(topo.num_users());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = unit(rng) < keep;
  return SinrAssignment(d, std::move(mask));
}

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace tierpac::testing
