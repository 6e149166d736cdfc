#include "tierpac/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tierpac {

std::string_view to_string(Direction d) { return d == Direction::Uplink ? "uplink" : "downlink"; }

Direction direction_from_string(std::string_view s) {
  if (s == "uplink" || s == "up") return Direction::Uplink;
  if (s == "downlink" || s == "down") return Direction::Downlink;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw TopologyError(message);
}

void require_length(std::size_t got, std::size_t want, const char* name) {
  require(got == want, std::string(name) + ": expected length " + std::to_string(want) + ", got " +
                           std::to_string(got));
}

void require_positive(const std::vector<double>& v, const char* name) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    require(std::isfinite(v[k]) && v[k] > 0.0,
            std::string(name) + "[" + std::to_string(k) + "] must be finite and positive");
  }
}

void require_gains(const numerics::Matrix& g, std::size_t rows, std::size_t cols, const char* name) {
  require(g.rows() == rows && g.cols() == cols, std::string(name) + ": expected " + std::to_string(rows) + "x" +
                                                    std::to_string(cols) + " matrix");
  for (double v : g.data()) require(std::isfinite(v) && v >= 0.0, std::string(name) + ": gains must be >= 0");
}

}  // namespace

NetworkTopology NetworkTopology::build(TopologyFields f) {
  const std::size_t M = f.num_users;
  const std::size_t B = f.num_bs;
  const std::size_t T = f.num_tiers;
  const std::size_t K = f.num_priorities;

  require(B >= 1, "num_bs must be at least 1");
  require(T >= 1, "num_tiers must be at least 1");
  require(K >= 1, "num_priorities must be at least 1");
  require(K <= T, "num_priorities must not exceed num_tiers");

  require_length(f.serving_bs.size(), M, "serving_bs");
  require_length(f.tier_of_bs.size(), B, "tier_of_bs");
  require_length(f.priority_of_tier.size(), T, "priority_of_tier");
  require_length(f.uplink_noise.size(), B, "uplink_noise");
  require_length(f.downlink_noise.size(), M, "downlink_noise");
  require_length(f.p_max.size(), M, "p_max");
  require_length(f.bs_p_max.size(), B, "bs_p_max");
  require_length(f.target_sinr_up.size(), M, "target_sinr_up");
  require_length(f.target_sinr_down.size(), M, "target_sinr_down");

  for (std::size_t i = 0; i < M; ++i) {
    require(f.serving_bs[i] < B, "serving_bs[" + std::to_string(i) + "] = " + std::to_string(f.serving_bs[i]) +
                                     " is out of range for " + std::to_string(B) + " BSs");
  }
  for (std::size_t m = 0; m < B; ++m) {
    require(f.tier_of_bs[m] < T, "tier_of_bs[" + std::to_string(m) + "] is out of range");
  }
  for (std::size_t t = 0; t < T; ++t) {
    const int q = f.priority_of_tier[t];
    require(q >= 1 && static_cast<std::size_t>(q) <= K,
            "priority_of_tier[" + std::to_string(t) + "] = " + std::to_string(q) + " is outside 1.." +
                std::to_string(K));
  }

  require_gains(f.uplink_gain, B, M, "uplink_gain");
  require_gains(f.downlink_gain, M, B, "downlink_gain");
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t b = f.serving_bs[i];
    require(f.uplink_gain(b, i) > 0.0, "user " + std::to_string(i) + " has zero uplink serving gain");
    require(f.downlink_gain(i, b) > 0.0, "user " + std::to_string(i) + " has zero downlink serving gain");
  }

  require_positive(f.uplink_noise, "uplink_noise");
  require_positive(f.downlink_noise, "downlink_noise");
  require_positive(f.p_max, "p_max");
  require_positive(f.bs_p_max, "bs_p_max");
  require_positive(f.target_sinr_up, "target_sinr_up");
  require_positive(f.target_sinr_down, "target_sinr_down");

  IndexSets idx;
  idx.users_of_bs.resize(B);
  idx.users_of_tier.resize(T);
  idx.users_of_priority.resize(K);
  idx.bs_of_tier.resize(T);
  idx.bs_of_priority.resize(K);
  std::vector<int> prio(M);

  for (std::size_t m = 0; m < B; ++m) {
    const std::size_t t = f.tier_of_bs[m];
    idx.bs_of_tier[t].push_back(m);
    idx.bs_of_priority[f.priority_of_tier[t] - 1].push_back(m);
  }
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t b = f.serving_bs[i];
    const std::size_t t = f.tier_of_bs[b];
    const int q = f.priority_of_tier[t];
    prio[i] = q;
    idx.users_of_bs[b].push_back(i);
    idx.users_of_tier[t].push_back(i);
    idx.users_of_priority[q - 1].push_back(i);
  }
  return NetworkTopology(std::move(f), std::move(idx), std::move(prio));
}

SinrAssignment SinrAssignment::of(const NetworkTopology& topo, Direction d, std::span<const std::size_t> users) {
  auto a = none(topo, d);
  for (std::size_t u : users) {
    if (u >= topo.num_users()) throw std::out_of_range("SinrAssignment: user index out of range");
    a.admit(u);
  }
  return a;
}

std::size_t SinrAssignment::count() const {
  return static_cast<std::size_t>(std::count(admitted_.begin(), admitted_.end(), true));
}

std::vector<std::size_t> SinrAssignment::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < admitted_.size(); ++i) {
    if (admitted_[i]) out.push_back(i);
  }
  return out;
}

std::vector<double> SinrAssignment::sinr_vector(const NetworkTopology& topo) const {
  std::vector<double> g(admitted_.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = sinr(topo, i);
  return g;
}

PowerAllocation make_allocation(const NetworkTopology& topo, Direction d, std::vector<double> per_user) {
  PowerAllocation alloc;
  alloc.direction = d;
  alloc.per_bs_total.assign(topo.num_bs(), 0.0);
  for (std::size_t i = 0; i < per_user.size(); ++i) alloc.per_bs_total[topo.serving_bs(i)] += per_user[i];
  alloc.per_user = std::move(per_user);
  return alloc;
}

std::vector<double> achieved_sinr(const NetworkTopology& topo, std::span<const double> powers, Direction d) {
  const std::size_t M = topo.num_users();
  if (powers.size() != M) throw std::invalid_argument("achieved_sinr: power vector length mismatch");
  const auto& f = topo.fields();
  std::vector<double> sinr(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t b = topo.serving_bs(i);
    double interference = 0.0;
    double signal = 0.0;
    if (d == Direction::Uplink) {
      for (std::size_t j = 0; j < M; ++j) {
        if (j != i) interference += topo.uplink_gain(b, j) * powers[j];
      }
      interference += f.uplink_noise[b];
      signal = topo.uplink_gain(b, i) * powers[i];
    } else {
      for (std::size_t j = 0; j < M; ++j) {
        if (j != i) interference += topo.downlink_gain(i, topo.serving_bs(j)) * powers[j];
      }
      interference += f.downlink_noise[i];
      signal = topo.downlink_gain(i, b) * powers[i];
    }
    sinr[i] = signal / interference;
  }
  return sinr;
}

std::vector<std::size_t> supported_set(const NetworkTopology& topo, std::span<const double> powers, Direction d) {
  const auto sinr = achieved_sinr(topo, powers, d);
  const auto target = topo.target_sinr(d);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sinr.size(); ++i) {
    if (sinr[i] >= target[i] * (1.0 - kSinrTolerance)) out.push_back(i);
  }
  return out;
}

bool priority_constraints_hold(const NetworkTopology& topo, const std::vector<bool>& members) {
  if (members.size() != topo.num_users()) throw std::invalid_argument("priority_constraints_hold: size mismatch");
  // Lowest priority level (largest q) that has at least one member.
  int deepest = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i]) deepest = std::max(deepest, topo.priority_of_user(i));
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i] && topo.priority_of_user(i) < deepest) return false;
  }
  return true;
}

bool priority_constraints_hold(const NetworkTopology& topo, const SinrAssignment& assignment) {
  return priority_constraints_hold(topo, assignment.mask());
}

bool priority_constraints_hold(const NetworkTopology& topo, std::span<const double> powers, Direction d) {
  std::vector<bool> mask(topo.num_users(), false);
  for (std::size_t i : supported_set(topo, powers, d)) mask[i] = true;
  return priority_constraints_hold(topo, mask);
}

}  // namespace tierpac
