#include "tierpac/feasibility.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace tierpac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ReducedSystem empty_system(const NetworkTopology& topo, const SinrAssignment& assignment) {
  if (assignment.size() != topo.num_users()) {
    throw std::invalid_argument("assignment does not match topology user count");
  }
  ReducedSystem s;
  s.direction = assignment.direction();
  s.a = numerics::Matrix::identity(topo.num_bs());
  s.theta.assign(topo.num_users(), 0.0);
  for (std::size_t i = 0; i < topo.num_users(); ++i) {
    if (assignment.contains(i)) s.theta[i] = sinr_share(assignment.sinr(topo, i));
  }
  return s;
}

// Adds `sign` times user i's contribution to H into A = I - H (and N* in
// the downlink). Uplink: user i fills column b_i. Downlink: row b_i.
void apply_user(const NetworkTopology& topo, ReducedSystem& s, std::size_t i, double theta, double sign) {
  const std::size_t b = topo.serving_bs(i);
  const std::size_t B = topo.num_bs();
  if (s.direction == Direction::Uplink) {
    const double own = topo.uplink_gain(b, i);
    for (std::size_t m = 0; m < B; ++m) {
      const double h = (m == b) ? theta : topo.uplink_gain(m, i) / own * theta;
      s.a(m, b) -= sign * h;
    }
  } else {
    const double own = topo.downlink_gain(i, b);
    for (std::size_t n = 0; n < B; ++n) {
      const double h = (n == b) ? theta : topo.downlink_gain(i, n) / own * theta;
      s.a(b, n) -= sign * h;
    }
    s.rhs[b] += sign * theta * topo.fields().downlink_noise[i] / own;
  }
}

}  // namespace

ReducedSystem build_reduced_uplink(const NetworkTopology& topo, const SinrAssignment& assignment) {
  if (assignment.direction() != Direction::Uplink) throw std::invalid_argument("expected an uplink assignment");
  ReducedSystem s = empty_system(topo, assignment);
  s.rhs = topo.fields().uplink_noise;
  for (std::size_t i = 0; i < topo.num_users(); ++i) {
    if (s.theta[i] > 0.0) apply_user(topo, s, i, s.theta[i], 1.0);
  }
  return s;
}

ReducedSystem build_reduced_downlink(const NetworkTopology& topo, const SinrAssignment& assignment) {
  if (assignment.direction() != Direction::Downlink) throw std::invalid_argument("expected a downlink assignment");
  ReducedSystem s = empty_system(topo, assignment);
  s.rhs.assign(topo.num_bs(), 0.0);
  for (std::size_t i = 0; i < topo.num_users(); ++i) {
    if (s.theta[i] > 0.0) apply_user(topo, s, i, s.theta[i], 1.0);
  }
  return s;
}

ReducedSystem build_reduced(const NetworkTopology& topo, const SinrAssignment& assignment) {
  return assignment.direction() == Direction::Uplink ? build_reduced_uplink(topo, assignment)
                                                     : build_reduced_downlink(topo, assignment);
}

ReducedSystem without_user(const NetworkTopology& topo, const ReducedSystem& system, std::size_t user) {
  ReducedSystem s = system;
  const double theta = s.theta.at(user);
  if (theta == 0.0) return s;
  apply_user(topo, s, user, theta, -1.0);
  s.theta[user] = 0.0;
  // An emptied BS gets its identity column (uplink) or row and zero N*
  // (downlink) back exactly, without accumulated round-off.
  const std::size_t b = topo.serving_bs(user);
  bool any = false;
  for (std::size_t j : topo.index().users_of_bs[b]) any = any || s.theta[j] > 0.0;
  if (!any) {
    for (std::size_t k = 0; k < s.num_bs(); ++k) {
      const double v = (k == b) ? 1.0 : 0.0;
      if (s.direction == Direction::Uplink) {
        s.a(k, b) = v;
      } else {
        s.a(b, k) = v;
      }
    }
    if (s.direction == Direction::Downlink) s.rhs[b] = 0.0;
  }
  return s;
}

std::string_view to_string(BsVerdict v) {
  switch (v) {
    case BsVerdict::Feasible: return "feasible";
    case BsVerdict::LowerViolation: return "lower-violation";
    case BsVerdict::UpperViolation: return "upper-violation";
  }
  return "?";
}

FeasibilityReport reduced_aggregates(const NetworkTopology& topo, const ReducedSystem& system) {
  const std::size_t B = system.num_bs();
  FeasibilityReport r;
  r.direction = system.direction;
  r.upper_bound.assign(B, kInf);
  if (system.direction == Direction::Uplink) {
    const auto& pmax = topo.fields().p_max;
    for (std::size_t m = 0; m < B; ++m) {
      for (std::size_t i : topo.index().users_of_bs[m]) {
        const double theta = system.theta[i];
        if (theta > 0.0) r.upper_bound[m] = std::min(r.upper_bound[m], pmax[i] * topo.uplink_gain(m, i) / theta);
      }
    }
  } else {
    r.upper_bound = topo.fields().bs_p_max;
  }

  // Idle BSs decouple: their downlink row is the identity with zero N*, and
  // their uplink column is the identity. Solving only the active block keeps
  // pivoting from smearing round-off into an idle BS's exact value.
  std::vector<std::size_t> active;
  std::vector<bool> is_active(B, false);
  for (std::size_t i = 0; i < topo.num_users(); ++i) {
    if (system.theta[i] > 0.0) is_active[topo.serving_bs(i)] = true;
  }
  for (std::size_t m = 0; m < B; ++m) {
    if (is_active[m]) active.push_back(m);
  }
  numerics::Matrix block(active.size(), active.size());
  std::vector<double> block_rhs(active.size());
  for (std::size_t r2 = 0; r2 < active.size(); ++r2) {
    block_rhs[r2] = system.rhs[active[r2]];
    for (std::size_t c = 0; c < active.size(); ++c) block(r2, c) = system.a(active[r2], active[c]);
  }
  auto solution = active.empty() ? std::optional<std::vector<double>>(std::vector<double>{})
                                 : numerics::solve(block, block_rhs);
  if (!solution) {
    r.singular = true;
    r.overall = false;
    r.aggregate.assign(B, std::numeric_limits<double>::quiet_NaN());
    return r;
  }
  r.aggregate.assign(B, 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) r.aggregate[active[k]] = (*solution)[k];
  for (std::size_t m = 0; m < B; ++m) {
    if (is_active[m]) continue;
    if (system.direction == Direction::Uplink) {
      double x = system.rhs[m];
      for (std::size_t n : active) x -= system.a(m, n) * r.aggregate[n];
      r.aggregate[m] = x;
    } else {
      r.aggregate[m] = 0.0;
    }
  }
  r.verdict_per_bs.resize(B);
  r.overall = true;
  for (std::size_t m = 0; m < B; ++m) {
    const double x = r.aggregate[m];
    if (!std::isfinite(x)) {
      r.verdict_per_bs[m] = BsVerdict::UpperViolation;
    } else if (x < 0.0) {
      r.verdict_per_bs[m] = BsVerdict::LowerViolation;
    } else if (x > r.upper_bound[m]) {
      r.verdict_per_bs[m] = BsVerdict::UpperViolation;
    } else {
      r.verdict_per_bs[m] = BsVerdict::Feasible;
    }
    r.overall = r.overall && r.verdict_per_bs[m] == BsVerdict::Feasible;
  }
  return r;
}

FeasibilityReport check_reduced(const NetworkTopology& topo, const SinrAssignment& assignment) {
  return reduced_aggregates(topo, build_reduced(topo, assignment));
}

namespace {

void require_usable(const FeasibilityReport& report, const SinrAssignment& assignment, Direction d) {
  if (report.direction != d || assignment.direction() != d) {
    throw ContractViolation("power recovery: direction mismatch");
  }
  if (!report.overall) throw ContractViolation("power recovery requested for an infeasible assignment");
}

}  // namespace

PowerAllocation uplink_power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                             const FeasibilityReport& report) {
  require_usable(report, assignment, Direction::Uplink);
  std::vector<double> p(topo.num_users(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!assignment.contains(i)) continue;
    const std::size_t b = topo.serving_bs(i);
    p[i] = sinr_share(assignment.sinr(topo, i)) * report.aggregate[b] / topo.uplink_gain(b, i);
  }
  return make_allocation(topo, Direction::Uplink, std::move(p));
}

PowerAllocation downlink_power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                               const FeasibilityReport& report) {
  require_usable(report, assignment, Direction::Downlink);
  const std::size_t B = topo.num_bs();
  std::vector<double> p(topo.num_users(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!assignment.contains(i)) continue;
    double received = topo.fields().downlink_noise[i];
    for (std::size_t n = 0; n < B; ++n) received += topo.downlink_gain(i, n) * report.aggregate[n];
    p[i] = sinr_share(assignment.sinr(topo, i)) / topo.downlink_gain(i, topo.serving_bs(i)) * received;
  }
  return make_allocation(topo, Direction::Downlink, std::move(p));
}

PowerAllocation power_from_aggregates(const NetworkTopology& topo, const SinrAssignment& assignment,
                                      const FeasibilityReport& report) {
  return report.direction == Direction::Uplink ? uplink_power_from_aggregates(topo, assignment, report)
                                               : downlink_power_from_aggregates(topo, assignment, report);
}

ClassicSolution classic_power(const NetworkTopology& topo, const SinrAssignment& assignment) {
  const Direction d = assignment.direction();
  const auto active = assignment.members();
  const std::size_t n = active.size();
  const auto& f = topo.fields();

  ClassicSolution out;
  out.allocation = make_allocation(topo, d, std::vector<double>(topo.num_users(), 0.0));
  if (n == 0) {
    out.feasible = true;
    return out;
  }

  numerics::Matrix system(n, n);
  std::vector<double> u(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = active[r];
    const std::size_t b = topo.serving_bs(i);
    const double gamma = assignment.sinr(topo, i);
    if (d == Direction::Uplink) {
      const double own = topo.uplink_gain(b, i);
      u[r] = gamma * f.uplink_noise[b] / own;
      for (std::size_t c = 0; c < n; ++c) {
        system(r, c) = (r == c) ? 1.0 : -gamma * topo.uplink_gain(b, active[c]) / own;
      }
    } else {
      const double own = topo.downlink_gain(i, b);
      u[r] = gamma * f.downlink_noise[i] / own;
      for (std::size_t c = 0; c < n; ++c) {
        system(r, c) = (r == c) ? 1.0 : -gamma * topo.downlink_gain(i, topo.serving_bs(active[c])) / own;
      }
    }
  }

  auto solution = numerics::solve_refined(system, u);
  if (!solution) {
    out.singular = true;
    return out;
  }
  std::vector<double> p(topo.num_users(), 0.0);
  for (std::size_t r = 0; r < n; ++r) p[active[r]] = (*solution)[r];
  out.allocation = make_allocation(topo, d, std::move(p));

  out.feasible = true;
  for (std::size_t r = 0; r < n; ++r) {
    const double pi = (*solution)[r];
    if (!(pi >= 0.0)) out.feasible = false;
    if (d == Direction::Uplink && pi > f.p_max[active[r]]) out.feasible = false;
  }
  if (d == Direction::Downlink) {
    for (std::size_t m = 0; m < topo.num_bs(); ++m) {
      if (out.allocation.per_bs_total[m] > f.bs_p_max[m]) out.feasible = false;
    }
  }
  return out;
}

}  // namespace tierpac
