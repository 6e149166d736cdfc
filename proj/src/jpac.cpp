#include "tierpac/jpac.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace tierpac {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Mespa: return "mespa";
    case Algorithm::Mlspa: return "mlspa";
    case Algorithm::Oracle: return "oracle";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "mespa") return Algorithm::Mespa;
  if (s == "mlspa") return Algorithm::Mlspa;
  if (s == "oracle") return Algorithm::Oracle;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

std::size_t select_candidate_bs(const FeasibilityReport& report) {
  if (report.singular) throw ContractViolation("select_candidate_bs: singular report has no aggregates");
  if (report.overall) throw ContractViolation("select_candidate_bs: report is feasible");

  std::optional<std::size_t> lower;
  std::optional<std::size_t> upper;
  double upper_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < report.verdict_per_bs.size(); ++m) {
    switch (report.verdict_per_bs[m]) {
      case BsVerdict::LowerViolation:
        if (!lower || report.aggregate[m] > report.aggregate[*lower]) lower = m;
        break;
      case BsVerdict::UpperViolation: {
        const double gap = report.aggregate[m] - report.upper_bound[m];
        if (!upper || gap > upper_gap || (std::isnan(upper_gap) && !std::isnan(gap))) {
          upper = m;
          upper_gap = gap;
        }
        break;
      }
      case BsVerdict::Feasible: break;
    }
  }
  if (lower) return *lower;
  if (upper) return *upper;
  throw ContractViolation("select_candidate_bs: no violating BS");
}

std::size_t most_loaded_bs(const ReducedSystem& system) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < system.num_bs(); ++m) {
    if (system.load(m) > system.load(best)) best = m;
  }
  return best;
}

std::vector<std::size_t> removal_candidates(const NetworkTopology& topo, const SinrAssignment& assignment, int q,
                                            std::optional<std::size_t> bs) {
  std::vector<std::size_t> out;
  if (q < 1 || static_cast<std::size_t>(q) > topo.num_priorities()) return out;
  for (std::size_t i : topo.index().users_of_priority[q - 1]) {
    if (!assignment.contains(i)) continue;
    if (bs && topo.serving_bs(i) != *bs) continue;
    out.push_back(i);
  }
  return out;
}

int deepest_active_priority(const NetworkTopology& topo, const SinrAssignment& assignment) {
  for (int q = static_cast<int>(topo.num_priorities()); q >= 1; --q) {
    for (std::size_t i : topo.index().users_of_priority[q - 1]) {
      if (assignment.contains(i)) return q;
    }
  }
  return 0;
}

CandidateChoice mespa_choose(const NetworkTopology& topo, const ReducedSystem& system,
                             std::span<const std::size_t> candidates, std::size_t n_star) {
  if (candidates.empty()) throw ContractViolation("mespa: empty candidate set");

  std::optional<CandidateChoice> inside;   // aggregate >= 0: minimise aggregate - bound
  std::optional<CandidateChoice> below;    // aggregate < 0: minimise aggregate
  CandidateChoice fallback{candidates.front(), std::numeric_limits<double>::quiet_NaN(), 0};
  std::size_t solves = 0;

  for (std::size_t i : candidates) {
    const auto trial = reduced_aggregates(topo, without_user(topo, system, i));
    ++solves;
    if (trial.singular) continue;
    const double x = trial.aggregate[n_star];
    if (!std::isfinite(x)) continue;
    if (x >= 0.0) {
      const double metric = x - trial.upper_bound[n_star];
      if (!inside || metric < inside->metric) inside = CandidateChoice{i, metric, 0};
    } else {
      if (!below || x < below->metric) below = CandidateChoice{i, x, 0};
    }
  }
  CandidateChoice choice = inside ? *inside : below ? *below : fallback;
  choice.solves = solves;
  return choice;
}

CandidateChoice mespa_removal_candidate(const NetworkTopology& topo, const SinrAssignment& assignment, int q,
                                        std::size_t n_star, const JpacOptions& options) {
  auto candidates = removal_candidates(topo, assignment, q, options.restrict_to_candidate_bs
                                                                ? std::optional<std::size_t>(n_star)
                                                                : std::nullopt);
  if (candidates.empty() && options.restrict_to_candidate_bs) candidates = removal_candidates(topo, assignment, q);
  return mespa_choose(topo, build_reduced(topo, assignment), candidates, n_star);
}

double mlspa_sensitivity_uplink(const NetworkTopology& topo, const ReducedSystem& system,
                                std::span<const double> aggregates, std::span<const double> inverse_row,
                                std::size_t user) {
  const double theta = system.theta.at(user);
  if (theta == 0.0) return 0.0;
  const std::size_t b = topo.serving_bs(user);
  const double own = topo.uplink_gain(b, user);
  double acc = 0.0;
  for (std::size_t m = 0; m < system.num_bs(); ++m) {
    const double delta_a = (m == b) ? theta : topo.uplink_gain(m, user) / own * theta;
    acc += inverse_row[m] * delta_a;
  }
  return -aggregates[b] * acc;
}

double mlspa_sensitivity_downlink(const NetworkTopology& topo, const ReducedSystem& system,
                                  std::span<const double> aggregates, std::span<const double> inverse_row,
                                  std::size_t user, bool include_noise_term) {
  const double theta = system.theta.at(user);
  if (theta == 0.0) return 0.0;
  const std::size_t b = topo.serving_bs(user);
  const double own = topo.downlink_gain(user, b);
  double acc = 0.0;
  for (std::size_t n = 0; n < system.num_bs(); ++n) {
    const double delta_a = (n == b) ? theta : topo.downlink_gain(user, n) / own * theta;
    acc += delta_a * aggregates[n];
  }
  double delta = -inverse_row[b] * acc;
  if (include_noise_term) delta -= inverse_row[b] * theta * topo.fields().downlink_noise[user] / own;
  return delta;
}

namespace {

CandidateChoice mlspa_choose(const NetworkTopology& topo, const ReducedSystem& system,
                             const FeasibilityReport& report, std::span<const std::size_t> candidates,
                             std::size_t n_star, const JpacOptions& options) {
  CandidateChoice best{candidates.front(), -1.0, 0};
  if (report.singular) {
    // No aggregates to linearise around: drop the heaviest SINR share.
    for (std::size_t i : candidates) {
      if (system.theta[i] > best.metric) best = CandidateChoice{i, system.theta[i], 0};
    }
    return best;
  }
  const auto row = numerics::invert_row(system.a, n_star);
  best.solves = 1;
  if (!row) {
    for (std::size_t i : candidates) {
      if (system.theta[i] > best.metric) best = CandidateChoice{i, system.theta[i], 1};
    }
    return best;
  }
  for (std::size_t i : candidates) {
    const double delta = system.direction == Direction::Uplink
                             ? mlspa_sensitivity_uplink(topo, system, report.aggregate, *row, i)
                             : mlspa_sensitivity_downlink(topo, system, report.aggregate, *row, i,
                                                          options.downlink_noise_term);
    const double magnitude = std::abs(delta);
    if (magnitude > best.metric) best = CandidateChoice{i, magnitude, 1};
  }
  return best;
}

RemovalTrace run_removal(const NetworkTopology& topo, Direction d, const JpacOptions& options, Algorithm algorithm) {
  RemovalTrace trace;
  trace.algorithm = algorithm;
  trace.direction = d;
  SinrAssignment admitted = SinrAssignment::all(topo, d);

  while (true) {
    const ReducedSystem system = build_reduced(topo, admitted);
    FeasibilityReport report = reduced_aggregates(topo, system);
    ++trace.solve_count;
    if (report.overall) {
      trace.final_report = std::move(report);
      break;
    }
    const int q = deepest_active_priority(topo, admitted);
    if (q == 0) {
      // Nobody left to remove; cannot happen for positive noise.
      trace.final_report = std::move(report);
      break;
    }

    RemovalStep step;
    step.priority = q;
    step.singular_fallback = report.singular;
    step.candidate_bs = report.singular ? most_loaded_bs(system) : select_candidate_bs(report);

    auto candidates = removal_candidates(topo, admitted, q, options.restrict_to_candidate_bs
                                                                 ? std::optional<std::size_t>(step.candidate_bs)
                                                                 : std::nullopt);
    if (candidates.empty()) candidates = removal_candidates(topo, admitted, q);
    step.candidates = candidates.size();

    const CandidateChoice choice = algorithm == Algorithm::Mespa
                                       ? mespa_choose(topo, system, candidates, step.candidate_bs)
                                       : mlspa_choose(topo, system, report, candidates, step.candidate_bs, options);
    trace.solve_count += choice.solves;
    step.user = choice.user;
    step.metric = choice.metric;
    admitted.remove(choice.user);
    trace.steps.push_back(step);
  }

  trace.admitted = admitted;
  if (trace.final_report.overall) {
    trace.powers = power_from_aggregates(topo, admitted, trace.final_report);
  } else {
    trace.powers = make_allocation(topo, d, std::vector<double>(topo.num_users(), 0.0));
  }
  return trace;
}

}  // namespace

RemovalTrace run_mespa(const NetworkTopology& topo, Direction d, const JpacOptions& options) {
  return run_removal(topo, d, options, Algorithm::Mespa);
}

RemovalTrace run_mlspa(const NetworkTopology& topo, Direction d, const JpacOptions& options) {
  return run_removal(topo, d, options, Algorithm::Mlspa);
}

OracleResult brute_force_oracle(const NetworkTopology& topo, Direction d) {
  const std::size_t M = topo.num_users();
  if (M > kOracleMaxUsers) {
    throw std::invalid_argument("brute_force_oracle: " + std::to_string(M) + " users exceeds the limit of " +
                                std::to_string(kOracleMaxUsers));
  }
  OracleResult result;
  result.best = SinrAssignment::none(topo, d);
  result.powers = make_allocation(topo, d, std::vector<double>(M, 0.0));

  const std::uint32_t total = std::uint32_t{1} << M;
  std::vector<bool> mask(M);
  for (std::uint32_t bits = 1; bits < total; ++bits) {
    const auto size = static_cast<std::size_t>(std::popcount(bits));
    if (size <= result.optimum) continue;
    for (std::size_t i = 0; i < M; ++i) mask[i] = (bits >> i) & 1U;
    if (!priority_constraints_hold(topo, mask)) continue;
    const SinrAssignment candidate(d, mask);
    const auto solution = classic_power(topo, candidate);
    ++result.subsets_checked;
    if (!solution.feasible) continue;
    result.optimum = size;
    result.best = candidate;
    result.powers = solution.allocation;
  }
  return result;
}

}  // namespace tierpac
