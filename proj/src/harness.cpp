#include "tierpac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace tierpac {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::None: return "none";
    case SweepParameter::Users: return "users";
    case SweepParameter::Gamma: return "gamma";
    case SweepParameter::Shadowing: return "shadowing";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view s) {
  if (s == "none") return SweepParameter::None;
  if (s == "users") return SweepParameter::Users;
  if (s == "gamma") return SweepParameter::Gamma;
  if (s == "shadowing") return SweepParameter::Shadowing;
  throw std::invalid_argument("unknown sweep parameter '" + std::string(s) + "'");
}

std::vector<double> default_sweep_values(SweepParameter p) {
  switch (p) {
    case SweepParameter::None: return {0.0};
    case SweepParameter::Users: return {0.0, 2.0, 4.0, 6.0, 8.0};
    case SweepParameter::Gamma: return {-16.0, -14.0, -12.0, -10.0, -8.0};
    case SweepParameter::Shadowing: return {0.0, 2.0, 4.0, 6.0};
  }
  return {0.0};
}

ScenarioSpec apply_sweep(const ScenarioSpec& base, SweepParameter p, double value) {
  ScenarioSpec spec = base;
  switch (p) {
    case SweepParameter::None: break;
    case SweepParameter::Users: spec.extra_users_per_tier = value; break;
    case SweepParameter::Gamma:
      for (auto& tier : spec.tiers) tier.target_sinr_db = {value, value - 6.0};
      break;
    case SweepParameter::Shadowing:
      spec.shadowing_db = value;
      spec.shadowing_indoor_db = value;
      break;
  }
  return spec;
}

void validate(const RunConfig& config) {
  if (config.snapshots < 1) throw std::invalid_argument("snapshots must be at least 1");
  if (config.sweep.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (config.workers < 1) throw std::invalid_argument("workers must be at least 1");
  for (double v : config.sweep.values) validate(apply_sweep(config.spec, config.sweep.parameter, v));
}

double OutageStats::mean_outage(std::size_t sweep_index, std::size_t tier) const {
  const double value = sweep_values.at(sweep_index);
  for (const auto& s : summary) {
    if (s.sweep_value == value && s.tier == tier) return s.mean_outage;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AdmissionOutcome run_admission(const NetworkTopology& topo, Algorithm algorithm, Direction d,
                               const JpacOptions& options) {
  AdmissionOutcome out;
  if (algorithm == Algorithm::Oracle) {
    auto result = brute_force_oracle(topo, d);
    out.admitted = std::move(result.best);
    out.powers = std::move(result.powers);
    out.solves = result.subsets_checked;
    out.removals = topo.num_users() - result.optimum;
    return out;
  }
  auto trace = algorithm == Algorithm::Mespa ? run_mespa(topo, d, options) : run_mlspa(topo, d, options);
  if (auto problems = check_solve_count(trace); !problems.empty()) throw InvariantViolation(problems.front());
  out.admitted = std::move(trace.admitted);
  out.powers = std::move(trace.powers);
  out.solves = trace.solve_count;
  out.removals = trace.steps.size();
  return out;
}

std::vector<std::string> check_solve_count(const RemovalTrace& trace) {
  const std::size_t removals = trace.steps.size();
  std::size_t bound = 0;
  if (trace.algorithm == Algorithm::Mlspa) {
    bound = 2 * (removals + 1);
  } else {
    // The terminating iteration has no candidates and costs one check.
    for (const auto& step : trace.steps) bound += step.candidates + 1;
    bound += 1;
  }
  if (trace.solve_count <= bound) return {};
  return {std::string(to_string(trace.algorithm)) + ": " + std::to_string(trace.solve_count) +
          " solves exceed the bound of " + std::to_string(bound) + " for " + std::to_string(removals) + " removals"};
}

std::vector<TierOutcome> tier_outcomes(const NetworkTopology& topo, const PowerAllocation& powers, Direction d) {
  std::vector<TierOutcome> tiers;
  const auto supported = supported_set(topo, powers.per_user, d);
  std::vector<bool> ok(topo.num_users(), false);
  for (std::size_t i : supported) ok[i] = true;
  for (std::size_t t = 0; t < topo.num_tiers(); ++t) {
    const auto& users = topo.index().users_of_tier[t];
    if (users.empty()) continue;
    TierOutcome o{t, topo.priority_of_tier(t), users.size(), 0};
    for (std::size_t i : users) o.supported += ok[i] ? 1 : 0;
    tiers.push_back(o);
  }
  return tiers;
}

bool staircase_holds(std::span<const TierOutcome> tiers) {
  for (const auto& partial : tiers) {
    if (partial.supported == 0 || partial.supported == partial.total) continue;
    for (const auto& other : tiers) {
      if (other.priority < partial.priority && other.supported != other.total) return false;
      if (other.priority > partial.priority && other.supported != 0) return false;
    }
  }
  return true;
}

namespace {

constexpr double kPowerSlack = 1e-9;   // relative slack on the power caps
constexpr double kTargetMatch = 1e-8;  // relative distance of achieved SINR from target
constexpr double kPowerMatch = 1e-9;   // relative agreement of reduced and classic powers

std::string user_label(std::size_t i) { return "user " + std::to_string(i); }

}  // namespace

std::vector<std::string> check_outcome(const NetworkTopology& topo, const AdmissionOutcome& outcome, Direction d) {
  std::vector<std::string> problems;
  const auto& admitted = outcome.admitted;
  const auto& p = outcome.powers.per_user;

  const auto reduced = check_reduced(topo, admitted);
  const auto classic = classic_power(topo, admitted);
  if (!reduced.overall) problems.push_back("admitted set fails the reduced feasibility check");
  if (!classic.feasible) problems.push_back("admitted set fails the classic feasibility check");

  if (classic.feasible) {
    for (std::size_t i = 0; i < topo.num_users(); ++i) {
      const double ref = classic.allocation.per_user[i];
      if (std::abs(p[i] - ref) > kPowerMatch * std::max(std::abs(ref), std::numeric_limits<double>::min())) {
        problems.push_back(user_label(i) + ": power differs from the classic solution");
      }
    }
  }

  const auto sinr = achieved_sinr(topo, p, d);
  const auto targets = topo.target_sinr(d);
  for (std::size_t i = 0; i < topo.num_users(); ++i) {
    if (!admitted.contains(i)) {
      if (p[i] != 0.0) problems.push_back(user_label(i) + ": not admitted but transmits");
      continue;
    }
    if (std::abs(sinr[i] - targets[i]) > kTargetMatch * targets[i]) {
      problems.push_back(user_label(i) + ": SINR is off target");
    }
    if (d == Direction::Uplink && p[i] > topo.fields().p_max[i] * (1.0 + kPowerSlack)) {
      problems.push_back(user_label(i) + ": power above cap");
    }
    if (p[i] < 0.0) problems.push_back(user_label(i) + ": negative power");
  }
  if (d == Direction::Downlink) {
    for (std::size_t m = 0; m < topo.num_bs(); ++m) {
      if (outcome.powers.per_bs_total[m] > topo.fields().bs_p_max[m] * (1.0 + kPowerSlack)) {
        problems.push_back("BS " + std::to_string(m) + ": total power above cap");
      }
    }
  }

  if (!priority_constraints_hold(topo, admitted)) problems.push_back("priority constraints violated");
  if (!staircase_holds(tier_outcomes(topo, outcome.powers, d))) problems.push_back("tier outages are not a staircase");
  return problems;
}

namespace {

struct Job {
  std::size_t sweep_index;
  std::size_t snapshot;
};

SnapshotRecord run_job(const RunConfig& config, const std::vector<ScenarioSpec>& specs, const Job& job) {
  SnapshotRecord record;
  record.sweep_index = job.sweep_index;
  record.snapshot = job.snapshot;

  const auto topo = sample_topology(specs[job.sweep_index], derive_seed(config.seed, job.snapshot));
  record.users = topo.num_users();
  if (topo.num_users() == 0) return record;

  const auto start = std::chrono::steady_clock::now();
  const auto outcome = run_admission(topo, config.algorithm, config.direction, config.options);
  const auto stop = std::chrono::steady_clock::now();
  if (config.timing) {
    record.runtime_us = std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count();
  }

  if (auto problems = check_outcome(topo, outcome, config.direction); !problems.empty()) {
    std::ostringstream msg;
    msg << "invariant violation at sweep value " << config.sweep.values[job.sweep_index] << ", snapshot "
        << job.snapshot << " (" << to_string(config.algorithm) << ", " << to_string(config.direction) << "):";
    for (const auto& p : problems) msg << "\n  " << p;
    throw InvariantViolation(msg.str());
  }

  record.removals = outcome.removals;
  record.solves = outcome.solves;
  record.tiers = tier_outcomes(topo, outcome.powers, config.direction);
  return record;
}

std::vector<TierSummary> summarize(const RunConfig& config, const std::vector<SnapshotRecord>& records) {
  const std::size_t tiers = config.spec.tiers.size();
  std::vector<TierSummary> out;
  for (std::size_t s = 0; s < config.sweep.values.size(); ++s) {
    std::vector<TierSummary> acc(tiers);
    for (std::size_t t = 0; t < tiers; ++t) {
      acc[t].sweep_value = config.sweep.values[s];
      acc[t].tier = t;
      acc[t].priority = config.spec.tiers[t].priority;
    }
    // Records are in snapshot order, so the sums are reproducible.
    for (const auto& r : records) {
      if (r.sweep_index != s) continue;
      for (const auto& o : r.tiers) {
        auto& a = acc[o.tier];
        ++a.snapshots;
        a.mean_total += static_cast<double>(o.total);
        a.mean_supported += static_cast<double>(o.supported);
        a.mean_outage += o.outage();
        a.mean_solves += static_cast<double>(r.solves);
      }
    }
    for (auto& a : acc) {
      if (a.snapshots == 0) continue;
      const double n = static_cast<double>(a.snapshots);
      a.mean_total /= n;
      a.mean_supported /= n;
      a.mean_outage /= n;
      a.mean_solves /= n;
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

OutageStats run_experiment(const RunConfig& config) {
  validate(config);
  const auto wall_start = std::chrono::steady_clock::now();

  std::vector<ScenarioSpec> specs;
  for (double v : config.sweep.values) specs.push_back(apply_sweep(config.spec, config.sweep.parameter, v));

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t k = 0; k < config.snapshots; ++k) jobs.push_back({s, k});
  }

  std::vector<SnapshotRecord> records(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        records[j] = run_job(config, specs, jobs[j]);
      } catch (...) {
        errors[j] = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t workers = std::min(config.workers, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  OutageStats stats;
  stats.sweep_values = config.sweep.values;
  stats.records = std::move(records);
  stats.summary = summarize(config, stats.records);
  for (const auto& r : stats.records) stats.total_solves += r.solves;
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return stats;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_snapshot_csv(std::ostream& out, const OutageStats& stats) {
  out << "sweep_value,snapshot,tier,priority,total,supported,outage,solves,runtime_us\n";
  for (const auto& r : stats.records) {
    for (const auto& t : r.tiers) {
      out << fmt(stats.sweep_values[r.sweep_index]) << ',' << r.snapshot << ',' << t.tier << ',' << t.priority << ','
          << t.total << ',' << t.supported << ',' << fmt(t.outage()) << ',' << r.solves << ',' << r.runtime_us
          << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const OutageStats& stats) {
  out << "sweep_value,tier,priority,snapshots,mean_total,mean_supported,mean_outage,mean_solves\n";
  for (const auto& s : stats.summary) {
    out << fmt(s.sweep_value) << ',' << s.tier << ',' << s.priority << ',' << s.snapshots << ','
        << fmt(s.mean_total) << ',' << fmt(s.mean_supported) << ',' << fmt(s.mean_outage) << ','
        << fmt(s.mean_solves) << '\n';
  }
}

void write_csv_files(const std::string& prefix, const OutageStats& stats) {
  std::ofstream snapshots(prefix + ".snapshots.csv", std::ios::binary);
  std::ofstream summary(prefix + ".summary.csv", std::ios::binary);
  if (!snapshots || !summary) throw std::runtime_error("cannot write CSV files with prefix " + prefix);
  write_snapshot_csv(snapshots, stats);
  write_summary_csv(summary, stats);
}

}  // namespace tierpac
