#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tierpac/harness.hpp"
#include "tierpac/jpac.hpp"

using namespace tierpac;
using tierpac::testing::make_fields;
using tierpac::testing::set_gain;

namespace {

FeasibilityReport report_of(std::vector<double> aggregate, std::vector<double> bound) {
  FeasibilityReport r;
  r.aggregate = std::move(aggregate);
  r.upper_bound = std::move(bound);
  for (std::size_t m = 0; m < r.aggregate.size(); ++m) {
    const double x = r.aggregate[m];
    r.verdict_per_bs.push_back(x < 0.0                ? BsVerdict::LowerViolation
                               : x > r.upper_bound[m] ? BsVerdict::UpperViolation
                                                      : BsVerdict::Feasible);
  }
  r.overall = false;
  return r;
}

// Two co-located BSs, one per priority level, every link of unit gain.
NetworkTopology two_priority_pair() {
  auto f = make_fields(2, 2);
  f.num_tiers = 2;
  f.num_priorities = 2;
  f.tier_of_bs = {0, 1};
  f.priority_of_tier = {1, 2};
  f.serving_bs = {0, 1};
  return NetworkTopology::build(f);
}

}  // namespace

TEST_CASE("candidate BS selection") {
  CHECK(select_candidate_bs(report_of({-2.0, -10.0}, {1.0, 1.0})) == 0);
  CHECK(select_candidate_bs(report_of({5.0, 9.0}, {4.0, 4.0})) == 1);
  // Lower-bound violations outrank any upper-bound gap.
  CHECK(select_candidate_bs(report_of({-1.0, 7.0}, {100.0, 4.0})) == 0);
  CHECK(select_candidate_bs(report_of({-3.0, 7.0, -1.0}, {100.0, 4.0, 1.0})) == 2);
  // Ties go to the lowest index.
  CHECK(select_candidate_bs(report_of({5.0, 5.0}, {4.0, 4.0})) == 0);

  FeasibilityReport singular;
  singular.singular = true;
  CHECK_THROWS_AS(select_candidate_bs(singular), ContractViolation);
  auto feasible = report_of({1.0}, {2.0});
  feasible.overall = true;
  CHECK_THROWS_AS(select_candidate_bs(feasible), ContractViolation);
}

TEST_CASE("MESPA candidate choice on a single overloaded BS") {
  SUBCASE("removal leaving a non-negative aggregate wins; lowest index breaks the tie") {
    auto f = make_fields(3);
    f.target_sinr_up = {1.0, 1.0, 0.2};
    const auto topo = NetworkTopology::build(f);
    const auto all = SinrAssignment::all(topo, Direction::Uplink);
    const auto report = check_reduced(topo, all);
    REQUIRE(report.aggregate[0] == doctest::Approx(-6.0));

    // Dropping user 2 leaves sum theta = 1 exactly (singular); dropping 0 or 1 leaves 3N.
    auto without0 = all;
    without0.remove(0);
    CHECK(check_reduced(topo, without0).aggregate[0] == doctest::Approx(3.0));
    auto without2 = all;
    without2.remove(2);
    CHECK(check_reduced(topo, without2).singular);

    const auto choice = mespa_removal_candidate(topo, all, 1, 0);
    CHECK(choice.user == 0);
    CHECK(choice.solves == 3);
  }
  SUBCASE("all removals leave a negative aggregate; lowest index wins") {
    const auto topo = NetworkTopology::build(make_fields(4));
    const auto all = SinrAssignment::all(topo, Direction::Uplink);
    for (std::size_t i = 0; i < 4; ++i) {
      auto a = all;
      a.remove(i);
      // Three users at theta = 1/2: N / (1 - 3/2) = -2N.
      CHECK(check_reduced(topo, a).aggregate[0] == doctest::Approx(-2.0));
    }
    CHECK(mespa_removal_candidate(topo, all, 1, 0).user == 0);
  }
  SUBCASE("a single candidate is chosen regardless of its metric") {
    const auto topo = two_priority_pair();
    const auto all = SinrAssignment::all(topo, Direction::Uplink);
    const auto choice = mespa_removal_candidate(topo, all, 2, 0);
    CHECK(choice.user == 1);
  }
}

TEST_CASE("MLSPA sensitivity with one BS") {
  auto f = make_fields(3);
  f.target_sinr_up = {0.1, 0.3, 0.2};
  f.target_sinr_down = {0.1, 0.3, 0.2};
  const auto topo = NetworkTopology::build(f);
  for (auto d : {Direction::Uplink, Direction::Downlink}) {
    const auto all = SinrAssignment::all(topo, d);
    const auto system = build_reduced(topo, all);
    const auto report = reduced_aggregates(topo, system);
    const auto row = numerics::invert_row(system.a, 0);
    REQUIRE(row);
    double sum_theta = 0.0;
    for (double t : system.theta) sum_theta += t;
    for (std::size_t i = 0; i < 3; ++i) {
      const double delta = d == Direction::Uplink
                               ? mlspa_sensitivity_uplink(topo, system, report.aggregate, *row, i)
                               : mlspa_sensitivity_downlink(topo, system, report.aggregate, *row, i);
      const double expected = report.aggregate[0] * system.theta[i] / (1.0 - sum_theta);
      CHECK(std::abs(delta) == doctest::Approx(expected));
      // Dropping a user lowers the aggregate.
      CHECK(delta < 0.0);
    }
    // An already-removed user contributes nothing.
    const auto reduced = without_user(topo, system, 1);
    CHECK(mlspa_sensitivity_uplink(topo, reduced, report.aggregate, *row, 1) == 0.0);
    CHECK(mlspa_sensitivity_downlink(topo, reduced, report.aggregate, *row, 1, true) == 0.0);
  }
}

TEST_CASE("MLSPA first-order prediction tracks the exact change for small shares") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto f = make_fields(6, 2);
    for (std::size_t i = 0; i < 6; ++i) {
      f.serving_bs[i] = i % 2;
      for (std::size_t m = 0; m < 2; ++m) {
        const bool serving = m == f.serving_bs[i];
        f.uplink_gain(m, i) = serving ? 1.0 : std::pow(10.0, -2.0 * unit(rng));
        f.downlink_gain(i, m) = serving ? 1.0 : std::pow(10.0, -2.0 * unit(rng));
      }
      // theta <= 0.05 means gamma <= 1/19.
      f.target_sinr_up[i] = unit(rng) / 19.0 + 1e-4;
      f.target_sinr_down[i] = unit(rng) / 19.0 + 1e-4;
    }
    f.uplink_noise = {1.0, 0.5 + unit(rng)};
    f.downlink_noise.assign(6, 1.0);
    const auto topo = NetworkTopology::build(f);

    for (auto d : {Direction::Uplink, Direction::Downlink}) {
      const auto all = SinrAssignment::all(topo, d);
      const auto system = build_reduced(topo, all);
      const auto report = reduced_aggregates(topo, system);
      REQUIRE_FALSE(report.singular);
      const std::size_t n_star = trial % 2;
      const auto row = numerics::invert_row(system.a, n_star);
      REQUIRE(row);
      for (std::size_t i = 0; i < 6; ++i) {
        const double predicted = d == Direction::Uplink
                                     ? mlspa_sensitivity_uplink(topo, system, report.aggregate, *row, i)
                                     : mlspa_sensitivity_downlink(topo, system, report.aggregate, *row, i, true);
        const auto after = reduced_aggregates(topo, without_user(topo, system, i));
        const double exact = after.aggregate[n_star] - report.aggregate[n_star];
        CHECK(std::abs(predicted - exact) <= 0.1 * std::abs(exact));
        ++checked;
      }
    }
  }
  CHECK(checked == 300 * 2 * 6);
}

TEST_CASE("removal algorithms on hand-sized cases") {
  SUBCASE("feasible instance needs no removal") {
    const auto topo = NetworkTopology::build(make_fields(1));
    for (auto run : {run_mespa, run_mlspa}) {
      const auto trace = run(topo, Direction::Uplink, {});
      CHECK(trace.steps.empty());
      CHECK(trace.admitted.count() == 1);
      CHECK(trace.solve_count == 1);
      CHECK(trace.powers.per_user[0] == doctest::Approx(1.0));
    }
  }
  SUBCASE("the lower-priority user goes first") {
    const auto topo = two_priority_pair();
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
      for (auto run : {run_mespa, run_mlspa}) {
        const auto trace = run(topo, d, {});
        REQUIRE(trace.steps.size() == 1);
        CHECK(trace.steps[0].user == 1);
        CHECK(trace.steps[0].priority == 2);
        CHECK(trace.admitted.members() == std::vector<std::size_t>{0});
      }
    }
  }
  SUBCASE("MLSPA drops the largest share on one BS") {
    auto f = make_fields(3);
    f.target_sinr_up = {0.4, 0.9, 0.6};
    const auto topo = NetworkTopology::build(f);
    const auto trace = run_mlspa(topo, Direction::Uplink, {});
    REQUIRE_FALSE(trace.steps.empty());
    CHECK(trace.steps[0].user == 1);
  }
  SUBCASE("a singular system falls back to the most loaded BS") {
    const auto topo = NetworkTopology::build(make_fields(2));
    const auto trace = run_mespa(topo, Direction::Uplink, {});
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.steps[0].singular_fallback);
    CHECK(trace.steps[0].candidate_bs == 0);
    CHECK(trace.admitted.count() == 1);
  }
}

TEST_CASE("restricting candidates to the candidate BS") {
  // BS 0 overloaded; BS 1 holds one lightly loaded user of the same priority.
  auto f = make_fields(4, 2);
  f.serving_bs = {0, 0, 0, 1};
  f.target_sinr_up = {1.0, 1.0, 1.0, 3.0};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t other = 1 - f.serving_bs[i];
    set_gain(f, i, other, 1e-3);
  }
  const auto topo = NetworkTopology::build(f);
  const auto trace = run_mlspa(topo, Direction::Uplink, {.restrict_to_candidate_bs = true});
  REQUIRE_FALSE(trace.steps.empty());
  for (const auto& step : trace.steps) CHECK(topo.serving_bs(step.user) == step.candidate_bs);
}

TEST_CASE("brute-force oracle") {
  SUBCASE("feasible instance keeps everyone") {
    const auto topo = NetworkTopology::build(make_fields(1));
    CHECK(brute_force_oracle(topo, Direction::Uplink).optimum == 1);
  }
  SUBCASE("two users at target 1 on one BS") {
    const auto topo = NetworkTopology::build(make_fields(2));
    const auto r = brute_force_oracle(topo, Direction::Uplink);
    CHECK(r.optimum == 1);
    CHECK(r.best.members() == std::vector<std::size_t>{0});
  }
  SUBCASE("priority constraint forbids serving only the lower level") {
    auto f = make_fields(2, 2);
    f.num_tiers = 2;
    f.num_priorities = 2;
    f.tier_of_bs = {0, 1};
    f.priority_of_tier = {1, 2};
    f.serving_bs = {0, 1};
    f.p_max = {0.5, 10.0};  // user 0 alone needs power 1
    const auto topo = NetworkTopology::build(f);
    REQUIRE_FALSE(check_reduced(topo, SinrAssignment::of(topo, Direction::Uplink, std::vector<std::size_t>{0})).overall);
    REQUIRE(check_reduced(topo, SinrAssignment::of(topo, Direction::Uplink, std::vector<std::size_t>{1})).overall);
    CHECK(brute_force_oracle(topo, Direction::Uplink).optimum == 0);
  }
  SUBCASE("size limit") {
    const auto topo = NetworkTopology::build(make_fields(kOracleMaxUsers + 1));
    CHECK_THROWS_AS(brute_force_oracle(topo, Direction::Uplink), std::invalid_argument);
  }
}

TEST_CASE("heuristics never beat the oracle and respect priorities") {
  std::mt19937_64 rng(41);
  int nonempty_when_possible = 0;
  int possible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t K = 1 + trial % 3;
    const auto topo = testing::random_instance(
        rng, {.max_bs = 3, .min_users = 2, .max_users = 8, .priorities = K, .gain_decades = 3.0, .target_db_min = -10.0,
              .target_db_max = 5.0});
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
      const auto oracle = brute_force_oracle(topo, d);
      for (auto run : {run_mespa, run_mlspa}) {
        const auto trace = run(topo, d, {});
        CHECK(trace.admitted.count() <= oracle.optimum);
        CHECK(priority_constraints_hold(topo, trace.admitted));
        CHECK(check_solve_count(trace).empty());
        // Removal priorities never move towards higher priority.
        for (std::size_t k = 1; k < trace.steps.size(); ++k) {
          CHECK(trace.steps[k].priority <= trace.steps[k - 1].priority);
        }
        if (K == 1 && oracle.optimum >= 1) {
          ++possible;
          nonempty_when_possible += trace.admitted.count() >= 1 ? 1 : 0;
        }
      }
    }
  }
  CHECK(possible > 0);
  CHECK(nonempty_when_possible == possible);
}
