#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tierpac/feasibility.hpp"

using namespace tierpac;
using tierpac::testing::make_fields;
using tierpac::testing::relative_error;
using tierpac::testing::set_gain;

namespace {

SinrAssignment all_up(const NetworkTopology& t) { return SinrAssignment::all(t, Direction::Uplink); }
SinrAssignment all_down(const NetworkTopology& t) { return SinrAssignment::all(t, Direction::Downlink); }

}  // namespace

TEST_CASE("uplink reduced system construction") {
  SUBCASE("empty assignment gives the identity") {
    auto f = make_fields(2, 2);
    f.uplink_noise = {3.0, 4.0};
    const auto topo = NetworkTopology::build(f);
    const auto s = build_reduced_uplink(topo, SinrAssignment::none(topo, Direction::Uplink));
    CHECK(s.a == numerics::Matrix::identity(2));
    CHECK(s.rhs == std::vector<double>{3.0, 4.0});
  }
  SUBCASE("single user at target 1") {
    const auto topo = NetworkTopology::build(make_fields(1));
    const auto s = build_reduced_uplink(topo, all_up(topo));
    CHECK(s.theta[0] == doctest::Approx(0.5));
    CHECK(s.a(0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("two BSs with one user each") {
    auto f = make_fields(2, 2);
    f.serving_bs = {0, 1};
    // uplink_gain(m, i): user i to BS m
    f.uplink_gain(0, 0) = 2.0;
    f.uplink_gain(1, 0) = 0.3;
    f.uplink_gain(0, 1) = 0.7;
    f.uplink_gain(1, 1) = 5.0;
    const auto topo = NetworkTopology::build(f);
    const auto s = build_reduced_uplink(topo, all_up(topo));
    CHECK(s.a(0, 0) == doctest::Approx(0.5));
    CHECK(s.a(1, 1) == doctest::Approx(0.5));
    CHECK(s.a(0, 1) == doctest::Approx(-0.5 * 0.7 / 5.0));
    CHECK(s.a(1, 0) == doctest::Approx(-0.5 * 0.3 / 2.0));
  }
}

TEST_CASE("downlink reduced system construction") {
  SUBCASE("empty assignment") {
    const auto topo = NetworkTopology::build(make_fields(2, 2));
    const auto s = build_reduced_downlink(topo, SinrAssignment::none(topo, Direction::Downlink));
    CHECK(s.a == numerics::Matrix::identity(2));
    CHECK(s.rhs == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("one BS, two users") {
    auto f = make_fields(2);
    set_gain(f, 1, 0, 0.5);
    f.target_sinr_down = {0.5, 0.5};
    const auto topo = NetworkTopology::build(f);
    const auto s = build_reduced_downlink(topo, all_down(topo));
    CHECK(s.theta[0] == doctest::Approx(1.0 / 3.0));
    CHECK(s.a(0, 0) == doctest::Approx(1.0 - 2.0 / 3.0));
    CHECK(s.rhs[0] == doctest::Approx(1.0));
  }
  SUBCASE("idle BS has a zero interference row and zero effective noise") {
    auto f = make_fields(2, 2);
    set_gain(f, 0, 1, 0.2);
    set_gain(f, 1, 1, 0.4);
    f.target_sinr_down = {0.25, 0.25};
    const auto topo = NetworkTopology::build(f);
    const auto s = build_reduced_downlink(topo, all_down(topo));
    CHECK(s.a(1, 0) == 0.0);
    CHECK(s.a(1, 1) == 1.0);
    CHECK(s.rhs[1] == 0.0);
    const auto r = reduced_aggregates(topo, s);
    CHECK(r.aggregate[1] == 0.0);
  }
}

TEST_CASE("uplink reduced verdicts") {
  SUBCASE("single link") {
    auto f = make_fields(1);
    f.p_max = {10.0};
    const auto topo = NetworkTopology::build(f);
    const auto r = check_reduced(topo, all_up(topo));
    REQUIRE_FALSE(r.singular);
    CHECK(r.aggregate[0] == doctest::Approx(2.0));
    CHECK(r.upper_bound[0] == doctest::Approx(20.0));
    CHECK(r.verdict_per_bs[0] == BsVerdict::Feasible);
    CHECK(r.overall);
    const auto p = power_from_aggregates(topo, all_up(topo), r);
    CHECK(p.per_user[0] == doctest::Approx(1.0));
  }
  SUBCASE("two users at target 1 sit on the boundary") {
    const auto topo = NetworkTopology::build(make_fields(2));
    const auto r = check_reduced(topo, all_up(topo));
    CHECK(r.singular);
    CHECK_FALSE(r.overall);
    CHECK(r.verdict_per_bs.empty());
    const auto c = classic_power(topo, all_up(topo));
    CHECK(c.singular);
    CHECK_FALSE(c.feasible);
  }
  SUBCASE("overloaded BS has a negative aggregate") {
    auto f = make_fields(3);
    f.target_sinr_up = {1.0, 1.0, 0.2};
    const auto topo = NetworkTopology::build(f);
    const auto r = check_reduced(topo, all_up(topo));
    REQUIRE_FALSE(r.singular);
    CHECK(r.aggregate[0] == doctest::Approx(-6.0));
    CHECK(r.verdict_per_bs[0] == BsVerdict::LowerViolation);
    const auto c = classic_power(topo, all_up(topo));
    CHECK_FALSE(c.feasible);
    CHECK(*std::min_element(c.allocation.per_user.begin(), c.allocation.per_user.end()) < 0.0);
  }
  SUBCASE("power cap violation") {
    auto f = make_fields(1);
    f.p_max = {0.5};
    const auto topo = NetworkTopology::build(f);
    const auto r = check_reduced(topo, all_up(topo));
    CHECK(r.verdict_per_bs[0] == BsVerdict::UpperViolation);
    CHECK_FALSE(classic_power(topo, all_up(topo)).feasible);
    CHECK_THROWS_AS(power_from_aggregates(topo, all_up(topo), r), ContractViolation);
  }
  SUBCASE("idle BS has an unbounded aggregate range") {
    const auto topo = NetworkTopology::build(make_fields(1, 2));
    const auto r = check_reduced(topo, all_up(topo));
    CHECK(std::isinf(r.upper_bound[1]));
    CHECK(r.verdict_per_bs[1] == BsVerdict::Feasible);
  }
}

TEST_CASE("uplink powers from aggregates") {
  auto f = make_fields(2);
  f.uplink_gain(0, 0) = 2.0;
  f.uplink_gain(0, 1) = 4.0;
  f.target_sinr_up = {0.5, 0.5};
  const auto topo = NetworkTopology::build(f);
  const auto r = check_reduced(topo, all_up(topo));
  CHECK(r.aggregate[0] == doctest::Approx(3.0));
  const auto p = power_from_aggregates(topo, all_up(topo), r);
  CHECK(p.per_user[0] == doctest::Approx(0.5));
  CHECK(p.per_user[1] == doctest::Approx(0.25));
  const auto sinr = achieved_sinr(topo, p.per_user, Direction::Uplink);
  CHECK(sinr[0] == doctest::Approx(0.5));
  CHECK(sinr[1] == doctest::Approx(0.5));
}

TEST_CASE("downlink powers from aggregates") {
  auto f = make_fields(2);
  set_gain(f, 1, 0, 0.5);
  f.target_sinr_down = {0.5, 0.5};
  const auto topo = NetworkTopology::build(f);
  const auto r = check_reduced(topo, all_down(topo));
  CHECK(r.aggregate[0] == doctest::Approx(3.0));
  const auto p = power_from_aggregates(topo, all_down(topo), r);
  CHECK(p.per_user[0] == doctest::Approx(4.0 / 3.0));
  CHECK(p.per_user[1] == doctest::Approx(5.0 / 3.0));
  CHECK(p.per_bs_total[0] == doctest::Approx(3.0));
  const auto sinr = achieved_sinr(topo, p.per_user, Direction::Downlink);
  CHECK(sinr[0] == doctest::Approx(0.5));
  CHECK(sinr[1] == doctest::Approx(0.5));

  const auto c = classic_power(topo, all_down(topo));
  CHECK(c.feasible);
  CHECK(c.allocation.per_user[0] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("downlink BS power cap") {
  auto f = make_fields(2);
  set_gain(f, 1, 0, 0.5);
  f.target_sinr_down = {0.5, 0.5};
  f.bs_p_max = {2.9};
  const auto topo = NetworkTopology::build(f);
  const auto r = check_reduced(topo, all_down(topo));
  CHECK(r.verdict_per_bs[0] == BsVerdict::UpperViolation);
  CHECK_FALSE(classic_power(topo, all_down(topo)).feasible);
}

TEST_CASE("empty assignment is feasible with zero power") {
  const auto topo = NetworkTopology::build(make_fields(3, 2));
  for (auto d : {Direction::Uplink, Direction::Downlink}) {
    const auto none = SinrAssignment::none(topo, d);
    const auto r = check_reduced(topo, none);
    CHECK(r.overall);
    const auto p = power_from_aggregates(topo, none, r);
    CHECK(p.per_user == std::vector<double>(3, 0.0));
    CHECK(classic_power(topo, none).feasible);
  }
}

TEST_CASE("without_user matches a rebuild") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto topo = testing::random_instance(rng, {.max_bs = 5, .max_users = 12});
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
      auto a = testing::random_subset(rng, topo, d);
      const auto members = a.members();
      if (members.empty()) continue;
      const std::size_t drop = members[rng() % members.size()];
      const auto before = build_reduced(topo, a);
      const auto updated = without_user(topo, before, drop);
      a.remove(drop);
      const auto rebuilt = build_reduced(topo, a);
      CHECK(updated.theta == rebuilt.theta);
      // Subtracting a contribution cancels against the full sum, so the
      // error scales with the largest entry rather than the entry itself.
      double scale_a = 1.0;
      double scale_rhs = 0.0;
      for (std::size_t r = 0; r < topo.num_bs(); ++r) {
        scale_rhs = std::max(scale_rhs, std::abs(before.rhs[r]));
        for (std::size_t c = 0; c < topo.num_bs(); ++c) scale_a = std::max(scale_a, std::abs(before.a(r, c)));
      }
      for (std::size_t r = 0; r < topo.num_bs(); ++r) {
        CHECK(std::abs(updated.rhs[r] - rebuilt.rhs[r]) <= 1e-12 * scale_rhs);
        for (std::size_t c = 0; c < topo.num_bs(); ++c) {
          CHECK(std::abs(updated.a(r, c) - rebuilt.a(r, c)) <= 1e-12 * scale_a);
        }
      }
    }
  }
}

TEST_CASE("reduced and classic paths agree on random instances") {
  std::mt19937_64 rng(17);
  std::size_t feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto topo = testing::random_instance(rng, {.max_bs = 4, .max_users = 15});
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
      const auto a = testing::random_subset(rng, topo, d);
      const auto r = check_reduced(topo, a);
      const auto c = classic_power(topo, a);
      REQUIRE(r.overall == c.feasible);
      if (!r.overall) continue;
      ++feasible;
      const auto p = power_from_aggregates(topo, a, r);
      for (std::size_t i = 0; i < topo.num_users(); ++i) {
        if (a.contains(i)) {
          CHECK(relative_error(p.per_user[i], c.allocation.per_user[i]) < 1e-9);
        } else {
          CHECK(p.per_user[i] == 0.0);
        }
      }
    }
  }
  CHECK(feasible > 50);
}
