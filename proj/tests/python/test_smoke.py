import json
from pathlib import Path

import pytest

import tierpac

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def load(name):
    return json.loads((FIXTURES / name).read_text())


def test_single_link_powers():
    report = tierpac.check(load("single_link.json"))
    assert report["overall"] is True
    assert report["aggregate"] == pytest.approx([2.0])
    assert report["powers"]["per_user"] == pytest.approx([1.0])


def test_reduced_and_classic_agree():
    topo = load("two_tier.json")
    for direction in ("uplink", "downlink"):
        reduced = tierpac.check(topo, direction, admit=[0, 2])
        classic = tierpac.check(topo, direction, admit=[0, 2], method="classic")
        assert reduced["overall"] == classic["overall"]
        if reduced["overall"]:
            assert reduced["powers"]["per_user"] == pytest.approx(classic["powers"]["per_user"], rel=1e-9)


def test_singular_boundary():
    report = tierpac.check(load("boundary.json"))
    assert report["singular"] is True
    assert report["overall"] is False


def test_heuristics_bounded_by_oracle():
    topo = load("two_tier.json")
    best = tierpac.oracle(topo)["optimum"]
    for algorithm in ("mespa", "mlspa"):
        trace = tierpac.admit(topo, algorithm)
        assert len(trace["admitted"]) <= best
        assert trace["final_report"]["overall"] is True


def test_malformed_topology_raises():
    with pytest.raises(ValueError):
        tierpac.check({"num_users": 1})


def test_sampled_topology_round_trips():
    assert "hex7" in tierpac.scenario_names()
    topo = tierpac.sample_topology("two_tier_a", seed=3)
    assert topo == tierpac.sample_topology("two_tier_a", seed=3)
    assert tierpac.check(json.dumps(topo))["direction"] == "uplink"


def test_experiment_is_reproducible():
    a = tierpac.run_experiment("two_tier_b", snapshots=10, seed=4, parameter="gamma", values=[-14, -10], workers=2)
    b = tierpac.run_experiment("two_tier_b", snapshots=10, seed=4, parameter="gamma", values=[-14, -10], workers=1)
    assert a["snapshots_csv"] == b["snapshots_csv"]
    rows = a["summary"]
    assert {r["sweep_value"] for r in rows} == {-14, -10}
    assert all(0.0 <= r["mean_outage"] <= 1.0 for r in rows)
