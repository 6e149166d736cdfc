"""Joint power and admission control for multi-tier cellular networks.

Topologies, traces and reports are plain dicts mirroring the CLI's JSON.
"""

import csv
import io
import json

from . import _core
from ._core import InvariantViolation, TopologyError, scenario_names

__all__ = [
    "InvariantViolation",
    "TopologyError",
    "admit",
    "check",
    "oracle",
    "run_experiment",
    "sample_topology",
    "scenario_names",
    "scenario_spec",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def check(topology, direction="uplink", admit=None, method="reduced"):
    """Feasibility of the admitted set (all users by default)."""
    return json.loads(_core.check(_text(topology), direction, admit, method))


def admit(topology, algorithm="mespa", direction="uplink", restrict_bs=False, noise_term=False):
    """Removal trace of one JPAC algorithm."""
    return json.loads(_core.admit(_text(topology), algorithm, direction, restrict_bs, noise_term))


def oracle(topology, direction="uplink"):
    """Exhaustive maximum feasible set (at most 14 users)."""
    return json.loads(_core.admit(_text(topology), "oracle", direction))


def scenario_spec(name):
    return json.loads(_core.scenario_spec(name))


def sample_topology(scenario, seed=1, snapshot=0, overrides=None):
    raw = _core.sample_topology(scenario, seed, snapshot, None if overrides is None else _text(overrides))
    return json.loads(raw)


def _rows(text):
    return [
        {k: _number(v) for k, v in row.items()}
        for row in csv.DictReader(io.StringIO(text))
    ]


def _number(v):
    try:
        return int(v)
    except ValueError:
        return float(v)


def run_experiment(scenario="three_tier", algorithm="mespa", direction="uplink", snapshots=200, seed=1,
                   parameter="none", values=None, workers=1, overrides=None):
    """Monte Carlo run. Returns the raw CSV text and the parsed summary rows."""
    out = _core.run_experiment(scenario, algorithm, direction, snapshots, seed, parameter, values, workers,
                               None if overrides is None else _text(overrides))
    out["summary"] = _rows(out["summary_csv"])
    return out
