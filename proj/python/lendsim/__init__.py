"""Deterministic stress simulator for over-collateralized lending markets.

The heavy lifting happens in the compiled ``_core`` module; this wrapper
converts between python dicts and the JSON strings the core speaks.
"""

import json
from pathlib import Path

from ._core import FixedDec, SimError, borrow_rate

__all__ = [
    "FixedDec",
    "SimError",
    "analyze",
    "apply_override",
    "borrow_rate",
    "load_scenario",
    "replay_check",
    "run",
    "sweep",
    "validate",
]

from . import _core


def load_scenario(path):
    """Read a scenario document from a JSON file."""
    return json.loads(Path(path).read_text())


def validate(doc):
    """Parse and construct a scenario, returning its name, hash and shape."""
    return json.loads(_core.validate_json(json.dumps(doc)))


def run(doc):
    """Run a scenario document.

    Returns a dict with ``metrics_csv`` (one row per tick), ``summary``
    (final state and aggregates) and ``events`` (liquidations, venue
    shocks, reserve flag changes, bad debt).
    """
    return json.loads(_core.run_json(json.dumps(doc)))


def replay_check(doc):
    """Run twice from scratch and compare tick-by-tick output."""
    return json.loads(_core.replay_check_json(json.dumps(doc)))


def sweep(doc, path, values, parallel=False):
    """Run once per value, overriding ``path`` (JSON pointer or dotted).

    Returns a list of ``{"value": ..., "summary": ...}`` dicts in the
    order the values were given.
    """
    return json.loads(
        _core.sweep_json(json.dumps(doc), path, json.dumps(list(values)), parallel)
    )


def apply_override(doc, expr):
    """Apply a ``path=value`` override expression, returning a new document."""
    return json.loads(_core.override_json(json.dumps(doc), expr))


def analyze(csv_text, available_threshold="0.15", deposit_threshold="0.30"):
    """Rank a market-snapshot CSV by squeeze feasibility.

    Returns assessed rows sorted by available ratio; each row carries the
    ratios and the ``squeezable`` / ``depth_risk`` flags.
    """
    return json.loads(
        _core.analyze_json(csv_text, available_threshold, deposit_threshold)
    )
