"""Front tracking stability experiments for 2x2 systems."""

import json

from . import _core
from ._core import (
    Error,
    Solution,
    eigensystem,
    experiment_names,
    flux,
    list_systems,
    rarefaction_curve,
    riemann_invariants,
    shock_curve,
    solve_riemann,
    system_info,
)


def default_config(experiment):
    return json.loads(_core.default_config_json(experiment))


def run_experiment(config, out=""):
    """Run one experiment from a config dict; returns the report as a dict."""
    return json.loads(_core.run_experiment_json(json.dumps(config), out))


__all__ = [
    "Error",
    "Solution",
    "default_config",
    "eigensystem",
    "experiment_names",
    "flux",
    "list_systems",
    "rarefaction_curve",
    "riemann_invariants",
    "run_experiment",
    "shock_curve",
    "solve_riemann",
    "system_info",
]
