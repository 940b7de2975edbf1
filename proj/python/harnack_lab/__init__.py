"""Numerical checks of Harnack inequalities, curve shortening and self-expanders."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment as _run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]


def run(config=None, **overrides):
    """Run suites from a config dict; keyword overrides are merged at top level."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return _run_experiment(_json.dumps(cfg))
