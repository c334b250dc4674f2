"""Symmetry verification and split-step simulation for nonlinear Schroedinger-type equations."""

import json as _json

from . import _core
from ._core import (
    ContsymError,
    algebra_keys,
    algebra_members,
    boost_covariance_error,
    brackets,
    canonical,
    criterion_ids,
    evolve,
    galilei_boost,
    gaussian_packet,
    grid_x,
    mass,
    system_keys,
    total_derivative,
)

__all__ = [
    "ContsymError",
    "algebra_keys",
    "algebra_members",
    "boost_covariance_error",
    "brackets",
    "canonical",
    "criterion_ids",
    "evolve",
    "galilei_boost",
    "gaussian_packet",
    "grid_x",
    "mass",
    "run_criterion",
    "system_keys",
    "total_derivative",
    "verify",
]


def verify(system, seed, algebra="", generator="", n=1, trials=25, mode="exact", lambda_="1/20"):
    """On-shell invariance check. Returns a dict with one report per generator."""
    return _json.loads(_core.verify_json(system, seed, algebra, generator, n, trials, mode, lambda_))


def run_criterion(id, seed=1):
    """Runs one acceptance criterion and returns its result as a dict."""
    return _json.loads(_core.run_criterion_json(id, seed))
