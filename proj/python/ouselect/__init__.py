"""Adaptive Pinsker-weight selection under Levy-driven Ornstein-Uhlenbeck noise."""

import json as _json

from ._ouselect import (
    FamilyBounds,
    JumpLaw,
    NoiseParams,
    NumericalError,
    cov_I,
    ellipsoid_weight,
    epsilon,
    estimate,
    fourier_coeffs,
    grid_labels,
    ito_integral,
    mc_risk,
    moment_constants,
    phi,
    pinsker_constant,
    pinsker_weight,
    replicate_seed,
    rho_schedule,
    signal_names,
    signal_value,
    simulate,
)
from ._ouselect import run as _run


def run(config):
    """Run an experiment from a config dict (or JSON string). Returns (exit_code, log)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run(config)


__all__ = [
    "FamilyBounds",
    "JumpLaw",
    "NoiseParams",
    "NumericalError",
    "cov_I",
    "ellipsoid_weight",
    "epsilon",
    "estimate",
    "fourier_coeffs",
    "grid_labels",
    "ito_integral",
    "mc_risk",
    "moment_constants",
    "phi",
    "pinsker_constant",
    "pinsker_weight",
    "replicate_seed",
    "rho_schedule",
    "run",
    "signal_names",
    "signal_value",
    "simulate",
]
