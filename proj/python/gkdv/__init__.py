"""Spectral solvers for the generalized KdV equation."""

from ._core import (
    ConfigError,
    FitError,
    Grid,
    Model,
    ValidationError,
    blowup_exponents,
    derivative,
    fit_blowup_time,
    fit_epsilon_law,
    fit_L_linear,
    fit_L_powerlaw,
    hopf_critical_time,
    invariants,
    run_config,
    run_direct,
    run_rescaled,
    scaling_from_norms,
    soliton,
)

__all__ = [name for name in dir() if not name.startswith("_")]
