"""Built-in coefficient sets used by the CLI and the test suite.

All functions follow the vectorized coefficient convention of
:mod:`sfide.problem` and are module-level (hence picklable for parallel
Monte-Carlo runs).
"""

from __future__ import annotations

from functools import partial

import numpy as np

from .problem import ProblemSpec

__all__ = ["PROBLEM_NAMES", "make_problem", "constant_drift_exact"]

PROBLEM_NAMES = ("example_5_1", "example_5_2", "zero", "constant_drift")


# -- 1-d demo system: f0 = sin(t*y), f1 = f2 = t*s*cos(y) --------------------

def _f0_sin_ty(t, y):
    t = np.asarray(t, dtype=float)
    return np.sin(t[..., None] * y)


def _f1_ts_cos(t, s, y):
    ts = np.asarray(t, dtype=float) * np.asarray(s, dtype=float)
    return ts[..., None] * np.cos(y)


def _f2_ts_cos(t, s, y):
    ts = np.asarray(t, dtype=float) * np.asarray(s, dtype=float)
    return (ts[..., None] * np.cos(y))[..., None]


# -- 2-d demo system, r = 2 ---------------------------------------------------

def _f0_planar(t, y):
    t = np.asarray(t, dtype=float)
    return np.stack([np.sin(t * y[..., 1]), t * y[..., 0]], axis=-1)


def _f1_planar(t, s, y):
    s = np.asarray(s, dtype=float)
    w = y[..., 0] + y[..., 1]
    return np.stack([s * np.sin(w), s * np.cos(w)], axis=-1)


def _f2_planar(t, s, y):
    s = np.asarray(s, dtype=float)
    w = y[..., 0] + y[..., 1]
    row1 = np.stack([s * y[..., 0], s * np.cos(w)], axis=-1)
    row2 = np.stack([s * np.cos(y[..., 1]), s * np.sin(w)], axis=-1)
    return np.stack([row1, row2], axis=-2)


# -- degenerate systems -------------------------------------------------------

def _f0_zero(t, y):
    return np.zeros_like(y)


def _f1_zero(t, s, y):
    return np.zeros_like(y)


def _f2_zero(t, s, y):
    return np.zeros_like(y)[..., None]


def _f0_const(t, y, c=1.0):
    return np.full_like(y, c)


def constant_drift_exact(t, alpha: float, y0: float = 1.0, c: float = 1.0) -> float:
    """Exact solution y0 + c * t**alpha / Gamma(alpha + 1) of the pure
    constant-drift problem (f1 = f2 = 0)."""
    import math

    return y0 + c * t**alpha / math.gamma(alpha + 1.0)


def make_problem(
    name: str,
    *,
    alpha: float = 0.8,
    beta1: float = 0.5,
    beta2: float = 0.25,
    T: float = 1.0,
    y0=None,
    c: float = 1.0,
) -> ProblemSpec:
    """Instantiate a named built-in problem with the given parameters.

    ``constant_drift`` (f0 = c, f1 = f2 = 0) is the only case with a closed
    form solution and exists for end-to-end accuracy checks; ``zero`` freezes
    the trajectory at y0.
    """
    if name == "example_5_1":
        if y0 is None:
            y0 = [1.0]
        return ProblemSpec(
            d=1, r=1, alpha=alpha, beta1=beta1, beta2=beta2, T=T, y0=y0,
            f0=_f0_sin_ty, f1=_f1_ts_cos, f2=_f2_ts_cos, name=name,
        )
    if name == "example_5_2":
        if y0 is None:
            y0 = [0.0, 0.0]
        return ProblemSpec(
            d=2, r=2, alpha=alpha, beta1=beta1, beta2=beta2, T=T, y0=y0,
            f0=_f0_planar, f1=_f1_planar, f2=_f2_planar, name=name,
        )
    if name == "zero":
        if y0 is None:
            y0 = [1.0]
        y0 = np.atleast_1d(np.asarray(y0, dtype=float))
        return ProblemSpec(
            d=y0.size, r=1, alpha=alpha, beta1=beta1, beta2=beta2, T=T, y0=y0,
            f0=_f0_zero, f1=_f1_zero, f2=_f2_zero, name=name,
        )
    if name == "constant_drift":
        if y0 is None:
            y0 = [1.0]
        y0 = np.atleast_1d(np.asarray(y0, dtype=float))
        return ProblemSpec(
            d=y0.size, r=1, alpha=alpha, beta1=beta1, beta2=beta2, T=T, y0=y0,
            f0=partial(_f0_const, c=c), f1=_f1_zero, f2=_f2_zero, name=name,
        )
    raise ValueError(f"unknown problem {name!r}; choose one of {PROBLEM_NAMES}")
