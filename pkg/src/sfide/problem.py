"""Problem container and coefficient diagnostics.

A ProblemSpec describes one initial value problem of the form

    D^alpha y(t) = f0(t, y(t))
                   + int_0^t (t-s)**(-beta1) f1(t, s, y(s)) ds
                   + int_0^t (t-s)**(-beta2) f2(t, s, y(s)) dW(s),

with y(0) = y0, on [0, T], driven by an r-dimensional Wiener process.  The
coefficient callables are treated as black boxes; the probe below samples
them to produce *lower bounds* on their Lipschitz/growth constants, it never
certifies anything.

Coefficient calling convention
------------------------------
``f0(t, y) -> (..., d)``, ``f1(t, s, y) -> (..., d)``,
``f2(t, s, y) -> (..., d, r)``.  When ``vectorized=True`` (the default, and
what every built-in problem provides) the time arguments may be numpy arrays
and ``y`` an array with a trailing state axis; inputs broadcast to a common
batch shape and the result may omit broadcastable batch axes.  With
``vectorized=False`` the callables are only ever invoked with scalar times
and a single state vector, and the solver wraps them for batching.
Callables must be safe to invoke concurrently.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

__all__ = [
    "ProblemSpec",
    "ProblemValidationError",
    "CoefficientEvaluationError",
    "AssumptionProbeReport",
    "validate",
    "probe_assumptions",
    "batch_coefficients",
]


class ProblemValidationError(ValueError):
    """Structured validation failure: .violations is a list of (field, message)."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"{name}: {msg}" for name, msg in self.violations)
        super().__init__(f"invalid problem specification: {detail}")


class CoefficientEvaluationError(RuntimeError):
    """A coefficient callable returned a non-finite value; reports the input."""

    def __init__(self, which, t, s, y):
        self.which = which
        self.inputs = (t, s, y)
        super().__init__(
            f"{which} returned a non-finite value at t={t!r}, s={s!r}, y={np.asarray(y)!r}"
        )


@dataclass(frozen=True)
class ProblemSpec:
    d: int
    r: int
    alpha: float
    beta1: float
    beta2: float
    T: float
    y0: np.ndarray
    f0: Callable
    f1: Callable
    f2: Callable
    vectorized: bool = True
    name: str = "custom"

    def __post_init__(self):
        y0 = np.ascontiguousarray(np.asarray(self.y0, dtype=float))
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "r", int(self.r))

    def param_block(self) -> dict:
        """The serialisable parameter block (everything but the callables)."""
        return {
            "problem": self.name,
            "d": self.d,
            "r": self.r,
            "alpha": float(self.alpha),
            "beta1": float(self.beta1),
            "beta2": float(self.beta2),
            "T": float(self.T),
            "y0": [float(v) for v in np.atleast_1d(self.y0)],
        }

    @property
    def spec_hash(self) -> str:
        """Short stable identifier of the parameter block."""
        canon = repr(sorted(self.param_block().items())).encode()
        return hashlib.sha256(canon).hexdigest()[:12]


def batch_coefficients(spec: ProblemSpec):
    """Coefficient callables usable with array-valued (t, s, y) arguments.

    Vectorized specs are returned as-is; scalar-contract callables are wrapped
    with np.vectorize (correct but slow; intended for user-supplied functions
    that do not broadcast).
    """
    if spec.vectorized:
        return spec.f0, spec.f1, spec.f2
    return (
        np.vectorize(spec.f0, signature="(),(i)->(i)"),
        np.vectorize(spec.f1, signature="(),(),(i)->(i)"),
        np.vectorize(spec.f2, signature="(),(),(i)->(i,j)"),
    )


def _probe_points(spec: ProblemSpec):
    t = 0.75 * spec.T
    s = 0.25 * spec.T
    y = np.asarray(spec.y0, dtype=float)
    if y.shape != (spec.d,):
        y = np.zeros(spec.d)
    return t, s, y


def validate(spec: ProblemSpec) -> None:
    """Check every ProblemSpec invariant; raise ProblemValidationError listing
    all violations, each tagged with the offending field."""
    bad = []
    if spec.d < 1:
        bad.append(("d", f"state dimension must be >= 1, got {spec.d}"))
    if spec.r < 1:
        bad.append(("r", f"Wiener dimension must be >= 1, got {spec.r}"))
    if not (np.isfinite(spec.alpha) and 0.0 < spec.alpha <= 1.0):
        bad.append(("alpha", f"Caputo order out of range (0, 1]: got {spec.alpha!r}"))
    if not (np.isfinite(spec.beta1) and 0.0 < spec.beta1 < 1.0):
        bad.append(("beta1", f"drift-kernel exponent must lie in (0, 1): got {spec.beta1!r}"))
    if np.isfinite(spec.beta2) and spec.beta2 >= 0.5:
        bad.append(
            (
                "beta2",
                "diffusion kernel not square-integrable: the stochastic integral "
                f"requires beta2 < 0.5, got {spec.beta2!r}",
            )
        )
    elif not (np.isfinite(spec.beta2) and 0.0 < spec.beta2 < 0.5):
        bad.append(("beta2", f"diffusion-kernel exponent must lie in (0, 0.5): got {spec.beta2!r}"))
    if not (np.isfinite(spec.T) and spec.T > 0.0):
        bad.append(("T", f"horizon must be positive, got {spec.T!r}"))
    y0 = np.asarray(spec.y0, dtype=float)
    if y0.shape != (spec.d,):
        bad.append(("y0", f"initial value must have shape ({spec.d},), got {y0.shape}"))
    elif not np.all(np.isfinite(y0)):
        bad.append(("y0", "initial value contains non-finite entries"))

    if not bad:
        t, s, y = _probe_points(spec)
        for nm, fn, args, shape in (
            ("f0", spec.f0, (s, y), (spec.d,)),
            ("f1", spec.f1, (t, s, y), (spec.d,)),
            ("f2", spec.f2, (t, s, y), (spec.d, spec.r)),
        ):
            try:
                out = np.asarray(fn(*args), dtype=float)
            except Exception as exc:  # probing must never propagate raw failures
                bad.append((nm, f"raised {exc!r} during evaluation probe"))
                continue
            if out.shape != shape:
                bad.append((nm, f"returned shape {out.shape}, expected {shape}"))
            elif not np.all(np.isfinite(out)):
                bad.append((nm, f"returned non-finite values at t={t}, s={s}"))
    if bad:
        raise ProblemValidationError(bad)


@dataclass(frozen=True)
class AssumptionProbeReport:
    """Sampled lower bounds on the coefficient constants.

    est_L1: time-Lipschitz constant of f1/f2 in their first argument,
    normalised by (1 + |y|).  est_L2: the analogous constant in the second
    time argument (first for f0).  est_Km: local state-Lipschitz constants on
    nested balls |y| <= m.  est_L: linear-growth constant max |f|/(1 + |y|).
    All estimates are maxima of sampled difference quotients, hence lower
    bounds on the true constants; this report certifies nothing.
    """

    est_L1: float
    est_L2: float
    est_Km: dict
    est_L: float
    n_samples: int
    max_radius: float

    def to_lines(self) -> list[str]:
        lines = [
            "assumption probe: sampled lower bounds on coefficient constants "
            "(diagnostic, not a certification)",
            f"n_samples = {self.n_samples} per radius stage, max_radius = {self.max_radius:g}",
            f"est_L1 (t-Lipschitz, f1/f2)   >= {self.est_L1:.6g}",
            f"est_L2 (s-Lipschitz, f0/f1/f2) >= {self.est_L2:.6g}",
            f"est_L  (linear growth)         >= {self.est_L:.6g}",
        ]
        for m in sorted(self.est_Km):
            lines.append(f"est_K[m={m:g}] (local y-Lipschitz) >= {self.est_Km[m]:.6g}")
        return lines


def _radii(max_radius: float) -> list[float]:
    radii, m = [], 1.0
    while m < max_radius:
        radii.append(m)
        m *= 2.0
    radii.append(float(max_radius))
    return radii


def _ball_point(unit_rows: np.ndarray, radius: float) -> np.ndarray:
    # unit_rows in [0,1]^d -> cube [-1,1]^d, then pull into the radius-m ball.
    v = 2.0 * unit_rows - 1.0
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return radius * v / np.maximum(1.0, norm)


def _fro(x: np.ndarray) -> np.ndarray:
    """Euclidean/Frobenius norm over the trailing state axes of a batch."""
    flat = x.reshape(x.shape[0], -1)
    return np.sqrt(np.sum(flat * flat, axis=-1))


def probe_assumptions(
    spec: ProblemSpec, n_samples: int, max_radius: float, seed: int
) -> AssumptionProbeReport:
    """Sample difference quotients of f0/f1/f2 on nested balls.

    Deterministic in (spec, n_samples, max_radius, seed): points come from a
    seeded scrambled Sobol sequence, consumed in a fixed order; the sample set
    at radius m contains every earlier stage, so est_Km is nondecreasing by
    construction.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    if not max_radius > 0:
        raise ValueError(f"max_radius must be positive, got {max_radius}")

    d, T = spec.d, spec.T
    sob = qmc.Sobol(d=4 + 2 * d, scramble=True, seed=seed)
    bf0, bf1, bf2 = batch_coefficients(spec)

    def feval(which, fn, t, s, y, tail):
        out = np.asarray(fn(t, s, y) if s is not None else fn(t, y), dtype=float)
        out = np.broadcast_to(out, (y.shape[0],) + tail)
        if not np.all(np.isfinite(out)):
            finite = np.isfinite(out.reshape(out.shape[0], -1)).all(axis=-1)
            i = int(np.argmax(~finite))
            si = None if s is None else float(s[i])
            raise CoefficientEvaluationError(which, float(t[i]), si, y[i])
        return out

    est_L1 = est_L2 = est_L = 0.0
    est_Km: dict = {}
    running_km = 0.0
    for m in _radii(max_radius):
        pts = sob.random(n_samples)
        t1, t2, s1, s2 = (T * pts[:, k] for k in range(4))
        y1 = _ball_point(pts[:, 4 : 4 + d], m)
        y2 = _ball_point(pts[:, 4 + d :], m)

        vec, mat = (d,), (d, spec.r)
        f0_a = feval("f0", bf0, s1, None, y1, vec)
        f0_b = feval("f0", bf0, s2, None, y1, vec)
        f0_c = feval("f0", bf0, s1, None, y2, vec)
        f1_a = feval("f1", bf1, t1, s1, y1, vec)
        f1_t = feval("f1", bf1, t2, s1, y1, vec)
        f1_s = feval("f1", bf1, t1, s2, y1, vec)
        f1_y = feval("f1", bf1, t1, s1, y2, vec)
        f2_a = feval("f2", bf2, t1, s1, y1, mat)
        f2_t = feval("f2", bf2, t2, s1, y1, mat)
        f2_s = feval("f2", bf2, t1, s2, y1, mat)
        f2_y = feval("f2", bf2, t1, s1, y2, mat)

        ny1 = 1.0 + np.linalg.norm(y1, axis=-1)
        dt = np.abs(t1 - t2)
        ds = np.abs(s1 - s2)
        dy = np.linalg.norm(y1 - y2, axis=-1)
        ok_t, ok_s, ok_y = dt > 1e-12, ds > 1e-12, dy > 1e-12

        if np.any(ok_t):
            q = np.maximum(_fro(f1_a - f1_t), _fro(f2_a - f2_t))[ok_t] / (ny1 * dt)[ok_t]
            est_L1 = max(est_L1, float(q.max()))
        if np.any(ok_s):
            q = np.maximum.reduce(
                [_fro(f0_a - f0_b), _fro(f1_a - f1_s), _fro(f2_a - f2_s)]
            )[ok_s] / (ny1 * ds)[ok_s]
            est_L2 = max(est_L2, float(q.max()))
        if np.any(ok_y):
            q = np.maximum.reduce(
                [_fro(f0_a - f0_c), _fro(f1_a - f1_y), _fro(f2_a - f2_y)]
            )[ok_y] / dy[ok_y]
            running_km = max(running_km, float(q.max()))
        est_Km[m] = running_km
        growth = np.maximum.reduce([_fro(f0_a), _fro(f1_a), _fro(f2_a)]) / ny1
        est_L = max(est_L, float(growth.max()))

    return AssumptionProbeReport(
        est_L1=est_L1,
        est_L2=est_L2,
        est_Km=est_Km,
        est_L=est_L,
        n_samples=int(n_samples),
        max_radius=float(max_radius),
    )
