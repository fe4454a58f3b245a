"""Deterministic validators for the kernel-increment decay rates.

For a power kernel (t - s)**c the time stepper's accuracy hinges on how fast

    I1(N) = int_0^{t_n} |(t - s)**c - (t_n - s)**c| ds
    I2(N) = int_0^{t_n} ((t - s)**c - (t_n - s)**c)**2 ds,   t in [t_n, t_{n+1})

shrink as the grid refines (T normalised to 1, t_n = n/N).  The predicted
decay orders in N are

    I1: min(1, 1 + c)                                   for c in (-1, 1)
    I2: 2            if c in (1/2, 1)
        2 up to a log factor (value ~ ln N / N**2)      if c = 1/2
        1 + 2c       if c in (-1/2, 1/2)

check_lemma_order measures the orders empirically by a log-log least-squares
fit at the worst grid position (n = N-1, t -> t_{n+1}) and reports them next
to the predictions.  Only orders are fitted, never constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "kernel_increment_l1",
    "kernel_increment_l2",
    "LemmaCheckResult",
    "check_lemma_order",
    "finite_range_reference_order",
    "write_lemma_csv",
]

_WORST_THETA = 1.0 - 1e-12  # stands in for the open-endpoint supremum t -> t_{n+1}
_EQ_TOL = 1e-12


def _check_position(N: int, n: int, theta: float):
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not 0 <= n <= N - 1:
        raise ValueError(f"n must satisfy 0 <= n <= N-1, got n={n}, N={N}")
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")


def kernel_increment_l1(c: float, N: int, n: int, theta: float) -> float:
    """Closed form of I1 = int_0^{t_n} |(t-s)**c - (t_n-s)**c| ds.

    The integrand keeps one sign for fixed c (the power difference is
    monotone in the base), so the absolute value resolves analytically via
    the antiderivative of x**c.
    """
    if not -1.0 < c < 1.0:
        raise ValueError(f"c must lie in (-1, 1) for the integral to converge, got {c}")
    _check_position(N, n, theta)
    if n == 0 or c == 0.0 or theta == 0.0:
        return 0.0
    tn = n / N
    delta = theta / N
    t = tn + delta
    p = c + 1.0
    return abs(t**p - delta**p - tn**p) / p


def kernel_increment_l2(c: float, N: int, n: int, theta: float) -> float:
    """I2 = int_0^{t_n} ((t-s)**c - (t_n-s)**c)**2 ds to ~1e-10 absolute.

    The two squared terms integrate in closed form; the cross term
    int (t-s)**c (t_n-s)**c ds is an adaptive weighted quadrature with the
    algebraic endpoint singularity (t_n - s)**c handled by the weight.
    c = 1 is admitted as a degenerate sanity case (constant difference).
    """
    if not -0.5 < c <= 1.0:
        raise ValueError(f"c must lie in (-0.5, 1], got {c}")
    _check_position(N, n, theta)
    if n == 0 or c == 0.0 or theta == 0.0:
        return 0.0
    tn = n / N
    delta = theta / N
    t = tn + delta
    p2 = 2.0 * c + 1.0
    sq_t = (t**p2 - delta**p2) / p2
    sq_tn = tn**p2 / p2
    # cross = int_0^{tn} (v + delta)**c v**c dv  (v = t_n - s)
    cross, err = quad(
        lambda v: (v + delta) ** c,
        0.0,
        tn,
        weight="alg",
        wvar=(c, 0.0),
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    if not np.isfinite(cross) or err > 1e-10:
        raise ArithmeticError(f"cross-term quadrature did not converge (err={err:g})")
    value = sq_t + sq_tn - 2.0 * cross
    return max(value, 0.0)  # clip roundoff from the cancellation


@dataclass(frozen=True)
class LemmaCheckResult:
    which: str  # "L1" or "L2"
    exponent_c: float
    N_values: tuple
    integral_values: tuple
    fitted_order: float
    predicted_order: float
    log_corrected: bool


def _predicted_order(which: str, c: float) -> tuple[float, bool]:
    if which == "L1":
        return min(1.0, 1.0 + c), False
    if which == "L2":
        if abs(c - 0.5) <= _EQ_TOL:
            return 2.0, True
        if c > 0.5:
            return 2.0, False
        return 1.0 + 2.0 * c, False
    raise ValueError(f"which must be 'L1' or 'L2', got {which!r}")


def _fit_loglog(N_values, values) -> float:
    x = np.log(1.0 / np.asarray(N_values, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def check_lemma_order(which: str, c: float, N_values) -> LemmaCheckResult:
    """Fit the empirical decay order of I1 or I2 over the given grid sizes.

    For each N the value is the max over n in {N//2, N-1} at theta -> 1-,
    the worst case over the grid.  fitted_order is the least-squares slope of
    log(value) against log(1/N).
    """
    N_values = [int(N) for N in N_values]
    if len(N_values) < 3:
        raise ValueError("need at least 3 grid sizes to fit an order")
    if any(N < 4 for N in N_values):
        raise ValueError("every N must be >= 4")
    integral = kernel_increment_l1 if which == "L1" else kernel_increment_l2
    predicted, log_corrected = _predicted_order(which, c)
    values = [
        max(integral(c, N, N // 2, _WORST_THETA), integral(c, N, N - 1, _WORST_THETA))
        for N in N_values
    ]
    fitted = _fit_loglog(N_values, values) if all(v > 0 for v in values) else float("nan")
    return LemmaCheckResult(
        which=which,
        exponent_c=float(c),
        N_values=tuple(N_values),
        integral_values=tuple(values),
        fitted_order=fitted,
        predicted_order=predicted,
        log_corrected=log_corrected,
    )


def finite_range_reference_order(result: LemmaCheckResult) -> float:
    """What the predicted envelope itself would fit to over the same N range.

    For pure power laws this is exactly predicted_order; in the log-corrected
    case the envelope ln(N)/N**2 fits to a slope visibly below 2 on any
    finite range, and that slope is the honest comparison target.
    """
    if not result.log_corrected:
        return result.predicted_order
    N = np.asarray(result.N_values, dtype=float)
    model = np.log(N) / N**2
    return _fit_loglog(result.N_values, model)


def write_lemma_csv(results, file, metadata: str | None = None) -> None:
    """CSV rows (which, c, N, value, fitted_order, predicted_order)."""
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "w", newline="")
        close = True
    try:
        file.write("which,c,N,value,fitted_order,predicted_order\n")
        for res in results:
            for N, v in zip(res.N_values, res.integral_values):
                file.write(
                    f"{res.which},{res.exponent_c:.17g},{N},{v:.17g},"
                    f"{res.fitted_order:.17g},{res.predicted_order:.17g}\n"
                )
        if metadata:
            file.write(f"# {metadata}\n")
    finally:
        if close:
            file.close()
