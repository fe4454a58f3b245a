"""Acceptance suite: one test per shipped guarantee, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  Budget note: the Monte-Carlo criteria use M = 500 pinned to
seed 42 and take a few minutes of CPU total.
"""

import os

import numpy as np
import pytest

from sfide import (
    ProblemSpec,
    beta,
    build_quadrature,
    check_lemma_order,
    constant_drift_exact,
    finite_range_reference_order,
    generate,
    make_context,
    make_problem,
    moment_probe,
    run_convergence_study,
    run_stability_probe,
    solve,
)
from sfide.cli import EXIT_OK, main

N_JOBS = min(4, os.cpu_count() or 1)
MC_SEED = 42
MC_GRIDS = [8, 16, 32, 64, 128]
MC_SAMPLES = 500
LEMMA_GRIDS = [16, 32, 64, 128, 256, 512, 1024]


def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


# -- criterion 1: quadrature exactness ------------------------------------------

@pytest.mark.parametrize("alpha_exp,beta_exp", [(0.6, 0.3), (0.8, 0.25), (1.0, 0.49)])
def test_quadrature_exactness(alpha_exp, beta_exp):
    rule = build_quadrature(alpha_exp, beta_exp, 8)
    worst = 0.0
    for k in range(16):
        exact = beta(alpha_exp, k + 1.0 - beta_exp)
        got = float(rule.weights @ rule.nodes**k)
        worst = max(worst, abs(got - exact) / exact)
    ok = worst <= 1e-10
    assert _report(
        f"quadrature exactness ({alpha_exp}, {beta_exp})", ok,
        f"worst relative error over k<=15 is {worst:.3e} (tolerance 1e-10)",
    )


# -- criterion 2: closed-form fractional ODE --------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 0.8])
def test_constant_drift_order(alpha):
    grids = [16, 32, 64, 128, 256, 512]
    spec = make_problem("constant_drift", alpha=alpha, c=1.0)
    ctx = make_context(spec)
    exact = constant_drift_exact(1.0, alpha)
    errs = []
    for N in grids:
        traj = solve(ctx, generate(0, 0, N, 1, 1.0 / N))
        errs.append(abs(traj.values[-1, 0] - exact))
    slope = float(np.polyfit(np.log([1.0 / N for N in grids]), np.log(errs), 1)[0])
    ok = slope >= alpha - 0.1
    assert _report(
        f"constant-drift closed form (alpha={alpha})", ok,
        f"fitted error order {slope:.4f} >= {alpha - 0.1:.2f}",
    )


# -- criterion 3: classical Euler reduction ----------------------------------------

def test_classical_euler_reduction():
    def f0(t, y):
        return -y

    spec = ProblemSpec(d=1, r=1, alpha=1.0, beta1=0.5, beta2=0.25, T=1.0,
                       y0=[1.0], f0=f0,
                       f1=lambda t, s, y: np.zeros_like(y),
                       f2=lambda t, s, y: np.zeros_like(y)[..., None])
    ctx = make_context(spec)
    N = 32
    traj = solve(ctx, generate(1, 0, N, 1, 1.0 / N))
    reference = (1.0 - 1.0 / N) ** np.arange(N + 1)
    worst = float(np.abs(traj.values[:, 0] - reference).max())
    ok = worst <= 1e-14
    assert _report(
        "classical Euler reduction", ok,
        f"max |Y_n - (1-h)^n| = {worst:.3e} (tolerance 1e-14)",
    )


# -- criterion 4: lemma order checks ------------------------------------------------

@pytest.mark.parametrize("c", [-0.4, 0.25, 0.5, 0.75])
def test_lemma_order_l1(c):
    res = check_lemma_order("L1", c, LEMMA_GRIDS)
    gap = abs(res.fitted_order - res.predicted_order)
    ok = gap <= 0.1
    assert _report(
        f"first-power increment order (c={c})", ok,
        f"fitted {res.fitted_order:.4f} vs predicted {res.predicted_order:.4f} (gap {gap:.4f})",
    )


@pytest.mark.xfail(
    strict=True,
    reason="finite-range fit is provably 0.769 for c=-0.1: the integral is "
    "(h^0.9 - 0.9h + O(h^2))/0.9 and the opposite-signed h term is only a "
    "factor h^0.1 in [0.50, 0.76] below the leading term over N in "
    "[16, 1024], dragging the log-log slope 0.131 below the asymptotic 0.9; "
    "the 0.1 tolerance is unattainable on this N range",
)
def test_lemma_order_l1_near_zero_negative_exponent():
    res = check_lemma_order("L1", -0.1, LEMMA_GRIDS)
    gap = abs(res.fitted_order - res.predicted_order)
    ok = gap <= 0.1
    assert _report(
        "first-power increment order (c=-0.1)", ok,
        f"fitted {res.fitted_order:.4f} vs predicted {res.predicted_order:.4f} (gap {gap:.4f})",
    )


@pytest.mark.parametrize("c", [-0.25, 0.25, 0.5, 0.75])
def test_lemma_order_l2(c):
    res = check_lemma_order("L2", c, LEMMA_GRIDS)
    reference = finite_range_reference_order(res)
    gap = abs(res.fitted_order - reference)
    ok = gap <= 0.1
    if c == 0.5:
        ok = ok and res.log_corrected
    assert _report(
        f"squared increment order (c={c})", ok,
        f"fitted {res.fitted_order:.4f} vs finite-range prediction {reference:.4f} "
        f"(gap {gap:.4f}, log_corrected={res.log_corrected})",
    )


# -- criteria 5-7: strong convergence rates ------------------------------------------

def test_strong_convergence_rate_demo_1d():
    spec = make_problem("example_5_1", alpha=0.8, beta1=0.5, beta2=0.25)
    table = run_convergence_study(make_context(spec), MC_GRIDS, MC_SAMPLES,
                                  MC_SEED, n_jobs=N_JOBS)
    eps = [row[2] for row in table.rows]
    decreasing = all(b < a for a, b in zip(eps, eps[1:]))
    in_band = 0.8 - 0.2 <= table.fitted_rate <= 0.8 + 0.2
    ok = decreasing and in_band and not table.log_corrected
    assert _report(
        "strong convergence, 1-d system (alpha=0.8)", ok,
        f"fitted_rate {table.fitted_rate:.4f} in [0.60, 1.00], "
        f"eps strictly decreasing: {decreasing}",
    )


def test_strong_convergence_log_corrected_case():
    spec = make_problem("example_5_1", alpha=0.9, beta1=0.5, beta2=0.4)
    table = run_convergence_study(make_context(spec), MC_GRIDS, MC_SAMPLES,
                                  MC_SEED, n_jobs=N_JOBS)
    in_band = 0.9 - 0.25 <= table.fitted_rate <= 0.9 + 0.2
    ok = table.log_corrected and in_band
    assert _report(
        "strong convergence, log-corrected case (alpha=0.9, beta2=0.4)", ok,
        f"log_corrected={table.log_corrected}, fitted_rate {table.fitted_rate:.4f} "
        f"in [0.65, 1.10]",
    )


def test_strong_convergence_rate_demo_2d():
    spec = make_problem("example_5_2", alpha=0.8, beta1=0.5, beta2=0.25)
    table = run_convergence_study(make_context(spec), MC_GRIDS, MC_SAMPLES,
                                  MC_SEED, n_jobs=N_JOBS)
    finite = all(np.isfinite(row[2]) for row in table.rows)
    in_band = 0.8 - 0.25 <= table.fitted_rate <= 0.8 + 0.2
    ok = finite and in_band
    assert _report(
        "strong convergence, 2-d system (r=2)", ok,
        f"all rows finite: {finite}, fitted_rate {table.fitted_rate:.4f} in [0.55, 1.00]",
    )


# -- criterion 8: moment boundedness ---------------------------------------------------

def test_moment_boundedness_across_resolutions():
    spec = make_problem("example_5_1", alpha=0.8, beta1=0.5, beta2=0.25)
    ctx = make_context(spec)
    probes = {N: moment_probe(ctx, N, MC_SAMPLES, 2, MC_SEED, n_jobs=N_JOBS)
              for N in (32, 64, 128)}
    spread = (max(probes.values()) - min(probes.values())) / min(probes.values())
    ok = spread < 0.5
    assert _report(
        "moment boundedness (p=2)", ok,
        f"probe values {({k: round(v, 4) for k, v in probes.items()})}, "
        f"relative spread {spread:.3%} < 50%",
    )


# -- criterion 9: mean-square stability --------------------------------------------------

def test_stability_probe_monotone_in_initial_gap():
    spec = make_problem("example_5_1", alpha=0.8, beta1=0.5, beta2=0.25)
    ctx = make_context(spec)
    y0 = np.array([1.0])
    sup = {}
    for gap in (0.2, 0.1, 0.05):
        rep = run_stability_probe(ctx, y0, y0 + gap, N=64, M=200, seed=MC_SEED,
                                  n_jobs=N_JOBS)
        sup[gap] = rep.sup_msd
    zero_rep = run_stability_probe(ctx, y0, y0, N=64, M=200, seed=MC_SEED,
                                   n_jobs=N_JOBS)
    monotone = sup[0.2] > sup[0.1] > sup[0.05] > 0.0
    ok = monotone and zero_rep.sup_msd == 0.0
    assert _report(
        "mean-square stability probe", ok,
        f"sup_msd {({k: round(v, 6) for k, v in sup.items()})} monotone: {monotone}, "
        f"identical initial values give exactly {zero_rep.sup_msd}",
    )


# -- criterion 10: scheduling determinism ---------------------------------------------------

def test_converge_byte_identical_across_thread_counts(tmp_path):
    digests = []
    for threads, name in ((1, "t1.csv"), (2, "t2.csv")):
        out = tmp_path / name
        rc = main([
            "--command", "converge", "--problem", "example_5_1",
            "--N-values", "8,16,32", "--M", "20", "--seed", str(MC_SEED),
            "--threads", str(threads), "--out", str(out),
        ])
        assert rc == EXIT_OK
        digests.append(out.read_bytes())
    ok = digests[0] == digests[1]
    assert _report(
        "determinism across thread counts", ok,
        f"CSV bytes identical for --threads 1 vs 2: {ok}",
    )
