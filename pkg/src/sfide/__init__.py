"""Solver and Monte-Carlo experiment harness for nonlinear stochastic
fractional integro-differential equations with weakly singular kernels.

The problem is rewritten as a stochastic Volterra integral equation and
integrated by a left-rectangle time stepper that needs only Brownian
increments; the harness measures its strong convergence rate, moment
boundedness and mean-square stability.
"""

__version__ = "0.1.0"

from .analysis import (
    LemmaCheckResult,
    check_lemma_order,
    finite_range_reference_order,
    kernel_increment_l1,
    kernel_increment_l2,
)
from .harness import (
    ErrorTable,
    HarnessExplosionError,
    StabilityReport,
    estimate_ms_error,
    fit_rate,
    moment_probe,
    run_convergence_study,
    run_stability_probe,
)
from .kernels import KernelContext, KernelEvalCounter, eval_F0, eval_F1, eval_F2, make_context
from .noise import RNG_ID, BrownianPaths, coarsen, generate
from .problem import (
    AssumptionProbeReport,
    CoefficientEvaluationError,
    ProblemSpec,
    ProblemValidationError,
    probe_assumptions,
    validate,
)
from .problems import PROBLEM_NAMES, constant_drift_exact, make_problem
from .solver import (
    BatchExplosionError,
    ExplosionError,
    Trajectory,
    solve,
    solve_batch,
)
from .specfun import QuadratureRule, beta, build_quadrature, gamma

__all__ = [
    "__version__",
    "AssumptionProbeReport",
    "BatchExplosionError",
    "BrownianPaths",
    "CoefficientEvaluationError",
    "ErrorTable",
    "ExplosionError",
    "HarnessExplosionError",
    "KernelContext",
    "KernelEvalCounter",
    "LemmaCheckResult",
    "PROBLEM_NAMES",
    "ProblemSpec",
    "ProblemValidationError",
    "QuadratureRule",
    "RNG_ID",
    "StabilityReport",
    "Trajectory",
    "beta",
    "build_quadrature",
    "check_lemma_order",
    "coarsen",
    "constant_drift_exact",
    "estimate_ms_error",
    "eval_F0",
    "eval_F1",
    "eval_F2",
    "finite_range_reference_order",
    "fit_rate",
    "gamma",
    "generate",
    "kernel_increment_l1",
    "kernel_increment_l2",
    "make_context",
    "make_problem",
    "moment_probe",
    "probe_assumptions",
    "run_convergence_study",
    "run_stability_probe",
    "solve",
    "solve_batch",
    "validate",
]
