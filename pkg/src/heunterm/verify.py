"""Per-solution verification blocks and random parameter sampling."""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from . import confluent as ch
from . import general as gh
from . import oracle
from . import termination as engine
from .errors import ConvergenceError, DegenerateRecurrenceError, OutsideDiskWarning
from .pfq import DEFAULT_WINDOW, SeriesWindow, ratio_form_coefficients

CLOSURE_TOL = 1e-10
EIGENVECTOR_TOL = 1e-9
ODE_TOL = 1e-8
ORACLE_TOL = 1e-10
ORACLE_TERMS = 25
GRID_POINTS = 20
ORACLE_DPS = 60

BOX_RE = 3.0
BOX_IM = 1.0
MARGIN = 0.1


@dataclass(frozen=True)
class Equation:
    """Bundle of the per-equation entry points used by sweeps and reports."""

    name: str
    coeffs: object
    terminate: object
    closure: object
    eigenvector: object
    minor: object
    value: object
    residual: object
    frobenius: object
    cleared: object


GENERAL = Equation(
    "general",
    gh._coeffs,
    gh.gh_terminate,
    gh.gh_closure,
    gh.gh_eigenvector_check,
    gh.gh_minor,
    gh.gh_solution_value,
    oracle.ode_residual_general,
    oracle.frobenius_general,
    oracle.general_cleared,
)

CONFLUENT = Equation(
    "confluent",
    ch._coeffs,
    ch.ch_terminate,
    ch.ch_closure,
    ch.ch_eigenvector_check,
    ch.ch_minor,
    ch.ch_solution_value,
    oracle.ode_residual_confluent,
    oracle.frobenius_confluent,
    oracle.confluent_cleared,
)

EQUATIONS = {"general": GENERAL, "confluent": CONFLUENT}


def equation_of(sol) -> Equation:
    return GENERAL if isinstance(sol.params, gh.GeneralHeunParams) else CONFLUENT


def singular_points(params) -> tuple[complex, ...]:
    if isinstance(params, gh.GeneralHeunParams):
        return (0j, 1 + 0j, params.a)
    return (0j, 1 + 0j)


def sample_grid(params, count: int = GRID_POINTS, keep_out: float = 0.1) -> list[complex]:
    """Deterministic ring of points away from the finite singular points.

    Radius 0.6 for the general equation (inside the unit disk), 2.5 for the
    confluent one (entire solutions).
    """
    radius = 0.6 if isinstance(params, gh.GeneralHeunParams) else 2.5
    pts = []
    k = 0
    while len(pts) < count:
        # irrational phase step keeps the ring from ever repeating a point
        z = radius * cmath.exp(2j * math.pi * (k * 0.6180339887498949 + 0.05))
        k += 1
        if all(abs(z - s) >= keep_out for s in singular_points(params)):
            pts.append(z)
    return pts


def oracle_method(params, extended: bool = True) -> str:
    """Which Frobenius solve is numerically faithful for a finite-sum solution.

    A finite sum has the radius of convergence of its base function (1 for the
    general equation, infinite for the confluent one). The competing solution
    of the coefficient recurrence behaves like a^-n for the general equation
    and like 1 (radius 1) for the confluent one. Forward summation amplifies
    any error in q by the competitor/solution ratio, at most about
    |a|^-ORACLE_TERMS up to powers of n for the general equation, which the
    extended working precision absorbs for |a| >= 1/2. Otherwise, and always
    for the confluent equation, the backward iteration is used.
    """
    if isinstance(params, gh.GeneralHeunParams):
        threshold = 0.5 if extended else 1.0
        if abs(params.a) > threshold:
            return "forward"
    return "minimal"


def refined(sol, dps: int = ORACLE_DPS):
    """(q, d, A coefficients) of ``sol`` re-derived at ``dps`` digits."""
    eq = equation_of(sol)
    return engine.refined_solution(eq.coeffs, sol.params, sol.N, sol.chosen_q, dps)


def formula_coefficients(sol, n_max: int = ORACLE_TERMS, dps: int | None = None) -> list[complex]:
    """Two-term-form coefficients c_0..c_n_max; from the refined A when ``dps`` is set."""
    p = sol.params
    if dps is None:
        return ratio_form_coefficients(sol.base_upper, sol.base_lower, p.base.omega, sol.A, n_max)
    _, _, A = refined(sol, dps)
    with mpmath.workdps(dps):
        up = [mpmath.mpc(a) for a in sol.base_upper]
        lo = [mpmath.mpc(b) for b in sol.base_lower]
        om = mpmath.mpc(p.base.omega)
        out, base = [], mpmath.mpc(1)
        for n in range(n_max + 1):
            an = mpmath.mpc(0)
            for c in reversed(A):
                an = an * n + c
            out.append(base * an / A[0])
            base = base * om * mpmath.fprod(a + n for a in up) / (mpmath.fprod(b + n for b in lo) * (n + 1))
        return out


def oracle_series(sol, n_max: int = ORACLE_TERMS, dps: int | None = ORACLE_DPS) -> list:
    """Frobenius coefficients from the ODE alone, at the refined q when ``dps`` is set.

    In extended precision the coefficients are returned as mpmath numbers.
    """
    eq = equation_of(sol)
    method = oracle_method(sol.params, extended=dps is not None)
    if dps is None:
        return list(eq.frobenius(sol.params, n_max, method).coefficients)
    q, _, _ = refined(sol, dps)
    with mpmath.workdps(dps):
        cleared = eq.cleared(sol.params, mpmath.mpc, q)
        return oracle.solve_cleared(*cleared, n_max, method, dps)


def _relative(got, ref) -> float:
    return max(float(abs(a - b) / abs(b)) if b != 0 else float(abs(a)) for a, b in zip(got, ref))


def oracle_deviation(sol, n_max: int = ORACLE_TERMS, dps: int | None = ORACLE_DPS) -> float:
    """max_n |c_oracle - c_formula| / |c_formula| for n <= n_max.

    ``dps=None`` compares the double-precision solution directly; the result is
    then limited by the conditioning of q, not by the formula.
    """
    try:
        got = oracle_series(sol, n_max, dps)
    except ConvergenceError:
        return math.inf
    ref = formula_coefficients(sol, n_max, dps)
    if dps is None:
        return _relative(got, ref)
    with mpmath.workdps(dps):
        return _relative(got, ref)


def ratio_deviation(sol, n_max: int = ORACLE_TERMS, dps: int | None = ORACLE_DPS) -> float:
    """Oracle ratios c_{n+1}/c_n against the base ratio times A(n+1)/A(n), n <= n_max."""
    try:
        c = oracle_series(sol, n_max + 1, dps)
    except ConvergenceError:
        return math.inf
    p = sol.params
    num = complex if dps is None else mpmath.mpc
    with mpmath.workdps(dps or 15):
        A = list(sol.A.coefficients) if dps is None else refined(sol, dps)[2]
        up = [num(a) for a in sol.base_upper]
        lo = [num(b) for b in sol.base_lower]
        om = num(p.base.omega)

        def A_at(n):
            v = num(0)
            for coef in reversed(A):
                v = v * n + coef
            return v

        worst = 0.0
        for n in range(n_max + 1):
            base = om / (n + 1)
            for a in up:
                base *= a + n
            for b in lo:
                base /= b + n
            expected = base * A_at(n + 1) / A_at(n)
            worst = max(worst, float(abs(c[n + 1] / c[n] - expected) / abs(expected)))
        return worst


def ode_residuals(sol, points=None, window: SeriesWindow = DEFAULT_WINDOW) -> list[float]:
    eq = equation_of(sol)
    points = sample_grid(sol.params) if points is None else points
    out = []
    for z in points:
        phi, d1, d2 = (eq.value(sol, z, window, k) for k in range(3))
        res = eq.residual(phi, d1, d2, z, sol.params)
        out.append(oracle.normalized_residual(res, phi, d1, d2))
    return out


def relative_closure(sol) -> float:
    eq = equation_of(sol)
    scale = max(abs(x) for x in sol.d)
    return max(abs(x) for x in eq.closure(sol)) / scale


def relative_eigenvector(sol) -> float:
    eq = equation_of(sol)
    m = eq.minor(sol.params, sol.N)
    scale = max(float(np.max(np.abs(m))), abs(sol.chosen_q), 1.0) * max(abs(x) for x in sol.d)
    return eq.eigenvector(sol) / scale


def verification_block(sol, window: SeriesWindow = DEFAULT_WINDOW) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideDiskWarning)
        ode = max(ode_residuals(sol, window=window))
    block = {
        "closure": relative_closure(sol),
        "eigenvector_residual": relative_eigenvector(sol),
        "ode_residual_max": ode,
        "oracle_max_deviation": oracle_deviation(sol),
        "oracle_method": oracle_method(sol.params),
        "oracle_dps": ORACLE_DPS,
        "q_refinement": float(abs(refined(sol)[0] - sol.chosen_q) / max(abs(sol.chosen_q), 1.0)),
    }
    block["passed"] = bool(
        block["closure"] <= CLOSURE_TOL
        and block["eigenvector_residual"] <= EIGENVECTOR_TOL
        and block["ode_residual_max"] <= ODE_TOL
        and block["oracle_max_deviation"] <= ORACLE_TOL
    )
    return block


def _draw(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-BOX_RE, BOX_RE), rng.uniform(-BOX_IM, BOX_IM))


def _near_nonpositive_integers(x: complex, depth: int) -> bool:
    return any(abs(x + k) < MARGIN for k in range(depth + 1))


def sample_general(rng: np.random.Generator, N: int) -> gh.GeneralHeunParams:
    """Random general-Heun parameters with epsilon = -N, away from degeneracies."""
    while True:
        a, alpha, beta, gamma = (_draw(rng) for _ in range(4))
        if abs(a) < MARGIN or abs(a - 1) < MARGIN:
            continue
        # R_n vanishes for alpha or beta in {0, -1, ..., -(N+1)}, up to the closure rows
        if _near_nonpositive_integers(alpha, N + 1) or _near_nonpositive_integers(beta, N + 1):
            continue
        if _near_nonpositive_integers(gamma, ORACLE_TERMS + N + 2):
            continue
        return gh.GeneralHeunParams(a=a, alpha=alpha, beta=beta, gamma=gamma, epsilon=-N)


def sample_confluent(rng: np.random.Generator, N: int) -> ch.ConfluentHeunParams:
    """Random confluent parameters with delta = -N, away from degeneracies."""
    while True:
        alpha, gamma, epsilon = (_draw(rng) for _ in range(3))
        if abs(epsilon) < MARGIN:
            continue
        if _near_nonpositive_integers(alpha, N + 1):
            continue
        if _near_nonpositive_integers(gamma, ORACLE_TERMS + N + 2):
            continue
        return ch.ConfluentHeunParams(alpha=alpha, gamma=gamma, delta=-N, epsilon=epsilon)


SAMPLERS = {"general": sample_general, "confluent": sample_confluent}


def run_trial(equation: str, params, N: int, window: SeriesWindow = DEFAULT_WINDOW) -> dict:
    """Terminate and verify one parameter set; never raises on documented degeneracies."""
    eq = EQUATIONS[equation]
    try:
        sols = eq.terminate(params, N)
    except DegenerateRecurrenceError as exc:
        return {"status": "degenerate", "message": str(exc), "solutions": []}
    blocks = [verification_block(s, window) for s in sols]
    status = "pass" if all(b["passed"] for b in blocks) else "fail"
    return {"status": status, "solutions": sols, "blocks": blocks}
