"""Terminating Kummer-function expansions of the single-confluent Heun equation.

    Phi'' + (eps + gamma/z + delta/(z-1)) Phi' + (eps alpha z - q) / (z (z-1)) Phi = 0

The z-coefficient in the last term is eps*alpha, so eps = 0 (the Ince limit)
is excluded. Basis: u_n(z) = z^n d^n/dz^n 1F1(alpha; gamma; -eps z). A finite
sum over u_0..u_N needs delta = -N and then equals
(N+1)F(N+1)(alpha, e+1; gamma, e; -eps z).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

from .errors import DomainError, TerminationConditionError, VerificationError
from .numeric import as_complex, multiset_distance
from .pfq import (
    DEFAULT_WINDOW,
    PFqSpec,
    SeriesWindow,
    derivative_basis,
    evaluate_ratio_form,
    lower_shifted_basis,
    upper_shifted_basis,
)
from . import termination as engine

INCE_TOL = 1e-13
DELTA_TOL = 1e-12


@dataclass(frozen=True)
class ConfluentHeunParams:
    alpha: complex
    gamma: complex
    delta: complex
    epsilon: complex
    q: complex | None = None

    def __post_init__(self):
        for name in ("alpha", "gamma", "delta", "epsilon"):
            object.__setattr__(self, name, as_complex(getattr(self, name), name))
        if abs(self.epsilon) < INCE_TOL:
            raise DomainError(
                "epsilon = 0 is the Ince limit; the Kummer-function expansion "
                "with the eps*alpha convention does not apply there"
            )
        if self.q is not None:
            object.__setattr__(self, "q", as_complex(self.q, "q"))

    def with_q(self, q) -> "ConfluentHeunParams":
        return replace(self, q=q)

    def require_q(self) -> complex:
        if self.q is None:
            raise DomainError("accessory parameter q is not set")
        return self.q

    @property
    def omega(self) -> complex:
        return -self.epsilon

    @property
    def base(self) -> PFqSpec:
        return PFqSpec((self.alpha,), (self.gamma,), self.omega)


@dataclass(frozen=True)
class ConfluentTermination(engine.Termination):
    params: ConfluentHeunParams | None = None


def _coeffs(params: ConfluentHeunParams, num=complex):
    al, ga, de, ep = map(num, (params.alpha, params.gamma, params.delta, params.epsilon))

    def coeffs(n: int):
        return ep * n * (n + al - 1), n * (n + ep + ga + de - 1) + ep * al, n + de

    return coeffs


def ch_recurrence(params: ConfluentHeunParams, n: int) -> tuple[complex, complex, complex]:
    """(R_n, Q_n, P_n) for the d_n recurrence."""
    q = params.require_q()
    r, qt, p = _coeffs(params)(n)
    return r, qt - q, p


def ch_basis_u(params: ConfluentHeunParams, n: int, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """u_n(z) = z^n d^n/dz^n 1F1(alpha; gamma; -eps z)."""
    return derivative_basis((params.alpha,), (params.gamma,), params.omega, n, z, window)


def ch_basis_recurrence_check(params: ConfluentHeunParams, n: int, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """Left side of the relation tying u_{n-1}, u_n, u_{n+1}."""
    if n < 1:
        raise DomainError("the basis relation needs n >= 1")
    z = as_complex(z, "z")
    al, ga, ep = params.alpha, params.gamma, params.epsilon
    return (
        ep * z * (al + n - 1) * ch_basis_u(params, n - 1, z, window)
        + (ga + n - 1 + ep * z) * ch_basis_u(params, n, z, window)
        + ch_basis_u(params, n + 1, z, window)
    )


def ch_terminate(params: ConfluentHeunParams, N: int) -> list[ConfluentTermination]:
    """All order-N finite-sum solutions, one per admissible q."""
    if abs(params.delta + N) > DELTA_TOL:
        raise TerminationConditionError(
            f"a finite sum of order N={N} requires delta = -N, got delta = {params.delta}"
        )
    return engine.terminate(_coeffs(params), N, params.base, params.with_q, ConfluentTermination)


def ch_d_polynomials(params: ConfluentHeunParams, n_stop: int):
    """d_0(q)..d_{n_stop}(q) as polynomials in the accessory parameter."""
    return engine.coefficient_polynomials(_coeffs(params), n_stop)


def ch_terminate_n3(params: ConfluentHeunParams, tol: float = 1e-9) -> list[ConfluentTermination]:
    """Order-3 solutions, cross-checked two ways.

    The admissible q must coincide with the roots of the quartic d_4(q), and
    each e-parameter must solve -d3 e(e+1)(e+2) + d2 e(e+1) - d1 e + d0 = 0.
    """
    sols = ch_terminate(params, 3)
    d4 = ch_d_polynomials(params, 4)[4]
    q_roots = d4.roots()
    scale = max(1.0, *(abs(q) for q in q_roots))
    if multiset_distance(q_roots, list(sols[0].q_admissible)) > tol * scale:
        raise VerificationError("continuant roots and d_4(q) roots disagree")
    for s in sols:
        dscale = max(abs(x) for x in s.d)
        for e in s.e:
            cubic = -s.d[3] * e * (e + 1) * (e + 2) + s.d[2] * e * (e + 1) - s.d[1] * e + s.d[0]
            if abs(cubic) > tol * dscale * max(1.0, abs(e)) ** 3:
                raise VerificationError(f"e = {e} does not solve the cubic (residual {abs(cubic):.3g})")
    return sols


def ch_closure(sol: ConfluentTermination) -> tuple[complex, complex]:
    return engine.closure(_coeffs(sol.params), sol.chosen_q, sol.d)


def ch_eigenvector_check(sol: ConfluentTermination, params: ConfluentHeunParams | None = None) -> float:
    params = params or sol.params
    return engine.eigenvector_residual(_coeffs(params), sol.chosen_q, sol.d)


def ch_minor(params: ConfluentHeunParams, N: int):
    return engine.minor_matrix(_coeffs(params), N)


def ch_convert_basis(sol: ConfluentTermination, direction: Literal["alpha", "gamma"]) -> list[complex]:
    """Coefficients in 1F1(alpha+n; gamma; -eps z) or 1F1(alpha; gamma-n; -eps z)."""
    pivot = sol.params.alpha if direction == "alpha" else sol.params.gamma
    return engine.convert_basis(sol.d, pivot, direction)


def ch_shifted_basis(params: ConfluentHeunParams, n: int, z, direction, window=DEFAULT_WINDOW) -> complex:
    base = ((params.alpha,), (params.gamma,), params.omega, n, z, window)
    if direction == "alpha":
        return upper_shifted_basis(*base)
    if direction == "gamma":
        return lower_shifted_basis(*base)
    raise DomainError(f"unknown direction {direction!r}")


def ch_finite_sum(sol: ConfluentTermination, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    return sum(dn * ch_basis_u(sol.params, n, z, window) for n, dn in enumerate(sol.d))


def ch_solution_value(
    sol: ConfluentTermination, z, window: SeriesWindow = DEFAULT_WINDOW, order: int = 0
) -> complex:
    """Phi(z) (or a derivative) through the A-weighted Kummer series; entire in z."""
    p = sol.params
    return evaluate_ratio_form(
        (p.alpha,), (p.gamma,), p.omega, sol.A, z, window, order, refine=_refiner(sol)
    )


def _refiner(sol: ConfluentTermination):
    def refine(dps: int):
        return engine.refined_solution(_coeffs, sol.params, sol.N, sol.chosen_q, dps)[2]

    return refine
