"""Terminating Gauss-function expansions of the general Heun equation.

    Phi'' + (gamma/z + delta/(z-1) + eps/(z-a)) Phi'
          + (alpha beta z - q) / (z (z-1) (z-a)) Phi = 0,
    gamma + delta + eps = alpha + beta + 1.

The expansion basis is u_n(z) = z^n d^n/dz^n 2F1(alpha, beta; gamma; z). A
finite sum over u_0..u_N exists for eps = -N and q in the spectrum of the
leading continuant, and then collapses to a single
(2+N)F(1+N)(alpha, beta, e+1; gamma, e; z).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

from .errors import DomainError, TerminationConditionError
from .numeric import as_complex
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

FUCHS_TOL = 1e-12


@dataclass(frozen=True)
class GeneralHeunParams:
    """Parameters of the general Heun equation.

    ``delta`` defaults to the value forced by the Fuchsian condition. ``q`` may
    stay ``None`` when it is to be determined by :func:`gh_terminate`.
    """

    a: complex
    alpha: complex
    beta: complex
    gamma: complex
    epsilon: complex
    delta: complex | None = None
    q: complex | None = None

    def __post_init__(self):
        for name in ("a", "alpha", "beta", "gamma", "epsilon"):
            object.__setattr__(self, name, as_complex(getattr(self, name), name))
        if self.a in (0, 1):
            raise DomainError(f"a must differ from 0 and 1, got {self.a}")
        fuchs = self.alpha + self.beta + 1 - self.gamma - self.epsilon
        if self.delta is None:
            object.__setattr__(self, "delta", fuchs)
        else:
            delta = as_complex(self.delta, "delta")
            if abs(delta - fuchs) > FUCHS_TOL * max(1.0, abs(fuchs)):
                raise DomainError(
                    f"Fuchsian condition gamma + delta + eps = alpha + beta + 1 "
                    f"violated: delta = {delta}, required {fuchs}"
                )
            object.__setattr__(self, "delta", delta)
        if self.q is not None:
            object.__setattr__(self, "q", as_complex(self.q, "q"))

    def with_q(self, q) -> "GeneralHeunParams":
        return replace(self, q=q)

    def require_q(self) -> complex:
        if self.q is None:
            raise DomainError("accessory parameter q is not set")
        return self.q

    @property
    def base(self) -> PFqSpec:
        return PFqSpec((self.alpha, self.beta), (self.gamma,), 1)


@dataclass(frozen=True)
class GeneralTermination(engine.Termination):
    params: GeneralHeunParams | None = None


def _coeffs(params: GeneralHeunParams, num=complex):
    """Recurrence rows with the q-free diagonal."""
    a, al, be, ga, ep = map(num, (params.a, params.alpha, params.beta, params.gamma, params.epsilon))

    def coeffs(n: int):
        r = a * n * (n + al - 1) * (n + be - 1)
        qt = a * (n + al) * (n + be) + (a - 1) * n * (n + ep - 1) - ga * n
        p = (a - 1) * (n + ep)
        return r, qt, p

    return coeffs


def gh_recurrence(params: GeneralHeunParams, n: int) -> tuple[complex, complex, complex]:
    """(R_n, Q_n, P_n) for the d_n recurrence."""
    q = params.require_q()
    r, qt, p = _coeffs(params)(n)
    return r, qt - q, p


def gh_basis_u(params: GeneralHeunParams, n: int, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """u_n(z) = z^n d^n/dz^n 2F1(alpha, beta; gamma; z)."""
    return derivative_basis((params.alpha, params.beta), (params.gamma,), 1, n, z, window)


def gh_basis_recurrence_check(params: GeneralHeunParams, n: int, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """Left side of the three-term relation tying u_n, u_{n-1}, u_{n-2}."""
    if n < 2:
        raise DomainError("the basis relation needs n >= 2")
    z = as_complex(z, "z")
    al, be, ga = params.alpha, params.beta, params.gamma
    u = [gh_basis_u(params, k, z, window) for k in (n, n - 1, n - 2)]
    return (
        (z - 1) * u[0]
        + ((al + be + 2 * n - 3) * z - ga - n + 2) * u[1]
        + z * (n + al - 2) * (n + be - 2) * u[2]
    )


def _require_termination(params: GeneralHeunParams, N: int):
    if abs(params.epsilon + N) > FUCHS_TOL:
        raise TerminationConditionError(
            f"a finite sum of order N={N} requires epsilon = -N, got epsilon = {params.epsilon}"
        )


def gh_terminate(params: GeneralHeunParams, N: int) -> list[GeneralTermination]:
    """All order-N finite-sum solutions, one per admissible q."""
    _require_termination(params, N)
    coeffs = _coeffs(params)
    return engine.terminate(coeffs, N, params.base, params.with_q, GeneralTermination)


def gh_closure(sol: GeneralTermination) -> tuple[complex, complex]:
    """(d_{N+1}, d_{N+2}) from continuing the recurrence."""
    return engine.closure(_coeffs(sol.params), sol.chosen_q, sol.d)


def gh_eigenvector_check(sol: GeneralTermination, params: GeneralHeunParams | None = None) -> float:
    """max-norm of (minor - q I) d."""
    params = params or sol.params
    return engine.eigenvector_residual(_coeffs(params), sol.chosen_q, sol.d)


def gh_minor(params: GeneralHeunParams, N: int):
    return engine.minor_matrix(_coeffs(params), N)


def gh_d_polynomials(params: GeneralHeunParams, n_stop: int):
    """d_0(q)..d_{n_stop}(q) as polynomials in the accessory parameter."""
    return engine.coefficient_polynomials(_coeffs(params), n_stop)


def gh_convert_basis(sol: GeneralTermination, direction: Literal["alpha", "gamma"]) -> list[complex]:
    """Coefficients of the same solution in 2F1(alpha+n, beta; gamma; z) or 2F1(alpha, beta; gamma-n; z)."""
    pivot = sol.params.alpha if direction == "alpha" else sol.params.gamma
    return engine.convert_basis(sol.d, pivot, direction)


def gh_shifted_basis(params: GeneralHeunParams, n: int, z, direction, window=DEFAULT_WINDOW) -> complex:
    base = ((params.alpha, params.beta), (params.gamma,), 1, n, z, window)
    if direction == "alpha":
        return upper_shifted_basis(*base)
    if direction == "gamma":
        return lower_shifted_basis(*base)
    raise DomainError(f"unknown direction {direction!r}")


def gh_finite_sum(sol: GeneralTermination, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """sum_n d_n u_n(z) evaluated term by term."""
    return sum(dn * gh_basis_u(sol.params, n, z, window) for n, dn in enumerate(sol.d))


def gh_solution_value(
    sol: GeneralTermination, z, window: SeriesWindow = DEFAULT_WINDOW, order: int = 0
) -> complex:
    """Phi(z) (or its ``order``-th derivative) through the A-weighted Gauss series."""
    p = sol.params
    return evaluate_ratio_form(
        (p.alpha, p.beta), (p.gamma,), 1, sol.A, z, window, order, refine=_refiner(sol)
    )


def _refiner(sol: GeneralTermination):
    def refine(dps: int):
        return engine.refined_solution(_coeffs, sol.params, sol.N, sol.chosen_q, dps)[2]

    return refine
