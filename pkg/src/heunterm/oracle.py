"""Independent checks: Frobenius series about z = 0 and pointwise ODE residuals.

The series solver works from the ODE itself. After clearing denominators the
equation reads p2(z) y'' + p1(z) y' + p0(z) y = 0 with polynomial p's, and
matching powers of z gives one linear relation per power. Nothing here imports
the termination or hypergeometric machinery.

Two ways to solve the relations are offered:

* ``"forward"``: c_0 = 1, each power-m relation solved for c_{m+1}. This is the
  definition of the Frobenius series, and is accurate whenever that series is
  the dominant solution of the coefficient recurrence.
* ``"minimal"``: Miller-style backward recurrence for the recessive solution,
  normalized to c_0 = 1. Entire solutions of the confluent equation, and
  finite-sum solutions of the general equation with |a| < 1, are recessive;
  forward summation loses all accuracy for them within a few dozen terms.
  The power-1 relation is left out of the solve and its relative residual is
  reported as ``initial_residual``: it vanishes only when the recessive
  solution really is the analytic one.

Both methods can run at an extended working precision (``dps``). The
polynomial coefficients of the equation are then formed at that precision too,
so the series belongs to the equation with exactly the given parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError

SINGULAR_DISTANCE = 1e-8


@dataclass(frozen=True)
class FrobeniusSeries:
    coefficients: tuple[complex, ...]
    exponent: complex = 0j
    method: str = "forward"
    initial_residual: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def value(self, z, order: int = 0) -> complex:
        """Truncated series (or its derivative) at ``z``."""
        c = np.asarray(self.coefficients, dtype=complex)
        for _ in range(order):
            c = c[1:] * np.arange(1, len(c))
        return complex(np.polyval(c[::-1], complex(z))) if len(c) else 0j


def _at(p: list[complex], k: int) -> complex:
    return p[k] if 0 <= k < len(p) else 0j


def _row(p2, p1, p0, m: int, n: int) -> complex:
    """Coefficient of c_n in the relation collected at power z^m."""
    return _at(p2, m + 2 - n) * n * (n - 1) + _at(p1, m + 1 - n) * n + _at(p0, m - n)


def _check_shape(p2, p1, p0):
    if _at(p2, 0) != 0:
        raise DomainError("z = 0 is not a singular point of the cleared equation")
    low = max(len(p2) - 3, len(p1) - 2, len(p0) - 1)
    if low != 1:
        raise DomainError("cleared equation does not give a three-term recurrence")


def _forward(p2, p1, p0, n_max: int, one) -> list:
    c = [one]
    for m in range(n_max):
        lead = _row(p2, p1, p0, m, m + 1)
        if lead == 0:
            raise DomainError(f"indicial degeneracy: c_{m + 1} is undetermined")
        acc = sum(_row(p2, p1, p0, m, n) * c[n] for n in range(max(0, m - 1), m + 1))
        c.append(-acc / lead)
    return c


def _backward(p2, p1, p0, n_max: int, start: int, one) -> list:
    c = [0 * one] * (start + 2)
    c[start] = one
    for m in range(start, 0, -1):
        low = _row(p2, p1, p0, m, m - 1)
        if low == 0:
            raise DomainError(f"backward recurrence breaks at power {m}")
        acc = _row(p2, p1, p0, m, m + 1) * c[m + 1] + _row(p2, p1, p0, m, m) * c[m]
        c[m - 1] = -acc / low
        big = abs(c[m - 1])
        if big > 1e200:
            c = [x / big for x in c]
    # The last step down to c_0 can cancel badly; pin c_0 through the power-0
    # relation instead, which links c_0 and c_1 alone.
    r00, r01 = _row(p2, p1, p0, 0, 0), _row(p2, p1, p0, 0, 1)
    c0 = -r01 * c[1] / r00 if r00 != 0 else c[0]
    if c0 == 0:
        raise ConvergenceError("recessive solution vanishes at z = 0")
    out = [x / c0 for x in c[: n_max + 1]]
    out[0] = one
    return out


def _minimal(p2, p1, p0, n_max: int, one, tol: float, max_start: int = 40_000) -> list:
    start = n_max + 40
    prev = _backward(p2, p1, p0, n_max, start, one)
    while True:
        start *= 2
        if start > max_start:
            raise ConvergenceError("backward recurrence did not settle")
        cur = _backward(p2, p1, p0, n_max, start, one)
        worst = max(abs(a - b) / abs(b) if b != 0 else abs(a) for a, b in zip(prev[1:], cur[1:]))
        prev = cur
        if worst <= tol:
            return cur


def solve_cleared(p2, p1, p0, n_max: int, method: str, dps: int | None = None) -> list:
    """Raw coefficients c_0..c_n_max for supplied cleared polynomials.

    Works in whatever number type the polynomials carry; with ``dps`` set the
    caller is expected to hold an mpmath context of that precision.
    """
    return list(_solve_raw(p2, p1, p0, n_max, method, dps)[0])


def _solve_raw(p2, p1, p0, n_max: int, method: str, dps: int | None):
    if n_max < 1:
        raise DomainError("n_max must be positive")
    _check_shape(p2, p1, p0)
    if _row(p2, p1, p0, 0, 1) == 0:
        raise DomainError("indicial degeneracy at z = 0")
    one = 1 + 0j if dps is None else mpmath.mpc(1)
    # settle well below double resolution when working in extended precision
    tol = 1e-12 if dps is None else 1e-20
    if method == "forward":
        c = _forward(p2, p1, p0, n_max, one)
        resid = 0.0
    elif method == "minimal":
        c = _minimal(p2, p1, p0, n_max, one, tol)
        terms = [_row(p2, p1, p0, 1, n) * c[n] for n in range(3)]
        resid = abs(sum(terms)) / max(max(abs(t) for t in terms), 1e-300)
    else:
        raise DomainError(f"unknown method {method!r}")
    return c, float(resid)


def _solve(p2, p1, p0, n_max: int, method: str, dps: int | None) -> FrobeniusSeries:
    c, resid = _solve_raw(p2, p1, p0, n_max, method, dps)
    return FrobeniusSeries(tuple(complex(x) for x in c), 0j, method, resid)


def _gamma_ok(gamma: complex):
    g = complex(gamma)
    if g.imag == 0 and g.real <= 0 and g.real == math.floor(g.real):
        raise DomainError("gamma is a nonpositive integer: the analytic branch is not unique")


def general_cleared(params, num=complex, q=None) -> tuple[list, list, list]:
    """p2, p1, p0 after multiplying the general Heun equation by z (z-1) (z-a).

    ``num`` fixes the number type the products are formed in; ``q`` overrides
    the accessory parameter carried by ``params``.
    """
    a, ga, ep, al, be = map(num, (params.a, params.gamma, params.epsilon, params.alpha, params.beta))
    # delta through the Fuchsian condition, so the equation stays Fuchsian at any precision
    de = al + be + 1 - ga - ep
    q = num(params.require_q() if q is None else q)
    p2 = [num(0), a, -(1 + a), num(1)]
    p1 = [ga * a, -ga * (1 + a) - de * a - ep, ga + de + ep]
    p0 = [-q, al * be]
    return p2, p1, p0


def confluent_cleared(params, num=complex, q=None) -> tuple[list, list, list]:
    """p2, p1, p0 after multiplying the confluent equation by z (z-1)."""
    al, ga, de, ep = map(num, (params.alpha, params.gamma, params.delta, params.epsilon))
    q = num(params.require_q() if q is None else q)
    p2 = [num(0), num(-1), num(1)]
    p1 = [-ga, ga + de - ep, ep]
    p0 = [-q, ep * al]
    return p2, p1, p0


def _frobenius(cleared, params, n_max, method, dps, q) -> FrobeniusSeries:
    _gamma_ok(params.gamma)
    if dps is None:
        return _solve(*cleared(params, complex, q), n_max, method, None)
    with mpmath.workdps(dps):
        return _solve(*cleared(params, mpmath.mpc, q), n_max, method, dps)


def frobenius_general(
    params, n_max: int, method: str = "forward", dps: int | None = None, q=None
) -> FrobeniusSeries:
    """Analytic Frobenius series of the general Heun equation at z = 0.

    With ``dps`` set, the equation's polynomial coefficients are formed and the
    recurrence solved at that many decimal digits.
    """
    if params.a == 0:
        raise DomainError("a = 0 merges two singular points")
    return _frobenius(general_cleared, params, n_max, method, dps, q)


def frobenius_confluent(
    params, n_max: int, method: str = "forward", dps: int | None = None, q=None
) -> FrobeniusSeries:
    """Analytic Frobenius series of the single-confluent Heun equation at z = 0."""
    return _frobenius(confluent_cleared, params, n_max, method, dps, q)


def _near(z: complex, points) -> None:
    for s in points:
        if abs(z - s) < SINGULAR_DISTANCE:
            raise DomainError(f"z = {z} is within {SINGULAR_DISTANCE} of the singular point {s}")


def ode_residual_general(phi, dphi, d2phi, z, params) -> complex:
    """Left side of the general Heun equation for supplied values of Phi, Phi', Phi''."""
    z = complex(z)
    a = params.a
    _near(z, (0, 1, a))
    q = params.require_q()
    return (
        d2phi
        + (params.gamma / z + params.delta / (z - 1) + params.epsilon / (z - a)) * dphi
        + (params.alpha * params.beta * z - q) / (z * (z - 1) * (z - a)) * phi
    )


def ode_residual_confluent(phi, dphi, d2phi, z, params) -> complex:
    """Left side of the single-confluent Heun equation."""
    z = complex(z)
    _near(z, (0, 1))
    q = params.require_q()
    ep = params.epsilon
    return (
        d2phi
        + (ep + params.gamma / z + params.delta / (z - 1)) * dphi
        + (ep * params.alpha * z - q) / (z * (z - 1)) * phi
    )


def normalized_residual(residual, phi, dphi, d2phi) -> float:
    return abs(residual) / max(abs(phi), abs(dphi), abs(d2phi), 1.0)
