"""Finite-sum reduction of a three-term expansion.

Both Heun solvers feed this module a recurrence ``coeffs(n) -> (R_n, Qt_n, P_n)``
where ``Qt_n = Q_n + q`` is the q-free part of the diagonal, so that the
expansion coefficients obey

    R_n d_n + (Qt_{n-1} - q) d_{n-1} + P_{n-2} d_{n-2} = 0,   d_0 = 1.

A finite sum d_0..d_N needs P_N = 0 and q a root of the leading
(N+1)x(N+1) continuant. Each such q yields an A-polynomial whose negated
roots e_1..e_N augment the base hypergeometric parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Literal, Sequence

import mpmath
import numpy as np

from .errors import DegenerateRecurrenceError, DomainError, PoleError
from .numeric import (
    ComplexPolynomial,
    TridiagonalBand,
    continuant_char_poly,
    newton_refine,
    poly_roots,
    pochhammer,
    sort_complex,
    stirling_first,
)
from .pfq import PFqSpec, augment_parameters

Recurrence = Callable[[int], tuple[complex, complex, complex]]

REDUCED_ORDER_THRESHOLD = 1e-10


@dataclass(frozen=True)
class Termination:
    """One admissible accessory value together with its finite-sum solution."""

    N: int
    q_admissible: tuple[complex, ...]
    chosen_q: complex
    d: tuple[complex, ...]
    A: ComplexPolynomial
    e: tuple[complex, ...]
    solution: PFqSpec
    effective_order: int
    flags: tuple[str, ...] = ()
    params: object = field(default=None, compare=False)

    @property
    def reduced_order(self) -> bool:
        return "reduced-order" in self.flags

    @property
    def base_upper(self) -> tuple[complex, ...]:
        return self.solution.upper[: self.solution.p - len(self.e)]

    @property
    def base_lower(self) -> tuple[complex, ...]:
        return self.solution.lower[: self.solution.q - len(self.e)]


def build_band(coeffs: Recurrence, N: int) -> TridiagonalBand:
    rows = [coeffs(n) for n in range(N + 1)]
    return TridiagonalBand(
        sub=tuple(rows[k][2] for k in range(N)),
        diag=tuple(ComplexPolynomial((rows[k][1], -1)) for k in range(N + 1)),
        sup=tuple(coeffs(k + 1)[0] for k in range(N)),
    )


def check_nondegenerate(coeffs: Recurrence, N: int):
    for n in range(1, N + 1):
        if coeffs(n)[0] == 0:
            raise DegenerateRecurrenceError(f"R_{n} = 0: d_{n} cannot be solved for")


def forward_coefficients(coeffs: Recurrence, q, n_stop: int) -> list[complex]:
    """d_0..d_{n_stop} from d_0 = 1 by solving each recurrence row for its top index."""
    q = complex(q)
    d = [1 + 0j]
    for n in range(1, n_stop + 1):
        r_n = coeffs(n)[0]
        if r_n == 0:
            raise DegenerateRecurrenceError(f"R_{n} = 0: d_{n} cannot be solved for")
        acc = (coeffs(n - 1)[1] - q) * d[n - 1]
        if n >= 2:
            acc += coeffs(n - 2)[2] * d[n - 2]
        d.append(-acc / r_n)
    return d


def coefficient_polynomials(coeffs: Recurrence, n_stop: int) -> list[ComplexPolynomial]:
    """d_0..d_{n_stop} as polynomials in q, by running the recurrence symbolically."""
    q = ComplexPolynomial((0, 1))
    d = [ComplexPolynomial((1,))]
    for n in range(1, n_stop + 1):
        r_n = coeffs(n)[0]
        if r_n == 0:
            raise DegenerateRecurrenceError(f"R_{n} = 0: d_{n} cannot be solved for")
        acc = (coeffs(n - 1)[1] - q) * d[n - 1]
        if n >= 2:
            acc = acc + coeffs(n - 2)[2] * d[n - 2]
        d.append(-acc / r_n)
    return d


def closure(coeffs: Recurrence, q, d: Sequence[complex]) -> tuple[complex, complex]:
    """Continue the recurrence past d_N; returns (d_{N+1}, d_{N+2}).

    If R_{N+1} or R_{N+2} vanishes, the raw row residual is returned in its place.
    """
    q = complex(q)
    N = len(d) - 1
    ext = list(d)
    for n in (N + 1, N + 2):
        acc = (coeffs(n - 1)[1] - q) * ext[n - 1]
        if n >= 2:
            acc += coeffs(n - 2)[2] * ext[n - 2]
        r_n = coeffs(n)[0]
        ext.append(-acc / r_n if r_n != 0 else acc)
    return ext[N + 1], ext[N + 2]


def minor_matrix(coeffs: Recurrence, N: int) -> np.ndarray:
    """The q-free (N+1)x(N+1) minor: Qt on the diagonal, P below, R above."""
    m = np.zeros((N + 1, N + 1), dtype=complex)
    for n in range(N + 1):
        r_n, qt_n, p_n = coeffs(n)
        m[n, n] = qt_n
        if n + 1 <= N:
            m[n + 1, n] = p_n
            m[n, n + 1] = coeffs(n + 1)[0]
    return m


def eigenvector_residual(coeffs: Recurrence, q, d: Sequence[complex]) -> float:
    """max |(minor - q I) d| over the N+1 rows."""
    N = len(d) - 1
    m = minor_matrix(coeffs, N) - complex(q) * np.eye(N + 1)
    return float(np.max(np.abs(m @ np.asarray(d, dtype=complex))))


def a_polynomial(d: Sequence[complex]) -> ComplexPolynomial:
    """A(xi) = sum_n d_n xi (xi-1) ... (xi-n+1), assembled from Stirling numbers.

    A_k = sum_{n>=k} (-1)^(n-k) s(n, k) d_n with s unsigned.
    """
    N = len(d) - 1
    coeffs = []
    for k in range(N + 1):
        acc = 0j
        for n in range(k, N + 1):
            acc += (-1) ** (n - k) * stirling_first(n, k) * d[n]
        coeffs.append(acc)
    return ComplexPolynomial(tuple(coeffs))


def e_parameters(A: ComplexPolynomial) -> list[complex]:
    """Negated roots of A, ordered by (re, im)."""
    if A.degree == 0:
        return []
    return sort_complex(-r for r in poly_roots(A))


def e_equation(d: Sequence[complex], e) -> complex:
    """sum_n (-1)^n d_n (e)_n, which vanishes at every e-parameter."""
    return sum((-1) ** n * dn * pochhammer(e, n) for n, dn in enumerate(d))


def effective_order(d: Sequence[complex], threshold: float = REDUCED_ORDER_THRESHOLD) -> int:
    scale = max(abs(x) for x in d)
    return max(n for n, x in enumerate(d) if abs(x) > threshold * scale)


def terminate(
    coeffs: Recurrence,
    N: int,
    base: PFqSpec,
    make_params: Callable[[complex], object] | None = None,
    result_type: type[Termination] = Termination,
) -> list[Termination]:
    """All finite-sum solutions of order N for the given recurrence.

    The caller has already enforced P_N = 0 through the exponent parameter.
    """
    if N < 0:
        raise DomainError(f"N must be nonnegative, got {N}")
    check_nondegenerate(coeffs, N)
    band = build_band(coeffs, N)
    char = continuant_char_poly(band, N)
    # refine on the evaluated continuant: expanded coefficients lose digits for larger N
    q_all = tuple(sort_complex(newton_refine(band, N, r) for r in poly_roots(char)))

    out = []
    for q in q_all:
        d = forward_coefficients(coeffs, q, N)
        order = effective_order(d)
        flags = ("reduced-order",) if order < N else ()
        A = a_polynomial(d)
        e = e_parameters(a_polynomial(d[: order + 1]))
        out.append(
            result_type(
                N=N,
                q_admissible=q_all,
                chosen_q=q,
                d=tuple(d),
                A=A,
                e=tuple(e),
                solution=augment_parameters(base, e),
                effective_order=order,
                flags=flags,
                params=make_params(q) if make_params else None,
            )
        )
    return out


def refine_high_precision(coeffs: Recurrence, N: int, q, dps: int, max_iter: int = 60):
    """Polish an admissible q at ``dps`` digits and rebuild d_0..d_N and A from it.

    ``coeffs`` must already produce mpmath numbers. Newton's method runs on the
    last row of (M - q I) d, whose zeros in q are exactly the admissible values.
    Returns (q, d, A coefficients), all mpmath numbers.
    """
    with mpmath.workdps(dps):
        q = mpmath.mpc(q)
        tol = mpmath.mpf(10) ** (3 - dps)
        for _ in range(max_iter):
            d, dd = [mpmath.mpc(1)], [mpmath.mpc(0)]
            for n in range(1, N + 1):
                r_n = coeffs(n)[0]
                qt, p = coeffs(n - 1)[1], coeffs(n - 2)[2] if n >= 2 else 0
                prev2, dprev2 = (d[n - 2], dd[n - 2]) if n >= 2 else (0, 0)
                d.append(-((qt - q) * d[n - 1] + p * prev2) / r_n)
                dd.append(-((qt - q) * dd[n - 1] - d[n - 1] + p * dprev2) / r_n)
            qt_N = coeffs(N)[1]
            p_prev = coeffs(N - 1)[2] if N >= 1 else 0
            g = (qt_N - q) * d[N] + (p_prev * d[N - 1] if N >= 1 else 0)
            dg = (qt_N - q) * dd[N] - d[N] + (p_prev * dd[N - 1] if N >= 1 else 0)
            if dg == 0:
                break
            step = g / dg
            q -= step
            if abs(step) <= tol * max(1, abs(q)):
                break
        d = forward_coefficients_mp(coeffs, q, N)
        A = [
            mpmath.fsum((-1) ** (n - k) * stirling_first(n, k) * d[n] for n in range(k, N + 1))
            for k in range(N + 1)
        ]
        return q, d, A


def forward_coefficients_mp(coeffs: Recurrence, q, n_stop: int) -> list:
    d = [mpmath.mpc(1)]
    for n in range(1, n_stop + 1):
        acc = (coeffs(n - 1)[1] - q) * d[n - 1]
        if n >= 2:
            acc += coeffs(n - 2)[2] * d[n - 2]
        d.append(-acc / coeffs(n)[0])
    return d


@lru_cache(maxsize=512)
def refined_solution(factory, params, N: int, q: complex, dps: int):
    """Cached :func:`refine_high_precision` for ``factory(params, mpmath.mpc)``."""
    with mpmath.workdps(dps):
        return refine_high_precision(factory(params, mpmath.mpc), N, q, dps)


def convert_basis(
    d: Sequence[complex], pivot, direction: Literal["alpha", "gamma"]
) -> list[complex]:
    """Re-express sum d_n u_n in a parameter-shifted basis.

    ``direction="alpha"`` targets pFq(a_1 + n, ...) with ``pivot = a_1``;
    ``direction="gamma"`` targets pFq(...; b_1 - n, ...) with ``pivot = b_1``.
    The map from new to old coefficients,
    d_k = sum_{m>=k} C(m, k) / g(m, k) dt_m, is upper triangular, so the
    new coefficients follow by back substitution.
    """
    pivot = complex(pivot)
    if direction == "alpha":
        g = lambda m, k: pochhammer(pivot, k)  # noqa: E731
    elif direction == "gamma":
        g = lambda m, k: pochhammer(pivot - m, k)  # noqa: E731
    else:
        raise DomainError(f"unknown direction {direction!r}")

    N = len(d) - 1
    out = [0j] * (N + 1)
    for k in range(N, -1, -1):
        acc = complex(d[k])
        for m in range(k + 1, N + 1):
            gmk = g(m, k)
            if gmk == 0:
                raise PoleError(f"shift factor vanishes at m={m}, k={k}", index=k)
            acc -= comb(m, k) * out[m] / gmk
        gkk = g(k, k)
        if gkk == 0:
            raise PoleError(f"shift factor vanishes at k={k}", index=k)
        out[k] = acc * gkk
    return out


def expand_basis(dt: Sequence[complex], pivot, direction: Literal["alpha", "gamma"]) -> list[complex]:
    """Inverse of :func:`convert_basis`: shifted-basis coefficients back to d_n."""
    pivot = complex(pivot)
    N = len(dt) - 1
    out = []
    for k in range(N + 1):
        acc = 0j
        for m in range(k, N + 1):
            g = pochhammer(pivot, k) if direction == "alpha" else pochhammer(pivot - m, k)
            if g == 0:
                raise PoleError(f"shift factor vanishes at m={m}, k={k}", index=k)
            acc += comb(m, k) * dt[m] / g
        out.append(acc)
    return out
