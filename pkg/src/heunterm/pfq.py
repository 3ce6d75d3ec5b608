"""Generalized hypergeometric series pFq(upper; lower; omega z).

Two coefficient generators live here. The plain one multiplies term ratios
built from the parameter lists. The ratio form sums

    sum_n omega^n z^n prod(upper)_n / (n! prod(lower)_n) * A(n) / A(0)

for a polynomial A. When A has roots -e_i this equals the augmented function
pFq(upper, e+1; lower, e; omega z), and it stays finite when some e_i is a
nonpositive integer, where the augmented parameter list has a pole.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import mpmath

from .errors import ConvergenceError, DomainError, OutsideDiskWarning, PoleError
from .numeric import ComplexPolynomial, as_complex, is_nonpositive_integer, pochhammer


@dataclass(frozen=True)
class SeriesWindow:
    """Truncation policy for series summation."""

    max_terms: int = 10_000
    abs_tol: float = 1e-30
    rel_tol: float = 1e-16
    # re-sum in extended precision once sum |term| exceeds this multiple of |sum|
    cancellation_limit: float = 1e4
    max_dps: int = 120

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if self.cancellation_limit < 1:
            raise DomainError("cancellation_limit must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")


DEFAULT_WINDOW = SeriesWindow()


@dataclass(frozen=True)
class PFqSpec:
    upper: tuple[complex, ...] = ()
    lower: tuple[complex, ...] = ()
    omega: complex = 1 + 0j

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(as_complex(u, "upper") for u in self.upper))
        object.__setattr__(self, "lower", tuple(as_complex(l, "lower") for l in self.lower))
        object.__setattr__(self, "omega", as_complex(self.omega, "omega"))

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def label(self) -> str:
        return f"{self.p}F{self.q}"


def augment_parameters(spec: PFqSpec, e: Sequence[complex]) -> PFqSpec:
    """Append e_i+1 to the upper list and e_i to the lower list, for each i.

    Realizes the operator (z d/dz + e_1)...(z d/dz + e_N) applied to the base
    function, up to the constant factor e_1 ... e_N.
    """
    e = [as_complex(x, "e") for x in e]
    return PFqSpec(
        upper=spec.upper + tuple(x + 1 for x in e),
        lower=spec.lower + tuple(e),
        omega=spec.omega,
    )


def _check_lower(lower: Sequence[complex], n_max: int | None):
    for j, b in enumerate(lower):
        if is_nonpositive_integer(b):
            idx = int(-b.real)
            if n_max is None or idx <= n_max - 1:
                raise PoleError(
                    f"lower parameter #{j} = {b} is a pole: (b)_n vanishes from n = {idx + 1}",
                    parameter=j,
                    index=idx + 1,
                )


def _terminates(upper: Sequence[complex]) -> bool:
    return any(is_nonpositive_integer(a) for a in upper)


def _base_coefficients(upper, lower, omega) -> Iterator[complex]:
    """Yield c_0, c_1, ... of the plain series; stops once a numerator factor hits zero."""
    c = 1 + 0j
    n = 0
    while True:
        yield c
        num = omega
        for a in upper:
            num *= a + n
        if num == 0:
            return
        den = n + 1
        for b in lower:
            den *= b + n
        c = c * num / den
        n += 1


def pfq_coefficients(spec: PFqSpec, n_max: int) -> list[complex]:
    """Taylor coefficients c_0..c_{n_max} of pFq(upper; lower; omega z)."""
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    _check_lower(spec.lower, n_max)
    out = []
    for c in _base_coefficients(spec.upper, spec.lower, spec.omega):
        out.append(c)
        if len(out) == n_max + 1:
            break
    out.extend([0j] * (n_max + 1 - len(out)))
    return out


def ratio_form_coefficients(
    base_upper: Sequence[complex],
    base_lower: Sequence[complex],
    omega,
    A: ComplexPolynomial,
    n_max: int,
) -> list[complex]:
    """c_n = omega^n prod(base_upper)_n / (n! prod(base_lower)_n) * A(n) / A(0)."""
    a0 = A(0)
    if a0 == 0:
        raise DomainError("ratio form needs A(0) != 0")
    base = pfq_coefficients(PFqSpec(base_upper, base_lower, omega), n_max)
    return [c * A(n) / a0 for n, c in enumerate(base)]


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _envelope(A: ComplexPolynomial):
    absA = [abs(c) for c in A.coefficients]
    a0 = abs(A(0))
    return lambda n: sum(c * n**k for k, c in enumerate(absA)) / a0


def _sum(
    coefficients: Iterator[complex],
    z: complex,
    order: int,
    window: SeriesWindow,
    weight=None,
):
    """Sum falling(n, order) c_n z^(n-order) over a coefficient stream.

    ``weight(n)`` returns (multiplier, magnitude bound for the multiplier); the
    bound keeps isolated zeros of the multiplier from faking convergence. Stops
    after two consecutive terms fall below abs_tol + rel_tol |partial sum|.
    Returns the sum and the sum of term magnitudes, whose ratio measures the
    cancellation suffered.
    """
    total = 0j
    absolute = 0.0
    small = 0
    zpow = 1 + 0j
    for n, c in enumerate(coefficients):
        if n >= window.max_terms:
            raise ConvergenceError(
                f"series not converged after {window.max_terms} terms at z={z}"
            )
        if n < order:
            continue
        w, mag_w = weight(n) if weight is not None else (1, 1)
        f = _falling(n, order)
        term = f * c * w * zpow
        total += term
        absolute += abs(term)
        if not math.isfinite(absolute):
            raise ConvergenceError(f"series overflowed after {n} terms at z={z}")
        mag = abs(f * c * zpow) * mag_w
        zpow *= z
        if mag <= window.abs_tol + window.rel_tol * abs(total):
            small += 1
            if small >= 2:
                return total, absolute
        else:
            small = 0
    return total, absolute


def _needs_extended(total, absolute, window: SeriesWindow) -> int | None:
    """Working precision (decimal digits) for a re-summation, or None if double suffices."""
    ratio = absolute / max(abs(total), 1e-300)
    if ratio <= window.cancellation_limit:
        return None
    return min(window.max_dps, 24 + math.ceil(math.log10(ratio)))


def _mp_sum(upper, lower, omega, z, order, window, dps, A_coefficients=None) -> complex:
    """Re-run the summation at ``dps`` digits; returns a double-precision result."""
    with mpmath.workdps(dps):
        mpc = mpmath.mpc
        up = [mpc(a) for a in upper]
        lo = [mpc(b) for b in lower]
        weight = None
        if A_coefficients is not None:
            A = [mpc(c) for c in A_coefficients]
            absA = [float(abs(c)) for c in A]
            a0 = A[0]
            abs_a0 = float(abs(a0))

            def weight(n):
                v = mpc(0)
                for c in reversed(A):
                    v = v * n + c
                return v / a0, sum(c * n**k for k, c in enumerate(absA)) / abs_a0

        total, _ = _sum(_base_coefficients(up, lo, mpc(omega)), mpc(z), order, window, weight)
        return complex(total)


def _warn_disk(p: int, q: int, omega: complex, z: complex, terminating: bool):
    if p == q + 1 and not terminating and abs(omega * z) >= 1:
        warnings.warn(
            f"|omega z| = {abs(omega * z):.6g} >= 1: outside the guaranteed convergence disk",
            OutsideDiskWarning,
            stacklevel=3,
        )


def evaluate_ratio_form(
    base_upper: Sequence[complex],
    base_lower: Sequence[complex],
    omega,
    A: ComplexPolynomial,
    z,
    window: SeriesWindow = DEFAULT_WINDOW,
    order: int = 0,
    refine=None,
) -> complex:
    """Sum the A-weighted series (or its ``order``-th z-derivative) at ``z``.

    On heavy cancellation the sum is repeated in extended precision. ``refine``,
    if given, maps a digit count to A's coefficients computed at that
    precision; otherwise the double coefficients of ``A`` are taken as exact.
    """
    base_upper = [as_complex(a, "upper") for a in base_upper]
    base_lower = [as_complex(b, "lower") for b in base_lower]
    omega = as_complex(omega, "omega")
    z = as_complex(z, "z")
    a0 = A(0)
    if a0 == 0:
        raise DomainError("ratio form needs A(0) != 0")
    _check_lower(base_lower, None if not _terminates(base_upper) else _termination_index(base_upper))
    _warn_disk(len(base_upper), len(base_lower), omega, z, _terminates(base_upper))
    env = _envelope(A)

    def weight(n):
        return A(n) / a0, env(n)

    total, absolute = _sum(_base_coefficients(base_upper, base_lower, omega), z, order, window, weight)
    dps = _needs_extended(total, absolute, window)
    if dps is None:
        return total
    coeffs = refine(dps) if refine is not None else A.coefficients
    return _mp_sum(base_upper, base_lower, omega, z, order, window, dps, coeffs)


def _termination_index(upper) -> int:
    return min(int(-a.real) for a in upper if is_nonpositive_integer(a)) + 1


def split_pole_pairs(spec: PFqSpec) -> tuple[PFqSpec, list[complex]]:
    """Pull out (e+1; e) pairs whose lower entry e is a nonpositive integer.

    Returns the reduced spec and the list of extracted e values.
    """
    upper = list(spec.upper)
    lower = list(spec.lower)
    extracted = []
    for b in list(lower):
        if not is_nonpositive_integer(b):
            continue
        partner = next((i for i, a in enumerate(upper) if a == b + 1), None)
        if partner is None:
            continue
        upper.pop(partner)
        lower.remove(b)
        extracted.append(b)
    return PFqSpec(tuple(upper), tuple(lower), spec.omega), extracted


def _routed(spec: PFqSpec, z, window, order):
    reduced, e = split_pole_pairs(spec)
    if any(x == 0 for x in e):
        raise PoleError("augmented pair with e = 0 has no finite normalization", index=0)
    A = ComplexPolynomial.from_roots([-x for x in e])
    return evaluate_ratio_form(reduced.upper, reduced.lower, reduced.omega, A, z, window, order)


def pfq_eval(spec: PFqSpec, z, window: SeriesWindow = DEFAULT_WINDOW) -> complex:
    """Truncated-series value of pFq(upper; lower; omega z).

    Pairs (e+1; e) with e in {-1, -2, ...} are summed through the ratio form.
    """
    return pfq_derivative_series(spec, z, 0, window)


def pfq_derivative_series(
    spec: PFqSpec, z, order: int = 1, window: SeriesWindow = DEFAULT_WINDOW
) -> complex:
    """``order``-th z-derivative obtained by differentiating the series term by term."""
    if order < 0:
        raise DomainError("derivative order must be nonnegative")
    z = as_complex(z, "z")
    _, poles = split_pole_pairs(spec)
    if poles:
        return _routed(spec, z, window, order)
    terminating = _terminates(spec.upper)
    _check_lower(spec.lower, _termination_index(spec.upper) if terminating else None)
    _warn_disk(spec.p, spec.q, spec.omega, z, terminating)
    total, absolute = _sum(_base_coefficients(spec.upper, spec.lower, spec.omega), z, order, window)
    dps = _needs_extended(total, absolute, window)
    if dps is None:
        return total
    return _mp_sum(spec.upper, spec.lower, spec.omega, z, order, window, dps)


def derivative_basis(
    base_upper: Sequence[complex],
    base_lower: Sequence[complex],
    omega,
    n: int,
    z,
    window: SeriesWindow = DEFAULT_WINDOW,
) -> complex:
    """u_n(z) = z^n d^n/dz^n pFq(base; omega z), via the parameter-shift identity."""
    z = as_complex(z, "z")
    omega = as_complex(omega, "omega")
    for j, b in enumerate(base_lower):
        if any(b + k == 0 for k in range(n + 1)):
            raise PoleError(f"lower parameter #{j} + k vanishes for some k <= {n}", parameter=j)
    factor = omega**n
    for a in base_upper:
        factor *= pochhammer(a, n)
    for b in base_lower:
        factor /= pochhammer(b, n)
    if factor == 0:
        return 0j
    shifted = PFqSpec(tuple(a + n for a in base_upper), tuple(b + n for b in base_lower), omega)
    return z**n * factor * pfq_eval(shifted, z, window)


def upper_shifted_basis(base_upper, base_lower, omega, n, z, window=DEFAULT_WINDOW) -> complex:
    """pFq(a_1 + n, a_2, ...; b; omega z)."""
    upper = list(base_upper)
    upper[0] = upper[0] + n
    return pfq_eval(PFqSpec(tuple(upper), tuple(base_lower), omega), z, window)


def lower_shifted_basis(base_upper, base_lower, omega, n, z, window=DEFAULT_WINDOW) -> complex:
    """pFq(a; b_1 - n, b_2, ...; omega z)."""
    lower = list(base_lower)
    lower[0] = lower[0] - n
    return pfq_eval(PFqSpec(tuple(base_upper), tuple(lower), omega), z, window)


# Coefficient-level operators on power series sum_m c_m z^m. Exact when fed ints.


def apply_euler_factors(coefficients: Sequence, shifts: Sequence) -> list:
    """Coefficients of (z d/dz + s_1) ... (z d/dz + s_k) f."""
    out = list(coefficients)
    for s in shifts:
        out = [(m + s) * c for m, c in enumerate(out)]
    return out


def apply_z_power_derivative(coefficients: Sequence, n: int) -> list:
    """Coefficients of z^n d^n/dz^n f, by differentiating n times and shifting back."""
    work = list(coefficients)
    for _ in range(n):
        work = [m * c for m, c in enumerate(work)][1:]
    return [0] * min(n, len(coefficients)) + work
