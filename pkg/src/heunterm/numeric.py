"""Scalar, polynomial and combinatorial building blocks.

Everything here works in double-precision complex arithmetic. Polynomials are
stored lowest power first.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegreeDropWarning, DomainError, RootAccuracyWarning


def as_complex(x, name: str = "value") -> complex:
    """Coerce ``x`` to a finite Python complex."""
    try:
        c = complex(x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} is not a number: {x!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError(f"{name} must be finite, got {c!r}")
    return c


def is_nonpositive_integer(x: complex) -> bool:
    """True when ``x`` is exactly one of 0, -1, -2, ..."""
    x = complex(x)
    return x.imag == 0.0 and x.real <= 0.0 and x.real == math.floor(x.real)


def pochhammer(x, n: int) -> complex:
    """Rising factorial x (x+1) ... (x+n-1); 1 for n = 0."""
    if n < 0:
        raise DomainError(f"pochhammer order must be nonnegative, got {n}")
    x = as_complex(x, "x")
    out = 1 + 0j
    for k in range(n):
        out *= x + k
    return out


@lru_cache(maxsize=None)
def _stirling_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_row(n - 1)
    # c(n, k) = (n-1) c(n-1, k) + c(n-1, k-1)
    row = [0] * (n + 1)
    for k in range(n + 1):
        left = prev[k] if k < n else 0
        right = prev[k - 1] if k >= 1 else 0
        row[k] = (n - 1) * left + right
    return tuple(row)


def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind.

    With this convention ``xi (xi-1) ... (xi-n+1) = sum_k (-1)**(n-k) s(n, k) xi**k``.
    """
    if n < 0 or k < 0:
        raise DomainError("Stirling indices must be nonnegative")
    if k > n:
        raise DomainError(f"stirling_first requires k <= n, got n={n}, k={k}")
    return _stirling_row(n)[k]


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients, ``coefficients[k]`` multiplies ``x**k``."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = [as_complex(c, "coefficient") for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0j]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def constant(cls, c) -> "ComplexPolynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "ComplexPolynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0j,)

    @property
    def leading(self) -> complex:
        return self.coefficients[-1]

    def __call__(self, x):
        out = 0j * x if isinstance(x, np.ndarray) else 0j
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, k):
        return self.coefficients[k] if k < len(self.coefficients) else 0j

    def _coerce(self, other) -> "ComplexPolynomial":
        if isinstance(other, ComplexPolynomial):
            return other
        return ComplexPolynomial((other,))

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self), len(other))
        return ComplexPolynomial(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = [0j] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return ComplexPolynomial(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_complex(scalar, "divisor")
        return ComplexPolynomial(tuple(c / s for c in self.coefficients))

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial((0,))
        return ComplexPolynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k))

    def monic(self) -> "ComplexPolynomial":
        if self.is_zero:
            raise DomainError("the zero polynomial has no monic form")
        return self / self.leading

    def substitute(self, scale, offset) -> "ComplexPolynomial":
        """Return the polynomial ``x -> self(scale * x + offset)``."""
        lin = ComplexPolynomial((offset, scale))
        out = ComplexPolynomial((0,))
        for c in reversed(self.coefficients):
            out = out * lin + c
        return out

    def max_abs_coefficient(self) -> float:
        return max(abs(c) for c in self.coefficients)

    def roots(self, tol: float = 1e-10) -> list[complex]:
        return poly_roots(self, tol)


def falling_factorial_poly(n: int) -> ComplexPolynomial:
    """Expand xi (xi-1) ... (xi-n+1) by direct multiplication."""
    if n < 0:
        raise DomainError(f"falling factorial order must be nonnegative, got {n}")
    p = ComplexPolynomial((1,))
    for j in range(n):
        p = p * ComplexPolynomial((-j, 1))
    return p


def _polish(coeffs: np.ndarray, r: complex) -> complex:
    dcoeffs = np.polyder(coeffs)
    val = np.polyval(coeffs, r)
    der = np.polyval(dcoeffs, r)
    if der == 0:
        return r
    cand = r - val / der
    if abs(np.polyval(coeffs, cand)) <= abs(val):
        return complex(cand)
    return r


def poly_roots(p: ComplexPolynomial, tol: float = 1e-10) -> list[complex]:
    """All complex roots of ``p`` with multiplicity, sorted by (re, im).

    Companion-matrix eigenvalues (LAPACK ``geev`` balances the matrix), then one
    Newton step per root, kept only if it lowers the residual.
    """
    if p.is_zero:
        raise DomainError("the zero polynomial has no well-defined roots")
    if p.degree < 1:
        raise DomainError("poly_roots needs degree >= 1")
    c = np.asarray(p.coefficients, dtype=complex)
    n = p.degree
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    raw = np.linalg.eigvals(comp)
    hi_first = c[::-1]
    roots = [_polish(hi_first, complex(r)) for r in raw]

    absc = np.abs(hi_first)
    for r in roots:
        scale = np.polyval(absc, abs(r))
        if abs(np.polyval(hi_first, r)) > tol * max(scale, 1e-300):
            warnings.warn(
                f"root {r} leaves residual above {tol} of the local scale",
                RootAccuracyWarning,
                stacklevel=2,
            )
    return sort_complex(roots)


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest pairing distance under the optimal one-to-one matching of ``a`` and ``b``."""
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    cost = np.abs(np.subtract.outer(np.asarray(a, complex), np.asarray(b, complex)))
    # minimise the bottleneck approximately through the sum; fine for well-separated sets
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@dataclass(frozen=True)
class TridiagonalBand:
    """Leading block of the infinite recurrence matrix.

    ``sub[k]`` sits at row k+1, column k (P_k); ``diag[k]`` is a degree-1
    polynomial in the accessory parameter; ``sup[k]`` sits at row k, column
    k+1 (R_{k+1}).
    """

    sub: tuple[complex, ...]
    diag: tuple[ComplexPolynomial, ...]
    sup: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "sub", tuple(as_complex(x, "sub") for x in self.sub))
        object.__setattr__(self, "sup", tuple(as_complex(x, "sup") for x in self.sup))
        object.__setattr__(self, "diag", tuple(self.diag))
        if not (len(self.sub) == len(self.diag) - 1 == len(self.sup)):
            raise DomainError(
                f"inconsistent band lengths: sub={len(self.sub)}, "
                f"diag={len(self.diag)}, sup={len(self.sup)}"
            )
        for k, entry in enumerate(self.diag):
            if not isinstance(entry, ComplexPolynomial) or entry.degree != 1:
                raise DomainError(f"diagonal entry {k} must be a degree-1 polynomial in q")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matrix(self, q, N: int | None = None) -> np.ndarray:
        """Dense numeric (N+1)x(N+1) leading minor at accessory value ``q``."""
        N = self.size - 1 if N is None else N
        m = np.zeros((N + 1, N + 1), dtype=complex)
        for k in range(N + 1):
            m[k, k] = self.diag[k](q)
            if k < N:
                m[k + 1, k] = self.sub[k]
                m[k, k + 1] = self.sup[k]
        return m


def _check_band(band: TridiagonalBand, N: int):
    if N < 0:
        raise DomainError(f"N must be nonnegative, got {N}")
    if band.size < N + 1:
        raise DomainError(f"band holds {band.size} diagonal entries, need {N + 1}")


def continuant_char_poly(band: TridiagonalBand, N: int) -> ComplexPolynomial:
    """Determinant of the leading (N+1)x(N+1) minor as a polynomial in q."""
    _check_band(band, N)
    prev2 = ComplexPolynomial((1,))
    prev = band.diag[0]
    for k in range(1, N + 1):
        prev, prev2 = band.diag[k] * prev - (band.sub[k - 1] * band.sup[k - 1]) * prev2, prev
    if prev.degree == N + 1:
        lead_ratio = abs(prev.leading) / prev.max_abs_coefficient()
    else:
        lead_ratio = 0.0
    if lead_ratio < 1e-12:
        warnings.warn(
            f"characteristic polynomial degree dropped below {N + 1} "
            f"(relative leading coefficient {lead_ratio:.3g})",
            DegreeDropWarning,
            stacklevel=2,
        )
    return prev


def continuant_value(band: TridiagonalBand, N: int, q) -> tuple[complex, complex]:
    """Numeric determinant of the leading minor at ``q`` and its q-derivative."""
    _check_band(band, N)
    q = as_complex(q, "q")
    d2, dd2 = 1 + 0j, 0j
    d1, dd1 = band.diag[0](q), band.diag[0][1]
    for k in range(1, N + 1):
        dk = band.diag[k](q)
        slope = band.diag[k][1]
        coupling = band.sub[k - 1] * band.sup[k - 1]
        d1, d2, dd1, dd2 = (
            dk * d1 - coupling * d2,
            d1,
            slope * d1 + dk * dd1 - coupling * dd2,
            dd1,
        )
    return d1, dd1


def newton_refine(band: TridiagonalBand, N: int, q0, max_iter: int = 8) -> complex:
    """Polish an eigenvalue estimate with Newton steps on the evaluated continuant."""
    q = as_complex(q0, "q")
    val, der = continuant_value(band, N, q)
    for _ in range(max_iter):
        if der == 0 or val == 0:
            break
        cand = q - val / der
        cval, cder = continuant_value(band, N, cand)
        if not abs(cval) < abs(val):
            break
        q, val, der = cand, cval, cder
    return q


def sort_complex(values: Sequence[complex]) -> list[complex]:
    """Deterministic (re, im) ordering."""
    return sorted((complex(v) for v in values), key=lambda v: (v.real, v.imag))
