import cmath

import mpmath
import numpy as np
import pytest

from heunterm import verify
from heunterm.errors import DegenerateRecurrenceError, DomainError, TerminationConditionError
from heunterm.general import (
    GeneralHeunParams,
    gh_basis_recurrence_check,
    gh_basis_u,
    gh_closure,
    gh_convert_basis,
    gh_eigenvector_check,
    gh_finite_sum,
    gh_minor,
    gh_recurrence,
    gh_shifted_basis,
    gh_solution_value,
    gh_terminate,
)
from heunterm.pfq import PFqSpec, pfq_eval

P = dict(a=2.3 - 0.4j, alpha=0.7 + 0.3j, beta=-1.6 + 0.2j, gamma=1.4 - 0.5j)


def params(N, **kw):
    return GeneralHeunParams(**{**P, **kw}, epsilon=-N)


def test_fuchs_default_and_check():
    p = params(2)
    assert p.delta == p.alpha + p.beta + 1 - p.gamma - p.epsilon
    with pytest.raises(DomainError, match="Fuchs"):
        GeneralHeunParams(**P, epsilon=-2, delta=p.delta + 0.1)
    GeneralHeunParams(**P, epsilon=-2, delta=p.delta)


@pytest.mark.parametrize("a", [0, 1])
def test_a_must_avoid_other_singular_points(a):
    with pytest.raises(DomainError):
        GeneralHeunParams(**{**P, "a": a}, epsilon=0)


def test_q_accessors():
    p = params(1)
    with pytest.raises(DomainError):
        p.require_q()
    assert p.with_q(2j).require_q() == 2j


def test_recurrence_edges():
    N = 3
    p = params(N, q=0.8 + 0.1j)
    r0, q0, _ = gh_recurrence(p, 0)
    assert r0 == 0
    assert q0 == pytest.approx(p.a * p.alpha * p.beta - p.q)
    assert gh_recurrence(p, N)[2] == 0


def test_basis_u_low_orders():
    p = params(1)
    z = 0.3 + 0.2j
    assert gh_basis_u(p, 0, z) == pfq_eval(p.base, z)
    assert gh_basis_u(p, 1, 0) == 0


@pytest.mark.parametrize("n,z", [(2, 0.3), (5, -0.4), (3, 0.2 + 0.5j)])
def test_basis_relation(n, z):
    p = params(0)
    scale = max(abs(gh_basis_u(p, k, z)) for k in (n, n - 1, n - 2))
    assert abs(gh_basis_recurrence_check(p, n, z)) <= 1e-12 * max(1.0, scale)


def test_basis_relation_at_origin():
    assert abs(gh_basis_recurrence_check(params(0), 3, 0)) == 0
    with pytest.raises(DomainError):
        gh_basis_recurrence_check(params(0), 1, 0.2)


def test_termination_condition_enforced():
    with pytest.raises(TerminationConditionError):
        gh_terminate(params(1), 2)


@pytest.mark.parametrize("alpha", [0, -1])
def test_degenerate_recurrence(alpha):
    with pytest.raises(DegenerateRecurrenceError):
        gh_terminate(params(2, alpha=alpha), 2)


def test_n0_single_solution():
    (sol,) = gh_terminate(params(0), 0)
    p = sol.params
    assert sol.chosen_q == pytest.approx(p.a * p.alpha * p.beta)
    assert sol.d == (1,)
    assert sol.e == ()
    assert gh_eigenvector_check(sol) <= 1e-14
    assert gh_convert_basis(sol, "alpha") == [1]
    assert gh_convert_basis(sol, "gamma") == [1]


@pytest.mark.parametrize("N", [1, 2, 3])
def test_eigenvector_and_closure(N):
    sols = gh_terminate(params(N), N)
    assert len(sols) == N + 1
    assert [s.chosen_q for s in sols] == list(sols[0].q_admissible)
    for sol in sols:
        m = gh_minor(sol.params, N) - sol.chosen_q * np.eye(N + 1)
        direct = float(np.max(np.abs(m @ np.array(sol.d))))
        assert gh_eigenvector_check(sol) == pytest.approx(direct, abs=1e-300)
        assert verify.relative_eigenvector(sol) <= 1e-12
        assert max(abs(x) for x in gh_closure(sol)) <= 1e-11 * max(abs(x) for x in sol.d)
        assert sol.d[0] == 1 and not sol.reduced_order


def test_n1_solution_is_a_3f2():
    sol = gh_terminate(params(1), 1)[0]
    (e,) = sol.e
    p = sol.params
    assert sol.solution == PFqSpec((p.alpha, p.beta, e + 1), (p.gamma, e))
    z = 0.4
    ref = complex(mpmath.hyp3f2(p.alpha, p.beta, e + 1, p.gamma, e, z))
    assert abs(gh_solution_value(sol, z) - ref) <= 1e-12 * abs(ref)


def test_value_at_origin():
    for sol in gh_terminate(params(2), 2):
        assert gh_solution_value(sol, 0) == 1


@pytest.mark.parametrize("N", [1, 2, 4])
def test_finite_sum_matches_value(N):
    for sol in gh_terminate(params(N), N):
        for k in range(10):
            z = 0.7 * cmath.exp(2j * cmath.pi * k / 10)
            ref = gh_finite_sum(sol, z)
            assert abs(gh_solution_value(sol, z) - ref) <= 1e-10 * abs(ref)


def test_convert_basis_reevaluates():
    sol = gh_terminate(params(3), 3)[1]
    z = 0.2
    ref = gh_solution_value(sol, z)
    for direction in ("alpha", "gamma"):
        coeffs = gh_convert_basis(sol, direction)
        value = sum(c * gh_shifted_basis(sol.params, n, z, direction) for n, c in enumerate(coeffs))
        assert abs(value - ref) <= 1e-10 * abs(ref)


def test_shift_identity_first_order():
    p = params(0)
    z = 0.3
    u0, u1 = gh_basis_u(p, 0, z), gh_basis_u(p, 1, z)
    assert gh_shifted_basis(p, 1, z, "alpha") == pytest.approx(u0 + u1 / p.alpha, rel=1e-13)
    assert gh_shifted_basis(p, 1, 0.5, "gamma") == pytest.approx(
        gh_basis_u(p, 0, 0.5) + gh_basis_u(p, 1, 0.5) / (p.gamma - 1), rel=1e-13
    )
    with pytest.raises(DomainError):
        gh_shifted_basis(p, 1, z, "beta")


def test_derivatives_match_finite_differences():
    sol = gh_terminate(params(2), 2)[2]
    z, h = 0.25 - 0.1j, 1e-4
    f = lambda t: gh_solution_value(sol, t)  # noqa: E731
    d1 = (f(z + h) - f(z - h)) / (2 * h)
    assert abs(gh_solution_value(sol, z, order=1) - d1) <= 1e-7 * abs(d1)
