import mpmath
import pytest

from heunterm import oracle, verify
from heunterm.confluent import ConfluentHeunParams, ch_terminate
from heunterm.errors import DomainError
from heunterm.general import GeneralHeunParams, gh_terminate


def general(q, N=0, **kw):
    base = dict(a=2.0 + 0.5j, alpha=0.6, beta=-1.3 + 0.4j, gamma=1.7 - 0.2j)
    return GeneralHeunParams(**{**base, **kw}, epsilon=-N, q=q)


def confluent(q, N=0, **kw):
    base = dict(alpha=0.9 - 0.3j, gamma=1.2 + 0.6j, epsilon=1.4 - 0.2j)
    return ConfluentHeunParams(**{**base, **kw}, delta=-N, q=q)


def test_first_coefficients():
    # balance at z^0 of the cleared equations
    p = general(0.7 + 0.2j, N=1)
    c = oracle.frobenius_general(p, 3).coefficients
    assert c[0] == 1
    assert c[1] == pytest.approx(p.q / (p.a * p.gamma), rel=1e-14)
    p = confluent(0.4 - 0.5j, N=1)
    c = oracle.frobenius_confluent(p, 3).coefficients
    assert c[1] == pytest.approx(-p.q / p.gamma, rel=1e-14)


def test_n0_reproduces_gauss_taylor_series():
    p = general(None)
    q = p.a * p.alpha * p.beta
    c = oracle.frobenius_general(p.with_q(q), 30).coefficients
    for n in range(31):
        ref = mpmath.rf(p.alpha, n) * mpmath.rf(p.beta, n) / (mpmath.rf(p.gamma, n) * mpmath.factorial(n))
        assert abs(c[n] - complex(ref)) <= 1e-12 * max(1e-300, abs(complex(ref))) + 1e-300


def test_nonterminating_q_still_solves_the_ode():
    p = general(0.37 - 1.1j, N=2)
    s = oracle.frobenius_general(p, 40, "forward")
    z = 0.1
    res = oracle.ode_residual_general(s.value(z), s.value(z, 1), s.value(z, 2), z, p)
    assert oracle.normalized_residual(res, s.value(z), s.value(z, 1), s.value(z, 2)) <= 1e-12


def test_minimal_branch_flags_a_non_eigenvalue():
    # for |a| < 1 the finite sum is the recessive solution; away from the spectrum
    # the recessive solution misses the z^1 balance of the analytic branch
    p = general(0.37 - 1.1j, N=2, a=0.3 + 0.2j)
    assert oracle.frobenius_general(p, 40, "minimal").initial_residual > 1e-3
    sol = gh_terminate(p.with_q(None), 2)[0]
    assert oracle.frobenius_general(sol.params, 40, "minimal").initial_residual <= 1e-9


def test_confluent_series_solves_the_ode():
    p = confluent(1.3 + 0.2j, N=1)
    s = oracle.frobenius_confluent(p, 60, "forward")
    z = 0.2
    res = oracle.ode_residual_confluent(s.value(z), s.value(z, 1), s.value(z, 2), z, p)
    assert abs(res) <= 1e-11


def test_extended_precision_agrees_with_double():
    p = general(0.9, N=1)
    lo = oracle.frobenius_general(p, 20).coefficients
    hi = oracle.frobenius_general(p, 20, dps=40).coefficients
    for a, b in zip(lo, hi):
        assert abs(a - b) <= 1e-12 * max(abs(b), 1e-30)


def test_minimal_method_tracks_terminating_solution():
    # |a| < 1/2: forward summation would amplify the q error by |a|^-n
    p = GeneralHeunParams(a=0.3 + 0.2j, alpha=1.1, beta=0.4 - 0.6j, gamma=2.2, epsilon=-2)
    sol = gh_terminate(p, 2)[1]
    assert verify.oracle_method(sol.params) == "minimal"
    assert verify.oracle_deviation(sol) <= 1e-12
    assert verify.ratio_deviation(sol) <= 1e-12


def test_confluent_oracle_matches_formula():
    sol = ch_terminate(confluent(None, N=3), 3)[0]
    assert verify.oracle_deviation(sol) <= 1e-12


def test_zero_input_zero_residual():
    assert oracle.ode_residual_general(0, 0, 0, 0.3, general(1.0)) == 0
    assert oracle.ode_residual_confluent(0, 0, 0, 0.3, confluent(1.0)) == 0


@pytest.mark.parametrize("z", [0, 1, 1e-9, 1 - 5e-9])
def test_singular_points_rejected(z):
    with pytest.raises(DomainError):
        oracle.ode_residual_confluent(1, 1, 1, z, confluent(1.0))


def test_general_rejects_a():
    p = general(1.0)
    with pytest.raises(DomainError):
        oracle.ode_residual_general(1, 1, 1, p.a + 1e-10, p)


def test_indicial_degeneracy():
    with pytest.raises(DomainError):
        oracle.frobenius_confluent(confluent(1.0, gamma=-2), 10)
    with pytest.raises(DomainError):
        oracle.frobenius_general(general(1.0), 10, method="sideways")


def test_cleared_polynomials_reproduce_the_equation():
    p = general(0.3 + 0.4j, N=1)
    p2, p1, p0 = oracle.general_cleared(p)
    z = 0.37 - 0.2j
    ev = lambda c: sum(x * z**k for k, x in enumerate(c))  # noqa: E731
    clear = z * (z - 1) * (z - p.a)
    phi, d1, d2 = 1.3, -0.2j, 0.7
    lhs = ev(p2) * d2 + ev(p1) * d1 + ev(p0) * phi
    assert abs(lhs - clear * oracle.ode_residual_general(phi, d1, d2, z, p)) <= 1e-13
