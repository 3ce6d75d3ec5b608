import cmath
import math
import warnings

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heunterm.errors import ConvergenceError, DomainError, OutsideDiskWarning, PoleError
from heunterm.numeric import ComplexPolynomial
from heunterm.pfq import (
    PFqSpec,
    SeriesWindow,
    augment_parameters,
    derivative_basis,
    evaluate_ratio_form,
    pfq_coefficients,
    pfq_derivative_series,
    pfq_eval,
    ratio_form_coefficients,
    split_pole_pairs,
)


def test_geometric_coefficients():
    assert pfq_coefficients(PFqSpec((1,), (), 1), 6) == [1] * 7


def test_gauss_first_coefficient():
    al, be, ga = 0.3 + 1j, -1.2, 2.5 - 0.5j
    c = pfq_coefficients(PFqSpec((al, be), (ga,)), 1)
    assert abs(c[1] - al * be / ga) <= 1e-15


def test_terminating_series_pads_with_zeros():
    c = pfq_coefficients(PFqSpec((-2,), (1,)), 5)
    assert c[3:] == [0, 0, 0]
    assert c[:3] == [1, -2, 0.5]


def test_lower_pole_is_named():
    with pytest.raises(PoleError) as info:
        pfq_coefficients(PFqSpec((1,), (0.5, -2)), 5)
    assert info.value.parameter == 1
    assert info.value.index == 3


def test_lower_pole_beyond_termination_is_harmless():
    # the numerator vanishes first, so (b)_n never reaches zero in a used term
    assert pfq_eval(PFqSpec((-1,), (-3,)), 0.5) == pytest.approx(1 + 0.5 / 3)


def test_closed_forms():
    assert pfq_eval(PFqSpec((1, 1), (2,)), 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-14)
    assert pfq_eval(PFqSpec((), ()), 1) == pytest.approx(math.e, rel=1e-15)
    assert pfq_eval(PFqSpec((0.7 + 0.1j,), (1.3,)), 0) == 1


@pytest.mark.parametrize("z", [0.3, -0.7 + 0.2j, 0.1j])
def test_gauss_against_mpmath(z):
    al, be, ga = 0.4 - 0.3j, 1.7, -1.5 + 0.4j
    ref = complex(mpmath.hyp2f1(al, be, ga, z))
    assert abs(pfq_eval(PFqSpec((al, be), (ga,)), z) - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("z", [2.0, -4.5, 3 + 2j])
def test_kummer_against_mpmath(z):
    al, ga, om = -2.3 + 0.5j, 1.1 - 0.7j, -0.8 + 0.3j
    ref = complex(mpmath.hyp1f1(al, ga, om * z))
    assert abs(pfq_eval(PFqSpec((al,), (ga,), om), z) - ref) <= 1e-12 * abs(ref)


def test_cancellation_triggers_extended_precision():
    # exp(-30) by its series: terms reach 1e12, the sum is 1e-13
    value = pfq_eval(PFqSpec((), ()), -30)
    assert value == pytest.approx(math.exp(-30), rel=1e-12)


def test_outside_disk_warns():
    with pytest.warns(OutsideDiskWarning):
        with pytest.raises(ConvergenceError):
            pfq_eval(PFqSpec((1, 1), (2,)), 1.5)


def test_terminating_series_does_not_warn_outside_disk():
    with warnings.catch_warnings():
        warnings.simplefilter("error", OutsideDiskWarning)
        assert pfq_eval(PFqSpec((-1, 1), (1,)), 3) == -2


def test_max_terms_exhausted():
    window = SeriesWindow(max_terms=5)
    with pytest.raises(ConvergenceError):
        pfq_eval(PFqSpec((1,), (), 1), 0.9, window)


def test_window_validation():
    with pytest.raises(DomainError):
        SeriesWindow(max_terms=0)
    with pytest.raises(DomainError):
        SeriesWindow(cancellation_limit=0.5)


def test_derivative_examples():
    assert pfq_derivative_series(PFqSpec((), ()), 0, 1) == 1
    al, be, ga = 1.5, -0.5 + 1j, 2.2
    d = pfq_derivative_series(PFqSpec((al, be), (ga,)), 0, 1)
    assert abs(d - al * be / ga) <= 1e-15


def test_second_derivative_finite_difference():
    spec = PFqSpec((2,), (3,))
    got = pfq_derivative_series(spec, 0.1, 2)
    # h = 1e-5 needs the function values beyond double precision: rounding alone is ~eps/h^2
    with mpmath.workdps(30):
        f = lambda t: mpmath.hyp1f1(2, 3, t)  # noqa: E731
        h, z = mpmath.mpf("1e-5"), mpmath.mpf("0.1")
        fd = complex((f(z + h) - 2 * f(z) + f(z - h)) / h**2)
    assert abs(got - fd) <= 1e-6 * abs(got)
    # in double precision a wider step balances rounding against truncation
    h = 1e-3
    fd = (pfq_eval(spec, 0.1 + h) - 2 * pfq_eval(spec, 0.1) + pfq_eval(spec, 0.1 - h)) / h**2
    assert abs(got - fd) <= 1e-6 * abs(got)


def test_derivative_order_validation():
    with pytest.raises(DomainError):
        pfq_derivative_series(PFqSpec((), ()), 0.1, -1)


def test_augment_parameters():
    base = PFqSpec((0.5, 1.5), (2.5,))
    assert augment_parameters(base, []) == base
    aug = augment_parameters(base, [0.3 - 1j])
    assert aug.upper == (0.5, 1.5, 1.3 - 1j) and aug.lower == (2.5, 0.3 - 1j)
    assert aug.label() == "3F2"
    kummer = augment_parameters(PFqSpec((1.2,), (0.7,), -2), [1j, -0.4])
    assert kummer.label() == "3F3"
    assert kummer.upper[1:] == (1 + 1j, 0.6) and kummer.lower[1:] == (1j, -0.4)
    assert kummer.omega == -2


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.builds(complex, st.floats(0.2, 3), st.floats(-1, 1)), min_size=1, max_size=3),
    st.builds(complex, st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)),
)
def test_ratio_form_equals_augmented_series(e, z):
    base_upper, base_lower = (0.7 + 0.2j, -1.3), (1.9 - 0.4j,)
    A = ComplexPolynomial.from_roots([-x for x in e])
    ratio = evaluate_ratio_form(base_upper, base_lower, 1, A, z)
    augmented = pfq_eval(augment_parameters(PFqSpec(base_upper, base_lower), e), z)
    assert abs(ratio - augmented) <= 1e-12 * max(1.0, abs(augmented))


def test_ratio_form_constant_A_is_base():
    up, lo = (0.5, 0.25), (1.5,)
    A = ComplexPolynomial((3.0,))
    assert evaluate_ratio_form(up, lo, 1, A, 0.4) == pytest.approx(pfq_eval(PFqSpec(up, lo), 0.4))
    assert evaluate_ratio_form(up, lo, 1, A, 0) == 1


def test_ratio_form_coefficients_match_augmented():
    e = [0.8 - 0.3j]
    up, lo = (1.1, -0.6j), (2.3,)
    A = ComplexPolynomial((e[0], 1))
    got = ratio_form_coefficients(up, lo, 1, A, 20)
    want = pfq_coefficients(augment_parameters(PFqSpec(up, lo), e), 20)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-13 * abs(w)


def test_pole_pair_routing():
    spec = PFqSpec((1.5, -1 + 1), (2.0, -1))
    reduced, extracted = split_pole_pairs(spec)
    assert extracted == [-1] and reduced.upper == (1.5,) and reduced.lower == (2.0,)
    # (z d/dz - 1) applied to 1F1(1.5; 2; z), normalized at z = 0
    z = 0.7
    f = complex(mpmath.hyp1f1(1.5, 2, z))
    df = complex(mpmath.diff(lambda t: mpmath.hyp1f1(1.5, 2, t), z))
    assert pfq_eval(spec, z) == pytest.approx(-(z * df - f), rel=1e-12)


def test_pole_pair_at_zero_is_rejected():
    with pytest.raises(PoleError):
        pfq_eval(PFqSpec((1,), (0,)), 0.2)


@pytest.mark.parametrize("n", range(5))
def test_derivative_basis_against_mpmath(n):
    al, be, ga, z = 0.6 + 0.2j, -0.9, 1.7, 0.35 - 0.2j
    ref = z**n * complex(mpmath.diff(lambda t: mpmath.hyp2f1(al, be, ga, t), z, n))
    got = derivative_basis((al, be), (ga,), 1, n, z)
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_derivative_basis_vanishes_at_origin():
    assert derivative_basis((1.2,), (0.4,), -1, 3, 0) == 0
    assert cmath.isclose(derivative_basis((1.2,), (0.4,), -1, 0, 0), 1)
