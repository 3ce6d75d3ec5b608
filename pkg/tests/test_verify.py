import numpy as np
import pytest

from heunterm import verify
from heunterm.confluent import ConfluentHeunParams
from heunterm.general import GeneralHeunParams


@pytest.mark.parametrize("equation", ["general", "confluent"])
def test_sampling_is_reproducible(equation):
    draw = lambda: [verify.SAMPLERS[equation](np.random.default_rng([7, 2, k]), 2) for k in range(5)]  # noqa: E731
    assert draw() == draw()


def test_samples_respect_margins():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = verify.sample_general(rng, 3)
        assert p.epsilon == -3
        assert abs(p.a) >= 0.1 and abs(p.a - 1) >= 0.1
        assert all(abs(p.alpha + k) >= 0.1 and abs(p.beta + k) >= 0.1 for k in range(5))
        assert abs(p.a.real) <= 3 and abs(p.a.imag) <= 1
        c = verify.sample_confluent(rng, 2)
        assert c.delta == -2 and abs(c.epsilon) >= 0.1


@pytest.mark.parametrize(
    "params",
    [
        GeneralHeunParams(a=0.5 + 0.3j, alpha=1, beta=2, gamma=3, epsilon=0),
        ConfluentHeunParams(alpha=1, gamma=2, delta=0, epsilon=1),
    ],
)
def test_sample_grid_keeps_away_from_singular_points(params):
    pts = verify.sample_grid(params)
    assert len(pts) == verify.GRID_POINTS == len(set(pts))
    for z in pts:
        assert all(abs(z - s) >= 0.1 for s in verify.singular_points(params))


def test_run_trial_counts_degeneracies():
    p = GeneralHeunParams(a=2, alpha=-1, beta=0.5, gamma=1.5, epsilon=-2)
    out = verify.run_trial("general", p, 2)
    assert out["status"] == "degenerate"
    assert out["solutions"] == []


def test_run_trial_passes_generic_case():
    p = verify.sample_confluent(np.random.default_rng(3), 2)
    out = verify.run_trial("confluent", p, 2)
    assert out["status"] == "pass"
    block = out["blocks"][0]
    assert set(block) >= {"closure", "eigenvector_residual", "ode_residual_max", "oracle_max_deviation", "passed"}
    assert block["oracle_dps"] == verify.ORACLE_DPS


def test_oracle_method_choice():
    near = GeneralHeunParams(a=0.3, alpha=1, beta=2, gamma=3, epsilon=0)
    far = GeneralHeunParams(a=2.5, alpha=1, beta=2, gamma=3, epsilon=0)
    assert verify.oracle_method(near) == "minimal"
    assert verify.oracle_method(far) == "forward"
    assert verify.oracle_method(GeneralHeunParams(a=0.8, alpha=1, beta=2, gamma=3, epsilon=0), extended=False) == "minimal"
    assert verify.oracle_method(ConfluentHeunParams(alpha=1, gamma=2, delta=0, epsilon=1)) == "minimal"


def test_double_and_extended_formula_coefficients_agree():
    p = verify.sample_general(np.random.default_rng(5), 2)
    sol = verify.GENERAL.terminate(p, 2)[0]
    lo = verify.formula_coefficients(sol, 15)
    hi = verify.formula_coefficients(sol, 15, dps=40)
    for a, b in zip(lo, hi):
        assert abs(a - complex(b)) <= 1e-9 * abs(complex(b))
