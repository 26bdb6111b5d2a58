import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matlag import weights
from matlag.linalg import is_positive_definite, norm_inf
from matlag.operators import ParameterOutOfDomain
from matlag.symmetry import cross_validate_derivatives
from matlag.weights import F1, F2, F3, WeightSpec, evaluate

from strategies import cmats, family_params

SAMPLE_T = np.geomspace(1e-6, 200, 40)
RAW = [
    WeightSpec.make("RawThm42", u=1.3, c21=0.4, c22=1.5, gamma=2.0),
    WeightSpec.make("RawThm43", u=0.8, c21=1.5, gamma=3.0),
    WeightSpec.make("RawThm44", u=2.2, c22=1.3),
    WeightSpec.make("RawThm52", u=1.4, c21=0.7, c22=1.2, gamma=1.5),
]


def test_eval_examples():
    assert np.allclose(weights.eval(F1(0, 1, 1), 1.0).W, np.exp(-1) * np.array([[2, 1], [1, 1]]), atol=1e-15)
    w = evaluate(F2(0, 0.6), [4.0])[0]
    assert abs(w[0, 1]) < 1e-15 and abs(w[1, 0]) < 1e-15
    for beta in (0.5, 4.0):
        t = 1e-12
        assert evaluate(F3(beta), [t])[0][1, 1] * math.sqrt(t) == pytest.approx(2.0, rel=1e-5)


def test_eval_rejects_bad_input():
    with pytest.raises(weights.NonPositiveT):
        weights.eval(F1(0, 1, 1), 0.0)
    with pytest.raises(ParameterOutOfDomain):
        weights.eval(F2(0, 1.5), 1.0)


def test_validate_examples():
    assert weights.validate(F1(0, 1, 1)) == []
    assert weights.validate(F2(0, 1.5)) == ["|b| >= 1"]
    assert weights.validate(F1(0, -1.5, 1)) == ["beta <= -1-alpha"]
    assert weights.validate(F1(0, -1.0, 1)) == ["beta <= -1-alpha"]
    assert weights.validate(F3(-1)) == ["beta <= 0"]


def test_moment_examples():
    s = F1(0, 1, 1)
    assert np.allclose(weights.moment(s, 0), [[3, 1], [1, 1]], rtol=1e-14)
    assert np.allclose(weights.moment(s, 1), [[8, 2], [2, 1]], rtol=1e-14)
    for beta in (0.5, 4.0):
        m = weights.moment(F3(beta), 0)[1, 1]
        assert m.real == pytest.approx(2 * math.sqrt(math.pi) * math.exp(beta / 4), rel=1e-13)


@pytest.mark.parametrize("spec", [F1(0.3, 1.7, -0.8), F2(1.0, 0.3), F3(4.0)] + RAW)
def test_closed_moments_match_quadrature(spec):
    for k in (0, 3, 8, 12):
        closed = weights.moment(spec, k, method="closed")
        quad = weights.moment(spec, k, method="quad")
        assert norm_inf(closed - quad) <= 1e-10 * norm_inf(closed)


def assert_positive_definite(spec, t):
    """Hermitian, and positive definite through the factor ``W = L L*`` with ``L`` nonsingular.

    Some weights have eigenvalue ratios far below double precision near the
    ends (det W ~ t^4 W11^2 for one raw form), so the eigenvalue test is only
    applied where it is meaningful; the factor certifies the rest.
    """
    w = evaluate(spec, [t])[0]
    assert np.array_equal(w, w.conj().T)
    l = weights.factor(spec, np.array([t]))[0]
    d = abs(l[0, 0] * l[1, 1] - l[0, 1] * l[1, 0])
    assert d > 1e-8 * np.linalg.norm(l[:, 0]) * np.linalg.norm(l[:, 1])
    assert norm_inf(l @ l.conj().T - w) <= 1e-13 * norm_inf(w)
    if np.linalg.cond(w) < 1e10:
        assert is_positive_definite(w / norm_inf(w), tol=0.0)


@given(family_params, st.sampled_from(list(SAMPLE_T)))
def test_hermitian_positive_definite(fp, t):
    assert_positive_definite(WeightSpec.make(fp[0], **fp[1]), t)


@pytest.mark.parametrize("spec", RAW + [weights.diagonal(0.5, 1.5)])
def test_raw_forms_positive_definite(spec):
    for t in SAMPLE_T:
        assert_positive_definite(spec, t)


@given(st.floats(-0.9, 3), st.floats(0.1, 4), st.floats(0.2, 3), st.sampled_from([0.01, 0.5, 3.0, 40.0]))
def test_f1_determinant_closed_form(alpha, dbeta, b, t):
    beta = -1 - alpha + dbeta
    w = evaluate(F1(alpha, beta, b), [t])[0]
    d = (w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]).real
    assert d > 0
    assert d == pytest.approx(math.exp(-2 * t) * t ** (2 * alpha + beta), rel=1e-9 * (1 + b * b * t ** (2 - beta)))


@pytest.mark.parametrize("spec", [F1(0, 1, 1), F1(-0.5, 3, 0.7), F2(1, -0.9), F3(0.5), F3(4)] + RAW)
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_derivatives_match_finite_differences(spec, t):
    assert cross_validate_derivatives(spec, t) <= 1e-6


def test_f3_small_t_derivatives():
    assert cross_validate_derivatives(F3(4), 0.01) <= 1e-5
    assert cross_validate_derivatives(F3(4), 1e-10) <= 1e-5


@pytest.mark.parametrize("spec", [F1(0, 1, 1), F2(-0.5, 0.3), F3(4)] + RAW)
def test_t_w_vanishes_at_both_ends(spec):
    small = [norm_inf(t * w) for t, w in zip([1e-8, 1e-6], evaluate(spec, [1e-8, 1e-6]))]
    large = [norm_inf(t * w) for t, w in zip([100, 200], evaluate(spec, [100.0, 200.0]))]
    assert small[0] < small[1] < 1e-2
    assert large[1] < large[0] < 1e-20


@pytest.mark.parametrize("spec", [F1(0.3, 1.7, -0.8), F2(1.0, 0.3), F3(4.0)] + RAW)
def test_factor_reproduces_weight(spec):
    ts = np.geomspace(1e-4, 300, 25)
    l = weights.factor(spec, ts)
    w = evaluate(spec, ts)
    for li, wi in zip(l, w):
        assert norm_inf(li @ li.conj().T - wi) <= 1e-13 * norm_inf(wi)


@given(cmats(max_cond=10))
def test_congruence(m):
    spec = F1(0.2, 1.1, 0.9)
    ts = np.array([0.3, 2.0])
    lhs = evaluate(spec.congruent(m), ts)
    rhs = m.conj().T @ evaluate(spec, ts) @ m
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=0)
    assert WeightSpec.from_json(spec.congruent(m).to_json()) == spec.congruent(m)


def test_weight_json_encoding():
    assert F1(0, 1, 1).to_json() == {"family": "F1", "alpha": 0.0, "beta": 1.0, "b": 1.0}
    assert WeightSpec.from_json({"family": "F3", "beta": 4}) == F3(4)
