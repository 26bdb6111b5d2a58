import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matlag import mops, quad, weights
from matlag.linalg import is_positive_definite, norm_inf
from matlag.operators import MatPoly
from matlag.weights import F1, F2, F3

from strategies import cmats

P1 = MatPoly([[[-3, -0.5], [1, -0.5]], np.eye(2)])


def test_inner_product_examples():
    spec = F1(0, 1, 1)
    one = MatPoly.constant(np.eye(2))
    assert np.allclose(quad.inner_product(one, one, spec).value, [[3, 1], [1, 1]], rtol=1e-12)
    assert norm_inf(quad.inner_product(one, P1, spec).value) <= 1e-10
    s1 = quad.inner_product(P1, P1, spec).value
    assert np.allclose(s1, s1.conj().T, atol=1e-12)
    assert is_positive_definite(s1)


def test_integrate_scalar_integrals():
    r = quad.integrate(lambda t: np.exp(-t)[:, None, None] * np.ones((1, 2, 2)))
    assert np.allclose(r.value, 1.0, rtol=1e-14)
    r = quad.integrate(lambda t: (t**-0.5 * np.exp(-2 * t))[:, None, None] * np.ones((1, 2, 2)), rate=2.0)
    assert np.allclose(r.value, np.sqrt(np.pi / 2), rtol=1e-13)


def test_nonconvergence_is_an_error():
    spec = F3(4)
    with pytest.raises(quad.NonConvergence) as e:
        quad.inner_product(P1, P1, spec, budget=40)
    assert e.value.best_value is not None and e.value.best_error > 0


def test_env_budget(monkeypatch):
    monkeypatch.setenv("MATLAG_QUAD_BUDGET", "40")
    assert quad.default_budget() == 40
    with pytest.raises(quad.NonConvergence):
        quad.inner_product(P1, P1, F1(0, 1, 1))
    monkeypatch.setenv("MATLAG_QUAD_BUDGET", "lots")
    with pytest.raises(ValueError):
        quad.default_budget()


@settings(max_examples=15)
@given(cmats(max_cond=10), cmats(max_cond=10), st.sampled_from([F1(0.5, 2, -1), F2(0, 0.4), F3(2.0)]))
def test_sesquilinear(a, b, spec):
    p = MatPoly([a, b])
    q = MatPoly([b, np.eye(2), a])
    pq = quad.inner_product(p, q, spec).value
    qp = quad.inner_product(q, p, spec).value
    assert norm_inf(pq - qp.conj().T) <= 1e-10 * (1 + norm_inf(pq))
    # Conjugate-linear on the left, linear on the right.
    m = a
    lhs = quad.inner_product(p.times_right(m), q, spec).value
    assert norm_inf(lhs - m.conj().T @ pq) <= 1e-10 * (1 + norm_inf(lhs))


@pytest.mark.parametrize("spec", [F1(0, 1, 1), F3(4)])
def test_larger_budget_never_worse(spec):
    errs = []
    for budget in (30, 60, 120, 240, 480, 960):
        try:
            r = quad.inner_product(P1, P1, spec, target=1e-15, budget=budget)
            errs.append(r.abs_error_estimate)
        except quad.NonConvergence as e:
            errs.append(e.best_error)
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_moment_cache_is_deterministic():
    spec = F2(0.5, 0.4)
    a = quad.moment_by_quadrature(spec, 3)
    b = quad.moment_by_quadrature(spec, 3)
    assert np.array_equal(a, b)


def test_gram_table_orthogonal():
    spec = F3(4)
    seq = mops.build_by_moments(spec, 6)
    g = quad.gram_table(seq.polys, spec).value
    for i in range(7):
        for j in range(7):
            if i != j:
                bound = np.sqrt(norm_inf(seq.grams[i]) * norm_inf(seq.grams[j]))
                assert norm_inf(g[i, j]) <= 1e-8 * bound


def test_boundary_probe_examples():
    pb = quad.boundary_probe(F1(0, 1, 1), weights.pair(F1(0, 1, 1)))
    assert pb.wf2_small[0] <= 1e-7
    assert pb.wf2_large[-1] <= 1e-70
    assert pb.vanishes
    pb = quad.boundary_probe(F3(4), weights.pair(F3(4)))
    assert pb.wf2_large[-1] <= 1e-60
    assert pb.vanishes
    assert pb.wf2_power_at_zero == pytest.approx(0.5, abs=0.05)
