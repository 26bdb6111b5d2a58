import numpy as np
import pytest
from hypothesis import given, settings

from matlag import mops, reduce, weights
from matlag.weights import F1, F2, F3

from strategies import cmats

SAMPLES = (0.5, 1.0, 2.0, 5.0)


def test_diagonal_weight_is_not_certified():
    rep = reduce.weight_commutant(weights.diagonal(0.5, 1.5))
    assert rep.verdict == "NonScalar"
    v0 = np.diag([1.0, 0.0])
    w = weights.evaluate(weights.diagonal(0.5, 1.5), [1.3])[0]
    assert np.allclose(w @ v0, v0.conj().T @ w)


@pytest.mark.parametrize("spec", [F1(0, 1, 1), F3(4)])
def test_weight_probe_scalar_only(spec):
    rep = reduce.weight_commutant(spec, SAMPLES)
    assert rep.verdict == "ScalarOnly" and rep.dimension == 1
    b = rep.basis[0]
    assert np.allclose(b / b[0, 0], np.eye(2), atol=1e-9)


def test_mop_probe_examples():
    assert reduce.mop_commutant(mops.build_by_moments(weights.diagonal(0.5, 0.5), 6)).dimension == 4
    assert reduce.mop_commutant(mops.build_by_moments(weights.diagonal(0.5, 1.5), 6)).verdict == "NonScalar"
    for spec in (F1(0, 1, 1), F2(0, 0.5)):
        assert reduce.mop_commutant(mops.build_by_moments(spec, 6)).verdict == "ScalarOnly"


def test_probe_arguments():
    with pytest.raises(ValueError):
        reduce.weight_commutant(F1(0, 1, 1), (1.0, 2.0))
    with pytest.raises(ValueError):
        reduce.mop_commutant(mops.build_by_moments(F1(0, 1, 1), 1))


@pytest.mark.parametrize(
    "spec", [F1(a, b, c) for a in (-0.5, 1.5) for b in (0.5, 3) for c in (-1, 0.7)] + [F2(1, 0.3), F3(0.5)]
)
def test_irreducible_weight_gives_irreducible_mops(spec):
    if reduce.weight_commutant(spec).verdict == "ScalarOnly":
        assert reduce.mop_commutant(mops.build_by_moments(spec, 6)).verdict == "ScalarOnly"


@pytest.mark.parametrize("spec", [weights.diagonal(0.5, 1.5), weights.diagonal(0.2, 0.2), F1(0, 1, 1)])
def test_more_data_never_increases_dimension(spec):
    dims = [reduce.weight_commutant(spec, np.geomspace(0.3, 30, k)).dimension for k in (3, 4, 6, 10)]
    assert all(b <= a for a, b in zip(dims, dims[1:]))
    seqs = [mops.build_by_moments(spec, n) for n in (2, 4, 8)]
    dims = [reduce.mop_commutant(s).dimension for s in seqs]
    assert all(b <= a for a, b in zip(dims, dims[1:]))


@settings(max_examples=10)
@given(cmats(max_cond=10))
def test_probes_conjugation_covariant(m):
    for spec in (weights.diagonal(0.5, 1.5), F2(0.4, -0.6)):
        moved = spec.congruent(m)
        assert reduce.weight_commutant(moved).dimension == reduce.weight_commutant(spec).dimension
        a = reduce.mop_commutant(mops.build_by_moments(spec, 4))
        b = reduce.mop_commutant(mops.build_by_moments(moved, 4))
        assert a.dimension == b.dimension
        # V0 solves for W exactly when M^-1 V0 M solves for M* W M.
        mi = np.linalg.inv(m)
        for v0 in reduce.weight_commutant(spec).basis:
            w = weights.evaluate(moved, [1.7])[0]
            v1 = mi @ v0 @ m
            assert np.allclose(w @ v1, v1.conj().T @ w, atol=1e-10 * np.abs(w).max())
