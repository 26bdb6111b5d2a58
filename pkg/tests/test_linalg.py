import numpy as np
import pytest
from hypothesis import given

from matlag.linalg import (
    I2,
    SingularMatrixError,
    adjoint,
    commutator_rows,
    hermitian_eigenvalues,
    inverse,
    is_positive_definite,
    jordan_case,
    nullspace,
)

from strategies import cmats


def test_adjoint_examples():
    assert np.array_equal(adjoint([[1, 1j], [0, 2]]), np.array([[1, 0], [-1j, 2]]))
    assert np.array_equal(adjoint(I2), I2)
    x = np.array([[0, 1], [1, 0]], complex)
    assert np.array_equal(adjoint(x), x)


def test_inverse_examples():
    assert np.allclose(inverse(I2), I2)
    assert np.allclose(inverse([[3, 1], [1, 1]]), [[0.5, -0.5], [-0.5, 1.5]], atol=1e-15)
    with pytest.raises(SingularMatrixError):
        inverse([[0, 0], [-1, -1]])


def test_singular_threshold_is_scale_aware():
    big = 1e8 * np.array([[1, 0], [0, 1e-9]])
    assert np.allclose(inverse(big) @ big, I2)


def test_positive_definite_examples():
    assert is_positive_definite([[3, 1], [1, 1]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    assert not is_positive_definite([[1, 1j], [1j, 1]])


def test_jordan_case_examples():
    jc = jordan_case([[1, 0], [1, 1]])
    assert jc.tag == "NonDiagonalJordan"
    assert np.allclose(jc.transform, I2)
    assert jordan_case([[2, 0], [0, 2]]).tag == "Scalar"
    assert jordan_case([[1, 0], [0, 3]]).tag == "DistinctEigenvalues"


@pytest.mark.parametrize("u", [[[1, 0], [1, 1]], [[2, 5], [0, 2]], [[1, 0], [0, 3]], [[0, 1], [-1, 0]]])
def test_jordan_transform_normalizes(u):
    jc = jordan_case(u)
    n = inverse(jc.transform) @ np.asarray(u, complex) @ jc.transform
    l1, l2 = jc.eigenvalues
    expect = {
        "NonDiagonalJordan": np.array([[l1, 0], [1, l1]]),
        "Scalar": l1 * I2,
        "DistinctEigenvalues": np.diag([l1, l2]),
    }[jc.tag]
    assert np.allclose(n, expect, atol=1e-12)


def test_nullspace_examples():
    assert len(nullspace(np.zeros((0, 4)))) == 4
    n0 = np.array([[0, 0], [1, 0]], complex)
    d = np.array([[1, 0], [0, 2]], complex)
    basis = nullspace(np.vstack([commutator_rows(n0), commutator_rows(d)]))
    assert len(basis) == 1
    b = basis[0] / basis[0][0, 0] * (1 / np.sqrt(2))
    assert np.allclose(b, I2 / np.sqrt(2))
    assert np.isclose(np.linalg.norm(basis[0]), 1.0)


@given(cmats())
def test_inverse_property(a):
    assert np.abs(a @ inverse(a) - I2).sum(axis=1).max() <= 1e-12 * max(1, np.linalg.cond(a))


@given(cmats(), cmats(max_cond=10))
def test_jordan_case_conjugation_covariant(u, m):
    for base in (u, np.array([[1.5, 0], [1, 1.5]]), 2.0 * I2):
        assert jordan_case(inverse(m) @ base @ m).tag == jordan_case(base).tag


@given(cmats())
def test_positive_definite_matches_eigenvalues(a):
    h = a @ adjoint(a) + (np.trace(a).real - 1.0) * I2
    h = 0.5 * (h + adjoint(h))
    lo, hi = sorted(np.linalg.eigvalsh(h))
    if abs(lo) > 1e-9:
        assert is_positive_definite(h) == (lo > 1e-12)
    assert np.allclose(sorted(hermitian_eigenvalues(h)), [lo, hi], atol=1e-10 * (1 + abs(hi)))
