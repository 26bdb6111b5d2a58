import numpy as np
import pytest
from hypothesis import given

from matlag import mops, weights
from matlag.linalg import I2, inverse
from matlag.operators import (
    MatPoly,
    ParameterOutOfDomain,
    apply,
    conjugate,
    eigenvalue,
    family,
    family1,
    family2,
    family3,
    raw_thm52,
    rescale_time,
)

from strategies import cmats, family_params

P1 = MatPoly([[[-3, -0.5], [1, -0.5]], np.eye(2)])


def test_eigenvalue_examples():
    op = family1(0, 1, 1)
    assert np.allclose(eigenvalue(op, 0).matrix, -op.V)
    assert np.allclose(eigenvalue(op, 1).matrix, [[-2, 0], [2, -1]])
    assert np.allclose(eigenvalue(op, 2).matrix, [[-3, 0], [3, -2]])


def test_apply_examples():
    op = family1(0, 1, 1)
    assert np.allclose(apply(op, MatPoly.constant(I2)).coeffs[0], -op.V)
    out = apply(op, MatPoly.monomial(1)).coeffs
    assert np.allclose(out[0], op.C)
    assert np.allclose(out[1], -(op.U + op.V))
    lhs = apply(op, P1).coeffs
    rhs = P1.times_right(eigenvalue(op, 1).matrix).coeffs
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_conjugate_examples():
    op = family2(0.5, 0.4)
    assert conjugate(op, I2).distance(op) == 0
    assert conjugate(op, 3.7j * I2).distance(op) < 1e-15


def test_family_examples():
    op = family1(0, 1, 1)
    assert np.allclose(op.C, [[2, 0], [0, 1]])
    assert np.allclose(op.U, [[1, 0], [-1, 1]])
    assert np.allclose(op.V, [[1, 0], [-1, 0]])
    op = family3(4)
    assert np.allclose(op.C, [[1.5, 1], [0, 0.5]])
    assert np.allclose(op.U, [[1, 0], [-1, 1]])
    assert np.allclose(op.V, [[0.5, 0], [-0.5, 0]])
    with pytest.raises(ParameterOutOfDomain):
        family1(-2, 1, 1)


def test_rescale_examples():
    op = family3(1.3)
    assert rescale_time(op, 1.0).distance(op) == 0
    back = rescale_time(rescale_time(op, 2.7), 1 / 2.7)
    assert back.distance(op) <= 1e-13
    # A raw scalar-U operator with u = 3 lands on a unit-diagonal U.
    assert np.allclose(np.diag(rescale_time(raw_thm52(3.0, 0.4, 1.5), 3.0).U), [1, 1])


@given(family_params)
def test_family_shape(fp):
    tag, p = fp
    op = family(tag, **p)
    assert op.U[0, 1] == 0 and op.V[0, 1] == 0 and op.V[1, 1] == 0
    assert op.U[0, 0] == 1 and op.U[1, 1] == 1
    for n in range(5):
        d = eigenvalue(op, n + 1).matrix - eigenvalue(op, n).matrix
        assert np.abs(d + op.U).max() <= 4e-16 * (n + 1) * (1 + np.abs(op.U).max() + np.abs(op.V).max())


@given(family_params, cmats(max_cond=10))
def test_conjugate_inverse_roundtrip(fp, m):
    op = family(fp[0], **fp[1])
    back = conjugate(conjugate(op, m), inverse(m))
    assert back.distance(op) <= 1e-12 * (1 + op.scale())


@pytest.mark.parametrize("spec", [weights.F1(0, 1, 1), weights.F2(0.5, 0.4), weights.F3(4)])
def test_apply_eigen_equation_on_mops(spec):
    op = weights.pair(spec)
    seq = mops.build_by_moments(spec, 8)
    for n, p in enumerate(seq.polys):
        assert mops.eigen_residual(op, p, eigenvalue(op, n).matrix) <= 1e-8


def test_operator_json_roundtrip():
    op = family1(0.3, 1.2, -0.7)
    from matlag.operators import LagOperator

    assert LagOperator.from_json(op.to_json()).distance(op) == 0
