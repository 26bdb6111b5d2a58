"""Commutant probes for reducibility of a weight or of its orthogonal polynomials.

A weight can only split into a direct sum of scalar weights if some
non-scalar ``V0`` satisfies ``W(t) V0 = V0* W(t)`` for all ``t``; a
sequence of orthogonal polynomials splits exactly when a non-scalar ``T``
commutes with every ``P_n(t)``.  Both conditions are linear in the unknown
matrix and are solved here as nullspace problems on sampled data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import commutator_rows, norm_inf, nullspace, real_nullspace
from .mops import MOPSequence
from .weights import WeightSpec, evaluate, validate
from .operators import ParameterOutOfDomain

DEFAULT_SAMPLES = tuple(np.geomspace(0.3, 30.0, 6))
RANK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class CommutantReport:
    basis: list
    dimension: int
    verdict: str  # "ScalarOnly" | "NonScalar"
    singular_values: np.ndarray

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "verdict": self.verdict,
            "basis": [[[float(z.real), float(z.imag)] for z in b.reshape(-1)] for b in self.basis],
        }


def _report(basis: list, sv: np.ndarray) -> CommutantReport:
    dim = len(basis)
    return CommutantReport(basis, dim, "ScalarOnly" if dim == 1 else "NonScalar", sv)


def _realify(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real.reshape(-1), z.imag.reshape(-1)])


def weight_commutant(spec: WeightSpec, samples=DEFAULT_SAMPLES, rtol: float = RANK_RTOL) -> CommutantReport:
    """Real solution space of ``W(t_i) V0 = V0* W(t_i)`` over the samples.

    The equation is only real-linear in ``V0`` (because of the adjoint), so
    the unknowns are the 8 real and imaginary parts of its entries and the
    reported dimension is a real dimension.  Real multiples of ``I`` always
    solve it.
    """
    if len(samples) < 3:
        raise ValueError("at least 3 samples are needed")
    bad = validate(spec)
    if bad:
        raise ParameterOutOfDomain(bad)
    units = []
    for k in range(8):
        e = np.zeros(4, complex)
        e[k % 4] = 1.0 if k < 4 else 1j
        units.append(e.reshape(2, 2))
    rows = []
    for w in evaluate(spec, np.asarray(samples, float)):
        cols = [_realify(w @ e - e.conj().T @ w) for e in units]
        rows.append(np.column_stack(cols) / norm_inf(w))
    a = np.vstack(rows)
    sv = np.linalg.svd(a, compute_uv=False)
    basis = []
    for v in real_nullspace(a, rtol):
        m = (v[:4] + 1j * v[4:]).reshape(2, 2)
        basis.append(m)
    return _report(basis, sv)


def mop_commutant(seq: MOPSequence, rtol: float = RANK_RTOL) -> CommutantReport:
    """Complex solution space of ``T T_k^n = T_k^n T`` over all stored coefficients."""
    if seq.N < 2:
        raise ValueError("need polynomials up to degree at least 2")
    blocks = []
    for p in seq.polys:
        for c in p.coeffs[:-1]:
            s = norm_inf(c)
            if s > 0:
                blocks.append(commutator_rows(c) / s)
    a = np.vstack(blocks) if blocks else np.zeros((0, 4), complex)
    sv = np.linalg.svd(a, compute_uv=False) if blocks else np.zeros(0)
    return _report(nullspace(a, rtol), sv)
