"""Exact-shape 2x2 complex matrix helpers.

Every matrix in the package is a ``numpy`` array of shape ``(2, 2)`` and
dtype ``complex128``.  The helpers here never broadcast: anything that is
not 2x2 is rejected early, which catches most indexing slips in the
operator and polynomial code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

I2 = np.eye(2, dtype=complex)

SINGULAR_RTOL = 1e-12
REPEATED_RTOL = 1e-9
# Discriminant of a 2x2 matrix is only known to ~eps * |A|^2, which puts the
# eigenvalue split of a Jordan block at ~sqrt(eps) * |A|.  The repeated
# eigenvalue decision is therefore taken on the discriminant itself.
DISCRIMINANT_RTOL = 1e-12


class SingularMatrixError(ValueError):
    """Raised when a matrix is too close to singular to invert."""

    def __init__(self, det: complex, message: str | None = None):
        self.det = det
        super().__init__(message or f"matrix is singular (det = {det!r})")


def as_cmat(a) -> np.ndarray:
    """Coerce ``a`` to a fresh 2x2 complex array."""
    m = np.array(a, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_cmat(a).conj().T


def norm_inf(a) -> float:
    """Max-row-sum norm."""
    return float(np.abs(np.asarray(a)).sum(axis=-1).max())


def det(a) -> complex:
    m = as_cmat(a)
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inverse(a) -> np.ndarray:
    """Cofactor inverse with a scale-aware singularity test.

    Raises
    ------
    SingularMatrixError
        If ``|det A| <= 1e-12 * max(1, ||A||_inf**2)``.
    """
    m = as_cmat(a)
    d = det(m)
    if abs(d) <= SINGULAR_RTOL * max(1.0, norm_inf(m) ** 2):
        raise SingularMatrixError(d)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / d


def hermitian_defect(a) -> float:
    m = as_cmat(a)
    return float(np.abs(m - m.conj().T).max())


def is_hermitian(a, tol: float = 1e-12) -> bool:
    return hermitian_defect(a) <= tol


def is_positive_definite(a, tol: float = 1e-12) -> bool:
    """Hermitian within ``tol`` and both leading principal minors above ``tol``."""
    m = as_cmat(a)
    if not is_hermitian(m, tol):
        return False
    return m[0, 0].real > tol and det(m).real > tol


def hermitian_eigenvalues(a) -> tuple[float, float]:
    """Closed-form eigenvalues of the Hermitian part of ``a``, ascending."""
    m = as_cmat(a)
    h = 0.5 * (m + m.conj().T)
    mean = 0.5 * (h[0, 0].real + h[1, 1].real)
    half = 0.5 * (h[0, 0].real - h[1, 1].real)
    r = float(np.hypot(half, abs(h[0, 1])))
    return mean - r, mean + r


def discriminant(a) -> complex:
    """``((a11 - a22)/2)**2 + a12*a21``: zero iff the eigenvalues coincide."""
    m = as_cmat(a)
    half = 0.5 * (m[0, 0] - m[1, 1])
    return half * half + m[0, 1] * m[1, 0]


def eigenvalues(a) -> tuple[complex, complex]:
    """Closed-form eigenvalues, ordered by descending real part."""
    m = as_cmat(a)
    mean = 0.5 * (m[0, 0] + m[1, 1])
    r = np.sqrt(discriminant(m) + 0j)
    l1, l2 = mean + r, mean - r
    if (l2.real, l2.imag) > (l1.real, l1.imag):
        l1, l2 = l2, l1
    return complex(l1), complex(l2)


def eigenvector(a, lam: complex) -> np.ndarray:
    """Unit eigenvector of ``a`` for the eigenvalue ``lam``.

    Uses the larger row of ``a - lam*I``: the kernel of ``(p, q)`` is ``(-q, p)``.
    """
    n = as_cmat(a) - lam * I2
    row = n[0] if np.abs(n[0]).sum() >= np.abs(n[1]).sum() else n[1]
    if np.abs(row).sum() == 0.0:
        return np.array([0.0, 1.0], dtype=complex)
    v = np.array([-row[1], row[0]])
    return v / np.linalg.norm(v)


JORDAN_TAGS = ("NonDiagonalJordan", "Scalar", "DistinctEigenvalues")


@dataclass(frozen=True, eq=False)
class JordanCase:
    """Jordan type of a 2x2 matrix together with the normalizing transform.

    ``inverse(transform) @ U @ transform`` is ``[[l, 0], [1, l]]`` for
    ``NonDiagonalJordan``, ``l*I`` for ``Scalar`` and ``diag(l1, l2)`` for
    ``DistinctEigenvalues``.
    """

    tag: str
    transform: np.ndarray
    eigenvalues: tuple[complex, complex]
    discriminant: complex


def jordan_case(u, tol: float = REPEATED_RTOL) -> JordanCase:
    """Classify ``u`` by its Jordan form.

    ``tol`` scales the nilpotent-part test ``||U - l I|| <= tol (1 + ||U||)``;
    the repeated-eigenvalue test compares the discriminant with
    ``1e-12 (1 + ||U||)**2``.
    """
    m = as_cmat(u)
    scale = 1.0 + norm_inf(m)
    disc = discriminant(m)
    if abs(disc) <= DISCRIMINANT_RTOL * scale**2:
        lam = 0.5 * (m[0, 0] + m[1, 1])
        nil = m - lam * I2
        if norm_inf(nil) <= tol * scale:
            return JordanCase("Scalar", I2.copy(), (complex(lam), complex(lam)), disc)
        # Columns of the nilpotent part span its kernel; pick the larger one as
        # the eigenvector x and the matching unit vector y, so N y = x.
        j = int(np.argmax(np.abs(nil).sum(axis=0)))
        x = nil[:, j]
        y = np.zeros(2, dtype=complex)
        y[j] = 1.0
        t = np.column_stack([y, x])
        return JordanCase("NonDiagonalJordan", t, (complex(lam), complex(lam)), disc)
    l1, l2 = eigenvalues(m)
    t = np.column_stack([eigenvector(m, l1), eigenvector(m, l2)])
    return JordanCase("DistinctEigenvalues", t, (l1, l2), disc)


def nullspace(rows, rtol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal basis of ``{x : rows @ x = 0}``.

    ``rows`` is a sequence of linear functionals on the four entries of a
    2x2 matrix (row-major).  Basis vectors come back reshaped to 2x2 with
    the phase fixed so the largest entry is real and positive.
    """
    a = np.asarray(rows, dtype=complex).reshape(-1, 4)
    return [v.reshape(2, 2) for v in _null_vectors(a, rtol)]


def _null_vectors(a: np.ndarray, rtol: float) -> list[np.ndarray]:
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return [np.eye(ncols, dtype=a.dtype)[i] for i in range(ncols)]
    _, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    out = []
    for v in vh[rank:].conj():
        k = int(np.argmax(np.abs(v)))
        if np.iscomplexobj(v):
            v = v * (abs(v[k]) / v[k])
        elif v[k] < 0:
            v = -v
        out.append(v)
    return out


def real_nullspace(a, rtol: float = 1e-9) -> list[np.ndarray]:
    """Real-coefficient kernel of a real matrix, same conventions as ``nullspace``."""
    return _null_vectors(np.asarray(a, dtype=float), rtol)


def commutator_rows(a) -> np.ndarray:
    """4x4 matrix of ``T -> T A - A T`` acting on row-major ``vec(T)``."""
    m = as_cmat(a)
    return np.kron(I2, m.T) - np.kron(m, I2)


def stack(mats: Iterable) -> np.ndarray:
    return np.array([as_cmat(m) for m in mats])


def max_abs(mats: Sequence) -> float:
    return max((float(np.abs(m).max()) for m in mats), default=0.0)
