"""Laguerre-type operators ``D = t I d^2 + (C - t U) d - V`` on (0, inf).

Operators act on matrix polynomials from the left, so for a polynomial
``P(t) = sum_k T_k t^k`` the coefficient of ``t^k`` in ``D P`` is::

    (k + 1) (C + k I) T_{k+1} - (k U + V) T_k

and the monic eigenpolynomials satisfy ``D P_n = P_n Delta_n`` with
``Delta_n = -n U - V``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import I2, as_cmat, inverse, norm_inf


class ParameterOutOfDomain(ValueError):
    """A family or weight parameter violates its admissible range."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotLowerTriangular(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LagOperator:
    C: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        for name in ("C", "U", "V"):
            object.__setattr__(self, name, as_cmat(getattr(self, name)))

    def distance(self, other: "LagOperator") -> float:
        return max(
            float(np.abs(a - b).max())
            for a, b in ((self.C, other.C), (self.U, other.U), (self.V, other.V))
        )

    def scale(self) -> float:
        return max(norm_inf(self.C), norm_inf(self.U), norm_inf(self.V))

    def to_json(self) -> dict:
        return {k: _mat_to_json(getattr(self, k)) for k in ("C", "U", "V")}

    @classmethod
    def from_json(cls, obj: dict) -> "LagOperator":
        return cls(*(_mat_from_json(obj[k]) for k in ("C", "U", "V")))


def _mat_to_json(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def _mat_from_json(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape == (4, 2):
        return (arr[:, 0] + 1j * arr[:, 1]).reshape(2, 2)
    if arr.shape == (2, 2):
        return arr.astype(complex)
    raise ValueError(f"cannot read a 2x2 complex matrix from shape {arr.shape}")


@dataclass(frozen=True, eq=False)
class MatPoly:
    """Matrix polynomial ``sum_k coeffs[k] t^k``; ``coeffs`` has shape (deg+1, 2, 2)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1:] != (2, 2) or c.shape[0] == 0:
            raise ValueError(f"bad coefficient array shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def is_monic(self, tol: float = 1e-13) -> bool:
        return float(np.abs(self.coeffs[-1] - I2).max()) <= tol

    def __call__(self, t):
        """Horner evaluation; ``t`` may be a scalar or a 1-d array."""
        t = np.asarray(t, dtype=float)
        out = np.broadcast_to(self.coeffs[-1], t.shape + (2, 2)).astype(complex)
        for c in self.coeffs[-2::-1]:
            out = out * t[..., None, None] + c
        return out

    def times_right(self, m) -> "MatPoly":
        return MatPoly(self.coeffs @ as_cmat(m))

    def times_left(self, m) -> "MatPoly":
        return MatPoly(as_cmat(m) @ self.coeffs)

    def shift_up(self) -> "MatPoly":
        """Multiply by ``t``."""
        return MatPoly(np.concatenate([np.zeros((1, 2, 2), complex), self.coeffs]))

    def __add__(self, other: "MatPoly") -> "MatPoly":
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        out = np.zeros((n, 2, 2), complex)
        out[: self.coeffs.shape[0]] += self.coeffs
        out[: other.coeffs.shape[0]] += other.coeffs
        return MatPoly(out)

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + MatPoly(-other.coeffs)

    @classmethod
    def constant(cls, m) -> "MatPoly":
        return cls(as_cmat(m)[None])

    @classmethod
    def monomial(cls, k: int) -> "MatPoly":
        c = np.zeros((k + 1, 2, 2), complex)
        c[k] = I2
        return cls(c)


@dataclass(frozen=True)
class EigenvalueTriple:
    """Lower-triangular ``Delta_n = [[lambda_n, 0], [nu_n, mu_n]]``."""

    n: int
    lambda_n: complex
    mu_n: complex
    nu_n: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.lambda_n, 0], [self.nu_n, self.mu_n]], dtype=complex)


def eigenvalue_matrix(op: LagOperator, n: int) -> np.ndarray:
    return -n * op.U - op.V


def eigenvalue(op: LagOperator, n: int, tol: float = 1e-12) -> EigenvalueTriple:
    """``Delta_n = -n U - V`` in triple form.

    Raises ``NotLowerTriangular`` when the (1,2) entry exceeds
    ``tol * (1 + ||Delta_n||)``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    d = eigenvalue_matrix(op, n)
    if abs(d[0, 1]) > tol * (1.0 + norm_inf(d)):
        raise NotLowerTriangular(f"Delta_{n} has (1,2) entry {d[0, 1]!r}")
    return EigenvalueTriple(n, complex(d[0, 0]), complex(d[1, 1]), complex(d[1, 0]))


def apply(op: LagOperator, p: MatPoly) -> MatPoly:
    """Exact coefficient action of ``op`` on ``p``."""
    c = p.coeffs
    deg = p.degree
    out = np.empty_like(c)
    for k in range(deg + 1):
        acc = -(k * op.U + op.V) @ c[k]
        if k < deg:
            acc = acc + (k + 1) * (op.C + k * I2) @ c[k + 1]
        out[k] = acc
    return MatPoly(out)


def conjugate(op: LagOperator, m) -> LagOperator:
    """``M^{-1} D M``."""
    m = as_cmat(m)
    mi = inverse(m)
    return LagOperator(mi @ op.C @ m, mi @ op.U @ m, mi @ op.V @ m)


def rescale_time(op: LagOperator, u: float) -> LagOperator:
    """Operator in ``x = t u``, divided by ``u``: ``(C, U, V) -> (C, U/u, V/u)``."""
    if not (isinstance(u, (int, float)) and u > 0 and math.isfinite(u)):
        raise ValueError(f"time scale must be a positive real, got {u!r}")
    return LagOperator(op.C.copy(), op.U / u, op.V / u)


def shift(op: LagOperator, s: complex) -> LagOperator:
    """``D - s I``: same eigenpolynomials, eigenvalues moved by ``-s``."""
    return LagOperator(op.C.copy(), op.U.copy(), op.V + s * I2)


def family1(alpha: float, beta: float, b: float) -> LagOperator:
    bad = []
    if not alpha > -1:
        bad.append("alpha <= -1")
    if not beta > -1 - alpha:
        bad.append("beta <= -1-alpha")
    if b == 0 or not np.isfinite(b):
        bad.append("b == 0")
    if bad:
        raise ParameterOutOfDomain(bad)
    return LagOperator(
        [[alpha + beta + 1, 0], [0, alpha + 1]],
        [[1, 0], [b * (beta - 2), 1]],
        [[1, 0], [-b * (alpha + 1), 0]],
    )


def family2(alpha: float, b: float) -> LagOperator:
    bad = []
    if not alpha > -1:
        bad.append("alpha <= -1")
    if not 0 < abs(b) < 1:
        bad.append("|b| >= 1" if abs(b) >= 1 else "b == 0")
    if bad:
        raise ParameterOutOfDomain(bad)
    return LagOperator(
        [[alpha + 5, 0], [0, alpha + 1]],
        [[1, 0], [4 * b * (alpha + 2), 1]],
        [[2, 0], [-2 * b * (alpha + 2) * (alpha + 1), 0]],
    )


def family3(beta: float) -> LagOperator:
    if not beta > 0:
        raise ParameterOutOfDomain(["beta <= 0"])
    return LagOperator(
        [[1.5, beta / 4], [0, 0.5]],
        [[1, 0], [-1, 1]],
        [[0.5, 0], [-0.5, 0]],
    )


def family(tag: str, **params) -> LagOperator:
    if tag == "F1":
        return family1(params["alpha"], params["beta"], params["b"])
    if tag == "F2":
        return family2(params["alpha"], params["b"])
    if tag == "F3":
        return family3(params["beta"])
    raise KeyError(f"unknown family {tag!r}")


# Operators of the four raw normal forms, in the gauge where U = [[u, 0], [1, u]]
# (or u I for the scalar case) and v21 = 0.


def raw_thm42(u: float, c21: float, c22: float) -> LagOperator:
    c11 = c22 + 2 + 2 * c22 / (u * c21 - c22)
    return LagOperator([[c11, 0], [c21, c22]], [[u, 0], [1, u]], [[u, 0], [0, 0]])


def raw_thm43(u: float, c21: float) -> LagOperator:
    return LagOperator(
        [[c21 * u + 4, 0], [c21, c21 * u]], [[u, 0], [1, u]], [[2 * u, 0], [0, 0]]
    )


def raw_thm44(u: float, c22: float) -> LagOperator:
    return LagOperator(
        [[2 - c22, u * (1 - 2 * c22) / 2], [(2 * c22 - 3) / (2 * u), c22]],
        [[u, 0], [1, u]],
        [[u / 2, 0], [0, 0]],
    )


def raw_thm52(u: float, c21: complex, c22: float) -> LagOperator:
    return LagOperator([[c22 + 2, 0], [c21, c22]], [[u, 0], [0, u]], [[u, 0], [0, 0]])
