"""Pointwise check of the symmetry equations linking an operator and a weight.

With ``F2 = t I``, ``F1 = C - t U`` and ``F0 = -V`` the pair is symmetric
when::

    E1 = F2* W - W F2                               = 0
    E2 = 2 (W F2)' - W F1 - F1* W                    = 0
    E3 = (W F2)'' - (W F1)' + W F0 - F0* W           = 0

and ``W F2``, ``W F1 - F1* W`` vanish at both ends of (0, inf).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import I2, adjoint, norm_inf
from .operators import LagOperator
from .quad import BoundaryProbe, boundary_probe
from .weights import WeightSpec, evaluate, validate
from .operators import ParameterOutOfDomain

DEFAULT_GRID = (1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 100.0)
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class PointResidual:
    t: float
    e1: float
    e2: float
    e3: float

    @property
    def worst(self) -> float:
        return max(self.e1, self.e2, self.e3)


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    points: list
    boundary: BoundaryProbe
    tol: float

    @property
    def worst(self) -> PointResidual:
        return max(self.points, key=lambda p: p.worst)

    @property
    def max_residual(self) -> float:
        return self.worst.worst

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and self.boundary.vanishes

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        w = self.worst
        return {
            "verdict": self.verdict,
            "tol": self.tol,
            "worst": {"t": w.t, "E1": w.e1, "E2": w.e2, "E3": w.e3},
            "points": [{"t": p.t, "E1": p.e1, "E2": p.e2, "E3": p.e3} for p in self.points],
            "boundary": {
                "vanishes": self.boundary.vanishes,
                "wf2_power_at_zero": self.boundary.wf2_power_at_zero,
                "wf1_power_at_zero": self.boundary.wf1_power_at_zero,
                "wf2_rate_at_infinity": self.boundary.wf2_rate_at_infinity,
                "wf1_rate_at_infinity": self.boundary.wf1_rate_at_infinity,
            },
        }


def residuals(op: LagOperator, spec: WeightSpec, t: float) -> PointResidual:
    ts = np.array([float(t)])
    w, dw, d2w = (evaluate(spec, ts, k)[0] for k in range(3))
    f2 = t * I2
    f1 = op.C - t * op.U
    f0 = -op.V
    # (W F2)' = W' t + W,  (W F2)'' = W'' t + 2 W',  (W F1)' = W' F1 - W U
    e1 = adjoint(f2) @ w - w @ f2
    e2 = 2 * (dw * t + w) - w @ f1 - adjoint(f1) @ w
    e3 = (d2w * t + 2 * dw) - (dw @ f1 - w @ op.U) + w @ f0 - adjoint(f0) @ w
    scale = 1.0 + norm_inf(w) * (1.0 + t)
    return PointResidual(float(t), norm_inf(e1) / scale, norm_inf(e2) / scale, norm_inf(e3) / scale)


def check(
    op: LagOperator, spec: WeightSpec, grid=DEFAULT_GRID, tol: float = DEFAULT_TOL
) -> SymmetryReport:
    bad = validate(spec)
    if bad:
        raise ParameterOutOfDomain(bad)
    if any(not t > 0 for t in grid):
        raise ValueError("grid points must be positive")
    pts = [residuals(op, spec, t) for t in grid]
    return SymmetryReport(pts, boundary_probe(spec, op), tol)


def _fd(f, t: float, h: float) -> np.ndarray:
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def cross_validate_derivatives(spec: WeightSpec, t: float) -> float:
    """Max relative gap between analytic and 5-point finite-difference derivatives.

    ``W'`` is compared with the difference quotient of ``W`` and ``W''`` with
    that of the analytic ``W'``; a second difference of ``W`` itself would
    lose ~1e-5 to rounding at ``h = 1e-5 t``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    h = t * 1e-5

    def at(order):
        return lambda s: evaluate(spec, np.array([s]), order)[0]

    w, dw, d2w = at(0)(t), at(1)(t), at(2)(t)
    d1 = norm_inf(dw - _fd(at(0), t, h)) / (norm_inf(dw) + norm_inf(w) / t)
    d2 = norm_inf(d2w - _fd(at(1), t, h)) / (norm_inf(d2w) + norm_inf(dw) / t + norm_inf(w) / t**2)
    return float(max(d1, d2))
