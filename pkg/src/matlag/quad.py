"""Double-exponential quadrature on (0, inf) for matrix integrands.

After ``t = s**2 / rate`` the half-integer endpoint powers of the weights
become integer ones, and ``s = exp(pi/2 sinh x)`` turns the half line into
a doubly exponentially decaying integrand on the real line.  The trapezoid
rule is then refined by halving ``h``; consecutive levels share nodes, and
the difference between them is the error estimate.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import norm_inf
from .operators import LagOperator, MatPoly
from .weights import WeightSpec, evaluate, factor

DEFAULT_TARGET = 1e-12
DEFAULT_BUDGET = 20000
# Nodes are confined to rate * t in [T_MIN, T_MAX]; beyond that every weight
# in the package (times a polynomial of degree <= 60) is below 1e-150
# relative to its bulk.
T_MIN = 1e-300
T_MAX = 900.0
H0 = 0.5


class NonConvergence(RuntimeError):
    """The error target was not met within the evaluation budget."""

    def __init__(self, best_value, best_error: float, evaluations: int):
        self.best_value = best_value
        self.best_error = best_error
        self.evaluations = evaluations
        super().__init__(
            f"quadrature did not converge: error estimate {best_error:.3e} after {evaluations} evaluations"
        )


@dataclass(frozen=True, eq=False)
class QuadResult:
    value: np.ndarray
    abs_error_estimate: float
    evaluations: int
    block_errors: np.ndarray | None = field(default=None, repr=False)


def default_budget() -> int:
    env = os.environ.get("MATLAG_QUAD_BUDGET")
    if env:
        try:
            b = int(env)
        except ValueError:
            raise ValueError(f"MATLAG_QUAD_BUDGET must be an integer, got {env!r}") from None
        if b <= 0:
            raise ValueError("MATLAG_QUAD_BUDGET must be positive")
        return b
    return DEFAULT_BUDGET


def _x_range(rate: float) -> tuple[float, float]:
    # rate * t = s**2, s = exp(pi/2 sinh x)
    lo = math.asinh(math.log(math.sqrt(T_MIN)) * 2 / math.pi)
    hi = math.asinh(math.log(math.sqrt(T_MAX)) * 2 / math.pi)
    return lo, hi


def _nodes(x: np.ndarray, rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Points ``t`` and weights ``dt/dx`` for abscissae ``x``."""
    sh = np.sinh(x)
    s = np.exp(0.5 * math.pi * sh)
    ds = s * 0.5 * math.pi * np.cosh(x)
    t = s * s / rate
    return t, 2.0 * s * ds / rate


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    rate: float = 1.0,
    target: float = DEFAULT_TARGET,
    budget: int | None = None,
    ref: Callable[[np.ndarray], np.ndarray] | None = None,
) -> QuadResult:
    """Integrate ``f`` over (0, inf).

    ``f`` maps a 1-d array of ``m`` points to an array of shape
    ``(m, ..., 2, 2)``.  Each trailing 2x2 block converges when the
    level-to-level change is at most ``target * (1 + ref)``, where ``ref``
    defaults to the block's own max-row-sum norm.
    """
    if not target > 0:
        raise ValueError("target must be positive")
    budget = default_budget() if budget is None else int(budget)
    if rate <= 0:
        raise ValueError("decay rate must be positive")
    lo, hi = _x_range(rate)
    h = H0
    x = np.arange(lo, hi + 0.5 * h, h)
    t, w = _nodes(x, rate)
    acc = np.tensordot(w, f(t), axes=(0, 0))
    evals = x.size
    value = h * acc
    best_err = math.inf
    best_value = value
    while True:
        xm = x[:-1] + 0.5 * h if x.size > 1 else x
        if evals + xm.size > budget:
            raise NonConvergence(best_value, best_err, evals)
        t, w = _nodes(xm, rate)
        acc = acc + np.tensordot(w, f(t), axes=(0, 0))
        evals += xm.size
        x = np.sort(np.concatenate([x, xm]))
        h *= 0.5
        new = h * acc
        diff = np.abs(new - value).sum(axis=-1).max(axis=-1)
        scale = ref(new) if ref is not None else np.abs(new).sum(axis=-1).max(axis=-1)
        value = new
        rel = diff / (1.0 + scale)
        err = float(np.max(rel))
        if err < best_err:
            best_err, best_value = err, value
        if err <= target:
            return QuadResult(value, float(np.max(diff)), evals, diff)


def _h(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def inner_product(
    p: MatPoly, q: MatPoly, spec: WeightSpec, target: float = DEFAULT_TARGET, budget: int | None = None
) -> QuadResult:
    """``<P, Q>_W = int P(t)* W(t) Q(t) dt``, integrated as ``(L* P)* (L* Q)``."""

    def f(t):
        lh = _h(factor(spec, t))
        return _h(lh @ p(t)) @ (lh @ q(t))

    return integrate(f, spec.rate, target, budget)


def gram_table(
    polys: list[MatPoly], spec: WeightSpec, target: float = DEFAULT_TARGET, budget: int | None = None
) -> QuadResult:
    """All ``<P_i, P_j>`` at once; value has shape ``(n, n, 2, 2)``.

    Block ``(i, j)`` is converged relative to ``sqrt(||S_i|| ||S_j||)`` so that
    near-zero off-diagonal blocks are judged on the scale of the sequence.
    """

    def f(t):
        lh = _h(factor(spec, t))[:, None]
        y = lh @ np.stack([p(t) for p in polys], axis=1)  # (m, n, 2, 2)
        return _h(y)[:, :, None] @ y[:, None, :]

    def ref(v):
        d = np.abs(v[np.arange(len(polys)), np.arange(len(polys))]).sum(axis=-1).max(axis=-1)
        return np.sqrt(np.outer(d, d))

    return integrate(f, spec.rate, target, budget, ref)


class MomentCache:
    """Quadrature moments keyed by ``(spec, k, target)``; writes are serialized."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}

    def get(self, spec: WeightSpec, k: int, target: float, budget: int | None) -> QuadResult:
        key = (spec, k, target)
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        res = integrate(lambda t: t[:, None, None] ** k * evaluate(spec, t), spec.rate, target, budget)
        with self._lock:
            return self._data.setdefault(key, res)

    def clear(self):
        with self._lock:
            self._data.clear()


MOMENTS = MomentCache()


def moment_by_quadrature(
    spec: WeightSpec, k: int, target: float = DEFAULT_TARGET, budget: int | None = None
) -> QuadResult:
    return MOMENTS.get(spec, k, target, budget)


PROBE_SMALL = (1e-8, 1e-6, 1e-4)
PROBE_LARGE = (50.0, 100.0, 200.0)


@dataclass(frozen=True)
class BoundaryProbe:
    small_t: tuple
    large_t: tuple
    wf2_small: tuple
    wf2_large: tuple
    wf1_small: tuple
    wf1_large: tuple
    # Fitted ||.|| ~ t^p near 0 and ~ exp(r t) near infinity.
    wf2_power_at_zero: float
    wf1_power_at_zero: float
    wf2_rate_at_infinity: float
    wf1_rate_at_infinity: float

    @property
    def vanishes(self) -> bool:
        near0 = all(p > 0 for p in (self.wf2_power_at_zero, self.wf1_power_at_zero) if math.isfinite(p))
        near_inf = all(r < 0 for r in (self.wf2_rate_at_infinity, self.wf1_rate_at_infinity) if math.isfinite(r))
        return near0 and near_inf


def boundary_probe(spec: WeightSpec, op: LagOperator) -> BoundaryProbe:
    """Norms of ``W F2`` and ``W F1 - F1* W`` near both ends of (0, inf)."""

    def norms(ts):
        t = np.asarray(ts, float)
        w = evaluate(spec, t)
        f1 = op.C[None] - t[:, None, None] * op.U[None]
        a = [norm_inf(w[i] * t[i]) for i in range(t.size)]
        b = [norm_inf(w[i] @ f1[i] - f1[i].conj().T @ w[i]) for i in range(t.size)]
        return tuple(a), tuple(b)

    a0, b0 = norms(PROBE_SMALL)
    a1, b1 = norms(PROBE_LARGE)
    lt = np.log(PROBE_SMALL)

    def power(y):
        y = np.asarray(y)
        if np.all(y <= 1e-300):
            return math.inf
        return float(np.polyfit(lt, np.log(np.maximum(y, 1e-300)), 1)[0])

    def rate(y):
        y = np.asarray(y)
        if np.all(y <= 1e-300):
            return -math.inf
        return float(np.polyfit(PROBE_LARGE, np.log(np.maximum(y, 1e-300)), 1)[0])

    return BoundaryProbe(
        PROBE_SMALL, PROBE_LARGE, a0, a1, b0, b1, power(a0), power(b0), rate(a1), rate(b1)
    )
