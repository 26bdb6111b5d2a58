"""Monic matrix orthogonal polynomials: moments route and operator route.

The moments route solves the block Hankel normal equations
``sum_j m_{i+j} X_j = -m_{i+n}`` (``i < n``) for ``P_n = t^n I + sum_j t^j X_j``.
The Hankel blocks are hopelessly ill conditioned in double precision
(condition ~1e22 at n = 10 for the canonical families), so the solve runs
in ``mpmath`` on closed-form moments and only the result is rounded.

The operator route solves ``D P_n = P_n Delta_n`` coefficient by
coefficient from the top.  Some of those 2x2 systems are exactly singular
for the canonical families; there the free direction is taken from an
orthogonal completion (a sequence built by moments), projected onto the
affine solution set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import weights
from .linalg import I2, adjoint, det, inverse, is_positive_definite, norm_inf
from .operators import LagOperator, MatPoly, eigenvalue
from .weights import WeightSpec

N_DEFAULT = 12
N_CAP = 24
RESONANCE_RTOL = 1e-10
CONSISTENCY_RTOL = 1e-8
FAVARD_RTOL = 1e-8


class GramNotPositiveDefinite(ArithmeticError):
    def __init__(self, n: int, gram: np.ndarray):
        self.n = n
        self.gram = gram
        super().__init__(f"Gram matrix S_{n} is not Hermitian positive definite")


@dataclass(frozen=True, eq=False)
class MOPSequence:
    """``P_0..P_N`` with ``S_n``, ``A_n`` (index 1..N, ``A[0]`` is None) and ``B_n``.

    ``p_next`` is ``P_{N+1}``, which the coefficient formulas for ``A_N``,
    ``B_N`` need.  ``crosscheck`` holds the largest relative deviation between
    the coefficient-based and Gram-based recurrence matrices.
    """

    N: int
    polys: list
    grams: list
    A: list
    B: list
    p_next: MatPoly | None = None
    spec: WeightSpec | None = None
    crosscheck: float = 0.0
    tgrams: list = field(default_factory=list, repr=False)  # <P_n, t P_n>

    def coeff(self, n: int, k: int) -> np.ndarray:
        """``T_k^n``."""
        return self.polys[n].coeffs[k]

    def to_json(self) -> dict:
        def m(a):
            return [[float(z.real), float(z.imag)] for z in np.asarray(a).reshape(-1)]

        return {
            "N": self.N,
            "weight": self.spec.to_json() if self.spec is not None else None,
            "T": [[m(c) for c in p.coeffs] for p in self.polys],
            "S": [m(s) for s in self.grams],
            "A": [m(a) for a in self.A[1:]],
            "B": [m(b) for b in self.B],
        }


def _to_np(a) -> np.ndarray:
    return np.array([[complex(a[i, j]) for j in range(2)] for i in range(2)])


def _herm(a: mpmath.matrix) -> mpmath.matrix:
    return a.transpose_conj()


def _mp_inner(ta: list, tb: list, moments: list, shift: int = 0) -> mpmath.matrix:
    """``sum_ij Ta_i^* m_{i+j+shift} Tb_j``."""
    acc = mpmath.zeros(2, 2)
    for i, a in enumerate(ta):
        ah = _herm(a)
        for j, b in enumerate(tb):
            acc += ah * moments[i + j + shift] * b
    return acc


def _hankel_solve(moments: list, n: int, rhs: list) -> list:
    """Solve ``sum_j m_{i+j} X_j = rhs_i`` for ``i, j < n``."""
    size = 2 * n
    h = mpmath.zeros(size, size)
    r = mpmath.zeros(size, 2)
    for i in range(n):
        for j in range(n):
            m = moments[i + j]
            for a in range(2):
                for b in range(2):
                    h[2 * i + a, 2 * j + b] = m[a, b]
        for a in range(2):
            for b in range(2):
                r[2 * i + a, b] = rhs[i][a, b]
    # mpmath's lu_solve wants vector right-hand sides.
    cols = [mpmath.lu_solve(h, r.column(b)) for b in range(2)]
    return [mpmath.matrix([[cols[b][2 * j + a] for b in range(2)] for a in range(2)]) for j in range(n)]


def _orth_defect(moments: list, coeffs: list, n: int) -> list:
    """``<t^i I, P_n>`` for ``i < n``."""
    out = []
    for i in range(n):
        acc = mpmath.zeros(2, 2)
        for j, c in enumerate(coeffs):
            acc += moments[i + j] * c
        out.append(acc)
    return out


def _orth_residual(moments: list, coeffs: list, n: int) -> float:
    """Largest ``||<t^i I, P_n>||`` over ``i < n``, relative to ``||m_{i+n}||``."""
    d = _orth_defect(moments, coeffs, n)
    return float(max((mpmath.mnorm(x, 1) / (1 + mpmath.mnorm(moments[i + n], 1)) for i, x in enumerate(d)), default=0))


def build_by_moments(spec: WeightSpec, N: int = N_DEFAULT, dps: int | None = None) -> MOPSequence:
    """The monic orthogonal sequence of ``spec`` up to degree ``N`` (plus ``P_{N+1}``)."""
    if not 0 <= N <= N_CAP:
        raise ValueError(f"N must be in [0, {N_CAP}]")
    bad = weights.validate(spec)
    if bad:
        raise weights.ParameterOutOfDomain(bad)
    dps = dps or 40 + 3 * N
    with mpmath.workdps(dps):
        moments = [weights.moment_mp(spec, k, dps) for k in range(2 * N + 4)]
        mp_polys = []
        for n in range(N + 2):
            low = _hankel_solve(moments, n, [-moments[i + n] for i in range(n)]) if n else []
            full = low + [mpmath.eye(2)]
            if n and _orth_residual(moments, full, n) > 1e-10:
                # One correction pass on the orthogonality defect.
                fix = _hankel_solve(moments, n, [-d for d in _orth_defect(moments, full, n)])
                full = [a + e for a, e in zip(low, fix)] + [mpmath.eye(2)]
            mp_polys.append(full)
        grams_mp = [_mp_inner(p, p, moments) for p in mp_polys]
        tgram_mp = [_mp_inner(p, p, moments, shift=1) for p in mp_polys]
        polys = [MatPoly(np.array([_to_np(c) for c in p])) for p in mp_polys]
        grams = [_to_np(s) for s in grams_mp]
        tgrams = [_to_np(s) for s in tgram_mp]
    for n, s in enumerate(grams[: N + 1]):
        if not is_positive_definite(0.5 * (s + adjoint(s)), 0.0) or np.abs(s - adjoint(s)).max() > 1e-8 * norm_inf(s):
            raise GramNotPositiveDefinite(n, s)
    seq = MOPSequence(N, polys[: N + 1], grams[: N + 1], [], [], polys[N + 1], spec)
    A, B = recurrence_from_coeffs(seq)
    worst = 0.0
    for n in range(N + 1):
        b_gram = inverse(grams[n]) @ tgrams[n]
        worst = max(worst, norm_inf(B[n] - b_gram) / (1 + norm_inf(b_gram)))
        if n:
            a_gram = inverse(grams[n - 1]) @ grams[n]
            worst = max(worst, norm_inf(A[n] - a_gram) / (1 + norm_inf(a_gram)))
    return MOPSequence(N, polys[: N + 1], grams[: N + 1], A, B, polys[N + 1], spec, worst, tgrams[: N + 1])


def recurrence_from_coeffs(seq: MOPSequence) -> tuple[list, list]:
    """``A_n`` (n = 1..N, ``A[0]`` is None) and ``B_n`` (n = 0..N) from coefficients.

    ``B_n = T_{n-1}^n - T_n^{n+1}`` and
    ``A_n = T_{n-2}^n - T_{n-1}^{n+1} - T_{n-1}^n B_n``, with ``T_{-1} = 0``.
    """
    if seq.p_next is None:
        raise ValueError("P_{N+1} is required")
    polys = list(seq.polys) + [seq.p_next]
    zero = np.zeros((2, 2), complex)

    def T(n, k):
        return polys[n].coeffs[k] if k >= 0 else zero

    B = [T(n, n - 1) - T(n + 1, n) for n in range(seq.N + 1)]
    A = [None] + [
        T(n, n - 2) - T(n + 1, n - 1) - T(n, n - 1) @ B[n] for n in range(1, seq.N + 1)
    ]
    return A, B


def recurrence_residual(seq: MOPSequence) -> float:
    """Max over n of the coefficient norm of ``t P_n - P_{n+1} - P_n B_n - P_{n-1} A_n``."""
    polys = list(seq.polys) + [seq.p_next]
    worst = 0.0
    for n in range(seq.N + 1):
        lhs = polys[n].shift_up()
        rhs = polys[n + 1] + polys[n].times_right(seq.B[n])
        if n:
            rhs = rhs + polys[n - 1].times_right(seq.A[n])
        d = (lhs - rhs).coeffs
        scale = 1 + max(norm_inf(c) for c in lhs.coeffs)
        worst = max(worst, max(norm_inf(c) for c in d) / scale)
    return worst


@dataclass(frozen=True)
class StepReport:
    n: int
    k: int
    column: str  # "F" or "G"
    tag: str  # "Unique" | "ResonantConsistent" | "Inconsistent"
    condition: float
    residual: float


@dataclass(frozen=True, eq=False)
class RecursionReport:
    steps: list
    eigen_residuals: list  # per n, max ||(D P_n - P_n Delta_n)_k|| / (1 + ||T||)

    @property
    def consistent(self) -> bool:
        return all(s.tag != "Inconsistent" for s in self.steps)

    def tags(self, n: int | None = None) -> list[str]:
        return [s.tag for s in self.steps if n is None or s.n == n]

    def resonances(self) -> list[StepReport]:
        return [s for s in self.steps if s.tag != "Unique"]


def _solve_step(a: np.ndarray, rhs: np.ndarray, hint: np.ndarray | None):
    u, s, vh = np.linalg.svd(a)
    cond = float(s[0] / s[1]) if s[1] > 0 else float("inf")
    scale = 1.0 + s[0]
    if s[1] > RESONANCE_RTOL * scale:
        x = np.linalg.solve(a, rhs)
        return x, "Unique", cond, float(np.abs(a @ x - rhs).max())
    # Rank deficient: least-squares particular solution plus the kernel.
    x = np.linalg.lstsq(a, rhs, rcond=None)[0]
    resid = float(np.abs(a @ x - rhs).max())
    tag = "ResonantConsistent"
    if resid > CONSISTENCY_RTOL * (1.0 + np.abs(rhs).max() + s[0] * np.abs(x).max()):
        tag = "Inconsistent"
    null = vh[1].conj()
    if s[0] <= RESONANCE_RTOL:  # a == 0: whole plane is free
        if hint is not None:
            x = hint.copy()
        return x, tag, cond, resid
    if hint is not None:
        x = x + null * np.vdot(null, hint - x)
    return x, tag, cond, resid


def build_by_recursion(
    op: LagOperator, N: int, completion: MOPSequence | None = None
) -> tuple[list, RecursionReport]:
    """``P_0..P_N`` from the eigen-equation ``D P_n = P_n Delta_n``.

    Returns the polynomials and a per-step report.  ``completion`` supplies
    the orthogonality that fixes free directions at resonant steps; without
    it the minimum-norm solution is taken.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    steps: list[StepReport] = []
    polys: list[MatPoly] = []
    eig_res: list[float] = []
    for n in range(N + 1):
        tri = eigenvalue(op, n)
        lam, mu, nu = tri.lambda_n, tri.mu_n, tri.nu_n
        T = np.zeros((n + 1, 2, 2), complex)
        T[n] = I2
        hint_poly = completion.polys[n] if completion is not None and n <= completion.N else None
        for k in range(n - 1, -1, -1):
            delta_k = -k * op.U - op.V
            lift = (k + 1) * (op.C + k * I2)
            hint = hint_poly.coeffs[k] if hint_poly is not None else None
            g, tag, cond, res = _solve_step(mu * I2 - delta_k, lift @ T[k + 1][:, 1], None if hint is None else hint[:, 1])
            steps.append(StepReport(n, k, "G", tag, cond, res))
            f, tag, cond, res = _solve_step(
                lam * I2 - delta_k, lift @ T[k + 1][:, 0] - nu * g, None if hint is None else hint[:, 0]
            )
            steps.append(StepReport(n, k, "F", tag, cond, res))
            T[k] = np.column_stack([f, g])
        p = MatPoly(T)
        polys.append(p)
        eig_res.append(eigen_residual(op, p, tri.matrix))
    return polys, RecursionReport(steps, eig_res)


def eigen_residual(op: LagOperator, p: MatPoly, delta: np.ndarray) -> float:
    from .operators import apply

    d = (apply(op, p) - p.times_right(delta)).coeffs
    scale = 1.0 + max(norm_inf(c) for c in p.coeffs)
    return max(norm_inf(c) for c in d) / scale


@dataclass(frozen=True)
class FavardRow:
    n: int
    a_deviation: float  # ||A_n - S_{n-1}^-1 S_n|| / ||A_n||; 0 at n = 0
    hermitian_defect: float  # ||S_n B_n - (S_n B_n)*|| / ||S_n B_n||
    a_det: complex
    nu_residual: float  # s22 nu_n - (mu_n - lambda_n) conj(s12), relative


@dataclass(frozen=True, eq=False)
class FavardReport:
    rows: list
    v21_predicted: complex | None
    v21_actual: complex | None
    tol: float = FAVARD_RTOL

    @property
    def v21_residual(self) -> float:
        if self.v21_predicted is None:
            return 0.0
        return abs(self.v21_predicted - self.v21_actual) / (1 + abs(self.v21_actual))

    @property
    def violations(self) -> list[str]:
        out = []
        for r in self.rows:
            if r.a_deviation > self.tol:
                out.append(f"A_{r.n} != S_{r.n - 1}^-1 S_{r.n}")
            if r.hermitian_defect > self.tol:
                out.append(f"S_{r.n} B_{r.n} not Hermitian")
            if r.n and abs(r.a_det) == 0:
                out.append(f"A_{r.n} singular")
            if r.nu_residual > self.tol:
                out.append(f"nu identity fails at n = {r.n}")
        if self.v21_residual > self.tol:
            out.append("v21 identity fails")
        return out

    @property
    def ok(self) -> bool:
        return not self.violations


def favard_check(seq: MOPSequence, op: LagOperator | None = None) -> FavardReport:
    """Recurrence-coefficient conditions plus the Gram/eigenvalue identities.

    ``op`` defaults to the operator paired with ``seq.spec``; the two
    eigenvalue identities are skipped when neither is available.
    """
    if op is None and seq.spec is not None:
        op = weights.pair(seq.spec)
    rows = []
    for n in range(seq.N + 1):
        s = seq.grams[n]
        sb = s @ seq.B[n]
        herm = norm_inf(sb - adjoint(sb)) / max(norm_inf(sb), 1e-300)
        if n:
            a = seq.A[n]
            a_dev = norm_inf(a - inverse(seq.grams[n - 1]) @ s) / max(norm_inf(a), 1e-300)
            a_det = det(a)
        else:
            a_dev, a_det = 0.0, 1.0
        nu_res = 0.0
        if op is not None:
            tri = eigenvalue(op, n)
            lhs = s[1, 1] * tri.nu_n
            rhs = (tri.mu_n - tri.lambda_n) * np.conj(s[0, 1])
            # Homogeneous identity: scale by ||S_n|| (|nu_n| + |mu_n - lambda_n|).
            scale = norm_inf(s) * (abs(tri.nu_n) + abs(tri.mu_n - tri.lambda_n))
            nu_res = abs(lhs - rhs) / scale if scale > 0 else 0.0
        rows.append(FavardRow(n, a_dev, herm, complex(a_det), float(nu_res)))
    pred = act = None
    if op is not None:
        s0 = seq.grams[0]
        v = op.V[0, 0] - op.V[1, 1]
        pred = complex(-v * np.conj(s0[0, 1]) / s0[1, 1])
        act = complex(op.V[1, 0])
    return FavardReport(rows, pred, act)
