"""The ten acceptance criteria as plain functions.

Each returns a ``CriterionResult``; the test suite asserts on them and the
``selftest`` subcommand prints them as a table.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import classify as cl
from . import mops, quad, reduce, symmetry, weights
from . import operators as ops
from .linalg import I2, norm_inf

ORTHO_TOL = 1e-8
EIGEN_TOL = 1e-8
FAVARD_TOL = 1e-8
SYM_TOL = 1e-8
ROUTE_TOL = 1e-8
LAGUERRE_TOL = 1e-10
CLASSIFY_PARAM_TOL = 1e-7
WITNESS_TOL = 1e-8
ANCHOR_TOL = 1e-10
N_SUITE = 10


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    worst: float
    tol: float
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] criterion {self.number:2d} {self.name}: worst {self.worst:.3e} "
            f"(tol {self.tol:.0e}), {self.seconds:.2f} s{' - ' + self.detail if self.detail else ''}"
        )


def suite_grid() -> list:
    out = [
        weights.F1(a, be, b)
        for a in (-0.5, 0.0, 1.5)
        for be in (0.5, 1.0, 3.0)
        for b in (-1.0, 0.7)
    ]
    out += [weights.F2(a, b) for a in (-0.5, 1.0) for b in (0.3, -0.9)]
    out += [weights.F3(0.5), weights.F3(4.0)]
    return out


@functools.lru_cache(maxsize=None)
def _sequence(spec: weights.WeightSpec, N: int = N_SUITE) -> mops.MOPSequence:
    return mops.build_by_moments(spec, N)


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        return CriterionResult(res.number, res.name, res.passed, res.worst, res.tol,
                               time.perf_counter() - t0, res.detail)

    return wrapper


def _result(number, name, worst, tol, detail="", extra_ok=True):
    return CriterionResult(number, name, bool(worst <= tol and extra_ok), float(worst), tol, 0.0, detail)


@_timed
def criterion_1() -> CriterionResult:
    """Exact anchor for family 1 with (alpha, beta, b) = (0, 1, 1)."""
    t0 = time.perf_counter()
    spec = weights.F1(0, 1, 1)
    seq = mops.build_by_moments(spec, 1)
    s0 = np.array([[3, 1], [1, 1]])
    t01 = np.array([[-3, -0.5], [1, -0.5]])
    b0 = np.array([[3, 0.5], [-1, 0.5]])
    errs = [
        np.abs(seq.grams[0] - s0).max(),
        np.abs(seq.polys[1].coeffs[0] - t01).max(),
        np.abs(seq.polys[1].coeffs[1] - I2).max(),
        np.abs(seq.B[0] - b0).max(),
    ]
    op = ops.family1(0, 1, 1)
    delta1 = np.array([[-2, 0], [2, -1]])
    errs.append(np.abs(ops.eigenvalue(op, 1).matrix - delta1).max())
    errs.append(mops.eigen_residual(op, seq.polys[1], delta1))
    elapsed = time.perf_counter() - t0
    return _result(1, "closed-form anchor", max(errs), ANCHOR_TOL, f"built in {elapsed:.3f} s", elapsed < 1.0)


@_timed
def criterion_2(target: float = quad.DEFAULT_TARGET, budget: int | None = None) -> CriterionResult:
    """Orthogonality of the moment-built polynomials, checked by quadrature."""
    worst = 0.0
    where = ""
    for spec in suite_grid():
        seq = _sequence(spec)
        g = quad.gram_table(seq.polys, spec, target, budget).value
        d = [norm_inf(g[i, i]) for i in range(len(seq.polys))]
        for i in range(len(d)):
            for j in range(len(d)):
                if i != j:
                    r = norm_inf(g[i, j]) / math.sqrt(d[i] * d[j])
                    if r > worst:
                        worst, where = r, f"{spec.to_json()} n={i} m={j}"
    return _result(2, "orthogonality suite", worst, ORTHO_TOL, where)


@_timed
def criterion_3() -> CriterionResult:
    worst = 0.0
    for spec in suite_grid():
        seq = _sequence(spec)
        op = weights.pair(spec)
        for n, p in enumerate(seq.polys):
            worst = max(worst, mops.eigen_residual(op, p, ops.eigenvalue(op, n).matrix))
    return _result(3, "eigen-equation suite", worst, EIGEN_TOL)


@_timed
def criterion_4() -> CriterionResult:
    worst = 0.0
    singular = []
    for spec in suite_grid():
        rep = mops.favard_check(_sequence(spec))
        for r in rep.rows:
            worst = max(worst, r.a_deviation, r.hermitian_defect, r.nu_residual)
            if r.n and abs(r.a_det) < 1e-300:
                singular.append(f"A_{r.n}")
        worst = max(worst, rep.v21_residual)
    return _result(4, "Favard suite", worst, FAVARD_TOL, ", ".join(singular), not singular)


def symmetry_pairs() -> list:
    """(label, operator builder, parameter dict, weight) for every paired family."""
    raw42 = dict(u=1.3, c21=0.4, c22=1.5)
    raw43 = dict(u=0.8, c21=1.1)
    raw44 = dict(u=1.7, c22=1.2)
    raw52 = dict(u=1.1, c21=0.3 + 0.2j, c22=1.5)
    return [
        ("F1", ops.family1, dict(alpha=0.5, beta=1.5, b=0.7), weights.F1(0.5, 1.5, 0.7)),
        ("F2", ops.family2, dict(alpha=0.3, b=-0.4), weights.F2(0.3, -0.4)),
        ("F3", ops.family3, dict(beta=2.5), weights.F3(2.5)),
        ("RawThm42", ops.raw_thm42, raw42, weights.WeightSpec.make("RawThm42", gamma=1.0, **raw42)),
        ("RawThm43", ops.raw_thm43, raw43, weights.WeightSpec.make("RawThm43", gamma=1.0, **raw43)),
        ("RawThm44", ops.raw_thm44, raw44, weights.WeightSpec.make("RawThm44", **raw44)),
        ("RawThm52", ops.raw_thm52, raw52, weights.WeightSpec.make("RawThm52", gamma=1.0, **raw52)),
    ]


def perturbations(op: ops.LagOperator, delta: float = 1e-3):
    """Every single-entry perturbation of C, U, V (real and imaginary parts)."""
    for name in "CUV":
        for i in range(2):
            for j in range(2):
                for d in (delta, 1j * delta):
                    mats = {k: getattr(op, k).copy() for k in "CUV"}
                    mats[name][i, j] += d
                    yield f"{name}[{i},{j}]+{d}", ops.LagOperator(**mats)


@_timed
def criterion_5() -> CriterionResult:
    worst = 0.0
    insensitive = []
    undecayed = []
    for label, build, params, spec in symmetry_pairs():
        op = build(**params)
        rep = symmetry.check(op, spec, tol=SYM_TOL)
        worst = max(worst, rep.max_residual)
        if not rep.boundary.vanishes:
            undecayed.append(label)
        perturbed = list(perturbations(op))
        for k, v in params.items():
            perturbed.append((f"{k}+1e-3", build(**{**params, k: v + 1e-3})))
        for what, pop in perturbed:
            if symmetry.check(pop, spec, tol=SYM_TOL).max_residual <= 1e-5:
                insensitive.append(f"{label}:{what}")
    detail = "; ".join(
        x for x in (
            "insensitive: " + ", ".join(insensitive) if insensitive else "",
            "boundary not decaying: " + ", ".join(undecayed) if undecayed else "",
        ) if x
    )
    return _result(5, "symmetry-equation suite", worst, SYM_TOL, detail, not insensitive and not undecayed)


def route_specs() -> list:
    return [weights.F1(0, 1, 1), weights.F1(1.5, 3.0, -1.0), weights.F2(1.0, -0.9), weights.F2(-0.5, 0.3),
            weights.F3(0.5), weights.F3(4.0)]


@_timed
def criterion_6() -> CriterionResult:
    worst = 0.0
    missing = []
    for spec in route_specs():
        seq = _sequence(spec)
        polys, rep = mops.build_by_recursion(weights.pair(spec), N_SUITE, seq)
        if not rep.consistent:
            missing.append(f"{spec.family} inconsistent")
        for p, q in zip(polys, seq.polys):
            worst = max(worst, float(np.abs(p.coeffs - q.coeffs).max()) / (1 + float(np.abs(q.coeffs).max())))
        res = {(s.n, s.k, s.column) for s in rep.resonances()}
        if spec.family == "F1":
            need = {(n, n - 1, "G") for n in range(1, N_SUITE + 1)}
        elif spec.family == "F2":
            need = {(n, n - 2, "G") for n in range(2, N_SUITE + 1)}
        else:
            need = set()
            if res:
                missing.append("F3 has resonances")
        if not need <= res:
            missing.append(f"{spec.family} resonances {sorted(need - res)[:3]}")
    return _result(6, "route equivalence", worst, ROUTE_TOL, "; ".join(missing), not missing)


@_timed
def criterion_7() -> CriterionResult:
    worst = 0.0
    for alpha in (-0.5, 0.0, 2.0):
        seq = _sequence(weights.diagonal(alpha, alpha))
        for n in range(N_SUITE + 1):
            bn = (2 * n + alpha + 1) * I2
            worst = max(worst, np.abs(seq.B[n] - bn).max() / max(1.0, abs(bn[0, 0])))
            if n:
                an = n * (n + alpha) * I2
                worst = max(worst, np.abs(seq.A[n] - an).max() / max(1.0, abs(an[0, 0])))
    return _result(7, "scalar-embedding oracle", float(worst), LAGUERRE_TOL)


def random_conjugator(rng: np.random.Generator, max_cond: float = 10.0) -> np.ndarray:
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if np.linalg.cond(m) <= max_cond:
            return m


def random_family_params(rng: np.random.Generator, fam: str) -> dict:
    if fam == "F1":
        a = rng.uniform(-0.9, 3.0)
        return dict(alpha=a, beta=rng.uniform(-1 - a + 0.05, 5.0), b=rng.choice([-1, 1]) * rng.uniform(0.2, 3.0))
    if fam == "F2":
        return dict(alpha=rng.uniform(-0.9, 3.0), b=rng.choice([-1, 1]) * rng.uniform(0.05, 0.95))
    return dict(beta=rng.uniform(0.05, 10.0))


REFUSAL_CORPUS = {
    "Prop4.1-u-or-v-zero": ([[1.3, 0], [0.4, 2.1]], [[0, 0], [1, 0]], [[1, 0], [0, 0]]),
    "Thm4.2-v-eq-minus-u": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [1, 1]], [[-1, 0], [0, 0]]),
    "Prop5.1-u-zero-or-v-nonpositive": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [0, 1]], [[2, 0], [0, 2]]),
    "Prop5.3-scalar-v-neq-abs-u": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [0, 1]], [[3, 0], [0, 0]]),
    "Prop6.1-u1-or-u2-zero": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [0, 0]], [[1, 0], [0, 0]]),
    "Thm6.3-distinct-eigenvalues": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [0, 3]], [[1, 0], [0, 0]]),
    "Unmatched-constraints": ([[1.3, 0], [0.4, 2.1]], [[1, 0], [1, 1]], [[1, 0], [0, 0]]),
}


def roundtrip_trial(rng: np.random.Generator, fam: str) -> tuple[float, float, str]:
    """One disguised canonical operator; returns (parameter error, witness error, failure note)."""
    params = random_family_params(rng, fam)
    canon = ops.family(fam, **params)
    u = rng.uniform(0.1, 10.0)
    shift = complex(rng.normal(), rng.normal())
    raw = cl.disguise(canon, random_conjugator(rng), u, shift)
    res = cl.classify(raw.C, raw.U, raw.V)
    if res.verdict != "Family" + fam[-1]:
        return math.inf, math.inf, f"{fam} {params} -> {res.verdict} {res.reason} {res.notes}"
    perr = max(abs(res.params[k] - params[k]) for k in params if k != "b")
    rec = res.canonical()
    werr = cl.equivalence_witness(res, raw).distance(rec) / (1 + rec.scale())
    if "b" in params:
        # b is a gauge: the input's b is reached from the reported one by diag(d, 1).
        d = params["b"] / res.params["b"]
        werr = max(werr, ops.conjugate(rec, np.diag([d, 1.0])).distance(canon) / (1 + canon.scale()))
    return perr, werr, ""


@_timed
def criterion_8(seed: int = 20240601, trials: int = 100) -> CriterionResult:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    perr = werr = 0.0
    failures = []
    for fam in ("F1", "F2", "F3"):
        for _ in range(trials):
            p, w, note = roundtrip_trial(rng, fam)
            perr, werr = max(perr, p), max(werr, w)
            if note:
                failures.append(note)
    for tag, (c, u, v) in REFUSAL_CORPUS.items():
        got = cl.classify(c, u, v)
        if got.reason != tag:
            failures.append(f"{tag} -> {got.verdict} {got.reason}")
    elapsed = time.perf_counter() - t0
    ok = not failures and werr <= WITNESS_TOL and elapsed < 30.0
    detail = f"witness {werr:.1e}, {elapsed:.2f} s" + ("; " + "; ".join(failures[:3]) if failures else "")
    return _result(8, "classification roundtrip", perr, CLASSIFY_PARAM_TOL, detail, ok)


@_timed
def criterion_9() -> CriterionResult:
    wrong = []
    for spec in (weights.F1(0, 1, 1), weights.F2(0, 0.5), weights.F3(4.0)):
        w = reduce.weight_commutant(spec)
        m = reduce.mop_commutant(_sequence(spec, 6))
        if w.verdict != "ScalarOnly" or m.verdict != "ScalarOnly":
            wrong.append(f"{spec.family}: {w.verdict}/{m.verdict}")
    diag = weights.diagonal(0.5, 1.5)
    w = reduce.weight_commutant(diag)
    m = reduce.mop_commutant(_sequence(diag, 6))
    if w.verdict != "NonScalar" or m.verdict != "NonScalar":
        wrong.append(f"diagonal: {w.verdict}/{m.verdict}")
    return _result(9, "irreducibility probes", float(len(wrong)), 0.0, "; ".join(wrong))


@_timed
def criterion_10(target: float = quad.DEFAULT_TARGET, budget: int | None = None) -> CriterionResult:
    worst = 0.0
    for beta in (0.5, 4.0):
        spec = weights.F3(beta)
        exact = 2 * math.sqrt(math.pi) * math.exp(beta / 4)
        by_quad = quad.moment_by_quadrature(spec, 0, target, budget).value[1, 1]
        closed = weights.moment(spec, 0, "closed")[1, 1]
        worst = max(worst, abs(by_quad - exact) / exact, abs(closed - exact) / exact)
    return _result(10, "family-3 moment anchor", worst, ANCHOR_TOL)


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_all(seed: int | None = None, target: float | None = None, budget: int | None = None) -> list:
    out = []
    for fn in CRITERIA:
        kwargs = {}
        if fn is criterion_8 and seed is not None:
            kwargs["seed"] = seed
        if fn in (criterion_2, criterion_10):
            if target is not None:
                kwargs["target"] = target
            if budget is not None:
                kwargs["budget"] = budget
        out.append(fn(**kwargs))
    return out
