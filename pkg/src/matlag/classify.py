"""Decide which canonical family, if any, a raw operator ``(C, U, V)`` belongs to.

The pipeline brings the operator to a normal form by a sequence of
equivalences that do not change the orthogonal polynomials up to
conjugation: a basis change putting ``U`` in Jordan form, a shift of ``V``
making ``v22 = 0``, a time scale making the eigenvalue of ``U`` equal to 1,
and lower-triangular gauges.  The remaining entries are then matched
against the admissible patterns; anything else is refused with a tag
naming the obstruction.

The parameter ``b`` of the first two families is not an invariant: the
diagonal conjugation ``diag(d, 1)`` maps the family with ``b`` to the one
with ``d b``.  The classifier therefore reports the representative with
``b = 1`` (family 1) or ``b = 1/2`` (family 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .linalg import I2, as_cmat, inverse, jordan_case, norm_inf
from .operators import LagOperator, ParameterOutOfDomain

REASON_TAGS = (
    "Prop4.1-u-or-v-zero",
    "Thm4.2-v-eq-minus-u",
    "Prop5.1-u-zero-or-v-nonpositive",
    "Prop5.3-scalar-v-neq-abs-u",
    "Prop6.1-u1-or-u2-zero",
    "Thm6.3-distinct-eigenvalues",
    "Unmatched-constraints",
)
FAMILY_VERDICTS = ("Family1", "Family2", "Family3")
PATTERN_RTOL = 1e-8
WITNESS_RTOL = 1e-8
B_FAMILY1 = 1.0
B_FAMILY2 = 0.5


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    ok: bool


@dataclass(frozen=True, eq=False)
class Classification:
    verdict: str
    params: dict = field(default_factory=dict)
    reason: str | None = None
    M: np.ndarray = field(default_factory=lambda: I2.copy())
    u_scale: float = 1.0
    v22_shift: complex = 0.0
    diagnostics: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def is_family(self) -> bool:
        return self.verdict in FAMILY_VERDICTS

    def canonical(self) -> LagOperator:
        if not self.is_family:
            raise ValueError(f"no canonical operator for verdict {self.verdict}")
        return ops.family("F" + self.verdict[-1], **self.params)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "params": self.params,
            "reason": self.reason,
            "M": [[float(z.real), float(z.imag)] for z in self.M.reshape(-1)],
            "u_scale": self.u_scale,
            "v22_shift": [float(np.real(self.v22_shift)), float(np.imag(self.v22_shift))],
            "diagnostics": [{"name": c.name, "value": c.value, "ok": c.ok} for c in self.diagnostics],
            "notes": list(self.notes),
        }


class Refusal(Exception):
    """A refusal verdict raised inside the pipeline; ``tag`` is one of ``REASON_TAGS``."""

    def __init__(self, tag: str, note: str | None = None):
        self.tag = tag
        self.note = note


def normalize_v22(op: LagOperator) -> tuple[LagOperator, complex]:
    """Subtract ``v22 I`` from ``V``; returns the new operator and the shift."""
    s = complex(op.V[1, 1])
    if s == 0:
        return op, 0j
    return ops.shift(op, -s), s


def eliminate_v21(op: LagOperator, tol: float = PATTERN_RTOL) -> tuple[LagOperator, np.ndarray]:
    """Zero ``V[1,0]`` by ``M = [[v/v21, 0], [1, v/v21]]``, which commutes with a Jordan ``U``.

    Raises ``Refusal`` when ``v21 != 0`` but ``v = 0``: the Gram-matrix
    identity ``v21 = -v conj(s12)/s22`` then has no solution.
    """
    v, v21 = op.V[0, 0], op.V[1, 0]
    scale = 1.0 + norm_inf(op.V)
    if abs(v21) <= tol * scale:
        return op, I2.copy()
    if abs(v) <= tol * scale:
        raise Refusal("Prop4.1-u-or-v-zero", "v21 != 0 requires v != 0")
    m = v / v21
    M = np.array([[m, 0], [1, m]], dtype=complex)
    return ops.conjugate(op, M), M


def _close(a: complex, b: complex, scale: float) -> bool:
    return abs(a - b) <= PATTERN_RTOL * scale


def _real(z: complex, scale: float) -> bool:
    return abs(np.imag(z)) <= PATTERN_RTOL * scale


def classify(C, U, V) -> Classification:
    """Full decision procedure on raw matrices."""
    op = LagOperator(C, U, V)
    diags: list[Check] = []
    notes: list[str] = []
    try:
        return _classify(op, diags, notes)
    except Refusal as r:
        if r.note:
            notes.append(r.note)
        return Classification("NotSymmetrizable", reason=r.tag, diagnostics=diags, notes=notes)


def _classify(op: LagOperator, diags: list, notes: list) -> Classification:
    jc = jordan_case(op.U)
    diags.append(Check("discriminant(U)", float(abs(jc.discriminant)), True))
    uscale = 1.0 + norm_inf(op.U)
    if jc.tag == "DistinctEigenvalues":
        u1, u2 = jc.eigenvalues
        if min(abs(u1), abs(u2)) <= PATTERN_RTOL * uscale:
            raise Refusal("Prop6.1-u1-or-u2-zero")
        raise Refusal("Thm6.3-distinct-eigenvalues")

    u = jc.eigenvalues[0]
    if not _real(u, uscale):
        raise Refusal("Unmatched-constraints", "eigenvalue of U is not real")
    u = float(np.real(u))
    J = jc.transform
    cur = ops.conjugate(op, J)
    if jc.tag == "Scalar":
        return _scalar_case(op, cur, J, u, diags, notes)
    return _jordan_case(op, cur, J, u, diags, notes)


def _jordan_case(raw, cur, J, u, diags, notes) -> Classification:
    vscale = 1.0 + norm_inf(cur.V)
    if abs(cur.V[0, 1]) > PATTERN_RTOL * vscale:
        raise Refusal("Unmatched-constraints", "V is not lower triangular in the Jordan basis of U")
    cur, s = normalize_v22(cur)
    v = cur.V[0, 0]
    if not _real(v, vscale):
        raise Refusal("Unmatched-constraints", "v is not real")
    if abs(u) <= PATTERN_RTOL * (1.0 + norm_inf(raw.U)):
        raise Refusal("Prop4.1-u-or-v-zero", "u = 0")
    if abs(v) <= PATTERN_RTOL * vscale:
        raise Refusal("Prop4.1-u-or-v-zero", "v = 0")
    if u < 0:
        # Every admissible pattern needs u > 0 (e^{-tu} must decay).
        if _close(v, -u, vscale):
            raise Refusal("Thm4.2-v-eq-minus-u")
        raise Refusal("Unmatched-constraints", "u < 0")
    cur = ops.rescale_time(cur, u)
    # Restore the unit subdiagonal of U.
    g = np.diag([1.0 / cur.U[1, 0], 1.0]).astype(complex)
    cur = ops.conjugate(cur, g)
    cur, e = eliminate_v21(cur)
    M = J @ g @ e
    v = float(np.real(cur.V[0, 0]))
    c = cur.C
    cs = 1.0 + norm_inf(c)
    diags.append(Check("v/u", v, True))

    if _close(v, -1.0, 1.0 + abs(v)):
        raise Refusal("Thm4.2-v-eq-minus-u")
    if not all(_real(z, cs) for z in c.reshape(-1)):
        raise Refusal("Unmatched-constraints", "C has non-real entries in the normal form")
    c = c.real
    c11, c12, c21, c22 = c[0, 0], c[0, 1], c[1, 0], c[1, 1]

    if _close(v, 1.0, 1.0 + abs(v)):
        _need(diags, "c12 = 0", abs(c12), cs)
        if _close(c21, c22, cs):
            raise Refusal("Unmatched-constraints", "c21 = c22")
        _need(diags, "c11 = c22 + 2 + 2c22/(c21 - c22)", c11 - (c22 + 2 + 2 * c22 / (c21 - c22)), cs)
        alpha = c22 - 1
        beta = 2 * c21 / (c21 - c22)
        params = {"alpha": float(alpha), "beta": float(beta), "b": B_FAMILY1}
        b = B_FAMILY1
        final = np.array([[b * (beta - 2), 0], [b * (alpha + 1), 1]], dtype=complex)
        return _finish(raw, "Family1", params, M @ final, u, s, diags, notes)
    if c12 == 0 or abs(c12) <= PATTERN_RTOL * cs:
        _need(diags, "v = 2u", v - 2.0, 1.0 + abs(v))
        _need(diags, "c11 = c21 u + 4", c11 - (c21 + 4), cs)
        _need(diags, "c22 = c21 u", c22 - c21, cs)
        alpha = c21 - 1
        params = {"alpha": float(alpha), "b": B_FAMILY2}
        b = B_FAMILY2
        final = np.array([[4 * b * (alpha + 2), 0], [b * (alpha + 2) * (alpha + 1), 1]], dtype=complex)
        return _finish(raw, "Family2", params, M @ final, u, s, diags, notes)
    _need(diags, "v = u/2", v - 0.5, 1.0 + abs(v))
    _need(diags, "c11 = 2 - c22", c11 - (2 - c22), cs)
    _need(diags, "c12 = u(1 - 2c22)/2", c12 - (1 - 2 * c22) / 2, cs)
    _need(diags, "c21 = (2c22 - 3)/(2u)", c21 - (2 * c22 - 3) / 2, cs)
    params = {"beta": float(4 * c22 - 2)}
    final = np.array([[-1, 0], [1, 1]], dtype=complex)
    return _finish(raw, "Family3", params, M @ final, u, s, diags, notes)


def _scalar_case(raw, cur, J, u, diags, notes) -> Classification:
    # Any basis change keeps U scalar: diagonalize V with the larger
    # eigenvalue first so that v = v11 - v22 > 0.
    vscale = 1.0 + norm_inf(cur.V)
    jv = jordan_case(cur.V)
    if jv.tag != "DistinctEigenvalues":
        raise Refusal("Prop5.1-u-zero-or-v-nonpositive", "V has a repeated eigenvalue, so v = 0")
    v1, v2 = jv.eigenvalues
    if not _real(v1 - v2, vscale):
        raise Refusal("Unmatched-constraints", "eigenvalues of V differ by a non-real number")
    P = jv.transform
    cur = ops.conjugate(cur, P)
    cur, s = normalize_v22(cur)
    v = float(np.real(cur.V[0, 0]))
    M = J @ P
    if abs(u) <= PATTERN_RTOL * (1.0 + norm_inf(raw.U)):
        raise Refusal("Prop5.1-u-zero-or-v-nonpositive", "u = 0")
    if not _close(abs(v), abs(u), 1.0 + abs(v) + abs(u)):
        raise Refusal("Prop5.3-scalar-v-neq-abs-u")
    if u < 0:
        raise Refusal("Unmatched-constraints", "v = -u: the (1,1) weight entry cannot be integrable")
    cur = ops.rescale_time(cur, u)
    c = cur.C
    cs = 1.0 + norm_inf(c)
    _need(diags, "c12 = 0", abs(c[0, 1]), cs)
    _need(diags, "c11 = c22 + 2", c[0, 0] - c[1, 1] - 2, cs)
    if not _real(c[1, 1], cs):
        raise Refusal("Unmatched-constraints", "c22 is not real")
    c22 = float(np.real(c[1, 1]))
    c21 = c[1, 0]
    if abs(c21) <= PATTERN_RTOL * cs:
        diags.append(Check("c21 = 0", float(abs(c21)), True))
        return Classification(
            "Reducible", {}, None, M, u, s, diags,
            notes + ["C, U and V are simultaneously diagonal"],
        )
    alpha = c22 - 1
    b = B_FAMILY1
    q = b * (alpha + 1)
    final = np.array([[2 * q / c21, 0], [q, 1]], dtype=complex)
    params = {"alpha": float(alpha), "beta": 2.0, "b": b}
    return _finish(raw, "Family1", params, M @ final, u, s, diags, notes)


def _need(diags: list, name: str, residual, scale: float):
    r = float(abs(residual))
    ok = r <= PATTERN_RTOL * scale
    diags.append(Check(name, r, ok))
    if not ok:
        raise Refusal("Unmatched-constraints", f"{name} fails (residual {r:.3e})")


def _finish(raw, verdict, params, M, u, s, diags, notes) -> Classification:
    try:
        canon = ops.family("F" + verdict[-1], **params)
    except ParameterOutOfDomain as e:
        diags.append(Check("parameter domain", 0.0, False))
        raise Refusal("Unmatched-constraints", "recovered parameters violate " + "; ".join(e.violations))
    result = Classification(verdict, params, None, M, u, s, diags, notes)
    res = equivalence_witness(result, raw).distance(canon) / (1.0 + canon.scale())
    ok = res <= WITNESS_RTOL
    diags.append(Check("witness residual", res, ok))
    if not ok:
        raise Refusal("Unmatched-constraints", f"normal form does not replay (residual {res:.3e})")
    if verdict != "Family3":
        notes.append("b is fixed by a diagonal gauge; any nonzero b is equivalent")
    return result


def equivalence_witness(result: Classification, op: LagOperator) -> LagOperator:
    """Replay shift, time scale and conjugation on ``op``."""
    out = ops.shift(op, -result.v22_shift)
    out = ops.rescale_time(out, result.u_scale)
    return ops.conjugate(out, result.M)


def disguise(op: LagOperator, M, u: float, shift: complex = 0.0) -> LagOperator:
    """Inverse of the normalization: time scale ``u``, conjugation by ``M`` and a ``V`` shift.

    ``classify`` applied to the result recovers ``op`` with ``u_scale = u``.
    """
    scaled = LagOperator(op.C, op.U * u, op.V * u)
    return ops.shift(ops.conjugate(scaled, inverse(as_cmat(M))), shift)
