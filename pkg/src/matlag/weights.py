"""Closed-form matrix weights on (0, inf) with analytic derivatives and moments.

Every entry of every weight handled here is a finite sum of terms::

    coef * t**power * exp(-rate * t) * h(root * sqrt(t)),   h in {1, cosh, sinh}

That class is closed under d/dt, so first and second derivatives are exact,
and its moments have closed forms: Gamma functions for plain powers, and
shifted Gaussian moments (after ``t = s**2``) for the hyperbolic terms.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable

import mpmath
import numpy as np

from . import operators as ops
from .linalg import as_cmat
from .operators import LagOperator, ParameterOutOfDomain

ENTRIES = ((0, 0), (0, 1), (1, 0), (1, 1))


class NonPositiveT(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    coef: complex
    power: float
    rate: float
    root: float = 0.0
    kind: str = "pow"  # "pow" | "cosh" | "sinh"

    def derivative(self) -> list["Term"]:
        out = []
        if self.power != 0:
            out.append(Term(self.coef * self.power, self.power - 1, self.rate, self.root, self.kind))
        if self.rate != 0:
            out.append(Term(-self.coef * self.rate, self.power, self.rate, self.root, self.kind))
        if self.kind != "pow" and self.root != 0:
            other = "sinh" if self.kind == "cosh" else "cosh"
            out.append(Term(self.coef * self.root / 2, self.power - 0.5, self.rate, self.root, other))
        return out

    def __call__(self, t: np.ndarray) -> np.ndarray:
        logpart = self.power * np.log(t) - self.rate * t
        if self.kind == "pow":
            return self.coef * np.exp(logpart)
        x = self.root * np.sqrt(t)
        small = np.abs(x) < 300
        xs = np.where(small, x, 0.0)
        h = np.cosh(xs) if self.kind == "cosh" else np.sinh(xs)
        direct = np.exp(logpart) * h
        sign = 1.0 if self.kind == "cosh" else -1.0
        big = 0.5 * (np.exp(logpart + np.abs(x)) + sign * np.exp(logpart - np.abs(x)))
        big = big * (np.sign(x) if self.kind == "sinh" else 1.0)
        return self.coef * np.where(small, direct, big)

    def moment_mp(self, k: int):
        """Closed form of ``int_0^inf t^k * term dt`` or ``None`` when unavailable."""
        q = mpmath.mpf(self.power) + k
        a = mpmath.mpf(self.rate)
        coef = mpmath.mpc(self.coef)
        if a <= 0:
            return None
        if self.kind == "pow":
            if q <= -1:
                return None
            return coef * mpmath.gamma(q + 1) / a ** (q + 1)
        m2 = 2 * self.power + 1 + 2 * k
        m = int(round(m2))
        if abs(m2 - m) > 1e-12 or m < 0:
            return None
        if (m % 2 == 0) != (self.kind == "cosh"):
            return None
        return coef * _shifted_gaussian_moment(m, a, mpmath.mpf(self.root))


def _shifted_gaussian_moment(m: int, a, c):
    """``int_R s^m exp(-a s^2 + c s) ds``."""
    shift = c / (2 * a)
    total = mpmath.mpf(0)
    for j in range(0, m + 1, 2):
        total += mpmath.binomial(m, j) * shift ** (m - j) * mpmath.gamma(mpmath.mpf(j + 1) / 2) / a ** (mpmath.mpf(j + 1) / 2)
    return mpmath.exp(c * c / (4 * a)) * total


def _poly_terms(coeffs: Iterable[complex], power: float, rate: float) -> list[Term]:
    """Terms of ``t**power * exp(-rate t) * sum_j coeffs[j] t**j``."""
    return [Term(complex(c), power + j, rate) for j, c in enumerate(coeffs) if c != 0]


FAMILY_PARAMS = {
    "F1": ("alpha", "beta", "b"),
    "F2": ("alpha", "b"),
    "F3": ("beta",),
    "RawThm42": ("u", "c21", "c22", "gamma"),
    "RawThm43": ("u", "c21", "gamma"),
    "RawThm44": ("u", "c22"),
    "RawThm52": ("u", "c21", "c22", "gamma"),
    "Diagonal": ("alpha1", "alpha2"),
}


@dataclass(frozen=True)
class WeightSpec:
    """A named closed-form weight, optionally transformed to ``M* W M``.

    ``params`` is stored as a sorted tuple of ``(name, value)`` pairs so that
    specs hash and compare by value (the moment cache relies on this).
    """

    family: str
    params: tuple
    congruence: tuple | None = None

    @classmethod
    def make(cls, family: str, **params) -> "WeightSpec":
        if family not in FAMILY_PARAMS:
            raise KeyError(f"unknown weight family {family!r}")
        names = FAMILY_PARAMS[family]
        missing = [n for n in names if n not in params]
        extra = [n for n in params if n not in names]
        if missing or extra:
            raise TypeError(f"{family} takes {names}; missing {missing}, unexpected {extra}")
        vals = []
        for n in names:
            v = params[n]
            if isinstance(v, complex) and v.imag == 0:
                v = v.real
            vals.append((n, v if isinstance(v, complex) else float(v)))
        return cls(family, tuple(vals))

    def p(self, name: str):
        return dict(self.params)[name]

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def congruent(self, m) -> "WeightSpec":
        """The weight ``M* W M``."""
        m = as_cmat(m)
        if self.congruence is not None:
            m = np.array(self.congruence).reshape(2, 2) @ m
        return WeightSpec(self.family, self.params, tuple(complex(z) for z in m.reshape(-1)))

    def to_json(self) -> dict:
        out: dict = {"family": self.family}
        for k, v in self.params:
            out[k] = [v.real, v.imag] if isinstance(v, complex) else v
        if self.congruence is not None:
            out["congruence"] = [[z.real, z.imag] for z in self.congruence]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "WeightSpec":
        fam = obj["family"]
        if fam not in FAMILY_PARAMS:
            raise KeyError(f"unknown weight family {fam!r}")
        kw = {}
        for n in FAMILY_PARAMS[fam]:
            v = obj[n]
            kw[n] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else float(v)
        spec = cls.make(fam, **kw)
        if obj.get("congruence") is not None:
            c = np.asarray(obj["congruence"], dtype=float)
            spec = spec.congruent((c[:, 0] + 1j * c[:, 1]).reshape(2, 2))
        return spec

    @property
    def rate(self) -> float:
        """Exponential decay rate shared by all terms."""
        return float(self.param_dict.get("u", 1.0)) if self.family.startswith("Raw") else 1.0


def F1(alpha, beta, b) -> WeightSpec:
    return WeightSpec.make("F1", alpha=alpha, beta=beta, b=b)


def F2(alpha, b) -> WeightSpec:
    return WeightSpec.make("F2", alpha=alpha, b=b)


def F3(beta) -> WeightSpec:
    return WeightSpec.make("F3", beta=beta)


def diagonal(alpha1, alpha2) -> WeightSpec:
    """``diag(e^-t t^alpha1, e^-t t^alpha2)``; test weight with known reducible structure."""
    return WeightSpec.make("Diagonal", alpha1=alpha1, alpha2=alpha2)


def validate(spec: WeightSpec) -> list[str]:
    """Violated parameter constraints; empty when ``spec`` is admissible."""
    p = spec.param_dict
    bad: list[str] = []
    f = spec.family
    if f == "F1":
        a, be, b = p["alpha"], p["beta"], p["b"]
        if not a > -1:
            bad.append("alpha <= -1")
        if not be > -1 - a:
            bad.append("beta <= -1-alpha")
        if b == 0:
            bad.append("b == 0")
    elif f == "F2":
        a, b = p["alpha"], p["b"]
        if not a > -1:
            bad.append("alpha <= -1")
        if abs(b) >= 1:
            bad.append("|b| >= 1")
        if b == 0:
            bad.append("b == 0")
    elif f == "F3":
        if not p["beta"] > 0:
            bad.append("beta <= 0")
    elif f == "RawThm42":
        u, c21, c22, g = p["u"], p["c21"], p["c22"], p["gamma"]
        if not u > 0:
            bad.append("u <= 0")
        if not c22 > 0:
            bad.append("c22 <= 0")
        if c22 == c21 * u:
            bad.append("c22 == c21*u")
        elif not c22 > 2 * c21 * u / (c22 - c21 * u):
            bad.append("c22 <= 2*c21*u/(c22-c21*u)")
        if not g > 0:
            bad.append("gamma <= 0")
    elif f == "RawThm43":
        u, c21, g = p["u"], p["c21"], p["gamma"]
        if not u > 0:
            bad.append("u <= 0")
        if not c21 > 0:
            bad.append("c21 <= 0")
        if u > 0 and not g > u * u / (16 * (c21 * u + 1) ** 2):
            bad.append("gamma <= u^2/(16(c21*u+1)^2)")
    elif f == "RawThm44":
        if not p["u"] > 0:
            bad.append("u <= 0")
        if not p["c22"] > 0.5:
            bad.append("c22 <= 1/2")
    elif f == "RawThm52":
        u, c21, c22, g = p["u"], p["c21"], p["c22"], p["gamma"]
        if not c22 > 0:
            bad.append("c22 <= 0")
        if not u > 0:
            bad.append("u <= 0")
        if c22 > 0 and not g > abs(c21) ** 2 * u * u / (4 * c22 * c22):
            bad.append("gamma <= |c21|^2 u^2/(4 c22^2)")
    elif f == "Diagonal":
        for n in ("alpha1", "alpha2"):
            if not p[n] > -1:
                bad.append(f"{n} <= -1")
    if spec.congruence is not None:
        m = np.array(spec.congruence).reshape(2, 2)
        if abs(np.linalg.det(m)) <= 1e-12 * max(1.0, float(np.abs(m).sum(axis=1).max()) ** 2):
            bad.append("congruence matrix singular")
    return bad


def _base_terms(spec: WeightSpec) -> dict:
    p = spec.param_dict
    f = spec.family
    if f == "F1":
        a, be, b = p["alpha"], p["beta"], p["b"]
        return {
            (0, 0): [Term(1, a + be, 1), Term(b * b, a + 2, 1)],
            (0, 1): [Term(b, a + 1, 1)],
            (1, 0): [Term(b, a + 1, 1)],
            (1, 1): [Term(1, a, 1)],
        }
    if f == "F2":
        a, b = p["alpha"], p["b"]
        s = a + 2
        off = _poly_terms([0, 2 * b * s, -b], a, 1)
        return {
            (0, 0): _poly_terms([0, 0, 4 * b * b * s * s, -4 * b * b * s, 1], a, 1),
            (0, 1): off,
            (1, 0): list(off),
            (1, 1): [Term(1, a, 1)],
        }
    if f == "F3":
        be = p["beta"]
        c = math.sqrt(be)
        off = [Term(4 / c, 0.0, 1, c, "sinh")]
        return {
            (0, 0): [Term(8 / be, 0.5, 1, c, "cosh")],
            (0, 1): off,
            (1, 0): list(off),
            (1, 1): [Term(2, -0.5, 1, c, "cosh")],
        }
    if f == "RawThm42":
        u, c21, c22, g = p["u"], p["c21"], p["c22"], p["gamma"]
        a0 = c22 - 1
        e = 2 * c21 * u / (c21 * u - c22)
        k = (c22 - c21 * u) / (2 * u * c22)
        q = np.array([k * c22, -k * u])  # q(t) = k (c22 - t u)
        off = _poly_terms(q, a0, u)
        return {
            (0, 0): [Term(g, a0 + e, u)] + _poly_terms(np.convolve(q, q), a0, u),
            (0, 1): off,
            (1, 0): list(off),
            (1, 1): [Term(1, a0, u)],
        }
    if f == "RawThm43":
        u, c21, g = p["u"], p["c21"], p["gamma"]
        a0 = c21 * u - 1
        A = c21 * u + 1
        # (c21 - 2t)(c21 A + 2t(t u - A)) / (16 A)
        poly = np.convolve([c21, -2], [c21 * A, -2 * A, 2 * u]) / (16 * A)
        poly = np.concatenate([poly, [0.0, 0.0]])
        poly[4] += g
        off = _poly_terms([-c21 / 4, 0.5, -u / (4 * A)], a0, u)
        return {
            (0, 0): _poly_terms(poly, a0, u),
            (0, 1): off,
            (1, 0): list(off),
            (1, 1): [Term(1, a0, u)],
        }
    if f == "RawThm44":
        u, c22 = p["u"], p["c22"]
        gm = math.sqrt(2 * c22 - 1)
        c = gm * math.sqrt(2 * u)
        off = [Term(1 / u, -0.5, u, c, "cosh"), Term(-math.sqrt(2 * u) / (gm * u), 0.0, u, c, "sinh")]
        return {
            (0, 0): [
                Term(1 / (u * u), -0.5, u, c, "cosh"),
                Term(2 / (gm * gm * u), 0.5, u, c, "cosh"),
                Term(-2 * math.sqrt(2 * u) / (gm * u * u), 0.0, u, c, "sinh"),
            ],
            (0, 1): off,
            (1, 0): list(off),
            (1, 1): [Term(1, -0.5, u, c, "cosh")],
        }
    if f == "RawThm52":
        u, c21, c22, g = p["u"], complex(p["c21"]), p["c22"], p["gamma"]
        a0 = c22 - 1
        ab2 = abs(c21) ** 2
        return {
            (0, 0): _poly_terms([ab2 / 4, -ab2 * u / (2 * c22), g], a0, u),
            (0, 1): _poly_terms([-c21.conjugate() / 2, c21.conjugate() * u / (2 * c22)], a0, u),
            (1, 0): _poly_terms([-c21 / 2, c21 * u / (2 * c22)], a0, u),
            (1, 1): [Term(1, a0, u)],
        }
    if f == "Diagonal":
        return {
            (0, 0): [Term(1, p["alpha1"], 1)],
            (0, 1): [],
            (1, 0): [],
            (1, 1): [Term(1, p["alpha2"], 1)],
        }
    raise KeyError(f)


@functools.lru_cache(maxsize=512)
def entry_terms(spec: WeightSpec, order: int = 0) -> dict:
    """Term lists of the ``order``-th derivative of every entry."""
    if order > 0:
        prev = entry_terms(spec, order - 1)
        return {ij: [d for t in prev[ij] for d in t.derivative()] for ij in ENTRIES}
    base = _base_terms(spec)
    if spec.congruence is None:
        return base
    m = np.array(spec.congruence).reshape(2, 2)
    out = {}
    for i, j in ENTRIES:
        acc = []
        for k, l in ENTRIES:
            f = np.conj(m[k, i]) * m[l, j]
            if f != 0:
                acc.extend(Term(t.coef * f, t.power, t.rate, t.root, t.kind) for t in base[(k, l)])
        out[(i, j)] = acc
    return out


def _eval_terms(terms: dict, t: np.ndarray) -> np.ndarray:
    out = np.zeros(t.shape + (2, 2), dtype=complex)
    for (i, j), ts in terms.items():
        for term in ts:
            out[..., i, j] += term(t)
    return out


def evaluate(spec: WeightSpec, t, order: int = 0) -> np.ndarray:
    """``W``, ``W'`` or ``W''`` at ``t`` (scalar or array) without domain checks."""
    t = np.asarray(t, dtype=float)
    return _eval_terms(entry_terms(spec, order), t)


@dataclass(frozen=True, eq=False)
class WeightJet:
    t: float
    W: np.ndarray
    dW: np.ndarray
    d2W: np.ndarray


def eval(spec: WeightSpec, t: float) -> WeightJet:  # noqa: A001 - mirrors the contract name
    """Value and first two derivatives of the weight at ``t > 0``."""
    bad = validate(spec)
    if bad:
        raise ParameterOutOfDomain(bad)
    if not t > 0:
        raise NonPositiveT(f"t must be positive, got {t!r}")
    ts = np.array([float(t)])
    return WeightJet(
        float(t),
        evaluate(spec, ts, 0)[0],
        evaluate(spec, ts, 1)[0],
        evaluate(spec, ts, 2)[0],
    )


@functools.lru_cache(maxsize=8192)
def _moment_entry_mp(spec: WeightSpec, k: int, ij: tuple, dps: int):
    with mpmath.workdps(dps):
        total = mpmath.mpc(0)
        for term in entry_terms(spec, 0)[ij]:
            v = term.moment_mp(k)
            if v is None:
                return None
            total += v
        return total


def has_closed_moments(spec: WeightSpec) -> bool:
    return all(_moment_entry_mp(spec, 0, ij, 20) is not None for ij in ENTRIES)


def moment_mp(spec: WeightSpec, k: int, dps: int = 50) -> mpmath.matrix:
    """Closed-form ``k``-th moment at ``dps`` decimal digits."""
    vals = [_moment_entry_mp(spec, k, ij, dps) for ij in ENTRIES]
    if any(v is None for v in vals):
        raise NotImplementedError(f"no closed-form moments for {spec.family}")
    with mpmath.workdps(dps):
        return mpmath.matrix([[vals[0], vals[1]], [vals[2], vals[3]]])


def moment(spec: WeightSpec, k: int, method: str = "auto") -> np.ndarray:
    """``int_0^inf t^k W(t) dt`` as a double-precision 2x2 matrix.

    ``method`` is ``"closed"`` (Gamma / Gaussian closed forms), ``"quad"``
    (double-exponential quadrature) or ``"auto"`` (closed form when every
    term admits one).
    """
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    bad = validate(spec)
    if bad:
        raise ParameterOutOfDomain(bad)
    if method == "auto":
        method = "closed" if has_closed_moments(spec) else "quad"
    if method == "closed":
        m = moment_mp(spec, k, 30)
        return np.array([[complex(m[i, j]) for j in range(2)] for i in range(2)])
    from .quad import moment_by_quadrature

    return moment_by_quadrature(spec, k).value


def pair(spec: WeightSpec) -> LagOperator:
    """The operator the weight is paired with (symmetric with respect to it)."""
    p = spec.param_dict
    f = spec.family
    if f == "F1":
        op = ops.family1(p["alpha"], p["beta"], p["b"])
    elif f == "F2":
        op = ops.family2(p["alpha"], p["b"])
    elif f == "F3":
        op = ops.family3(p["beta"])
    elif f == "RawThm42":
        op = ops.raw_thm42(p["u"], p["c21"], p["c22"])
    elif f == "RawThm43":
        op = ops.raw_thm43(p["u"], p["c21"])
    elif f == "RawThm44":
        op = ops.raw_thm44(p["u"], p["c22"])
    elif f == "RawThm52":
        op = ops.raw_thm52(p["u"], p["c21"], p["c22"])
    elif f == "Diagonal":
        op = LagOperator(np.diag([p["alpha1"] + 1, p["alpha2"] + 1]), np.eye(2), np.zeros((2, 2)))
    else:
        raise KeyError(f)
    if spec.congruence is not None:
        op = ops.conjugate(op, np.array(spec.congruence).reshape(2, 2))
    return op


def factor(spec: WeightSpec, t) -> np.ndarray:
    """``L(t)`` with ``W(t) = L(t) L(t)*``, from the closed forms.

    Every weight here is a sum of two rank-one pieces (a polynomial square
    plus a remainder, or the ``exp(+-x)`` halves of the hyperbolic entries).
    Integrating ``(L* P)* (L* Q)`` avoids forming ``P* W Q`` from a matrix
    whose eigenvalues can differ by ``exp(4 sqrt(beta t))``.
    """
    t = np.asarray(t, dtype=float)
    p = spec.param_dict
    f = spec.family
    L = np.zeros(t.shape + (2, 2), dtype=complex)
    lt = np.log(t)
    if f in ("F1", "F2", "RawThm42", "RawThm43", "RawThm52"):
        terms = entry_terms(WeightSpec(spec.family, spec.params), 0)
        if f == "F1":
            a0, rate = p["alpha"], 1.0
            top = np.exp(0.5 * p["beta"] * lt)
        elif f == "F2":
            a0, rate = p["alpha"], 1.0
            top = math.sqrt(1 - p["b"] ** 2) * t * t
        elif f == "RawThm42":
            a0, rate = p["c22"] - 1, p["u"]
            e = 2 * p["c21"] * p["u"] / (p["c21"] * p["u"] - p["c22"])
            top = math.sqrt(p["gamma"]) * np.exp(0.5 * e * lt)
        elif f == "RawThm43":
            a0, rate = p["c21"] * p["u"] - 1, p["u"]
            kappa = p["gamma"] - p["u"] ** 2 / (16 * (p["c21"] * p["u"] + 1) ** 2)
            top = math.sqrt(kappa) * t * t
        else:
            a0, rate = p["c22"] - 1, p["u"]
            kappa = p["gamma"] - abs(p["c21"]) ** 2 * p["u"] ** 2 / (4 * p["c22"] ** 2)
            top = math.sqrt(kappa) * t
        # Off-diagonal entry with the common factor t^a0 e^{-rate t} removed.
        y = np.zeros(t.shape, complex)
        for term in terms[(0, 1)]:
            y += Term(term.coef, term.power - a0, term.rate - rate, term.root, term.kind)(t)
        root = np.exp(0.5 * (a0 * lt - rate * t))
        L[..., 0, 0] = root * top
        L[..., 0, 1] = root * y
        L[..., 1, 1] = root
    elif f in ("F3", "RawThm44"):
        if f == "F3":
            be = p["beta"]
            x = np.sqrt(be * t)
            a = 4 * np.sqrt(t) / math.sqrt(be)
            pre = 0.5 * np.exp(-0.5 * t - 0.25 * lt)
            yv, zv, w1, w2 = a, a, 2.0, -2.0
        else:
            u, c22 = p["u"], p["c22"]
            g = math.sqrt(2 * c22 - 1)
            r = np.sqrt(2 * t * u)
            x = g * r
            pre = np.exp(-0.5 * u * t - 0.25 * lt) / math.sqrt(2)
            yv, zv, w1, w2 = (g - r) / (g * u), (g + r) / (g * u), 1.0, 1.0
        ep, em = np.exp(0.5 * x), np.exp(-0.5 * x)
        L[..., 0, 0] = pre * yv * ep
        L[..., 0, 1] = pre * zv * em
        L[..., 1, 0] = pre * w1 * ep
        L[..., 1, 1] = pre * w2 * em
    elif f == "Diagonal":
        L[..., 0, 0] = np.exp(0.5 * (p["alpha1"] * lt - t))
        L[..., 1, 1] = np.exp(0.5 * (p["alpha2"] * lt - t))
    else:
        raise KeyError(f)
    if spec.congruence is not None:
        m = np.array(spec.congruence).reshape(2, 2)
        L = m.conj().T @ L
    return L
