"""``matlag`` command line interface.

Exit codes: 0 success, 1 malformed input or internal failure, 2 negative
verdict (symmetry check FAIL, classification refusal, selftest failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from . import acceptance, classify, mops, quad, reduce, symmetry, weights
from . import operators as ops
from .operators import LagOperator, ParameterOutOfDomain

SCHEMA = "matlag/1"
EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_family(p: argparse.ArgumentParser, required: bool = False):
    g = p.add_argument_group("canonical family (alternative to a JSON file)")
    g.add_argument("--family", choices=["F1", "F2", "F3"], required=required)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--b", type=float)


def _add_quad(p: argparse.ArgumentParser):
    p.add_argument("--quad-target", type=float, default=quad.DEFAULT_TARGET,
                   help="relative error target of the quadrature (default %(default)g)")
    p.add_argument("--quad-budget", type=int, default=None,
                   help="maximum integrand evaluations (default: $MATLAG_QUAD_BUDGET or %d)" % quad.DEFAULT_BUDGET)


def _add_output(p: argparse.ArgumentParser, formats=("json",)):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="matlag", description="Laguerre-type 2x2 matrix operators, weights and orthogonal polynomials.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("family", help="write a canonical operator together with its weight",
                       description="Emit one of the three canonical operator/weight families "
                                   "(two Laguerre-type families with a free exponent pair and the "
                                   "hyperbolic-cosine family) as JSON, or the weight sampled on a grid as CSV.")
    _add_family(f, required=True)
    f.add_argument("--grid", help="T0,T1,N: sample W on N log-spaced points of [T0, T1] (CSV output)")
    _add_output(f, ("json", "csv"))

    m = sub.add_parser("mops", help="monic orthogonal polynomials, Gram matrices and recurrence",
                       description="Gram-Schmidt on closed-form moments: coefficients T_k^n, Gram matrices "
                                   "S_n and the three-term recurrence matrices A_n, B_n.")
    _add_family(m)
    m.add_argument("--weight", help="weight JSON file")
    m.add_argument("--n", type=int, default=mops.N_DEFAULT, help="maximum degree (default %(default)s)")
    m.add_argument("--check", action="store_true",
                   help="also report orthogonality by quadrature and the recurrence-coefficient conditions")
    _add_quad(m)
    _add_output(m, ("json", "csv"))

    v = sub.add_parser("verify", help="check the symmetry equations of an operator/weight pair",
                       description="Evaluate the three differential symmetry equations linking the operator "
                                   "and the weight on a grid of points, plus the boundary conditions at 0 and infinity.")
    _add_family(v)
    v.add_argument("--op", help="operator JSON file")
    v.add_argument("--weight", help="weight JSON file")
    v.add_argument("--tol", type=float, default=symmetry.DEFAULT_TOL)
    v.add_argument("--grid", help="comma-separated t values (default: 10 points on [1e-3, 100])")
    _add_output(v)

    c = sub.add_parser("classify", help="match an operator against the canonical families",
                       description="Normalize the operator by equivalences (Jordan basis of U, shift of V, "
                                   "time scale, triangular gauge) and either name the canonical family or "
                                   "refuse with the obstruction (distinct eigenvalues of U, v = -u, ...).")
    _add_family(c)
    c.add_argument("--op", help="operator JSON file")
    _add_output(c)

    r = sub.add_parser("reduce-check", help="commutant probes for reducibility",
                       description="Solve W(t)V0 = V0* W(t) on sample points and, optionally, T P_n = P_n T "
                                   "over the orthogonal polynomials; a scalar-only solution certifies irreducibility.")
    _add_family(r)
    r.add_argument("--weight", help="weight JSON file")
    r.add_argument("--mops", type=int, metavar="N", help="also probe the polynomials up to degree N")
    _add_output(r)

    s = sub.add_parser("selftest", help="run the acceptance suite",
                       description="Run the ten acceptance checks (anchors, orthogonality, eigen-equation, "
                                   "recurrence conditions, symmetry equations, route equivalence, scalar Laguerre "
                                   "embedding, classification roundtrip, irreducibility, hyperbolic moment).")
    s.add_argument("--seed", type=int, default=20240601, help="seed for the classification roundtrip")
    _add_quad(s)
    return p


def _family_spec(args) -> weights.WeightSpec:
    need = {"F1": ("alpha", "beta", "b"), "F2": ("alpha", "b"), "F3": ("beta",)}[args.family]
    missing = [n for n in need if getattr(args, n) is None]
    extra = [n for n in ("alpha", "beta", "b") if n not in need and getattr(args, n) is not None]
    if missing:
        raise InputError(f"{args.family} needs --" + ", --".join(missing))
    if extra:
        raise InputError(f"{args.family} does not take --" + ", --".join(extra))
    return weights.WeightSpec.make(args.family, **{n: getattr(args, n) for n in need})


def _family_given(args) -> bool:
    return getattr(args, "family", None) is not None or any(
        getattr(args, n, None) is not None for n in ("alpha", "beta", "b")
    )


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from None


def _weight_source(args) -> weights.WeightSpec:
    if _family_given(args) and args.weight:
        raise InputError("give either --weight or --family flags, not both")
    if args.weight:
        obj = _read_json(args.weight)
        obj = obj.get("weight", obj)
        try:
            return weights.WeightSpec.from_json(obj)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"bad weight JSON: {e}") from None
    if args.family is None:
        raise InputError("a weight is required (--weight or --family)")
    return _family_spec(args)


def _operator_source(args) -> LagOperator:
    if _family_given(args) and args.op:
        raise InputError("give either --op or --family flags, not both")
    if args.op:
        obj = _read_json(args.op)
        obj = obj.get("operator", obj)
        try:
            return LagOperator.from_json(obj)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"bad operator JSON: {e}") from None
    if args.family is None:
        raise InputError("an operator is required (--op or --family)")
    return weights.pair(_family_spec(args))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cells(m) -> list:
    out = []
    for z in np.asarray(m).reshape(-1):
        out += [_fmt(z.real), _fmt(z.imag)]
    return out


MAT_HEADER = [f"{e}_{p}" for e in ("m11", "m12", "m21", "m22") for p in ("re", "im")]


def _emit(args, payload) -> None:
    if isinstance(payload, dict):
        text = json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=False) + "\n"
    else:
        text = payload
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_family(args) -> int:
    spec = _family_spec(args)
    bad = weights.validate(spec)
    if bad:
        raise ParameterOutOfDomain(bad)
    if args.grid:
        try:
            t0, t1, n = args.grid.split(",")
            ts = np.geomspace(float(t0), float(t1), int(n))
        except ValueError:
            raise InputError("--grid expects T0,T1,N") from None
        if args.format != "csv":
            raise InputError("--grid needs --format csv")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + MAT_HEADER)
        for t, m in zip(ts, weights.evaluate(spec, ts)):
            w.writerow([_fmt(t)] + _cells(m))
        _emit(args, buf.getvalue())
        return EXIT_OK
    if args.format == "csv":
        raise InputError("CSV output of a family needs --grid")
    _emit(args, {"operator": weights.pair(spec).to_json(), "weight": spec.to_json()})
    return EXIT_OK


def cmd_mops(args) -> int:
    spec = _weight_source(args)
    if not 0 <= args.n <= mops.N_CAP:
        raise InputError(f"--n must be in [0, {mops.N_CAP}]")
    seq = mops.build_by_moments(spec, args.n)
    checks = None
    if args.check:
        g = quad.gram_table(seq.polys, spec, args.quad_target, args.quad_budget).value
        d = [float(np.abs(g[i, i]).sum(axis=1).max()) for i in range(seq.N + 1)]
        ortho = max(
            (float(np.abs(g[i, j]).sum(axis=1).max()) / np.sqrt(d[i] * d[j])
             for i in range(seq.N + 1) for j in range(seq.N + 1) if i != j),
            default=0.0,
        )
        fav = mops.favard_check(seq)
        checks = {"orthogonality": ortho, "recurrence_residual": mops.recurrence_residual(seq),
                  "favard_violations": fav.violations}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "n", "k"] + MAT_HEADER)
        for n, p in enumerate(seq.polys):
            for k, c in enumerate(p.coeffs):
                w.writerow(["T", n, k] + _cells(c))
        for n, s in enumerate(seq.grams):
            w.writerow(["S", n, ""] + _cells(s))
        for n in range(1, seq.N + 1):
            w.writerow(["A", n, ""] + _cells(seq.A[n]))
        for n, b in enumerate(seq.B):
            w.writerow(["B", n, ""] + _cells(b))
        _emit(args, buf.getvalue())
    else:
        out = seq.to_json()
        if checks is not None:
            out["checks"] = checks
        _emit(args, out)
    if checks is not None and (checks["orthogonality"] > 1e-8 or checks["favard_violations"]):
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.family is not None and (args.op or args.weight):
        raise InputError("give either --op/--weight files or --family flags, not both")
    if args.family is not None:
        spec = _family_spec(args)
        op = weights.pair(spec)
    else:
        if not (args.op and args.weight):
            raise InputError("verify needs --op and --weight (or --family flags)")
        op = _operator_source(args)
        spec = _weight_source(args)
    grid = symmetry.DEFAULT_GRID
    if args.grid:
        try:
            grid = tuple(float(x) for x in args.grid.split(","))
        except ValueError:
            raise InputError("--grid expects comma-separated numbers") from None
    rep = symmetry.check(op, spec, grid, args.tol)
    _emit(args, rep.to_json())
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    op = _operator_source(args)
    res = classify.classify(op.C, op.U, op.V)
    _emit(args, res.to_json())
    return EXIT_NEGATIVE if res.verdict == "NotSymmetrizable" else EXIT_OK


def cmd_reduce(args) -> int:
    spec = _weight_source(args)
    out = {"weight": spec.to_json(), "weight_commutant": reduce.weight_commutant(spec).to_json()}
    if args.mops is not None:
        if not 2 <= args.mops <= mops.N_CAP:
            raise InputError(f"--mops must be in [2, {mops.N_CAP}]")
        out["mop_commutant"] = reduce.mop_commutant(mops.build_by_moments(spec, args.mops)).to_json()
    _emit(args, out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = acceptance.run_all(seed=args.seed, target=args.quad_target, budget=args.quad_budget)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_NEGATIVE if failed else EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "mops": cmd_mops,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "reduce-check": cmd_reduce,
    "selftest": cmd_selftest,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "quad_budget", None) is not None and args.quad_budget <= 0:
        print("matlag: error: --quad-budget must be positive", file=sys.stderr)
        return EXIT_INPUT
    if getattr(args, "quad_target", None) is not None and not args.quad_target > 0:
        print("matlag: error: --quad-target must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (InputError, ParameterOutOfDomain, ops.NotLowerTriangular) as e:
        print(f"matlag: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except quad.NonConvergence as e:
        print(f"matlag: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except mops.GramNotPositiveDefinite as e:
        print(f"matlag: error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
