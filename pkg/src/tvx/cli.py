"""Command-line interface ``tvx``.

Exit codes: 0 success, 1 mathematical-consistency failure, 2 usage error.
``TVX_THREADS`` caps the worker pool used by ``verify``; output order never
depends on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from . import fixtures
from .funceq import (
    ChiTable,
    ExtractionError,
    E_value,
    N_from_log,
    balanced_sign,
    bps_moebius,
    central_system,
    closed_form_N,
    extract_chi,
    product_factorization,
    solve_R_system,
    solve_specialized,
)
from .gw import (
    CorrespondenceViolation,
    balanced_divisibility_check,
    coprime_correspondence_check,
    gw_from_wall,
    smooth_model_chi,
)
from .hn import HNInternalError, NotCoprimeError, euler_stable, poincare
from .localization import LagrangeMismatchError, lagrange_coeff, tree_report
from .numerics import rational_to_str
from .quiver import BipartiteQuiver, DimVector, StabilitySpec, enum_dimvecs
from .wallcross import InitialData, ScatteringConsistencyError, compose_and_verify, factorize

CONSISTENCY_ERRORS = (
    ScatteringConsistencyError,
    ExtractionError,
    HNInternalError,
    CorrespondenceViolation,
    LagrangeMismatchError,
)


class UsageError(Exception):
    pass


class ConsistencyFailure(Exception):
    pass


# -- argument helpers -------------------------------------------------------------


def _ints(text: str) -> list[int]:
    text = text.strip()
    return [int(x) for x in text.split(",")] if text else []


def _levels(text: str) -> tuple[list[int], list[int]]:
    """"1,1,2;1,2" -> sink levels [1,1,2], source levels [1,2]."""
    parts = text.split(";")
    if len(parts) != 2:
        raise UsageError("--levels takes 'sink levels;source levels', e.g. '1,2;1'")
    return _ints(parts[0]), _ints(parts[1])


def _init(args) -> InitialData:
    if args.levels:
        lx, ly = _levels(args.levels)
        return InitialData.levelled(lx, ly)
    return InitialData.plain(args.l1, args.l2)


def _quiver(args) -> BipartiteQuiver:
    if getattr(args, "kronecker", None):
        return BipartiteQuiver.kronecker(args.kronecker)
    if args.levels:
        return BipartiteQuiver.levelled(*_levels(args.levels))
    return BipartiteQuiver.complete(args.l1, args.l2)


def _dim(Q: BipartiteQuiver, text: str) -> DimVector:
    """'3,5' (sink values then source values) or 'p1;p2' like '1,1,0;1,0,0'."""
    if ";" in text:
        a, b = text.split(";")
        d = DimVector(tuple(_ints(a)), tuple(_ints(b)))
    else:
        ent = _ints(text)
        if len(ent) != Q.l1 + Q.l2:
            raise UsageError(f"--dim needs {Q.l1 + Q.l2} entries")
        d = DimVector(tuple(ent[: Q.l1]), tuple(ent[Q.l1 :]))
    Q.check(d)
    return d


def _stability(args, Q: BipartiteQuiver) -> StabilitySpec:
    default = StabilitySpec.levelled_default(Q) if args.levels else StabilitySpec.default(Q)
    theta = tuple(_ints(args.theta)) if args.theta else default.theta
    kappa = tuple(_ints(args.kappa)) if args.kappa else default.kappa
    return StabilitySpec(theta, kappa)


def _slope(args) -> tuple[int, int]:
    a, b = args.a, args.b
    if a < 0 or b < 0 or (a, b) == (0, 0) or gcd(a, b) != 1:
        raise UsageError("--a/--b must form a primitive nonnegative pair")
    return a, b


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TVX_THREADS", "1")))
    except ValueError:
        return 1


def run_jobs(fn: Callable, jobs: Sequence) -> list:
    """Map fn over jobs, in order, on at most TVX_THREADS worker processes."""
    n = min(_workers(), len(jobs))
    if n <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))


def _q(x) -> str:
    return rational_to_str(x)


# -- subcommands --------------------------------------------------------------------


def cmd_factorize(args) -> tuple[object, int]:
    init = _init(args)
    S = factorize(init, args.order)
    if not compose_and_verify(S, init):
        raise ConsistencyFailure("ordered product does not reproduce the commutator")
    doc = S.to_json()
    if args.fixture:
        fx = fixtures.load(args.fixture)
        if args.levels or (fx["l1"], fx["l2"]) != (args.l1, args.l2):
            raise UsageError(f"fixture {args.fixture} is for l1={fx['l1']}, l2={fx['l2']}")
        expected = fixtures.expanded_walls(args.fixture, args.order)
        bad = [f"({a},{b})" for (a, b), f in expected.items() if S.wall_function(a, b) != f]
        if fx["complete"] and set(expected) != set(S.walls):
            bad.append("wall set")
        return {"fixture": args.fixture, "match": not bad, "mismatches": bad}, (1 if bad else 0)
    return doc, 0


def cmd_gw(args):
    a, b = _slope(args)
    S = factorize(InitialData.plain(args.l1, args.l2), args.order)
    f = S.wall_function(a, b)
    doc = gw_from_wall(f, a, b).to_json()
    doc["smooth_models"] = {
        name: [{"p1": list(d.p1), "p2": list(d.p2), "chi": c} for d, c in sorted(tab.items(), key=lambda kv: (kv[0].p1, kv[0].p2))]
        for name, tab in (("b", smooth_model_chi(f, a, b, "b")), ("f", smooth_model_chi(f, a, b, "f")))
    }
    return doc, 0


def cmd_euler(args):
    Q = _quiver(args)
    return euler_stable(Q, _stability(args, Q), _dim(Q, args.dim)), 0


def cmd_poincare(args):
    Q = _quiver(args)
    p = poincare(Q, _stability(args, Q), _dim(Q, args.dim))
    return list(p.coeffs), 0


def cmd_chi(args):
    a, b = _slope(args)
    if args.direct:
        Q = BipartiteQuiver.complete(args.l1, args.l2)
        spec = StabilitySpec.default(Q)
        table = ChiTable(args.l1, args.l2)
        for d in enum_dimvecs(args.l1, args.l2, 1, a, b):
            table.set(d, euler_stable(Q, spec, d), "direct-HN")
        return table.to_json(), 0
    S = factorize(InitialData.plain(args.l1, args.l2), args.order)
    return extract_chi(S.wall_function(a, b), a, b).to_json(), 0


def cmd_solve_funceq(args):
    a, b = _slope(args)
    if args.chi_file:
        with open(args.chi_file) as fh:
            table = ChiTable.from_json(json.load(fh), args.l1, args.l2)
    else:
        S = factorize(InitialData.plain(args.l1, args.l2), args.order)
        table = extract_chi(S.wall_function(a, b), a, b)
    _, f = solve_R_system(table, a, b, args.order)
    K = args.order // (a + b)
    agg = [table.aggregated(a, b, k) for k in range(1, K + 1)]
    E = E_value(args.l1, args.l2, a, b)
    spec = solve_specialized(agg, a, b, E, K)
    diag = f.specialize_diagonal(a, b)
    ok = spec == diag[: K + 1]
    doc = {
        "a": a,
        "b": b,
        "E": _q(E),
        "chi": agg,
        "specialized": [_q(c) for c in spec],
        "diagonal_agrees": ok,
        "f": f.to_json(),
    }
    return doc, 0 if ok else 1


def _central_report(l1: int, l2: int, order: int) -> dict:
    _, f = central_system(l1, l2, order)
    S = factorize(InitialData.plain(l1, l2), order)
    diag = f.specialize_diagonal(1, 1)
    N = N_from_log(diag)
    closed = [closed_form_N("central", l1=l1, l2=l2, k=k) for k in range(1, len(N) + 1)]
    return {
        "l1": l1,
        "l2": l2,
        "matches_factorization": f == S.wall_function(1, 1),
        "N": [_q(x) for x in N],
        "closed_form": [_q(x) for x in closed],
        "closed_form_agrees": N == closed,
    }


def cmd_central(args):
    doc = _central_report(args.l1, args.l2, args.order)
    ok = doc["matches_factorization"] and doc["closed_form_agrees"]
    return doc, 0 if ok else 1


def cmd_bps(args):
    l1, l2 = args.l1, args.l2
    a, b = _slope(args)
    S = factorize(InitialData.plain(l1, l2), args.order)
    diag = S.wall_function(a, b).specialize_diagonal(a, b)
    doc: dict = {"a": a, "b": b}
    ok = True
    if (a, b) == (1, 1):
        bps = bps_moebius(N_from_log(diag), l1 * l2 - l1 - l2)
        doc["central_bps"] = [_q(x) for x in bps]
        ok &= all(Fraction(x).denominator == 1 and x >= 0 for x in bps)
    if l1 == l2:
        sign = balanced_sign(l1, a, b)
        d = product_factorization(diag, sign)
        doc["sign"] = sign
        doc["product_exponents"] = [_q(x) for x in d]
        ok &= all(Fraction(x).denominator == 1 for x in d)
    doc["integral"] = ok
    return doc, 0 if ok else 1


def cmd_trees(args):
    r = tree_report(args.l1, args.l2, args.d)
    n = (args.l1 - 1) * args.d + 1
    doc = r.to_json()
    doc["lagrange"] = _q(lagrange_coeff(args.l1, args.l2, n))
    return doc, 1 if r.status == "mismatch" else 0


# -- verify suites -------------------------------------------------------------------


def _check_smalllength(job) -> tuple[str, bool]:
    name, order = job
    fx = fixtures.load(name)
    S = factorize(InitialData.plain(fx["l1"], fx["l2"]), order)
    expected = fixtures.expanded_walls(name, order)
    ok = all(S.wall_function(*d) == f for d, f in expected.items())
    if fx["complete"]:
        ok = ok and set(expected) == set(S.walls)
    return f"fixture {name} at order {order}", ok


def _check_correspondence(job) -> tuple[str, bool]:
    kind, params = job
    if kind == "coprime":
        l1, l2, a, b = params
        r = coprime_correspondence_check(l1, l2, a, b)
        return f"coprime correspondence K({l1},{l2}) slope ({a},{b}): N={_q(r.total_N)} chi={r.total_chi}", r.passed
    m, a, b = params
    ok, lhs, rhs = balanced_divisibility_check(m, a, b)
    return f"balanced divisibility m={m} slope ({a},{b}): {lhs} = {rhs}", ok


def _check_values(job) -> tuple[str, bool]:
    v = job
    if v["key"] == "kronecker_euler":
        K = BipartiteQuiver.kronecker(v["m"])
        got = euler_stable(K, StabilitySpec.default(K), DimVector((v["dim"][0],), (v["dim"][1],)))
    elif v["key"] == "level_one_sum":
        got = coprime_correspondence_check(v["l1"], v["l2"], v["a"], v["b"]).total_N
    elif v["key"] == "tree_count":
        got = tree_report(v["l1"], v["l2"], v["d"]).formula
    else:
        S = factorize(InitialData.plain(v["l1"], v["l2"]), 8)
        table = gw_from_wall(S.wall_function(v["a"], v["b"]), v["a"], v["b"])
        got = table.refined.get(DimVector(tuple(v["p1"]), tuple(v["p2"])), 0)
    return f"{v['key']} {json.dumps({k: x for k, x in v.items() if k not in ('key', 'value')}, sort_keys=True)}: {_q(got)}", _q(got) == v["value"]


def _check_central(job) -> tuple[str, bool]:
    l1, l2 = job
    doc = _central_report(l1, l2, 8)
    return f"central slope K({l1},{l2})", doc["matches_factorization"] and doc["closed_form_agrees"]


def _check_trees(job) -> tuple[str, bool]:
    r = tree_report(*job)
    return f"trees {job}: {r.status}", r.status == "verified"


SUITES: dict[str, tuple[Callable, list]] = {
    "smalllength": (
        _check_smalllength,
        [("pentagon", 8), ("k12", 8), ("k13", 8), ("k22_central", 10), ("k14_slope12", 12)],
    ),
    "correspondence": (
        _check_correspondence,
        [("coprime", (1, 3, 1, 3)), ("coprime", (2, 2, 2, 3)), ("coprime", (3, 3, 3, 5)), ("balanced", (2, 1, 1)), ("balanced", (3, 3, 5))],
    ),
    "values": (_check_values, None),
    "central": (_check_central, [(2, 2), (2, 3), (3, 3)]),
    "trees": (_check_trees, [(2, 2, 2), (3, 3, 2), (3, 3, 3), (3, 2, 2), (2, 3, 3)]),
}


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    lines, ok = [], True
    for name in names:
        fn, jobs = SUITES[name]
        if jobs is None:
            jobs = fixtures.reference_values()
        for label, passed in run_jobs(fn, jobs):
            lines.append({"suite": name, "check": label, "passed": passed})
            ok &= passed
    return {"passed": ok, "checks": lines}, 0 if ok else 1


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tvx", description="Exact scattering, quiver moduli and functional-equation computations.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, slope=False, order=True, levels=False):
        sp.add_argument("--l1", type=int, default=1, help="number of sinks")
        sp.add_argument("--l2", type=int, default=1, help="number of sources")
        if levels:
            sp.add_argument("--levels", help="levelled data 'sink levels;source levels', e.g. '1,2;1'")
        else:
            sp.set_defaults(levels=None)
        if slope:
            sp.add_argument("--a", type=int, default=1)
            sp.add_argument("--b", type=int, default=1)
        if order:
            sp.add_argument("--order", type=int, default=8, help="truncation order N (default 8)")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("factorize", help="ordered factorization of the commutator")
    common(sp, levels=True)
    sp.add_argument("--fixture", choices=fixtures.WALL_FIXTURES, help="compare against a golden file")
    sp.set_defaults(fn=cmd_factorize)

    sp = sub.add_parser("gw", help="invariants from log of a wall function")
    common(sp, slope=True)
    sp.set_defaults(fn=cmd_gw)

    for name, fn, helptext in (("euler", cmd_euler, "Euler characteristic of stable moduli"), ("poincare", cmd_poincare, "Poincare polynomial coefficients")):
        sp = sub.add_parser(name, help=helptext)
        common(sp, order=False, levels=True)
        sp.add_argument("--kronecker", type=int, help="use the m-Kronecker quiver")
        sp.add_argument("--dim", required=True, help="'sink,...,source,...' or 'p1;p2'")
        sp.add_argument("--theta", help="comma list, sinks first")
        sp.add_argument("--kappa", help="comma list, sinks first")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("chi", help="Euler characteristic table at a slope")
    common(sp, slope=True)
    sp.add_argument("--from-factorization", action="store_true", help="extract from the wall function (default)")
    sp.add_argument("--direct", action="store_true", help="level-1 entries from the HN recursion instead")
    sp.set_defaults(fn=cmd_chi)

    sp = sub.add_parser("solve-funceq", help="solve the R-system and the specialized equation")
    common(sp, slope=True)
    sp.add_argument("--chi-file", help="ChiTable JSON; extracted from the factorization if omitted")
    sp.set_defaults(fn=cmd_solve_funceq)

    sp = sub.add_parser("central-slope", help="algebraic system at slope (1,1)")
    common(sp)
    sp.set_defaults(fn=cmd_central)

    sp = sub.add_parser("bps", help="Moebius-inverted and product-factorization exponents")
    common(sp, slope=True)
    sp.set_defaults(fn=cmd_bps)

    sp = sub.add_parser("trees", help="tree counts: formula, enumeration, HN route")
    common(sp, order=False)
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(fn=cmd_trees)

    sp = sub.add_parser("verify", help="run a built-in verification suite")
    sp.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(fn=cmd_verify)
    return p


def _render(doc, fmt: str) -> str:
    if fmt == "json" or not isinstance(doc, (dict, list)):
        return json.dumps(doc, indent=2) if fmt == "json" else str(doc)
    if isinstance(doc, dict) and "checks" in doc:
        rows = [f"{'PASS' if c['passed'] else 'FAIL'}  [{c['suite']}] {c['check']}" for c in doc["checks"]]
        return "\n".join(rows + [f"overall: {'PASS' if doc['passed'] else 'FAIL'}"])
    if isinstance(doc, dict):
        return "\n".join(f"{k}: {json.dumps(v)}" for k, v in doc.items())
    return "\n".join(json.dumps(x) for x in doc)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if getattr(args, "order", 1) is not None and getattr(args, "order", 1) < 1:
        parser.print_usage(sys.stderr)
        print("tvx: error: --order must be at least 1", file=sys.stderr)
        return 2
    try:
        doc, code = args.fn(args)
    except (UsageError, NotCoprimeError, ValueError, KeyError) as exc:
        print(f"tvx: error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyFailure as exc:
        print(f"tvx: consistency failure: {exc}", file=sys.stderr)
        return 1
    except CONSISTENCY_ERRORS as exc:
        print(f"tvx: consistency failure: {exc}", file=sys.stderr)
        return 1
    print(_render(doc, args.format))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
