"""Command-line front end: ``cantorfill <command> [options]``.

Every report is a JSON object holding the command, the echoed
configuration, the library version, the seed and the result.  Tabular
commands can emit CSV instead.  Exit status: 0 success, 1 computation or
verification failure (error JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import random
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .banach import (
    SupportedVector,
    cesaro_experiment,
    exhaustive_norm,
    non_summability_witness,
    norm_bracket,
)
from .density import (
    default_budget,
    density,
    density_star_probe,
    f_filling_check,
    is_eps_filling,
    is_half_filling_over,
    max_member_size,
)
from .dyadic import (
    CylinderSet,
    RegularDyadicTree,
    decides_at,
    graded_filling_tree,
    build_deciding_tree,
    level_indices,
    limit_closed_set,
    measure,
    regularity_violation,
    trapped_lower_bound,
    verify_limit_set,
)
from .errors import CantorFillError, DepthError, PreconditionError
from .extraction import (
    canonical_increasing,
    extract_increasing_trace,
    extract_type,
    find_typed_member,
    is_increasing_config,
    random_increasing,
)
from .families import (
    F_FUNCTIONS,
    AllSets,
    BoundedSize,
    CoordinateFamily,
    ExplicitFamily,
    FremlinFamily,
    SchreierFamily,
    StronglyMonotoneFamily,
    fremlin_density_bound,
)
from .nodes import PointConfig, TypeSignature, enumerate_types, realize_type, type_of

__all__ = ["main", "build_parser", "parse_family", "load_family_file", "run"]


class CheckFailed(CantorFillError, RuntimeError):
    """A ``--check`` re-verification disagreed with the emitted result."""


# -- families ---------------------------------------------------------------

BUILTINS = {
    "all": lambda p: AllSets(),
    "bounded": lambda p: BoundedSize(int(p.get("k", 1))),
    "schreier": lambda p: SchreierFamily(),
    "fremlin": lambda p: FremlinFamily(p.get("f", "sqrt"), K=int(p.get("K", 2)),
                                       depth=int(p["D"]) if "D" in p else None),
    "strongly-monotone": lambda p: StronglyMonotoneFamily(int(p["D"]) if "D" in p else None),
    "coordinate": lambda p: CoordinateFamily(int(p.get("c", 0))),
}


def load_family_file(path) -> ExplicitFamily:
    """Read ``{"depth": D, "members": [[...], ...]}`` and close it under subsets."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict) or "members" not in data:
        raise PreconditionError(f"{path}: expected an object with a 'members' list")
    depth = data.get("depth")
    for m in data["members"]:
        for x in m:
            if not isinstance(x, str) or set(x) - set("01"):
                raise PreconditionError(f"{path}: point {x!r} is not a bitstring")
            if depth is None:
                depth = len(x)
            if len(x) != depth:
                raise DepthError(f"{path}: point {x!r} does not have depth {depth}", depth=depth)
    family = ExplicitFamily(data["members"], depth=depth)
    if family.added:
        warnings.warn(f"{path}: closure under subsets added {family.added} members", stacklevel=2)
    return family


def parse_family(spec: str):
    """``name[:key=value,...]`` for a built-in family, otherwise a JSON file path."""
    if spec is None:
        raise _Usage("--family is required")
    name, _, rest = spec.partition(":")
    if name in BUILTINS:
        params = dict(kv.split("=", 1) for kv in rest.split(",") if kv)
        return BUILTINS[name](params)
    if Path(spec).exists():
        return load_family_file(spec)
    raise PreconditionError(f"unknown family {spec!r}; built-ins: {', '.join(sorted(BUILTINS))}")


# -- helpers ----------------------------------------------------------------

def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _cube(depth):
    return ["".join(b) for b in itertools.product("01", repeat=depth)]


def _ground(family, args, n=None):
    if family.ground == "nat":
        size = args.ground_size or 2 * (n or args.n or 1) + 1
        return list(range(size))
    if args.depth is None:
        raise PreconditionError("--depth is required for this family")
    return _cube(args.depth)


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"{args.command}: missing {', '.join(missing)}")


class _Usage(Exception):
    pass


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _tree(args, family=None, levels=None):
    if args.tree:
        return RegularDyadicTree.from_json(_load_json(args.tree))
    _require(args, "depth")
    if family is not None:
        return build_deciding_tree(family, levels, args.depth, args.budget or default_budget())
    return RegularDyadicTree.identity(levels + 1, args.depth)


def _check(ok, message, **details):
    if not ok:
        raise CheckFailed(message, **details)


def _tau(args, arity):
    if args.tau is None:
        return enumerate_types(arity)[0]
    return TypeSignature(int(v) for v in args.tau.split(",") if v != "")


# -- commands ---------------------------------------------------------------

def cmd_types(args):
    _require(args, "k")
    types = enumerate_types(args.k)
    if args.check:
        for tau in types:
            if args.k <= 6:
                _check(type_of(realize_type(tau, max(args.k - 1, 1))) == tau, "round trip failed", tau=tau.to_json())
    rows = [["tau"]] + [[",".join(map(str, t.values))] for t in types]
    return {"k": args.k, "count": len(types), "types": [t.to_json() for t in types]}, rows


def cmd_density(args):
    family = parse_family(args.family)
    if args.n is None and not args.n_max:
        raise _Usage("density: give --n or --n-max")
    ns = range(1, args.n_max + 1) if args.n_max else [args.n]
    values = []
    for n in ns:
        ground = _ground(family, args, n)
        d = density(family, ground, n, mode=args.mode, budget=args.budget, samples=args.samples, seed=args.seed)
        if args.check and d.witness is not None:
            _check(len(set(d.witness)) == n and set(d.witness) <= set(ground), "witness not an n-subset", n=n)
            _check(max_member_size(family, d.witness)[0] == d.value, "witness does not attain the value", n=n)
        values.append(d.to_json())
    rows = [["n", "density", "mode", "strategy"]] + [[v["n"], v["value"], v["mode"], v["strategy"]] for v in values]
    return (values[0] if len(values) == 1 else {"profile": values}), rows


def cmd_filling_check(args):
    family = parse_family(args.family)
    _require(args, "n")
    if args.f:
        ground = _ground(family, args, args.n)
        report = f_filling_check(family, ground, F_FUNCTIONS[args.f], args.n, budget=args.budget)
    else:
        _require(args, "eps")
        ground = _ground(family, args, args.n)
        report = is_eps_filling(family, ground, args.eps, args.n, seed=args.seed, budget=args.budget)
    if args.check:
        for row in report.rows:
            if row["mode"] == "exact":
                _check(max_member_size(family, row["witness"])[0] == row["density"], "witness mismatch", n=row["n"])
    rows = [["n", "density", "mode", "ok"]] + [[r["n"], r["density"], r["mode"], r["ok"]] for r in report.rows]
    return report.to_json(), rows


def cmd_fremlin(args):
    family = FremlinFamily(args.f or "sqrt", K=args.k or 2, depth=args.depth)
    top = family.thresholds.values[family.K + 1] - 1
    n_max = min(args.n or 64, top)
    table = []
    for n in range(1, n_max + 1):
        b = fremlin_density_bound(family, n)
        table.append({"n": n, "f": family.f(n), "bound": b})
    if args.check:
        for row in table:
            _check(row["bound"] >= row["f"], "bound below f", n=row["n"])
        if args.depth is not None and args.depth <= 8:
            ground = _cube(args.depth)
            for n in range(1, min(8, n_max, len(ground)) + 1):
                d = density(family, ground, n, budget=args.budget)
                _check(d.value >= table[n - 1]["bound"], "exact density below bound", n=n)
    rows = [["n", "f", "bound"]] + [[r["n"], r["f"], r["bound"]] for r in table]
    return {"family": family.describe(), "bounds": table}, rows


def cmd_extract_increasing(args):
    _require(args, "n", "k")
    rng = random.Random(args.seed)
    if args.input:
        data = _load_json(args.input)
        F, G = PointConfig(data["F"]), PointConfig(data["G"])
    else:
        F = random_increasing(args.n, rng)
        G = PointConfig(sorted(rng.sample(list(F), args.n**args.k))) if 2**args.n >= args.n**args.k else F
    trace = extract_increasing_trace(F, G, args.k)
    if args.check:
        H = trace.result
        _check(len(H) == 2**args.k and set(H) <= set(G), "H is not a 2^k-subset of G")
        _check(bool(is_increasing_config(H)), "H is not increasing")
    out = trace.to_json()
    out.update({"F": list(F), "G": list(G)})
    return out, None


def cmd_extract_type(args):
    _require(args, "k")
    tau = _tau(args, args.k + 1)
    if args.input:
        H = PointConfig(_load_json(args.input)["H"])
    else:
        H = canonical_increasing(args.k, args.depth or 2**args.k)
    I = extract_type(H, tau)
    echo = type_of(I)
    if args.check:
        _check(echo == tau, "type mismatch", expected=tau.to_json(), got=echo.to_json())
        _check(set(I) <= set(H), "I is not inside H")
    return {"H": list(H), "I": list(I), "tau": tau.to_json(), "type_of": echo.to_json()}, None


def cmd_typed_member(args):
    _require(args, "family", "depth", "n", "k")
    family = parse_family(args.family)
    tau = _tau(args, args.k)
    I = find_typed_member(family, args.depth, args.k, tau, args.n)
    if args.check:
        _check(family.member(tuple(I)), "result is not a member")
        _check(type_of(I) == tau, "type mismatch")
    return {"I": list(I), "tau": tau.to_json(), "type_of": type_of(I).to_json()}, None


def cmd_decide_tree(args):
    _require(args, "family", "n")
    family = parse_family(args.family)
    if args.action == "build":
        _require(args, "depth")
        tree = build_deciding_tree(family, args.n, args.depth, args.budget or default_budget())
    else:
        if not args.tree:
            raise _Usage("decide-tree check: --tree is required")
        tree = RegularDyadicTree.from_json(_load_json(args.tree))
        bad = regularity_violation(tree)
        if bad:
            raise PreconditionError(f"tree is not regular: {bad[2]}", pair=list(bad[:2]))
    reports = [decides_at(tree, family, j) for j in range(args.n + 1)]
    out = {"tree": tree.to_json(), "reports": [r.to_json() for r in reports],
           "mixed": sum(len(r.mixed) for r in reports)}
    if args.check or args.action == "check":
        _check(all(r.complete and not r.mixed for r in reports), "tree does not decide", mixed=out["mixed"])
        _check(not any(r.hereditary_violations() for r in reports), "trapped verdicts not hereditary")
    return out, None


def cmd_trapped(args):
    _require(args, "family", "n", "eps")
    family = parse_family(args.family)
    tree = _tree(args, family, args.n)
    F_n = trapped_lower_bound(tree, family, args.eps, args.n, args.budget or default_budget())
    roots = CylinderSet(tree.host_depth, [tree.labels[s] for s in F_n])
    if args.check:
        reps = tuple(tree.representative(s) for s in F_n)
        _check(family.member(reps), "representatives of F_n are not a member")
        _check(len(F_n) >= args.eps * 2**args.n, "F_n too small")
    return {"F_n": list(F_n), "size": len(F_n), "measure": measure(tree, roots), "tree": tree.to_json()}, None


def cmd_measure(args):
    tree = _tree(args, None, args.n or 0)
    if args.roots is not None:
        roots = [r for r in args.roots.split(",") if r != ""] or [""]
    else:
        _require(args, "n")
        roots = [tree.labels[s] for s in level_indices(args.n)]
    cyl = CylinderSet(tree.host_depth, roots)
    value = measure(tree, cyl)
    if args.check:
        inverse = {t: s for s, t in tree.labels.items()}
        _check(value == sum(Fraction(1, 2 ** len(inverse[r])) for r in cyl.roots), "measure mismatch")
    return {"roots": list(cyl.roots), "measure": value}, None


def cmd_limit_set(args):
    _require(args, "family", "eps", "n")
    family = parse_family(args.family)
    tree = _tree(args, family, args.n)
    limit = limit_closed_set(tree, family, args.eps, args.n, args.r, args.budget or default_budget())
    if args.check:
        _check(limit.mass >= args.eps, "measure below eps")
        _check(not verify_limit_set(tree, family, limit.nodes), "a one-per-cylinder config is not trapped")
    out = limit.to_json()
    out["tree"] = tree.to_json()
    return out, None


def cmd_graded_tree(args):
    _require(args, "family", "n", "depth")
    family = parse_family(args.family)
    if args.g is not None:
        g = lambda k: args.g  # noqa: E731
    elif isinstance(family, FremlinFamily):
        g = lambda k: family.caps[min(k, len(family.caps) - 1)]  # noqa: E731
    else:
        raise _Usage("graded-tree: --g is required for this family")
    tree = graded_filling_tree(family, g, args.n, args.depth, args.budget or default_budget())
    if args.check:
        for s, t in tree.labels.items():
            pts = _cube(args.depth)
            inside = [p for p in pts if p.startswith(t)]
            size = g(len(s))
            if len(inside) <= 16:
                ok = all(family.member(c) for c in itertools.combinations(inside, size))
            else:
                ok = family.member(tuple(inside[:size]))
            _check(ok, "cylinder does not certify", index=s)
    return {"tree": tree.to_json(), "g": [g(k) for k in range(args.n + 1)]}, None


def cmd_norm(args):
    _require(args, "family")
    if not args.vector:
        raise _Usage("norm: --vector is required")
    family = parse_family(args.family)
    v = SupportedVector.from_json(_load_json(args.vector))
    if family.ground == "nat":
        v = SupportedVector({int(x): a for x, a in v.entries.items()})
    res = norm_bracket(family, v, args.budget)
    if args.check:
        _check(family.member(res.member) if res.member else True, "reported member is not a member")
        if len(v) <= 16:
            _check(exhaustive_norm(family, v) == res.lower, "exhaustive norm disagrees")
    return {"norm": res.lower, "exact": res.exact, "member": list(res.member), "vector": v.to_json()}, None


def cmd_cesaro(args):
    _require(args, "family", "depth", "imax")
    family = parse_family(args.family)
    tree = RegularDyadicTree.identity(args.depth, args.host_depth or args.depth)
    report = cesaro_experiment(family, tree, args.imax, args.budget)
    if args.check:
        _check(report.bound_holds, "Cesaro bound violated")
    return report.to_json(), [list(r) for r in report.to_csv_rows()]


def cmd_star_probe(args):
    _require(args, "family", "n")
    family = parse_family(args.family)
    if family.ground == "nat":
        ground = list(range(args.ground_size or 2 ** (args.n + 1)))
    else:
        ground = _ground(family, args)
    rows = density_star_probe(family, ground, args.n, budget=args.budget, samples=args.samples, seed=args.seed)
    if args.check:
        for r in rows:
            _check(0 <= r.density <= r.size, "density out of range", n=r.n)
    table = [["n", "size", "density", "mode", "value"]] + [[r.n, r.size, r.density, r.mode, r.value] for r in rows]
    return {"rows": [r.to_json() for r in rows]}, table


def cmd_half_filling(args):
    _require(args, "family", "m")
    family = parse_family(args.family)
    if args.points:
        points = _load_json(args.points)
        points = points["points"] if isinstance(points, dict) else points
    else:
        points = _ground(family, args, args.m)
    report = non_summability_witness(family, points, args.m)
    if args.check:
        _check(is_half_filling_over(family, report.points), "subset is not 1/2-filling")
    return report.to_json(), None


COMMANDS = {
    "types": cmd_types,
    "density": cmd_density,
    "filling-check": cmd_filling_check,
    "fremlin": cmd_fremlin,
    "extract-increasing": cmd_extract_increasing,
    "extract-type": cmd_extract_type,
    "typed-member": cmd_typed_member,
    "decide-tree": cmd_decide_tree,
    "trapped": cmd_trapped,
    "measure": cmd_measure,
    "limit-set": cmd_limit_set,
    "graded-tree": cmd_graded_tree,
    "norm": cmd_norm,
    "cesaro": cmd_cesaro,
    "star-probe": cmd_star_probe,
    "half-filling": cmd_half_filling,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="built-in name[:key=value,...] or a JSON family file")
    common.add_argument("--depth", type=int, help="host depth D (bitstring length)")
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--eps", type=_fraction, help="rational p/q")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=_positive, help="search budget (default: $CANTORFILL_BUDGET)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--check", action="store_true", help="re-verify the result with independent checks")

    parser = argparse.ArgumentParser(prog="cantorfill", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cantorfill {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS if name != "decide-tree"}
    dt = sub.add_parser("decide-tree", parents=[common])
    dt.add_argument("action", choices=["build", "check"])
    dt.add_argument("--tree")

    p["density"].add_argument("--n-max", type=int)
    p["density"].add_argument("--mode", choices=["exact", "sampled"], default="exact")
    for name in ("density", "star-probe"):
        p[name].add_argument("--samples", type=_positive, default=200)
    for name in ("density", "filling-check", "star-probe", "half-filling"):
        p[name].add_argument("--ground-size", type=_positive, help="size of the integer ground {0..N-1}")
    for name in ("filling-check", "fremlin"):
        p[name].add_argument("--f", choices=sorted(F_FUNCTIONS))
    for name in ("extract-increasing", "extract-type"):
        p[name].add_argument("--input", help="JSON file with the input points")
    for name in ("extract-type", "typed-member"):
        p[name].add_argument("--tau", help="type vector, e.g. 0,1,2")
    for name in ("trapped", "measure", "limit-set"):
        p[name].add_argument("--tree", help="JSON tree file")
    p["measure"].add_argument("--roots", help="comma-separated cylinder roots")
    p["limit-set"].add_argument("--r", type=int, default=1, help="resolution level")
    p["graded-tree"].add_argument("--g", type=int, help="constant grade (default: Fremlin caps)")
    p["norm"].add_argument("--vector", help="JSON vector file {\"entries\": {point: \"p/q\"}}")
    p["cesaro"].add_argument("--imax", type=int)
    p["cesaro"].add_argument("--host-depth", type=int)
    p["half-filling"].add_argument("--m", type=int)
    p["half-filling"].add_argument("--points", help="JSON list of points")
    return parser


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _config(args):
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items())}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result, rows = COMMANDS[args.command](args)
        for w in caught:
            print(f"warning: {w.message}", file=stderr)
    except _Usage as exc:
        parser.print_usage(stderr)
        print(f"cantorfill: error: {exc}", file=stderr)
        return 2
    except (CantorFillError, ValueError, KeyError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command,
               "details": getattr(exc, "details", {})}
        print(json.dumps(err, default=_jsonable, sort_keys=True), file=stderr)
        return 1
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        stdout.write(buf.getvalue())
    else:
        report = {"command": args.command, "config": _config(args), "version": __version__,
                  "seed": args.seed, "result": result}
        stdout.write(json.dumps(report, default=_jsonable, sort_keys=True, indent=2) + "\n")
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
