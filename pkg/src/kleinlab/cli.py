"""Command-line experiment runner.

Every subcommand builds its instance from (config, seed), computes exact
statistics and writes them as CSV or JSON. Output is deterministic: the
same arguments give byte-identical files regardless of --threads.

Exit status: 0 on success, 1 on invalid input, 2 when a search or an
operation budget runs out. Errors are reported on stderr as a JSON object
{code, message, subcommand, config}.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
import tempfile
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from . import applications as ap
from . import complexes as cx
from . import constructions as con
from . import incidence as inc
from . import klein
from . import projspace as ps
from .errors import KleinLabError, MissingArtifact, ResourceExhausted, ValidationError
from .ffield import check_modulus, next_prime

SCHEMA_VERSION = 1
COLUMNS = ["schema_version", "seed", "p", "N", "instance", "statistic", "value", "bound_expression", "ratio"]
SUMMARY_COLUMNS = ["schema_version", "statistic", "instance", "runs", "min_ratio", "max_ratio",
                   "threshold", "verdict"]

# regression thresholds on the ratio column used by `report`
THRESHOLDS = {
    "bound_ratio": ("<=", 10.0),
    "energy_over_N3": ("<=", 4.0),
    "value_set_over_N23": (">=", 0.25),
    "max_pinned_over_sqrtN": (">=", 1.0),
    "sl2_subset_cover": (">=", 0.1),
}

SWEEP_SIZES = ((100, 50), (200, 100), (400, 100))


def fmt_ratio(x) -> str:
    if x is None or x == "":
        return ""
    return f"{float(x):.6f}"


def row(args, N, statistic, value, bound_expression="", ratio=None, instance="") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "p": getattr(args, "p", ""),
        "N": N,
        "instance": instance,
        "statistic": statistic,
        "value": value,
        "bound_expression": bound_expression,
        "ratio": fmt_ratio(ratio),
    }


def budget(args) -> int | None:
    env = os.environ.get("KIL_BUDGET_OPS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"KIL_BUDGET_OPS must be an integer, got {env!r}") from None
    return args.budget_ops


# ---------------------------------------------------------------- commands

def cmd_enumerate(args):
    check_modulus(args.p)
    items = ps.enumerate_space(args.space, args.dim, args.p, budget(args))
    rows = [row(args, len(items), f"{args.space}_P{args.dim}", len(items))]
    extra = {"items": [list(x) if args.space != "lines" else [list(x.r0), list(x.r1)] for x in items]}
    return rows, extra


def cmd_klein_check(args):
    p = args.p
    check_modulus(p)
    lines = ps.enumerate_lines(3, p, budget(args))
    K = klein.klein_points(p, budget(args))
    images = [klein.klein_map(l, p) for l in lines]
    roundtrip = all(klein.klein_preimage(L, p) == l for L, l in zip(images, lines))
    bijection = roundtrip and sorted(images) == K
    expected = (p * p + 1) * (p * p + p + 1)
    return [
        row(args, len(lines), "lines", len(lines), "(p^2+1)(p^2+p+1)", Fraction(len(lines), expected)),
        row(args, len(K), "klein_points", len(K), "(p^2+1)(p^2+p+1)", Fraction(len(K), expected)),
        row(args, len(lines), "bijection", int(bijection)),
    ], {}


def _arrangement(args, m, n, k_target):
    mode = args.construction or "generic"
    if mode not in ("generic", "clustered"):
        raise ValidationError(f"incidence constructions are generic or clustered, got {mode!r}")
    return con.random_arrangement(m, n, args.p, args.seed, mode, k_target if mode == "clustered" else None)


def _incidence_rows(args, arr, instance):
    rep = inc.count_incidences(arr, "hashed", args.threads)
    v = inc.bound_check(rep, arr.p)
    return [
        row(args, arr.m + arr.n, "I", rep.I, instance=instance),
        row(args, arr.m + arr.n, "k", v.k, instance=instance),
        row(args, arr.m + arr.n, "bound_ratio", rep.I, "m*ceil(sqrt(n))+k*m", v.ratio, instance),
    ]


def cmd_incidence(args):
    check_modulus(args.p)
    if args.sweep:
        rows = []
        for m, n in SWEEP_SIZES:
            for kt in sorted({2, 10, inc.ceil_sqrt(n)}):
                arr = con.random_arrangement(m, n, args.p, args.seed, "clustered", kt)
                rows += _incidence_rows(args, arr, f"clustered:m={m}:n={n}:k_target={kt}")
            arr = con.random_arrangement(m, n, args.p, args.seed, "generic")
            rows += _incidence_rows(args, arr, f"generic:m={m}:n={n}")
        return rows, {}
    if args.input:
        arr = inc.Arrangement.from_json(Path(args.input).read_text())
        instance = "input"
    else:
        arr = _arrangement(args, args.m, args.n, args.k_target)
        instance = f"{args.construction or 'generic'}:m={args.m}:n={args.n}"
    return _incidence_rows(args, arr, instance), {"arrangement": json.loads(arr.to_json())}


def cmd_reduce(args):
    arr = con.random_arrangement(args.m, args.n, args.p, args.seed)
    red = cx.reduce_incidence(arr.points, arr.planes, args.p, seed=args.seed, max_draws=budget(args))
    cross = cx.count_cross_incidences(red.alpha, red.beta, args.p)
    N = args.m + args.n
    return [
        row(args, N, "point_plane_incidences", red.incidences),
        row(args, N, "line_line_incidences", cross),
        row(args, N, "draws", red.draws),
    ], {"covector": list(red.G.covector)}


def _sl2_subset(chart, size, seed):
    return random.Random(seed).sample(chart.lines, size)


def cmd_convert(args):
    chart = cx.sl2_chart(args.p, budget(args))
    n = args.size or 10
    if n > len(chart.lines):
        raise ValidationError(f"the chart has only {len(chart.lines)} lines")
    carriers = [chart.carrier(l) for l in _sl2_subset(chart, n, args.seed)]
    conv = cx.convert_lines(chart.G, carriers)
    I = sum(1 for q in conv.points for pi in conv.planes if ps.incident(q, pi, args.p))
    meets = cx.count_line_intersections(carriers, args.p)
    return [
        row(args, n, "ordered_meeting_pairs", meets),
        row(args, n, "point_plane_incidences", I),
        row(args, n, "incidences_minus_n", I - n),
    ], {}


def cmd_sl2_cover(args):
    p = args.p
    chart = cx.sl2_chart(p, budget(args))
    order = p * (p * p - 1)
    full, _ = cx.line_union_cover(chart.lines, p)
    size = args.size or math.ceil(p * p / 4)
    covered, frac = cx.line_union_cover(_sl2_subset(chart, size, args.seed), p)
    return [
        row(args, len(chart.lines), "chart_lines", len(chart.lines)),
        row(args, len(chart.lines), "all_lines_cover", full, "p(p^2-1)", Fraction(full, order)),
        row(args, size, "sl2_subset_cover", covered, "p^3", frac),
    ], {}


def _plane_set(args):
    p, size = args.p, args.size or 8
    kind = args.construction or "grid"
    if kind == "grid":
        return [(a, b) for a in range(1, size + 1) for b in range(1, size + 1)]
    if kind == "coprime":
        return con.coprime_grid(size, p)
    if kind == "random":
        rng = random.Random(args.seed)
        return sorted({(rng.randrange(p), rng.randrange(p)) for _ in range(size)})
    raise ValidationError(f"unknown planar construction {kind!r}")


def cmd_bilinear(args):
    S = _plane_set(args)
    N = len(S)
    rows = []
    for kind in ("dot", "wedge"):
        vals = ap.bilinear_value_set(S, ap.BilinearForm(kind, args.p))
        rows.append(row(args, N, "value_set_over_N23", len(vals), f"|S|^(2/3) [{kind}]",
                        len(vals) / N ** (2 / 3), kind))
    return rows, {}


def cmd_sumprod(args):
    size = args.size or 16
    A = range(1, size + 1)
    rows = []
    for sign, name in ((1, "AA+AA"), (-1, "AA-AA")):
        s = ap.product_sum_set(A, A, sign, args.p)
        rows.append(row(args, size, name, len(s), "|A|^(3/2)", len(s) / size ** 1.5))
    return rows, {}


def cmd_distances(args):
    p = args.p
    kind = args.construction or "random"
    if kind == "random":
        size = args.size or p
        rng = random.Random(args.seed)
        S = set()
        while len(S) < size:
            S.add((rng.randrange(p), rng.randrange(p), rng.randrange(p)))
        S = sorted(S)
    elif kind == "semi_isotropic":
        k = args.k_target or 3
        S = list(con.semi_isotropic_grid(k, args.size or 10, p).points)
    else:
        raise ValidationError(f"unknown distance construction {kind!r}")
    N = len(S)
    census = ap.distance_census(S, p)
    nulls = ap.null_census(S, p, budget(args))
    planar = ap.is_semi_isotropic_planar(S, p)
    return [
        row(args, N, "distinct_distances", len(census.values)),
        row(args, N, "max_pinned_over_sqrtN", census.max_pinned, "ceil(sqrt(N))",
            Fraction(census.max_pinned, inc.ceil_sqrt(N)), kind),
        row(args, N, "semi_isotropic_planar", int(planar)),
        row(args, N, "null_pairs", nulls.null_pairs),
        row(args, N, "nontrivial_null_triangles", nulls.nontrivial_null_triangles),
    ], {}


def cmd_tightness(args):
    n = args.n
    p = args.p or next_prime(4 * n * n + 1)
    args.p = p
    S = con.coprime_grid(n, p)
    N = len(S)
    dot = ap.BilinearForm("dot", p)
    E = ap.energy_bilinear(S, dot, exclude_zero=False, budget=budget(args))
    Z = ap.zero_quadruples(S, dot)
    return [
        row(args, N, "energy_over_N3", E, "N^3", Fraction(E, N ** 3), f"n={n}"),
        row(args, N, "zero_quadruples", Z, "N^2", Fraction(Z, N ** 2), f"n={n}"),
    ], {}


def cmd_vanishing_poly(args):
    p, size = args.p, args.size or 5
    rng = random.Random(args.seed)
    total = ps.count_points(3, p)
    lines = set()
    while len(lines) < size:
        i, j = rng.sample(range(total), 2)
        lines.add(ps.line_from_points(ps.point_from_index(i, 3, p), ps.point_from_index(j, 3, p), p))
    lines = sorted(lines)
    d = inc.minimal_degree(size)
    poly = inc.fit_vanishing_polynomial(lines, d, p)
    return [
        row(args, size, "degree", d, "min d: C(d+3,3) > (d+1)|lines|"),
        row(args, size, "nonzero_terms", len(poly.coeffs)),
    ], {"polynomial": str(poly)}


def cmd_cubic(args):
    cs = con.cubic_surface_points(args.p)
    pts = [(1,) + x for x in cs.points]
    k = ps.collinearity(pts, args.p)
    N = len(cs.surface)
    return [
        row(args, N, "surface_points", N, "p^2", Fraction(N, args.p ** 2)),
        row(args, N, "lines", len(cs.lines)),
        row(args, N, "remaining_points", len(cs.points)),
        row(args, N, "max_collinear", k),
    ], {}


def cmd_report(args):
    paths = []
    for src in args.inputs:
        path = Path(src)
        paths += sorted(path.glob("*.csv")) if path.is_dir() else [path]
    groups = defaultdict(list)
    for path in paths:
        if not path.exists():
            continue
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                if r.get("ratio") and r.get("statistic") in THRESHOLDS:
                    groups[(r["statistic"], r.get("instance", ""))].append(float(r["ratio"]))
    if not groups:
        raise MissingArtifact("no sweep rows with ratios found in the given artifacts")
    rows = []
    for (stat, instance), ratios in sorted(groups.items()):
        op, thr = THRESHOLDS[stat]
        lo, hi = min(ratios), max(ratios)
        ok = hi <= thr if op == "<=" else lo >= thr
        rows.append({"schema_version": SCHEMA_VERSION, "statistic": stat, "instance": instance,
                     "runs": len(ratios), "min_ratio": fmt_ratio(lo), "max_ratio": fmt_ratio(hi),
                     "threshold": f"{op}{thr}", "verdict": "pass" if ok else "fail"})
    return rows, {}


COMMANDS = {
    "enumerate": cmd_enumerate,
    "klein-check": cmd_klein_check,
    "incidence": cmd_incidence,
    "reduce": cmd_reduce,
    "convert": cmd_convert,
    "sl2-cover": cmd_sl2_cover,
    "bilinear": cmd_bilinear,
    "sumprod": cmd_sumprod,
    "distances": cmd_distances,
    "tightness": cmd_tightness,
    "vanishing-poly": cmd_vanishing_poly,
    "cubic": cmd_cubic,
    "report": cmd_report,
}

DEFAULT_P = {
    "enumerate": 3, "klein-check": 3, "incidence": 101, "reduce": 101, "convert": 11,
    "sl2-cover": 5, "bilinear": 1009, "sumprod": 4001, "distances": 11, "tightness": None,
    "vanishing-poly": 101, "cubic": 19, "report": None,
}


# ------------------------------------------------------------------ output

def render(args, rows, extra) -> str:
    columns = SUMMARY_COLUMNS if args.command == "report" else COLUMNS
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "subcommand": args.command,
               "config": config_of(args), "rows": rows, **extra}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def config_of(args) -> dict:
    skip = {"func", "threads", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="prime modulus")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--m", type=int, default=30)
    common.add_argument("--n", type=int, default=30)
    common.add_argument("--k-target", type=int, default=None)
    common.add_argument("--size", type=int, default=None)
    common.add_argument("--construction", default=None)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--budget-ops", type=int, default=None,
                        help="operation budget (KIL_BUDGET_OPS overrides)")
    common.add_argument("--threads", type=int, default=1)

    parser = _Parser(prog="kleinlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "enumerate":
            sp.add_argument("--space", choices=["points", "hyperplanes", "lines"], default="lines")
            sp.add_argument("--dim", type=int, default=3)
        elif name == "incidence":
            sp.add_argument("--sweep", action="store_true", help="run the fixed bound-sweep corpus")
            sp.add_argument("--input", default=None, help="arrangement JSON file")
        elif name == "report":
            sp.add_argument("inputs", nargs="+", help="CSV files or directories of CSVs")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    command = next((a for a in argv if a in COMMANDS), None)
    args = None
    try:
        args = build_parser().parse_args(argv)
        if args.p is None:
            args.p = DEFAULT_P[args.command]
        if args.threads < 1:
            raise ValidationError("--threads must be positive")
        rows, extra = COMMANDS[args.command](args)
        text = render(args, rows, extra)
        if args.out:
            write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
        return 0
    except KleinLabError as exc:
        status = 2 if isinstance(exc, ResourceExhausted) else 1
        err = {"code": exc.code, "message": str(exc), "subcommand": command,
               "config": config_of(args) if args is not None else {}}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return status


if __name__ == "__main__":
    sys.exit(main())
