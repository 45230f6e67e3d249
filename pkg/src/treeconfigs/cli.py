"""Command-line interface: every subsystem as a reproducible tabular report.

Reports are CSV by default (JSON with --json). Each run starts with a
provenance header carrying the schema version, package version, the exact
command line and the seed when one is involved, so identical invocations
produce byte-identical output. Rationals print as "p/q"; floats use 12
significant digits.

Exit codes: 0 success, 2 usage error, 3 capacity error, 4 data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .errors import CapacityError, DataError
from . import configs, moments, series, stats, trees, weights
from .newick import parse_history, parse_labeled, parse_shape, serialize
from .numutil import log_int, normal_cdf

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_DATA = 4


class Report:
    """One tabular result: named columns, row list, provenance."""

    def __init__(self, command, columns, rows, seed=None, generator=None):
        self.command = command
        self.columns = columns
        self.rows = rows
        self.seed = seed
        self.generator = generator

    def _format(self, value):
        if isinstance(value, Fraction):
            return "%d/%d" % (value.numerator, value.denominator)
        if isinstance(value, float):
            return "%.12g" % value
        if isinstance(value, bool):
            return "true" if value else "false"
        return value

    def provenance(self):
        items = [
            ("schema", SCHEMA_VERSION),
            ("version", __version__),
            ("command", self.command),
        ]
        if self.seed is not None:
            items.append(("seed", str(self.seed)))
        if self.generator is not None:
            items.append(("generator", self.generator))
        return items

    def as_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance():
            buf.write("# %s=%s\n" % (key, value))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([self._format(v) for v in row])
        return buf.getvalue()

    def as_json(self) -> str:
        def jsonable(value):
            if isinstance(value, Fraction):
                return "%d/%d" % (value.numerator, value.denominator)
            if isinstance(value, float):
                return float("%.12g" % value) if math.isfinite(value) else repr(value)
            return value

        payload = dict(self.provenance())
        payload["columns"] = list(self.columns)
        payload["rows"] = [
            {col: jsonable(v) for col, v in zip(self.columns, row)} for row in self.rows
        ]
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _emit(report: Report, args) -> None:
    text = report.as_json() if args.json else report.as_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pmap(fn, items, threads):
    """Order-preserving map, optionally on a thread pool. The merge order
    is fixed by the input order, so output never depends on thread count."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _input_trees(args):
    """Trees from --tree and/or --file (one Newick per line)."""
    texts = []
    if args.tree:
        texts.append(args.tree)
    if args.file:
        with open(args.file, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    texts.append(line)
    if not texts:
        raise DataError("no input tree: pass --tree or --file")
    out = []
    for text in texts:
        stripped = text.replace(";", "").strip()
        if set(stripped) <= set("(),*• \t"):
            out.append(parse_shape(text))
        else:
            out.append(parse_labeled(text))
    return out


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_shapes(args):
    shapes = trees.enumerate_shapes(args.n)
    if args.list:
        rows = [(i, serialize(s)) for i, s in enumerate(shapes)]
        return Report(_cmdline(args), ["index", "newick"], rows)
    return Report(_cmdline(args), ["n", "count"], [(args.n, len(shapes))])


def _cmd_configs(args):
    parsed = _input_trees(args)
    if args.per_node:
        columns = ["tree_index", "node", "kind", "subtree", "count"]
        rows = []
        for ti, tree in enumerate(parsed):
            table = configs.node_configs(tree)
            order = trees.preorder(tree)
            for ref in sorted(table):
                node = order[ref]
                kind = "leaf" if node.left is None else "internal"
                rows.append((ti, ref, kind, serialize(node), table[ref]))
        return Report(_cmdline(args), columns, rows)
    columns = ["tree_index", "tree", "n", "root", "total"]
    if args.oracle:
        columns.append("oracle_match")
    rows = []
    for ti, tree in enumerate(parsed):
        row = [ti, serialize(tree), tree.size,
               configs.root_configs(tree), configs.total_configs(tree)]
        if args.oracle:
            row.append(configs.oracle_matches(tree))
        rows.append(tuple(row))
    return Report(_cmdline(args), columns, rows)


def _cmd_weights(args):
    weights.check_model(args.model)
    rows = []
    for shape in trees.enumerate_shapes(args.n):
        w = weights.shape_weights(shape)
        induced = w.p_induced_uniform if args.model == weights.UNIFORM else w.p_induced_yule
        rows.append((serialize(shape), w.lab, w.out, w.ouh, w.p_yule_labeled, induced))
    return Report(
        _cmdline(args),
        ["shape", "lab", "out", "ouh", "p_yule_labeled", "p_induced"],
        rows,
    )


def _cmd_moments(args):
    mode = "float" if args.float else "exact"
    table = moments.uniform_moments(args.n_max, mode) if args.model == weights.UNIFORM \
        else moments.yule_moments(args.n_max, mode)
    columns = ["n", "e_r", "e_t", "e_r2", "e_tr", "e_t2",
               "var_r", "var_t", "cov_tr", "rho_tr"]
    rows = []
    for row in table.rows:
        rho = row.rho_tr if row.rho_tr is not None else float("nan")
        rows.append((row.n, row.e_r, row.e_t, row.e_r2, row.e_tr, row.e_t2,
                     row.var_r, row.var_t, row.cov_tr, rho))
    return Report(_cmdline(args), columns, rows)


def _cmd_series_check(args):
    which = args.which
    rows = []
    if which in ("S1", "S2", "S3"):
        report = series.verify_functional_systems(args.order)
        for check in report.checks:
            if check.system != which:
                continue
            rows.append((check.system, check.equation, check.order_checked,
                         "" if check.first_violation is None else check.first_violation,
                         check.first_violation is None))
        return Report(_cmdline(args),
                      ["system", "equation", "order_checked", "first_violation", "ok"],
                      rows)
    if which == "coeffs":
        order = args.order
        useq = moments.uniform_sequences(order)
        yule_coeffs = series.yule_mean_root_coefficients(min(order, series.GF_YULE_CAP))
        yseq = moments.yule_sequences(len(yule_coeffs) - 1)
        for name in ("R", "T", "V", "U"):
            gf = series.gf_uniform(name, order)
            reference = {
                "R": lambda n: useq.rt[n] - useq.cat[n],
                "T": lambda n: useq.t[n],
                "V": lambda n: useq.vt[n] - useq.t[n],
                "U": lambda n: useq.u[n],
            }[name]
            bad = [n for n in range(1, order + 1) if gf.coefficient(n) != reference(n)]
            rows.append(("uniform", name, order, "" if not bad else bad[0], not bad))
        bad = [
            n for n in range(1, len(yule_coeffs))
            if yule_coeffs[n] != Fraction(yseq.hr[n], yseq.fact[n])
        ]
        rows.append(("yule", "R", len(yule_coeffs) - 1, "" if not bad else bad[0], not bad))
        return Report(_cmdline(args),
                      ["family", "series", "order_checked", "first_mismatch", "ok"],
                      rows)
    raise DataError("unknown series check %r" % (which,))


def _parse_grid(spec: str):
    try:
        lo_s, hi_s, step_s = spec.split(":")
        lo, hi, step = Fraction(lo_s), Fraction(hi_s), Fraction(step_s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DataError("grid must be 'a:b:step', got %r" % (spec,)) from exc
    if step <= 0 or hi < lo:
        raise DataError("grid needs step > 0 and b >= a")
    out = []
    y = lo
    while y <= hi:
        out.append(float(y))
        y += step
    return out


def _cmd_distribution(args):
    dist = stats.exact_distribution(args.n, args.model)
    if args.cdf_grid:
        ys = _parse_grid(args.cdf_grid)
        points = stats.standardized_log_cdf(dist, ys)
        rows = [(y, value, normal_cdf(y)) for y, value in points]
        return Report(_cmdline(args), ["y", "cdf", "normal"], rows)
    rows = [
        (serialize(e.shape), e.total, e.root, e.prob)
        for e in dist.entries
    ]
    return Report(_cmdline(args), ["shape", "total", "root", "prob"], rows)


def _cmd_extremal(args):
    report = stats.extremal_shapes(args.n)
    rows = [
        ("max_root", serialize(report.max_root_shape),
         report.max_root, report.total_at_max_root),
        ("max_total", serialize(report.max_total_shape),
         report.root_at_max_total, report.max_total),
    ]
    return Report(_cmdline(args), ["quantity", "shape", "root", "total"], rows)


def _cmd_sample(args):
    run = stats.monte_carlo_log_moments(args.n, args.model, args.samples, args.seed)
    columns = ["n", "model", "samples", "seed", "generator",
               "mean_log_total", "se_mean", "var_log_total", "se_var",
               "mean_log_total_over_n", "var_log_total_over_n"]
    rows = [(run.n, run.model, run.samples, run.seed, run.generator,
             run.mean_log_total, run.se_mean, run.var_log_total, run.se_var,
             run.mean_per_n, run.var_per_n)]
    return Report(_cmdline(args), columns, rows, seed=args.seed, generator=run.generator)


def _figure_rows(figure: int, threads: int):
    if figure == 2:
        def scatter_row(shape):
            root = configs.root_configs(shape)
            total = configs.total_configs(shape)
            return (serialize(shape), root, total, log_int(root), log_int(total))

        rows = _pmap(scatter_row, trees.enumerate_shapes(15), threads)
        return ["shape", "root", "total", "log_root", "log_total"], rows
    if figure in (3, 4):
        table = moments.uniform_moments(100) if figure == 3 else moments.yule_moments(100)
        rows = [
            (n, table.row(n).e_r, table.row(n).e_t,
             float(table.row(n).e_t / table.row(n).e_r))
            for n in range(2, 101)
        ]
        return ["n", "e_r", "e_t", "ratio"], rows
    if figure in (5, 6):
        dist = stats.exact_distribution(15, weights.UNIFORM if figure == 5 else weights.YULE)
        ys = [round(-3 + k * 0.1, 10) for k in range(61)]
        points = stats.standardized_log_cdf(dist, ys)
        rows = [(y, value, normal_cdf(y)) for y, value in points]
        return ["y", "cdf", "normal"], rows
    if figure == 7:
        report = stats.extremal_shapes(15)
        rows = [
            ("max_root", serialize(report.max_root_shape),
             report.max_root, report.total_at_max_root),
            ("max_total", serialize(report.max_total_shape),
             report.root_at_max_total, report.max_total),
        ]
        return ["quantity", "shape", "root", "total"], rows
    if figure == 8:
        rows = [
            (n, e_uniform, e_yule, float(e_yule) > float(e_uniform))
            for n, e_uniform, e_yule in stats.mean_total_by_model(2, 20)
        ]
        return ["n", "e_t_uniform", "e_t_yule", "yule_exceeds_uniform"], rows
    raise DataError("unknown figure id %r (expected 2..8)" % (figure,))


def _cmd_report(args):
    columns, rows = _figure_rows(args.figure, args.threads)
    return Report(_cmdline(args), columns, rows)


_COMMANDS = {
    "shapes": _cmd_shapes,
    "configs": _cmd_configs,
    "weights": _cmd_weights,
    "moments": _cmd_moments,
    "series-check": _cmd_series_check,
    "distribution": _cmd_distribution,
    "extremal": _cmd_extremal,
    "sample": _cmd_sample,
    "report": _cmd_report,
}

_ARGV = []


def _cmdline(args) -> str:
    """Command line for the provenance header.

    Execution-only flags (--threads, --out) are dropped: they cannot change
    report content, and provenance must be identical across thread counts.
    """
    shown = []
    skip_next = False
    for token in _ARGV:
        if skip_next:
            skip_next = False
            continue
        if token in ("--threads", "--out"):
            skip_next = True
            continue
        if token.startswith("--threads=") or token.startswith("--out="):
            continue
        shown.append(token)
    return "treeconfigs " + " ".join(shown)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeconfigs",
        description="Exact counts and statistics of ancestral configurations "
                    "on matching gene-tree/species-tree topologies.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for per-shape loops; output is "
                             "identical for any value")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("shapes", parents=[common], help="enumerate canonical shapes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true", help="list shapes as Newick")

    p = sub.add_parser("configs", parents=[common],
                       help="configuration counts for input trees")
    p.add_argument("--tree", help="Newick text (labeled, or shape with '*' leaves)")
    p.add_argument("--file", help="file with one Newick per line")
    p.add_argument("--per-node", action="store_true", dest="per_node")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check counts against the antichain oracle")

    p = sub.add_parser("weights", parents=[common],
                       help="per-shape counts and induced probabilities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--model", required=True, choices=list(weights.MODELS))

    p = sub.add_parser("moments", parents=[common], help="moment table up to n-max")
    p.add_argument("--model", required=True, choices=list(weights.MODELS))
    p.add_argument("--n-max", type=int, required=True, dest="n_max")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", default=True)
    group.add_argument("--float", action="store_true", default=False)

    p = sub.add_parser("series-check", parents=[common],
                       help="verify generating-function identities")
    p.add_argument("--which", required=True, choices=["S1", "S2", "S3", "coeffs"])
    p.add_argument("--order", type=int, default=40)

    p = sub.add_parser("distribution", parents=[common],
                       help="exact joint distribution of (total, root)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--model", required=True, choices=list(weights.MODELS))
    p.add_argument("--cdf-grid", dest="cdf_grid",
                   help="a:b:step grid of standardized log-total CDF points")

    p = sub.add_parser("extremal", parents=[common],
                       help="shapes maximizing root and total counts")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("sample", parents=[common], help="seeded Monte Carlo sampling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--model", required=True, choices=list(weights.MODELS))
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("report", parents=[common],
                       help="plot-ready data behind the standard figures")
    p.add_argument("--figure", type=int, required=True)

    return parser


def run(argv=None) -> int:
    global _ARGV
    argv = list(sys.argv[1:] if argv is None else argv)
    _ARGV = argv
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        report = _COMMANDS[args.subcommand](args)
        _emit(report, args)
    except CapacityError as exc:
        print("capacity error: %s" % exc, file=sys.stderr)
        return EXIT_CAPACITY
    except DataError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
