"""Command line interface.

Exit codes: 0 ok, 1 Newick syntax error, 2 structural or label error,
3 closed form and interleaving oracle disagree, 4 usage or I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

from . import __version__
from .cophenetic import cophenetic_vector, hom_exists, tree_distance
from .errors import NewickSyntaxError, PhyloError, TreeStructureError
from .flow import PhTreeFlow, interleave, interleaving_distance, smooth
from .matrix import distance_matrix
from .newick import HeightConvention, parse_newick, serialize, to_phylo

EXIT_OK, EXIT_SYNTAX, EXIT_STRUCTURE, EXIT_DISAGREE, EXIT_USAGE = 0, 1, 2, 3, 4

# largest leaf count for which --oracle builds morphisms explicitly
CONSTRUCTIVE_MAX_LEAVES = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity", "max"):
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p {text!r}") from None
    if not p >= 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or 'inf'")
    return p


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _load(path: str, heights: str):
    nodes = parse_newick(_read(path))
    return [to_phylo(nd, heights) for nd in nodes]


def _select(trees, index: int, path: str):
    if not -len(trees) <= index < len(trees):
        raise UsageError(f"{path}: tree index {index} out of range ({len(trees)} trees)")
    return trees[index]


def _fmt(args):
    digits = args.digits

    def fmt(x: float) -> str:
        if math.isinf(x):
            return "inf"
        return format(float(x), f".{digits}g")

    return fmt


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"{out}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    nodes = parse_newick(_read(args.path))
    counts, failed = [], False
    for k, nd in enumerate(nodes):
        try:
            t = to_phylo(nd, args.heights)
        except TreeStructureError as exc:
            print(f"{args.path}: tree {k}: {type(exc).__name__}: {exc}", file=sys.stderr)
            failed = True
            continue
        counts.append(str(t.n))
    if failed:
        return EXIT_STRUCTURE
    noun = "tree" if len(nodes) == 1 else "trees"
    print(f"{len(nodes)} {noun}, leaf counts: {', '.join(counts)}")
    return EXIT_OK


def cmd_dist(args) -> int:
    a = _select(_load(args.a, args.heights), args.index_a, args.a)
    b = _select(_load(args.b, args.heights), args.index_b, args.b)
    fmt = _fmt(args)
    d = tree_distance(a, b, args.p)
    if not args.oracle:
        print(fmt(d))
        return EXIT_OK
    if not math.isinf(args.p):
        raise UsageError("--oracle is only defined for p = inf")
    oracle = "constructive" if a.n <= CONSTRUCTIVE_MAX_LEAVES else "vector"
    e = interleaving_distance(PhTreeFlow(oracle), a, b, tol=args.tol)
    diff = abs(d - e)
    print(f"closed_form\t{fmt(d)}")
    print(f"interleaving\t{fmt(e)}")
    print(f"difference\t{fmt(diff)}")
    return EXIT_OK if diff <= args.tol else EXIT_DISAGREE


def cmd_matrix(args) -> int:
    trees = _load(args.path, args.heights)
    labels = [f"{args.path}:{k}" for k in range(len(trees))]
    report = distance_matrix(trees, args.p, labels=labels, n_jobs=args.jobs)
    if args.format == "csv":
        text = report.to_csv(_fmt(args))
    else:
        text = report.to_json()
    _write(text, args.out)
    return EXIT_OK


def cmd_smooth(args) -> int:
    trees = _load(args.path, args.heights)
    _write("".join(serialize(smooth(t, args.epsilon)) + "\n" for t in trees), args.out)
    return EXIT_OK


def cmd_vector(args) -> int:
    t = _select(_load(args.path, args.heights), args.index, args.path)
    v = cophenetic_vector(t)
    _write(v.to_json() + "\n" if args.format == "json" else v.to_csv(), args.out)
    return EXIT_OK


def cmd_hom(args) -> int:
    a = _select(_load(args.a, args.heights), args.index_a, args.a)
    b = _select(_load(args.b, args.heights), args.index_b, args.b)
    ca, cb = cophenetic_vector(a), cophenetic_vector(b)
    ab, ba = hom_exists(ca, cb), hom_exists(cb, ca)
    if ab and ba:
        print("both (equal)")
    elif ab:
        print("A→B")
    elif ba:
        print("B→A")
    else:
        print("incomparable")
    return EXIT_OK


def cmd_interleave(args) -> int:
    a = _select(_load(args.a, args.heights), args.index_a, args.a)
    b = _select(_load(args.b, args.heights), args.index_b, args.b)
    cert = interleave(PhTreeFlow("vector"), a, b, tol=args.tol)
    _write(cert.to_json() + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--heights",
        choices=[c.value for c in HeightConvention],
        default=HeightConvention.AUTO.value,
        help="how node heights are derived from Newick input (default: auto)",
    )
    common.add_argument(
        "--digits", type=int, default=12, help="significant digits for printed reals"
    )

    parser = _Parser(
        prog="linf-cophenetic",
        description="l-infinity cophenetic / interleaving distance between phylogenetic trees",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="parse and validate a tree file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    def pair(p):
        p.add_argument("a")
        p.add_argument("b")
        p.add_argument("--index-a", type=int, default=0, help="tree to use from file a")
        p.add_argument("--index-b", type=int, default=0, help="tree to use from file b")

    p = sub.add_parser("dist", parents=[common], help="distance between two trees")
    pair(p)
    p.add_argument("--p", type=_p_value, default=math.inf, help="norm exponent, >= 1 or inf")
    p.add_argument("--oracle", action="store_true", help="cross-check via interleaving search")
    p.add_argument("--tol", type=float, default=1e-9, help="bisection tolerance for --oracle")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("matrix", parents=[common], help="all-pairs distances in one file")
    p.add_argument("path")
    p.add_argument("--p", type=_p_value, default=math.inf)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("smooth", parents=[common], help="lower every height by epsilon")
    p.add_argument("path")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("vector", parents=[common], help="print a cophenetic vector")
    p.add_argument("path")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_vector)

    p = sub.add_parser("hom", parents=[common], help="which morphisms exist between two trees")
    pair(p)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("interleave", parents=[common], help="interleaving certificate (JSON)")
    pair(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_interleave)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NewickSyntaxError as exc:
        print(f"SyntaxError: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except TreeStructureError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except (UsageError, PhyloError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
