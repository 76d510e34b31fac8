"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric/degenerate
error.  Machine-readable results go to files, a short summary to stdout and
diagnostics to stderr as a single line.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .data import (
    FEATURES,
    format_labels_csv,
    generate_synthetic,
    parse_dataset,
    parse_labels_csv,
    serialize_dataset,
    table1_spec,
    to_feature_matrix,
)
from .distance import distance_matrix
from .errors import DataError, ParameterError, RegionClustError
from .hierarchical import LINKAGES, Dendrogram, agglomerate, cophenetic_correlation, cophenetic_matrix, cut
from .inequality import GroupedShares, funds_ratio, gini_grouped, gini_microdata, poverty_headcount
from .kmeans import elbow_select, explained_variance, kmeans, wcss_curve
from .partition import Partition
from .preprocess import zscore
from .report import profile, ratio_report, render_markdown
from .svg import render_dendrogram_svg, render_scatter_svg

DEFAULT_SEED = 2018
DEFAULT_RESTARTS = 10


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise DataError(f"{path} is not valid UTF-8") from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load(args):
    ds = parse_dataset(_read(args.input))
    raw = to_feature_matrix(ds)
    feats = raw if args.no_standardize else zscore(raw)
    return ds, raw, feats


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value >= 0:
        raise argparse.ArgumentTypeError("expected a nonnegative number")
    return value


def _cluster_hier(args, feats):
    d = distance_matrix(feats, workers=args.threads)
    tree = agglomerate(d, args.linkage)
    part = cut(tree, args.k)
    ccc = cophenetic_correlation(d, cophenetic_matrix(tree))
    return tree, part, ccc


def cmd_validate(args):
    ds = parse_dataset(_read(args.input))
    print(f"ok: {len(ds)} records")


def cmd_synth(args):
    panel = generate_synthetic(table1_spec(args.noise, args.seed))
    text = serialize_dataset(panel.dataset)
    if args.out:
        _write(args.out, text)
        print(f"wrote {len(panel.dataset)} records to {args.out}")
    else:
        sys.stdout.write(text)
    if args.truth:
        _write(args.truth, format_labels_csv(panel.dataset.region_ids, panel.labels))


def cmd_hier(args):
    ds, raw, feats = _load(args)
    tree, part, ccc = _cluster_hier(args, feats)
    if args.labels:
        _write(args.labels, format_labels_csv(ds.region_ids, part.labels))
    if args.tree:
        _write(args.tree, tree.to_json() + "\n")
    if args.dendrogram:
        _write(args.dendrogram, render_dendrogram_svg(tree, ds.region_ids))
    print(f"linkage: {args.linkage}; clusters: {part.k}; sizes: {' '.join(map(str, part.sizes()))}")
    print(f"cophenetic correlation = {ccc:.6f}")


def cmd_kmeans(args):
    ds, raw, feats = _load(args)
    res = kmeans(feats, args.k, args.seed, args.restarts, workers=args.threads)
    ev = explained_variance(feats, res.partition)
    if args.labels:
        _write(args.labels, format_labels_csv(ds.region_ids, res.partition.labels))
    if args.json:
        _write(args.json, res.to_json() + "\n")
    if args.scatter:
        _write(args.scatter, render_scatter_svg(raw, res.partition, args.x_col, args.y_col, names=ds.region_ids))
    print(f"clusters: {res.partition.k}; sizes: {' '.join(map(str, res.partition.sizes()))}")
    print(f"wcss = {res.wcss:.6f}; explained variance = {ev:.2f}%")


def cmd_elbow(args):
    ds, raw, feats = _load(args)
    if args.kmax > len(ds):
        raise ParameterError(f"--kmax {args.kmax} exceeds the {len(ds)} regions")
    curve = wcss_curve(feats, args.kmin, args.kmax, args.seed, args.restarts, workers=args.threads)
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "wcss"])
        for k, wcss in curve.points:
            w.writerow([k, repr(wcss)])
        _write(args.out, buf.getvalue())
    for k, wcss in curve.points:
        print(f"k = {k}: wcss = {wcss:.6f}")
    print(f"selected k = {elbow_select(curve)}")


def _partition_from_file(ds, path):
    lf = parse_labels_csv(_read(path))
    by_id = dict(zip(lf.region_ids, lf.clusters))
    missing = [rid for rid in ds.region_ids if rid not in by_id]
    if missing:
        raise DataError(f"labels file lacks region {missing[0]!r}")
    return Partition.from_labels([by_id[rid] for rid in ds.region_ids], method="file")


def cmd_profile(args):
    ds = parse_dataset(_read(args.input))
    part = _partition_from_file(ds, args.labels)
    prof = profile(ds, part)
    doc = render_markdown(prof, ratio_report(prof) if part.k >= 2 else None)
    if args.out:
        _write(args.out, doc)
        print(f"wrote profile of {part.k} clusters to {args.out}")
    else:
        sys.stdout.write(doc)


def cmd_report(args):
    ds, raw, feats = _load(args)
    lines = ["# Regional differentiation report", ""]
    transform = "none" if args.no_standardize else "z-score"
    if args.method == "hier":
        tree, part, ccc = _cluster_hier(args, feats)
        lines += [f"- method: hierarchical, {args.linkage} linkage", f"- standardization: {transform}",
                  f"- regions: {len(ds)}; clusters: {part.k}",
                  f"- cophenetic correlation: {ccc:.4f}"]
        if args.dendrogram:
            _write(args.dendrogram, render_dendrogram_svg(tree, ds.region_ids))
    else:
        res = kmeans(feats, args.k, args.seed, args.restarts, workers=args.threads)
        part = res.partition
        lines += [f"- method: k-means, seed {args.seed}, {args.restarts} restarts",
                  f"- standardization: {transform}",
                  f"- regions: {len(ds)}; clusters: {part.k}",
                  f"- within-cluster sum of squares: {res.wcss:.4f}",
                  f"- explained variance: {explained_variance(feats, part):.2f}%"]
    if args.scatter:
        _write(args.scatter, render_scatter_svg(raw, part, args.x_col, args.y_col, names=ds.region_ids))
    if args.labels:
        _write(args.labels, format_labels_csv(ds.region_ids, part.labels))
    prof = profile(ds, part)
    body = render_markdown(prof, ratio_report(prof) if part.k >= 2 else None)
    doc = "\n".join(lines) + "\n\n" + body.replace("# Cluster profile", "## Cluster profile", 1)
    if args.out:
        _write(args.out, doc)
        print(f"wrote report to {args.out}")
    else:
        sys.stdout.write(doc)


def cmd_gini(args):
    if args.micro:
        text = _read(args.micro)
        rows = list(csv.reader(io.StringIO(text.lstrip("﻿"))))
        if not rows or [h.strip() for h in rows[0]] != ["income"]:
            raise DataError("microdata file header must be exactly: income")
        try:
            incomes = [float(r[0]) for r in rows[1:] if r]
        except ValueError as exc:
            raise DataError(f"non-numeric income: {exc}") from None
        print(f"gini = {gini_microdata(incomes):.6f}")
        if len(incomes) >= 10:
            print(f"funds ratio = {funds_ratio(incomes):.4f}")
        if args.living_wage is not None:
            print(f"poverty headcount = {poverty_headcount(incomes, args.living_wage):.2f}%")
    else:
        text = _read(args.grouped)
        rows = list(csv.reader(io.StringIO(text.lstrip("﻿"))))
        if not rows or [h.strip() for h in rows[0]] != ["population_share", "income_share"]:
            raise DataError("grouped file header must be exactly: population_share,income_share")
        try:
            pop = [float(r[0]) for r in rows[1:] if r]
            inc = [float(r[1]) for r in rows[1:] if r]
        except (ValueError, IndexError) as exc:
            raise DataError(f"bad grouped row: {exc}") from None
        print(f"gini = {gini_grouped(GroupedShares(tuple(pop), tuple(inc))):.6f}")


def cmd_render(args):
    tree = Dendrogram.from_json(_read(args.tree))
    if args.input:
        names = parse_dataset(_read(args.input)).region_ids
    else:
        names = [str(i) for i in range(tree.n)]
    _write(args.out, render_dendrogram_svg(tree, names))
    print(f"wrote dendrogram of {tree.n} leaves to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regionclust", description="Cluster regions by income indicators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def panel(p):
        p.add_argument("--input", required=True, help="panel CSV (region_id,region_name,income,poverty_share,gini)")

    def features(p):
        p.add_argument("--no-standardize", action="store_true", help="cluster on raw indicators instead of z-scores")
        p.add_argument("--threads", type=_positive, default=1, help="worker threads (results do not depend on it)")

    def seeded(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
        p.add_argument("--restarts", type=_positive, default=DEFAULT_RESTARTS,
                       help=f"k-means restarts (default {DEFAULT_RESTARTS})")

    def scatter(p):
        p.add_argument("--scatter", help="write a cluster scatter SVG here")
        p.add_argument("--x-col", type=int, default=0, help="scatter x column index (default 0, income)")
        p.add_argument("--y-col", type=int, default=1, help="scatter y column index (default 1, poverty share)")

    p = sub.add_parser("validate", help="check a panel CSV")
    panel(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="write a synthetic panel around the published cluster means")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.add_argument("--truth", help="write generating labels as region_id,cluster CSV")
    p.add_argument("--noise", type=_fraction, default=0.0,
                   help="noise per coordinate as a fraction of the minimum standardized centroid gap")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hier", help="agglomerative clustering")
    panel(p)
    features(p)
    p.add_argument("--linkage", choices=LINKAGES, default="single")
    p.add_argument("--k", type=_positive, default=4, help="number of clusters (default 4)")
    p.add_argument("--labels", help="write region_id,cluster CSV here")
    p.add_argument("--dendrogram", help="write dendrogram SVG here")
    p.add_argument("--tree", help="write dendrogram JSON here")
    p.set_defaults(func=cmd_hier)

    p = sub.add_parser("kmeans", help="k-means clustering")
    panel(p)
    features(p)
    seeded(p)
    scatter(p)
    p.add_argument("--k", type=_positive, default=4, help="number of clusters (default 4)")
    p.add_argument("--labels", help="write region_id,cluster CSV here")
    p.add_argument("--json", help="write the k-means result as JSON here")
    p.set_defaults(func=cmd_kmeans)

    p = sub.add_parser("elbow", help="WCSS curve and elbow choice of k")
    panel(p)
    features(p)
    seeded(p)
    p.add_argument("--kmin", type=_positive, default=1)
    p.add_argument("--kmax", type=_positive, default=8)
    p.add_argument("--out", help="write the curve as k,wcss CSV here")
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("profile", help="cluster means and comparisons for given labels")
    panel(p)
    p.add_argument("--labels", required=True, help="region_id,cluster CSV")
    p.add_argument("--out", help="markdown output (default: stdout)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("report", help="cluster, validate and profile in one run")
    panel(p)
    features(p)
    seeded(p)
    scatter(p)
    p.add_argument("--method", choices=("kmeans", "hier"), default="kmeans")
    p.add_argument("--linkage", choices=LINKAGES, default="single")
    p.add_argument("--k", type=_positive, default=4, help="number of clusters (default 4)")
    p.add_argument("--labels", help="write region_id,cluster CSV here")
    p.add_argument("--dendrogram", help="write dendrogram SVG here (hier only)")
    p.add_argument("--out", help="markdown output (default: stdout)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("gini", help="inequality measures for an income sample")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--micro", help="one-column CSV with header 'income'")
    src.add_argument("--grouped", help="two-column CSV with header 'population_share,income_share'")
    p.add_argument("--living-wage", type=float, help="threshold for the poverty headcount (microdata only)")
    p.set_defaults(func=cmd_gini)

    p = sub.add_parser("render", help="draw a dendrogram JSON as SVG")
    p.add_argument("--tree", required=True, help="dendrogram JSON written by 'hier --tree'")
    p.add_argument("--input", help="panel CSV supplying leaf labels (default: leaf indices)")
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except RegionClustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def run() -> None:
    sys.exit(main())
