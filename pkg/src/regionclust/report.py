"""Cluster profiles and pairwise comparisons between clusters.

Profiles are always computed on the raw indicators, even when the
clustering itself ran on standardized features, so means come out in
rubles, percent and Gini units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .data import FEATURES, Dataset
from .errors import ParameterError
from .partition import Partition

ORDINALS = ("First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth")

METRIC_LABELS = {
    "income": "Average monetary income per capita, rub.",
    "poverty_share": "Population below living wage, %",
    "gini": "Gini coefficient",
}

KINDS = ("ratio", "percent_difference", "absolute_difference", "percentage_points")


def cluster_name(label: int) -> str:
    return ORDINALS[label] if label < len(ORDINALS) else f"Cluster {label + 1}"


@dataclass(frozen=True)
class ClusterStats:
    label: int
    count: int
    region_ids: tuple[str, ...]
    income: float
    poverty_share: float
    gini: float

    @property
    def name(self) -> str:
        return cluster_name(self.label)

    def mean(self, metric: str) -> float:
        return getattr(self, metric)


@dataclass(frozen=True)
class ClusterProfile:
    clusters: tuple[ClusterStats, ...]
    grand_income: float
    grand_poverty_share: float
    grand_gini: float

    @property
    def n(self) -> int:
        return sum(c.count for c in self.clusters)

    def grand_mean(self, metric: str) -> float:
        return getattr(self, f"grand_{metric}")

    @classmethod
    def from_means(cls, means: Sequence[Sequence[float]], counts: Sequence[int]) -> "ClusterProfile":
        """Build a profile from published per-cluster means and sizes."""
        clusters = tuple(
            ClusterStats(i, int(n), (), float(m[0]), float(m[1]), float(m[2]))
            for i, (m, n) in enumerate(zip(means, counts))
        )
        total = sum(counts)
        grand = [math.fsum(c.count * c.mean(f) for c in clusters) / total for f in FEATURES]
        return cls(clusters, *grand)


@dataclass(frozen=True)
class Comparison:
    metric: str
    cluster_a: int
    cluster_b: int
    kind: str
    value: float


@dataclass(frozen=True)
class Omission:
    metric: str
    cluster_a: int
    cluster_b: int
    kind: str
    reason: str


@dataclass(frozen=True)
class RatioReport:
    comparisons: tuple[Comparison, ...] = ()
    omitted: tuple[Omission, ...] = ()

    def get(self, metric: str, a: int, b: int, kind: str) -> float:
        for c in self.comparisons:
            if (c.metric, c.cluster_a, c.cluster_b, c.kind) == (metric, a, b, kind):
                return c.value
        raise KeyError((metric, a, b, kind))


def _bounded_mean(values: Sequence[float]) -> float:
    base = values[0]
    m = base + math.fsum(v - base for v in values) / len(values)
    return min(max(m, min(values)), max(values))


def profile(ds: Dataset, p: Partition) -> ClusterProfile:
    if p.n != len(ds):
        raise ParameterError(f"partition covers {p.n} regions, dataset has {len(ds)}")
    clusters = []
    for c in range(p.k):
        recs = [ds.records[i] for i in p.members(c)]
        clusters.append(ClusterStats(
            c, len(recs), tuple(r.region_id for r in recs),
            *(_bounded_mean([getattr(r, f) for r in recs]) for f in FEATURES),
        ))
    grand = [_bounded_mean([getattr(r, f) for r in ds.records]) for f in FEATURES]
    return ClusterProfile(tuple(clusters), *grand)


def compare(a: float, b: float) -> dict[str, float | None]:
    """All comparison kinds of ``a`` against ``b``; entries needing ``b > 0`` are None otherwise."""
    return {
        "ratio": a / b if b > 0 else None,
        "percent_difference": 100.0 * (a - b) / b if b > 0 else None,
        "absolute_difference": a - b,
    }


def ratio_report(c: ClusterProfile) -> RatioReport:
    """Every ordered cluster pair, every indicator, every comparison kind."""
    if len(c.clusters) < 2:
        raise ParameterError("a ratio report needs at least two clusters")
    comps = []
    omitted = []
    for metric in FEATURES:
        for a in c.clusters:
            for b in c.clusters:
                if a.label == b.label:
                    continue
                va, vb = a.mean(metric), b.mean(metric)
                for kind, value in compare(va, vb).items():
                    if value is None:
                        omitted.append(Omission(metric, a.label, b.label, kind,
                                                f"{cluster_name(b.label)} cluster mean {metric} is zero"))
                    else:
                        comps.append(Comparison(metric, a.label, b.label, kind, value))
                if metric == "poverty_share":
                    comps.append(Comparison(metric, a.label, b.label, "percentage_points", va - vb))
    return RatioReport(tuple(comps), tuple(omitted))


def _thousands(value: float) -> str:
    text = f"{abs(value):,.0f}".replace(",", " ")
    return ("-" if round(value) < 0 else "") + text


def format_value(metric: str, value: float) -> str:
    if metric == "income":
        return _thousands(value)
    if metric == "poverty_share":
        return f"{value:.2f}"
    return f"{value:.3f}"


def _signed(text: str) -> str:
    return text if text.startswith("-") else "+" + text


def render_markdown(c: ClusterProfile, r: RatioReport | None = None) -> str:
    r = r or RatioReport()
    lines = [
        "# Cluster profile",
        "",
        "| Cluster | Number of regions | " + " | ".join(METRIC_LABELS[m] for m in FEATURES) + " [^gini] |",
        "|---|---:|---:|---:|---:|",
    ]
    for cl in c.clusters:
        cells = [cl.name, str(cl.count)] + [format_value(m, cl.mean(m)) for m in FEATURES]
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("| All regions | " + str(c.n) + " | "
                 + " | ".join(format_value(m, c.grand_mean(m)) for m in FEATURES) + " |")
    lines.append("")

    footnotes = ["[^gini]: Gini is reported as a unitless fraction in (0, 1)."]
    by_key: dict[tuple, dict[str, float]] = {}
    for comp in r.comparisons:
        by_key.setdefault((comp.metric, comp.cluster_a, comp.cluster_b), {})[comp.kind] = comp.value
    flagged: dict[tuple, list[Omission]] = {}
    for om in r.omitted:
        by_key.setdefault((om.metric, om.cluster_a, om.cluster_b), {})
        flagged.setdefault((om.metric, om.cluster_a, om.cluster_b), []).append(om)

    if by_key:
        lines += ["## Comparisons", ""]
        for metric in FEATURES:
            keys = sorted(k for k in by_key if k[0] == metric)
            if not keys:
                continue
            lines += [f"### {METRIC_LABELS[metric]}", ""]
            for key in keys:
                kinds = by_key[key]
                _, a, b = key
                parts = []
                if "ratio" in kinds:
                    parts.append(f"ratio {kinds['ratio']:.1f}")
                if "absolute_difference" in kinds:
                    parts.append("difference " + _signed(format_value(metric, kinds["absolute_difference"])))
                if "percentage_points" in kinds:
                    parts.append(f"{kinds['percentage_points']:+.2f} pp")
                if "percent_difference" in kinds:
                    parts.append(f"{kinds['percent_difference']:+.2f}%")
                text = f"- {cluster_name(a)} vs {cluster_name(b)}: " + "; ".join(parts)
                if key in flagged:
                    note = f"omit{len(footnotes)}"
                    text += f" [^{note}]"
                    reasons = "; ".join(f"{om.kind} omitted: {om.reason}" for om in flagged[key])
                    footnotes.append(f"[^{note}]: {reasons}.")
                lines.append(text)
            lines.append("")
    lines += footnotes
    return "\n".join(lines) + "\n"
