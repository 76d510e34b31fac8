"""Standalone SVG renderings of a dendrogram and of a cluster scatter.

Output is plain text assembled by hand; coordinates are written with a
fixed number of decimals so identical input yields identical bytes.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .data import FeatureMatrix
from .errors import ParameterError
from .hierarchical import Dendrogram
from .partition import Partition

PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
    ]


def render_dendrogram_svg(t: Dendrogram, labels: Sequence[str], leaf_spacing: float = 14.0,
                          plot_height: float = 320.0) -> str:
    """Draw merges as brackets whose crossbar sits at the merge height.

    Leaves are laid out in the tree's crossing-free order; each leaf gets a
    tick and a rotated text label.  Heights are shown as tooltips, so the
    document carries exactly one ``<text>`` element per leaf.
    """
    if len(labels) != t.n:
        raise ParameterError(f"got {len(labels)} labels for a tree with {t.n} leaves")
    margin_l, margin_r, margin_t, label_band = 40.0, 20.0, 20.0, 120.0
    width = margin_l + margin_r + leaf_spacing * t.n
    height = margin_t + plot_height + label_band
    base_y = margin_t + plot_height
    top = max((m.height for m in t.merges), default=0.0)
    scale = plot_height / top if top > 0 else 0.0

    def y_of(h: float) -> float:
        return base_y - h * scale

    order = t.leaf_order()
    x = {}
    y = {}
    for pos, leaf in enumerate(order):
        x[leaf] = margin_l + leaf_spacing * (pos + 0.5)
        y[leaf] = base_y

    out = _header(width, height)
    out.append('<style>.bracket{fill:none;stroke:#333;stroke-width:1}'
               '.leaf-tick{stroke:#333;stroke-width:1}.axis{stroke:#999;stroke-width:1}'
               '.leaf-label{font-family:sans-serif;font-size:10px}</style>')
    out.append(f'<line class="axis" x1="{_f(margin_l / 2)}" y1="{_f(margin_t)}" '
               f'x2="{_f(margin_l / 2)}" y2="{_f(base_y)}"/>')
    out.append('<g class="brackets">')
    for i, m in enumerate(t.merges):
        node = t.n + i
        ym = y_of(m.height)
        xl, xr = x[m.left], x[m.right]
        out.append(
            f'<path class="bracket" d="M{_f(xl)} {_f(y[m.left])}V{_f(ym)}H{_f(xr)}V{_f(y[m.right])}">'
            f'<title>height {m.height!r}</title></path>'
        )
        x[node] = (xl + xr) / 2
        y[node] = ym
    out.append('</g>')
    out.append('<g class="leaves">')
    for leaf in order:
        lx = x[leaf]
        out.append(f'<line class="leaf-tick" x1="{_f(lx)}" y1="{_f(base_y)}" x2="{_f(lx)}" y2="{_f(base_y + 4)}"/>')
        ly = base_y + 8
        out.append(f'<text class="leaf-label" x="{_f(lx)}" y="{_f(ly)}" text-anchor="end" '
                   f'transform="rotate(-90 {_f(lx)} {_f(ly)})">{escape(str(labels[leaf]))}</text>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def _axis_range(values) -> tuple[float, float]:
    lo, hi = float(min(values)), float(max(values))
    span = hi - lo
    if span == 0:
        lo, hi, span = lo - 0.5, hi + 0.5, 1.0
    return lo - 0.05 * span, hi + 0.05 * span


def render_scatter_svg(m: FeatureMatrix, p: Partition, x_col: int, y_col: int,
                       width: float = 480.0, height: float = 360.0,
                       names: Sequence[str] | None = None) -> str:
    """One circle per row, coloured by cluster, on axes padded by 5% of each range."""
    for col in (x_col, y_col):
        if not isinstance(col, int) or not 0 <= col < m.p:
            raise ParameterError(f"column index {col!r} out of range [0, {m.p})")
    if p.n != m.n:
        raise ParameterError(f"partition covers {p.n} rows, matrix has {m.n}")
    ml, mr, mt, mb = 60.0, 20.0, 20.0, 50.0
    pw, ph = width - ml - mr, height - mt - mb
    xs = m.values[:, x_col]
    ys = m.values[:, y_col]
    x0, x1 = _axis_range(xs)
    y0, y1 = _axis_range(ys)

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    out = _header(width, height)
    styles = "".join(f".cluster-{c}{{fill:{PALETTE[c % len(PALETTE)]}}}" for c in range(p.k))
    out.append(f'<style>.frame{{fill:none;stroke:#333}}.axis-label{{font-family:sans-serif;font-size:11px}}{styles}</style>')
    out.append(f'<rect class="frame" x="{_f(ml)}" y="{_f(mt)}" width="{_f(pw)}" height="{_f(ph)}"/>')
    out.append('<g class="markers">')
    for i in range(m.n):
        title = f"<title>{escape(str(names[i]))}</title>" if names is not None else ""
        out.append(f'<circle class="cluster-{p.labels[i]}" cx="{_f(px(xs[i]))}" cy="{_f(py(ys[i]))}" r="4">{title}</circle>')
    out.append('</g>')
    xname, yname = m.column_names[x_col], m.column_names[y_col]
    out.append(f'<text class="axis-label" x="{_f(ml + pw / 2)}" y="{_f(height - 12)}" text-anchor="middle">'
               f'{escape(xname)} [{x0:.4g}, {x1:.4g}]</text>')
    cy = mt + ph / 2
    out.append(f'<text class="axis-label" x="16.00" y="{_f(cy)}" text-anchor="middle" '
               f'transform={quoteattr(f"rotate(-90 16.00 {_f(cy)})")}>{escape(yname)} [{y0:.4g}, {y1:.4g}]</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
