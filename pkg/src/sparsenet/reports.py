"""Plot-ready artifacts from a record file: CSV tables and minimal SVG.

CSV is the authoritative output; the SVG renderer is dependency-free and
draws just axes plus bars or points for quick inspection.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .errors import FormatError
from .experiment import ExperimentRecord, summarize
from .features import FEATURE_NAMES

VALID_COLUMNS = FEATURE_NAMES + ("val_accuracy", "test_accuracy")


def column(records: list[ExperimentRecord], name: str) -> np.ndarray:
    """One numeric column across records; accuracy rows may be dropped."""
    if name not in VALID_COLUMNS:
        raise FormatError(
            f"unknown feature name {name!r}; valid: {', '.join(VALID_COLUMNS)}"
        )
    if name in ("val_accuracy", "test_accuracy"):
        vals = [getattr(r, name) for r in records if getattr(r, name) is not None]
    else:
        vals = [getattr(r.features, name) for r in records]
    return np.array(vals, dtype=np.float64)


def histogram(records: list[ExperimentRecord], feature: str, bins: int = 30):
    """Binned frequency counts; counts always sum to the value count."""
    vals = column(records, feature)
    counts, edges = np.histogram(vals, bins=bins)
    return edges, counts


def histogram_csv(edges: np.ndarray, counts: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_lo", "bin_hi", "count"])
    for i, c in enumerate(counts):
        writer.writerow([repr(float(edges[i])), repr(float(edges[i + 1])), int(c)])
    return buf.getvalue()


def jointplot(
    records: list[ExperimentRecord], feature: str, target: str = "test_accuracy", bins: int = 30
):
    """(x, y) pairs plus marginal histograms for feature vs accuracy."""
    usable = [r for r in records if getattr(r, target, None) is not None]
    x = column(usable, feature)
    y = column(usable, target)
    return x, y, np.histogram(x, bins=bins), np.histogram(y, bins=bins)


def xy_csv(x: np.ndarray, y: np.ndarray, xname: str, yname: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([xname, yname])
    for a, b in zip(x, y):
        writer.writerow([repr(float(a)), repr(float(b))])
    return buf.getvalue()


def table2_csv(records: list[ExperimentRecord]) -> str:
    """Per-property min/mean/max/std in the canonical property order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["property", "min", "mean", "max", "std"])
    for name, lo, mean, hi, std in summarize(records):
        writer.writerow([name, repr(lo), repr(mean), repr(hi), repr(std)])
    return buf.getvalue()


def _svg_header(width: int, height: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _axes(width: int, height: int, margin: int) -> str:
    return (
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>'
    )


def svg_histogram(edges: np.ndarray, counts: np.ndarray, title: str = "") -> str:
    width, height, margin = 640, 400, 40
    top = max(int(counts.max()), 1) if len(counts) else 1
    span = edges[-1] - edges[0] or 1.0
    parts = _svg_header(width, height)
    parts.append(_axes(width, height, margin))
    if title:
        parts.append(f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    for i, c in enumerate(counts):
        x0 = margin + plot_w * (edges[i] - edges[0]) / span
        bw = plot_w * (edges[i + 1] - edges[i]) / span
        h = plot_h * c / top
        parts.append(
            f'<rect x="{x0:.2f}" y="{height - margin - h:.2f}" width="{bw:.2f}" '
            f'height="{h:.2f}" fill="#4a90d9" stroke="black" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_scatter(x: np.ndarray, y: np.ndarray, title: str = "") -> str:
    width, height, margin = 640, 400, 40
    xs = (x - x.min()) / ((x.max() - x.min()) or 1.0)
    ys = (y - y.min()) / ((y.max() - y.min()) or 1.0)
    parts = _svg_header(width, height)
    parts.append(_axes(width, height, margin))
    if title:
        parts.append(f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    for a, b in zip(xs, ys):
        parts.append(
            f'<circle cx="{margin + plot_w * a:.2f}" cy="{height - margin - plot_h * b:.2f}" '
            f'r="2.5" fill="#4a90d9" fill-opacity="0.6"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
