"""Sample statistics and serialization of frequency reports (CSV and SVG)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .montecarlo import FrequencyReport, FrequencyRow

CSV_HEADER = "k,over_threshold,under_threshold,over_freq,under_freq,over_ci,under_ci,trials,master_seed"

SVG_WIDTH = 960
SVG_HEIGHT = 540

# One color per (benchmark pair, direction) series, in emission order.
_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class SampleSummary:
    """Moments of a sample; skewness is None when the variance is zero."""

    count: int
    mean: float
    median: float
    variance: float
    skewness: Optional[float]


def summary_stats(samples: Sequence[float]) -> SampleSummary:
    """Mean, median, unbiased variance and moment skewness m3 / m2**1.5."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("samples must be a non-empty 1-d collection")
    n = arr.size
    ordered = np.sort(arr, kind="stable")
    mid = n // 2
    median = float(ordered[mid]) if n % 2 else float((ordered[mid - 1] + ordered[mid]) / 2.0)
    if ordered[0] == ordered[-1]:
        # constant sample: exact moments, skewness undefined
        return SampleSummary(
            count=n, mean=float(ordered[0]), median=median, variance=0.0, skewness=None
        )
    mean = float(np.mean(arr))
    centered = arr - mean
    m2 = float(np.mean(centered ** 2))
    variance = float(np.sum(centered ** 2) / (n - 1)) if n > 1 else 0.0
    skewness = float(np.mean(centered ** 3) / m2 ** 1.5) if m2 > 0.0 else None
    return SampleSummary(count=n, mean=mean, median=median, variance=variance, skewness=skewness)


def _format(value: float, precision: Optional[int]) -> str:
    if precision is None:
        return repr(float(value))
    return f"{value:.{precision}f}"


def _sorted_rows(report: FrequencyReport) -> list[FrequencyRow]:
    return sorted(report.rows, key=lambda r: (r.size, r.over_threshold, r.under_threshold))


def emit_csv(report: FrequencyReport, destination=None, precision: Optional[int] = 6) -> bytes:
    """Serialize a report to CSV bytes; optionally write them to a path.

    Rows are sorted by (k, over_threshold) and floats use fixed-point
    formatting with ``precision`` decimals; precision=None emits shortest
    round-trippable representations (lossless for parse_csv).
    """
    lines = [CSV_HEADER]
    for row in _sorted_rows(report):
        lines.append(
            ",".join(
                (
                    str(row.size),
                    _format(row.over_threshold, precision),
                    _format(row.under_threshold, precision),
                    _format(row.over_freq, precision),
                    _format(row.under_freq, precision),
                    _format(row.over_ci, precision),
                    _format(row.under_ci, precision),
                    str(row.trials),
                    str(report.master_seed),
                )
            )
        )
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if destination is not None:
        path = Path(destination)
        try:
            path.write_bytes(data)
        except OSError as exc:
            raise OSError(f"failed to write CSV to {path}: {exc}") from exc
    return data


def parse_csv(source) -> FrequencyReport:
    """Rebuild a FrequencyReport from emit_csv output (bytes, text or path).

    Counts are recovered from the frequencies, so the round trip is exact
    when the CSV was emitted at full precision.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str) and source.startswith(CSV_HEADER):
        text = source
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unrecognized CSV header: {lines[0] if lines else ''!r}")
    rows = []
    seeds = set()
    for line in lines[1:]:
        fields = line.split(",")
        if len(fields) != 9:
            raise ValueError(f"malformed CSV row: {line!r}")
        trials = int(fields[7])
        over_freq, under_freq = float(fields[3]), float(fields[4])
        over = round(over_freq * trials)
        under = round(under_freq * trials)
        rows.append(
            FrequencyRow(
                size=int(fields[0]),
                over_threshold=float(fields[1]),
                under_threshold=float(fields[2]),
                over_count=over,
                under_count=under,
                between_count=trials - over - under,
                trials=trials,
                over_freq=over_freq,
                under_freq=under_freq,
                over_ci=float(fields[5]),
                under_ci=float(fields[6]),
            )
        )
        seeds.add(int(fields[8]))
    if len(seeds) > 1:
        raise ValueError(f"inconsistent master_seed values in CSV: {sorted(seeds)}")
    return FrequencyReport(rows=tuple(rows), master_seed=seeds.pop() if seeds else 0)


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg_chart(report: FrequencyReport, description: str = "") -> str:
    """Render the report as a standalone SVG line chart.

    One polyline per (benchmark pair, direction) series; x is the portfolio
    size on a linear scale, y the frequency in [0, 1].  Identical reports
    yield byte-identical documents.
    """
    rows = _sorted_rows(report)
    if not rows:
        raise ValueError("report must contain at least one row")
    pairs = sorted({(r.over_threshold, r.under_threshold) for r in rows})
    sizes = sorted({r.size for r in rows})

    margin_left, margin_right, margin_top, margin_bottom = 70, 230, 40, 60
    plot_w = SVG_WIDTH - margin_left - margin_right
    plot_h = SVG_HEIGHT - margin_top - margin_bottom
    x_min, x_max = sizes[0], sizes[-1]
    x_span = x_max - x_min

    def x_px(k: int) -> float:
        if x_span == 0:
            return margin_left + plot_w / 2.0
        return margin_left + (k - x_min) / x_span * plot_w

    def y_px(freq: float) -> float:
        return margin_top + (1.0 - freq) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f"<desc>{_escape(description)}</desc>" if description else "<desc>frequency chart</desc>",
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]

    for i in range(5):
        frac = i / 4.0
        y = y_px(frac)
        out.append(
            f'<line x1="{margin_left}" y1="{y:.2f}" x2="{margin_left + plot_w}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{margin_left - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="12" font-family="sans-serif">{frac:.2f}</text>'
        )
    for k in sizes:
        x = x_px(k)
        out.append(
            f'<line x1="{x:.2f}" y1="{margin_top + plot_h}" x2="{x:.2f}" '
            f'y2="{margin_top + plot_h + 5}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{margin_top + plot_h + 20}" text-anchor="middle" '
            f'font-size="12" font-family="sans-serif">{k}</text>'
        )
    out.append(
        f'<line x1="{margin_left}" y1="{margin_top + plot_h}" x2="{margin_left + plot_w}" '
        f'y2="{margin_top + plot_h}" stroke="#000000" stroke-width="1.5"/>'
    )
    out.append(
        f'<line x1="{margin_left}" y1="{margin_top}" x2="{margin_left}" '
        f'y2="{margin_top + plot_h}" stroke="#000000" stroke-width="1.5"/>'
    )

    legend_x = margin_left + plot_w + 20
    legend_y = margin_top + 10
    series_idx = 0
    for over_t, under_t in pairs:
        pair_rows = [r for r in rows if (r.over_threshold, r.under_threshold) == (over_t, under_t)]
        for direction, label in (("over", f"over &gt; {over_t:.0%}"), ("under", f"under &lt; {under_t:.0%}")):
            color = _SERIES_COLORS[series_idx % len(_SERIES_COLORS)]
            freqs = [(r.size, r.over_freq if direction == "over" else r.under_freq) for r in pair_rows]
            points = " ".join(f"{x_px(k):.2f},{y_px(f):.2f}" for k, f in freqs)
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>'
            )
            for k, f in freqs:
                out.append(f'<circle cx="{x_px(k):.2f}" cy="{y_px(f):.2f}" r="3" fill="{color}"/>')
            ly = legend_y + series_idx * 22
            out.append(
                f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 24}" y2="{ly}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            out.append(
                f'<text x="{legend_x + 30}" y="{ly + 4}" font-size="12" '
                f'font-family="sans-serif">{label}</text>'
            )
            series_idx += 1

    out.append(
        f'<text x="{margin_left + plot_w / 2:.2f}" y="{SVG_HEIGHT - 15}" text-anchor="middle" '
        'font-size="14" font-family="sans-serif">portfolio size</text>'
    )
    out.append(
        f'<text x="20" y="{margin_top + plot_h / 2:.2f}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif" transform="rotate(-90 20 {margin_top + plot_h / 2:.2f})">frequency</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
