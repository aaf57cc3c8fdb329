"""Render sweep figures from fdsumrate result CSVs.

The simulator CLI writes one CSV per experiment; this package turns
those files into line figures (one line per series group, SVG and PNG
side by side) without ever importing the simulator. The CSV is the only
interface: columns are addressed by name, values stay in linear units
in the file, and any decibel conversion happens at render time.

Rendering is deterministic: no timestamps are embedded, and the SVG id
hash salt is pinned, so re-rendering the same spec reproduces the same
bytes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

__all__ = [
    "FigureSpec", "Series", "RenderResult", "render",
    "default_specs", "gain_spec", "golden_dir",
]

_SVG_SALT = "figs"


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which CSV, which columns, where the images go.

    x and y name numeric columns; group_by columns partition rows into
    series, one plotted line each, legend labels joined from the group
    values. err names the column supplying symmetric y error bars
    (bars appear only where the column exists and the cell is
    nonempty); None disables bars. x_db converts linear x values to
    decibels at render time so the CSV stays single-sourced. Output is
    out_base + ".svg" and out_base + ".png".
    """

    csv_path: str
    x: str
    y: str
    out_base: str
    group_by: tuple = ("scheme", "source")
    err: str | None = "se_sum"
    x_log: bool = False
    y_log: bool = False
    x_db: bool = False
    title: str = ""
    x_label: str = ""
    y_label: str = ""


@dataclass(frozen=True)
class Series:
    """One plotted line, re-read from the figure's artists after
    drawing: what the image actually shows, not what was intended."""

    label: str
    x: tuple
    y: tuple
    yerr: tuple | None


@dataclass(frozen=True)
class RenderResult:
    paths: tuple
    series: tuple


def _read_table(path: str):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    return header, rows


def _check_columns(spec: FigureSpec, header):
    # err is optional by contract, so only x, y, and the grouping
    # columns are required to exist
    needed = [spec.x, spec.y, *spec.group_by]
    for col in needed:
        if col not in header:
            raise ValueError(
                f"column {col!r} not in the header of {spec.csv_path} "
                f"(columns: {', '.join(header)})")


def _collect_series(spec: FigureSpec, header, rows):
    """Group rows into series, keeping CSV encounter order throughout.

    Rows whose x or y cell is empty are skipped (analytic rows fill
    only their own link's cells; baselines carry no gain columns), so a
    group can end up empty and is then dropped entirely.
    """
    take_err = spec.err is not None and spec.err in header
    groups: dict = {}
    for row in rows:
        xs = (row.get(spec.x) or "").strip()
        ys = (row.get(spec.y) or "").strip()
        if not xs or not ys:
            continue
        xv, yv = float(xs), float(ys)
        if spec.x_db:
            if xv <= 0.0:
                raise ValueError(
                    f"x_db needs positive {spec.x!r} values, got {xv!r} "
                    f"in {spec.csv_path}")
            xv = 10.0 * math.log10(xv)
        ev = math.nan
        if take_err:
            es = (row.get(spec.err) or "").strip()
            if es:
                ev = float(es)
        key = tuple((row.get(c) or "") for c in spec.group_by)
        groups.setdefault(key, []).append((xv, yv, ev))
    return groups


def _extract_yerr(container, y):
    """Recover the plotted bar half-lengths from the vertical-segment
    collection; NaN where no bar was drawn for a point."""
    segs = container[2][0].get_segments()
    out = [math.nan] * len(y)
    it = iter(segs)
    for i, yv in enumerate(y):
        if math.isnan(yv):
            continue
        seg = next(it, None)
        if seg is None:
            break
        out[i] = float(seg[1][1] - yv)
    return out


def render(spec: FigureSpec) -> RenderResult:
    """Draw one figure and write it as SVG and PNG.

    Returns the written paths plus the per-series data arrays re-read
    from the drawn artists. Raises ValueError with the column name when
    the spec references a column the CSV does not have, and when no row
    yields a plottable point. The input CSV is never written to.
    """
    header, rows = _read_table(spec.csv_path)
    _check_columns(spec, header)
    groups = _collect_series(spec, header, rows)
    if not groups:
        raise ValueError(
            f"no plottable rows for x={spec.x!r}, y={spec.y!r} "
            f"in {spec.csv_path}")

    fig = Figure(figsize=(6.4, 4.4), dpi=100)
    ax = fig.add_subplot(111)
    drawn = []
    for key, pts in groups.items():
        label = " / ".join(k for k in key if k) or "(all)"
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        e = [p[2] for p in pts]
        line, = ax.plot(x, y, marker="o", markersize=4, label=label)
        line.set_gid(label)
        bars = None
        if any(not math.isnan(v) for v in e):
            bars = ax.errorbar(x, y, yerr=e, fmt="none",
                               ecolor=line.get_color(), elinewidth=1.0,
                               capsize=2.5)
        drawn.append((line, bars))
    if spec.x_log:
        ax.set_xscale("log")
    if spec.y_log:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or (spec.x + (" (dB)" if spec.x_db else "")))
    ax.set_ylabel(spec.y_label or spec.y)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)

    out_svg = str(spec.out_base) + ".svg"
    out_png = str(spec.out_base) + ".png"
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(out_svg, metadata={"Date": None})
        fig.savefig(out_png)

    series = []
    for line, bars in drawn:
        x = tuple(float(v) for v in line.get_xdata())
        y = tuple(float(v) for v in line.get_ydata())
        yerr = tuple(_extract_yerr(bars, y)) if bars is not None else None
        series.append(Series(label=line.get_gid(), x=x, y=y, yerr=yerr))
    return RenderResult(paths=(out_svg, out_png), series=tuple(series))


def golden_dir() -> Path:
    """Directory of the packaged reference CSVs."""
    return Path(resources.files("figs") / "golden")


def default_specs(out_dir: str = ".") -> tuple:
    """The five stock figures, one per sweep axis of the golden data:
    sum rate against DL time share, loopback variance, AP power (in
    dB), user separation, and antennas per side."""
    g = golden_dir()
    od = Path(out_dir)
    return (
        FigureSpec(csv_path=str(g / "delta_sweep.csv"), x="delta",
                   y="rate_sum", out_base=str(od / "sum_rate_vs_delta"),
                   title="Average sum rate vs DL time share",
                   x_label="DL time share",
                   y_label="sum rate (bit/s/Hz)"),
        FigureSpec(csv_path=str(g / "sigma_aa2_sweep.csv"), x="sigma_aa2",
                   y="rate_sum", x_log=True,
                   out_base=str(od / "sum_rate_vs_sigma_aa2"),
                   title="Average sum rate vs loopback variance",
                   x_label="loopback variance",
                   y_label="sum rate (bit/s/Hz)"),
        FigureSpec(csv_path=str(g / "pa_sweep.csv"), x="P_a",
                   y="rate_sum", x_db=True,
                   out_base=str(od / "sum_rate_vs_pa"),
                   title="Average sum rate vs AP power",
                   x_label="AP power (dB)",
                   y_label="sum rate (bit/s/Hz)"),
        FigureSpec(csv_path=str(g / "d_sweep.csv"), x="d",
                   y="rate_sum", out_base=str(od / "sum_rate_vs_d"),
                   title="Average sum rate vs user separation",
                   x_label="UL-DL user separation (m)",
                   y_label="sum rate (bit/s/Hz)"),
        FigureSpec(csv_path=str(g / "antennas_sweep.csv"), x="n_d",
                   y="rate_sum", out_base=str(od / "sum_rate_vs_antennas"),
                   title="Average sum rate vs antennas per side",
                   x_label="antennas per side",
                   y_label="sum rate (bit/s/Hz)"),
    )


def gain_spec(out_dir: str = ".") -> FigureSpec:
    """Relative FD gain over the chain-conserved HD baseline against
    loopback variance, with the variance axis in decibels."""
    g = golden_dir()
    return FigureSpec(csv_path=str(g / "sigma_aa2_sweep.csv"),
                      x="sigma_aa2", y="gain_vs_hd_rc", x_db=True,
                      err=None,
                      out_base=str(Path(out_dir) / "gain_vs_sigma_aa2"),
                      title="FD gain over HD (chain-conserved)",
                      x_label="loopback variance (dB)",
                      y_label="relative sum-rate gain")
