"""Pattern CSV files, SVG plots and comparison with measured data."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import SlitwaveError
from .intensity import DiffractionPattern, VisibilityError, visibility_of

CSV_HEADER = ("s_um", "intensity")
UNIT_SCALE = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}
MIN_DATA_ROWS = 10


class DataError(SlitwaveError, ValueError):
    """Malformed input file."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_csv(pattern: DiffractionPattern) -> str:
    out = io.StringIO()
    out.write("# slitwave diffraction pattern; s_um is the screen position in micrometers\n")
    for key in sorted(pattern.meta):
        val = pattern.meta[key]
        out.write(f"# {key}: {_fmt(val) if isinstance(val, float) else val}\n")
    out.write(",".join(CSV_HEADER) + "\n")
    for s, i in zip(pattern.s_m, pattern.intensity):
        out.write(f"{_fmt(s * 1e6)},{_fmt(i)}\n")
    return out.getvalue()


def write_csv(pattern: DiffractionPattern, path) -> None:
    Path(path).write_text(format_csv(pattern), newline="\n")


def _parse_meta(value: str):
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            pass
    return None if value == "None" else value


def read_csv(path) -> DiffractionPattern:
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, val = line[1:].partition(":")
                if sep:
                    meta[key.strip()] = _parse_meta(val.strip())
                continue
            if line.replace(" ", "") == ",".join(CSV_HEADER):
                continue
            try:
                s_um, inten = (float(v) for v in line.split(","))
            except ValueError:
                raise DataError(f"{path}:{lineno}: expected two numbers, got {line!r}") from None
            rows.append((s_um * 1e-6, inten))
    if not rows:
        raise DataError(f"{path}: no data rows")
    arr = np.array(rows)
    return DiffractionPattern(arr[:, 0], arr[:, 1], meta)


def read_data_csv(path, unit: str = "um") -> tuple[np.ndarray, np.ndarray]:
    """Measured ``(position, counts)`` from a two-column CSV; positions returned in meters.

    Lines starting with ``#`` and a non-numeric header line are skipped.
    """
    if unit not in UNIT_SCALE:
        raise DataError(f"unknown data unit {unit!r}; use one of {', '.join(UNIT_SCALE)}")
    pos, counts = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if line.strip() and not line.lstrip().startswith("#"))
        for i, row in enumerate(reader):
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise DataError(f"{path}: row {i + 1} is not two numbers: {row!r}") from None
            pos.append(x)
            counts.append(y)
    if len(pos) < MIN_DATA_ROWS:
        raise DataError(f"{path}: >= {MIN_DATA_ROWS} rows required, found {len(pos)}")
    pos = np.array(pos) * UNIT_SCALE[unit]
    if np.any(np.diff(pos) <= 0):
        raise DataError(f"{path}: positions must be strictly increasing")
    return pos, np.array(counts)


@dataclass(frozen=True)
class ComparisonReport:
    scale: float
    rmse: float
    model_visibility: Optional[float]
    data_visibility: Optional[float]
    n_points: int

    def summary(self) -> str:
        def v(x):
            return "n/a" if x is None else f"{x:.4f}"

        return (
            f"points compared: {self.n_points}\n"
            f"scale factor:    {self.scale:.6g}\n"
            f"RMSE:            {self.rmse:.6g}\n"
            f"visibility:      model {v(self.model_visibility)}, data {v(self.data_visibility)}"
        )


def compare(model: DiffractionPattern, positions, counts) -> ComparisonReport:
    """Fit one multiplicative scale of the model to the data and report the residual.

    The model is linearly interpolated onto the data positions (meters).
    """
    positions = np.asarray(positions, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if len(positions) < MIN_DATA_ROWS:
        raise DataError(f">= {MIN_DATA_ROWS} rows required, found {len(positions)}")
    if np.any(np.diff(positions) <= 0):
        raise DataError("data positions must be strictly increasing")
    lo, hi = model.s_m[0], model.s_m[-1]
    if positions[-1] < lo or positions[0] > hi:
        raise DataError("data and model position ranges do not overlap")
    if positions[0] < lo or positions[-1] > hi:
        raise DataError(
            f"data positions [{positions[0]:.4g}, {positions[-1]:.4g}] m extend beyond the model scan "
            f"[{lo:.4g}, {hi:.4g}] m"
        )
    m = np.interp(positions, model.s_m, model.intensity)
    denom = float(m @ m)
    if denom <= 0:
        raise DataError("model is identically zero at the data positions")
    scale = float(m @ counts) / denom
    if not scale > 0:
        raise DataError(f"fitted scale {scale:.3g} is not positive; data and model are anti-correlated")
    rmse = float(np.sqrt(np.mean((scale * m - counts) ** 2)))
    fringe = model.nominal_fringe
    return ComparisonReport(
        scale=scale,
        rmse=rmse,
        model_visibility=_try_visibility(model.s_m, model.intensity, fringe, True),
        data_visibility=_try_visibility(positions, counts, fringe, False),
        n_points=len(positions),
    )


def _try_visibility(s, y, fringe, check_grid):
    try:
        return visibility_of(s, y, fringe, check_grid)
    except VisibilityError:
        return None


def _nice_ticks(lo, hi, target=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def render_svg(
    pattern: DiffractionPattern,
    data: Optional[tuple[np.ndarray, np.ndarray]] = None,
    title: str = "",
    width: int = 720,
    height: int = 420,
) -> str:
    """Static line plot of intensity against position in micrometers."""
    ml, mr, mt, mb = 70, 20, 36, 50
    pw, ph = width - ml - mr, height - mt - mb
    x = pattern.s_m * 1e6
    y = pattern.intensity
    x0, x1 = float(x[0]), float(x[-1])
    ymax = float(y.max())
    if data is not None:
        ymax = max(ymax, float(np.max(data[1])))
    ymax = ymax or 1.0

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - v / ymax * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        parts.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{X:.2f}" y="{mt + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(0.0, ymax, 5):
        Y = py(t)
        parts.append(f'<line x1="{ml - 5}" y1="{Y:.2f}" x2="{ml}" y2="{Y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 8}" y="{Y + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
    parts.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{pts}"/>')
    if data is not None:
        for a, b in zip(np.asarray(data[0]) * 1e6, data[1]):
            if x0 <= a <= x1:
                parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="none" stroke="#b22222"/>')
    parts.append(f'<text x="{ml + pw / 2}" y="{height - 10}" text-anchor="middle">screen position (um)</text>')
    parts.append(
        f'<text x="16" y="{mt + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {mt + ph / 2})">relative intensity</text>'
    )
    if title:
        parts.append(f'<text x="{ml + pw / 2}" y="22" text-anchor="middle" font-size="14">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(pattern, path, data=None, title="") -> None:
    Path(path).write_text(render_svg(pattern, data, title))
