"""CSV and SVG artifact writers.

CSV files are the artifact of record: a fixed-schema diagnostics time
series and bulk-profile snapshots.  Floats are written with repr, i.e. the
shortest decimal that round-trips.  SVG output is a dependency-free
polyline chart for quick inspection.  All writers go through an atomic
temp-file + rename so a failed run never leaves a partial artifact behind.
"""

from __future__ import annotations

import math
import os
import tempfile
from datetime import datetime, timezone

import numpy as np

from .grid import GridSpec, StateVector
from .integrator import Trajectory

__all__ = [
    "TIMESERIES_HEADER",
    "write_timeseries_csv",
    "write_snapshot_csv",
    "write_timeseries_svg",
    "write_snapshot_svg",
]

TIMESERIES_HEADER = "t,a,b,mass,moment1,energy,rho_delta,rho_one_minus_delta,min_entry,l2_bulk"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _stamp() -> str:
    return f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n"


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"non-finite {name} = {value} in diagnostics output")


def write_timeseries_csv(path: str, trajectory: Trajectory, timestamp: bool = True) -> None:
    """Write the diagnostics table of a run.

    Columns: t,a,b,mass,moment1,energy,rho_delta,rho_one_minus_delta,
    min_entry,l2_bulk.  The energy column is empty where no energy value
    exists (epsilon = 0 runs, or snapshots with negative entries).  Rows
    are re-validated before writing: every field must be finite and the
    mass within 1e-6 of 1.
    """
    lines = []
    if timestamp:
        lines.append(_stamp())
    lines.append(TIMESERIES_HEADER + "\n")
    for r in trajectory.records:
        for name in ("time", "a", "b", "mass", "first_moment", "rho_at_delta",
                     "rho_at_one_minus_delta", "min_entry", "l2_bulk"):
            _check_finite(name, getattr(r, name))
        if abs(r.mass - 1.0) > 1e-6:
            raise ValueError(f"mass {r.mass} at t = {r.time} is not within 1e-6 of 1")
        energy = ""
        if r.energy is not None:
            _check_finite("energy", r.energy)
            energy = repr(r.energy)
        lines.append(
            f"{r.time!r},{r.a!r},{r.b!r},{r.mass!r},{r.first_moment!r},{energy},"
            f"{r.rho_at_delta!r},{r.rho_at_one_minus_delta!r},{r.min_entry!r},{r.l2_bulk!r}\n"
        )
    _atomic_write_text(path, "".join(lines))


def write_snapshot_csv(
    path: str, grid: GridSpec, state: StateVector, timestamp: bool = True
) -> None:
    """Write a bulk profile as x,rho rows, with a and b in a two-line preamble."""
    if state.rho.size != grid.n_cells + 1:
        raise ValueError(f"state has {state.rho.size} bulk values, grid expects {grid.n_cells + 1}")
    if not np.all(np.isfinite(state.rho)):
        raise ValueError("non-finite bulk values in snapshot")
    lines = []
    if timestamp:
        lines.append(_stamp())
    lines.append(f"# a = {float(state.a)!r}\n")
    lines.append(f"# b = {float(state.b)!r}\n")
    lines.append("x,rho\n")
    for x, r in zip(grid.nodes, state.rho):
        lines.append(f"{float(x)!r},{float(r)!r}\n")
    _atomic_write_text(path, "".join(lines))


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _polyline_chart(
    curves: list[tuple[str, np.ndarray, np.ndarray]],
    title: str,
    x_label: str,
    y_label: str,
    width: int = 640,
    height: int = 420,
) -> str:
    """Linear-axes line chart with tick labels and a legend."""
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom

    xs = np.concatenate([c[1] for c in curves])
    ys = np.concatenate([c[2] for c in curves])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi <= x_lo:
        x_hi = x_lo + max(1e-12, abs(x_lo) * 1e-3)
    if y_hi <= y_lo:
        pad = max(1e-12, abs(y_lo) * 1e-3)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(
            f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{top + ph + 18}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {top + ph / 2:.1f})">{y_label}</text>'
    )

    for k, (label, cx, cy) in enumerate(curves):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(cx, cy))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = top + 14 + 16 * k
        parts.append(
            f'<line x1="{left + pw - 120}" y1="{ly - 4}" x2="{left + pw - 96}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + pw - 90}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_timeseries_svg(path: str, trajectory: Trajectory) -> None:
    """Chart of the boundary masses (and total mass) against time."""
    t = trajectory.times
    curves = [
        ("a(t)", t, trajectory.series("a")),
        ("b(t)", t, trajectory.series("b")),
        ("mass", t, trajectory.series("mass")),
    ]
    _atomic_write_text(path, _polyline_chart(curves, "boundary masses", "t", "value"))


def write_snapshot_svg(path: str, grid: GridSpec, state: StateVector) -> None:
    """Chart of a bulk profile rho(x)."""
    curves = [("rho(x)", grid.nodes, state.rho)]
    _atomic_write_text(path, _polyline_chart(curves, "bulk profile", "x", "rho"))
