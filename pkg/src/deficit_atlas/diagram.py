"""Phase diagrams of constant-``c3`` cross-sections.

A slice of the tetrahedron is the rectangle ``|s1| <= (1+c3)/2``,
``|c1| <= (1-c3)/2``.  :func:`classify_grid` labels cell centres by the
optimal deficit branch, :func:`theta_region_area` measures the interior-angle
region precisely, and :func:`emit` writes CSV or SVG renderings.
"""
from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import boundaries, correlations
from .correlations import PhaseLabel
from .errors import DomainError, IoError
from .state import c1_max, s1_max

THREADS_ENV = "DEFICIT_ATLAS_THREADS"
MIN_RESOLUTION = 16
MAX_RESOLUTION = 4096
AREA_STEP = 1e-3
AREA_SAMPLES = 512
AREA_BISECT = 40
ROWS_PER_TASK = 8

COLORS = {
    PhaseLabel.ZERO: "#4169e1",
    PhaseLabel.PI_HALF: "#2e8b57",
    PhaseLabel.THETA: "#ffd700",
}
SVG_SIZE = 1000


def worker_count():
    """Thread count from ``DEFICIT_ATLAS_THREADS`` (0 or unset means all cores)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass
class SliceDiagram:
    """Labelled grid of one slice.

    ``labels``, ``values`` and ``thetas`` are indexed ``[row, col]`` with rows
    running over ``c1`` and columns over ``s1``, both ascending.  ``areas``
    maps each phase code to ``{"absolute": ..., "fraction": ...}``.
    """

    c3: float
    resolution: int
    s1_centers: np.ndarray
    c1_centers: np.ndarray
    labels: np.ndarray
    values: np.ndarray
    thetas: np.ndarray
    areas: dict
    curves: list = field(default_factory=list)

    @property
    def theta_fraction(self):
        return self.areas[PhaseLabel.THETA.code]["fraction"]


def cell_centers(c3, resolution):
    """Cell-centre coordinates along ``s1`` and ``c1``."""
    k = (np.arange(resolution) + 0.5) / resolution
    smax, cmax = s1_max(c3), c1_max(c3)
    return -smax + 2.0 * smax * k, -cmax + 2.0 * cmax * k


def _classify_rows(s1, c1_rows, c3):
    ss, cc = np.meshgrid(s1, c1_rows)
    best = correlations.optimize_many(ss.ravel(), cc.ravel(), c3)
    shape = ss.shape
    return best.phase.reshape(shape), best.value.reshape(shape), best.theta.reshape(shape)


def _mirror(quadrant, resolution):
    # quadrant covers column/row indices >= resolution // 2
    half = resolution // 2
    full = np.empty((resolution, resolution), dtype=quadrant.dtype)
    full[half:, half:] = quadrant
    full[half:, :resolution - half] = quadrant[:, ::-1][:, :resolution - half]
    full[:resolution - half, :] = full[half:, :][::-1][:resolution - half]
    return full


def classify_grid(c3, resolution, curves=True, step=boundaries.DEFAULT_STEP):
    """Classify the cell centres of the slice ``c3``.

    Only the quadrant ``s1 >= 0, c1 >= 0`` is optimized; the others are
    mirror images, so the labels are exactly symmetric.  With ``curves`` the
    boundary lines of the slice are traced and attached for overlays.
    """
    if not -1.0 < c3 < 1.0:
        raise DomainError(f"slice height c3={c3} outside (-1, 1)", constraint="-1 < c3 < 1")
    if not MIN_RESOLUTION <= resolution <= MAX_RESOLUTION:
        raise ValueError(f"resolution {resolution} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]")
    s1c, c1c = cell_centers(c3, resolution)
    half = resolution // 2
    s1q, c1q = s1c[half:], c1c[half:]
    chunks = [c1q[i:i + ROWS_PER_TASK] for i in range(0, len(c1q), ROWS_PER_TASK)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(lambda rows: _classify_rows(s1q, rows, c3), chunks))
    labels, values, thetas = (
        _mirror(np.concatenate([p[k] for p in parts]), resolution) for k in range(3))

    rect = (1.0 + c3) * (1.0 - c3)
    total = resolution * resolution
    areas = {}
    for label in PhaseLabel:
        count = int(np.count_nonzero(labels == label))
        areas[label.code] = {"absolute": rect * count / total, "fraction": count / total}
    overlays = boundaries.trace_slice_all(c3, step) if curves else []
    return SliceDiagram(float(c3), resolution, s1c, c1c, labels, values, thetas, areas, overlays)


def _is_theta(s1, c1, c3):
    phase = correlations.optimize_many(s1, c1, c3).phase
    return phase == PhaseLabel.THETA


def theta_region_area(c3, step=AREA_STEP):
    """Area of the interior-angle region in one quadrant and its slice fraction.

    The quadrant is cut into rows of constant ``c1`` spaced ``step`` apart.
    On each row the ends of the Theta intervals are located by bisection on
    the phase label, which puts them on the bounding boundary curves; the
    interval lengths are then integrated over ``c1`` by the trapezoid rule.

    Returns ``(segment, fraction)`` with
    ``fraction = 4 * segment / ((1 + c3) * (1 - c3))``.
    """
    if not -1.0 < c3 < 1.0:
        raise DomainError(f"slice height c3={c3} outside (-1, 1)", constraint="-1 < c3 < 1")
    smax, cmax = s1_max(c3), c1_max(c3)
    rows = np.linspace(0.0, cmax, int(np.ceil(cmax / step)) + 1)
    cols = np.linspace(0.0, smax, AREA_SAMPLES + 1)
    ss, cc = np.meshgrid(cols, rows)
    theta = _is_theta(ss.ravel(), cc.ravel(), c3).reshape(ss.shape)

    lengths = np.zeros(len(rows))
    # Theta samples contribute the full spacing; every label change is then
    # corrected by the bisected position of the crossing
    r, k = np.nonzero(theta[:, :-1] != theta[:, 1:])
    if r.size:
        inside_left = theta[r, k]
        lo, hi = cols[k].copy(), cols[k + 1].copy()
        c1 = rows[r]
        for _ in range(AREA_BISECT):
            mid = 0.5 * (lo + hi)
            same = _is_theta(mid, c1, c3) == inside_left
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        crossing = 0.5 * (lo + hi)
        # signed extent measured from the left sample of the pair
        partial = np.where(inside_left, crossing - cols[k], cols[k + 1] - crossing)
        np.add.at(lengths, r, partial)
    both = theta[:, :-1] & theta[:, 1:]
    lengths += both.sum(axis=1) * (cols[1] - cols[0])
    segment = float(np.trapezoid(lengths, rows)) if hasattr(np, "trapezoid") \
        else float(np.trapz(lengths, rows))
    return segment, 4.0 * segment / ((1.0 + c3) * (1.0 - c3))


# ---------------------------------------------------------------------------
# emission

def _fmt(x):
    return f"{x:.12g}"


def render_csv(diagram):
    out = io.StringIO()
    out.write("s1,c1,phase,deficit_nats,theta_opt_rad\n")
    codes = [label.code for label in PhaseLabel]
    for j, c1 in enumerate(diagram.c1_centers):
        for i, s1 in enumerate(diagram.s1_centers):
            out.write(f"{_fmt(s1)},{_fmt(c1)},{codes[diagram.labels[j, i]]},"
                      f"{_fmt(diagram.values[j, i])},{_fmt(diagram.thetas[j, i])}\n")
    return out.getvalue()


def _svg_xy(diagram, s1, c1):
    smax, cmax = s1_max(diagram.c3), c1_max(diagram.c3)
    x = (s1 + smax) / (2.0 * smax) * SVG_SIZE
    y = SVG_SIZE - (c1 + cmax) / (2.0 * cmax) * SVG_SIZE
    return x, y


def render_svg(diagram):
    r = diagram.resolution
    cell = SVG_SIZE / r
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
              f'width="{SVG_SIZE}" height="{SVG_SIZE}">\n')
    # cells drawn in index units; row 0 (lowest c1) at the bottom
    out.write(f'<g transform="matrix({_fmt(cell)} 0 0 {_fmt(-cell)} 0 {SVG_SIZE})" '
              'shape-rendering="crispEdges">\n')
    for j in range(r):
        for i in range(r):
            color = COLORS[PhaseLabel(int(diagram.labels[j, i]))]
            out.write(f'<rect x="{i}" y="{j}" width="1" height="1" fill="{color}"/>\n')
    out.write("</g>\n")
    for curve in diagram.curves:
        for s_sign in (1.0, -1.0):
            for c_sign in (1.0, -1.0):
                x, y = _svg_xy(diagram, s_sign * curve.s1, c_sign * curve.c1)
                pts = " ".join(f"{a:.4f},{b:.4f}" for a, b in zip(x, y))
                out.write(f'<polyline class="{curve.kind.value}" points="{pts}" '
                          'fill="none" stroke="#000000" stroke-width="2"/>\n')
    out.write("</svg>\n")
    return out.getvalue()


RENDERERS = {"csv": render_csv, "svg": render_svg}


def emit(diagram, fmt, sink):
    """Write ``diagram`` as ``"csv"`` or ``"svg"`` to a path or text stream.

    Output is a pure function of the diagram, so re-emission is
    byte-identical.  Failures of the sink raise IoError.
    """
    if fmt not in RENDERERS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {sorted(RENDERERS)}")
    text = RENDERERS[fmt](diagram)
    try:
        if isinstance(sink, (str, os.PathLike)):
            Path(sink).write_text(text, encoding="utf-8", newline="\n")
        else:
            sink.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {fmt} output: {exc}") from exc
