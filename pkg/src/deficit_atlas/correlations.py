"""One-way deficit and discord as piecewise minima over the measurement angle.

The measurement-dependent deficit is ``Delta(theta) = S~(theta) - S``.  Its
minimum over ``theta in [0, pi/2]`` is attained either at an endpoint (the
``Zero`` and ``PiHalf`` phases, which have closed forms) or at an interior
angle (the ``Theta`` phase).  The profile can be bimodal, so the minimizer
scans a uniform grid first and then polishes every grid-level local minimum
with golden-section search.

Discord shares the conditional entropy with the deficit and differs only in
the binary-entropy term:

    Q(theta) = Delta(theta) + h((1 + s1)/2) - h((1 + s1 cos theta)/2).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import entropy
from .errors import ConvergenceError, DomainError
from .state import XxzState

HALF_PI = math.pi / 2
GRID_POINTS = 201
ANGLE_TOL = 1e-10
ENDPOINT_TOL = 1e-6
TIE_TOL = 1e-12
GOLDEN_MAX_ITER = 200
MAX_BRACKETS = 4        # local minima polished per state
CHUNK = 4096            # states per vectorized block
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class PhaseLabel(enum.IntEnum):
    """Which branch realizes the minimum; ordering doubles as tie priority."""

    ZERO = 0
    PI_HALF = 1
    THETA = 2

    @property
    def code(self):
        return ("0", "pi2", "theta")[self]


@dataclass(frozen=True)
class DeficitResult:
    """Optimized correlation value with its phase and optimal angle.

    ``branch_values`` holds the zero branch, the pi/2 branch and the best
    strictly interior local minimum (``None`` if the profile has none).
    """

    value: float
    phase: PhaseLabel
    theta_opt: float
    branch_values: tuple


# ---------------------------------------------------------------------------
# profiles

def _binary(x):
    return entropy.neg_xlogx(x) + entropy.neg_xlogx(1.0 - x)


def deficit_profile(s1, c1, c3, theta, cos_t=None, sin_t=None):
    """``Delta(theta)`` broadcasting over states and angles."""
    return (entropy.post_entropy_values(s1, c1, c3, theta, cos_t, sin_t)
            - entropy.pre_entropy_values(s1, c1, c3))


def discord_profile(s1, c1, c3, theta, cos_t=None, sin_t=None):
    """``Q(theta)`` broadcasting over states and angles."""
    if cos_t is None:
        cos_t = np.cos(theta)
    correction = (_binary(np.clip((1.0 + s1) / 2.0, 0.0, 1.0))
                  - _binary(np.clip((1.0 + s1 * cos_t) / 2.0, 0.0, 1.0)))
    return deficit_profile(s1, c1, c3, theta, cos_t, sin_t) + correction


PROFILES = {"deficit": deficit_profile, "discord": discord_profile}


# ---------------------------------------------------------------------------
# vectorized minimization

def golden_section(f, a, b, tol=ANGLE_TOL, max_iter=GOLDEN_MAX_ITER):
    """Minimize ``f`` on each bracket ``[a[i], b[i]]`` simultaneously.

    ``f`` maps an array of abscissae (same shape as ``a``) to values.  Ties
    move the bracket left.  Returns ``(x, f(x))`` for the best point seen.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = f1 <= f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        new_x = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        new_f = f(new_x)
        x2, f2, x1, f1 = (np.where(left, x1, new_x), np.where(left, f1, new_f),
                          np.where(left, new_x, x2), np.where(left, new_f, f2))
    else:
        raise ConvergenceError(f"golden-section search exceeded {max_iter} iterations")
    mid = 0.5 * (a + b)
    f_mid = f(mid)
    best_x = np.where(f1 <= f2, x1, x2)
    best_f = np.minimum(f1, f2)
    take_mid = f_mid <= best_f
    return np.where(take_mid, mid, best_x), np.where(take_mid, f_mid, best_f)


def _local_minima(values, include_edges):
    """Boolean mask of grid-level local minima along the last axis."""
    n = values.shape[-1]
    mask = np.zeros(values.shape, dtype=bool)
    mid = values[:, 1:-1]
    mask[:, 1:-1] = (mid <= values[:, :-2]) & (mid <= values[:, 2:])
    if include_edges:
        mask[:, 0] = values[:, 0] <= values[:, 1]
        mask[:, n - 1] = values[:, n - 1] <= values[:, n - 2]
    return mask


def _polish(profile, s1, c1, c3, grid, values, include_edges):
    """Golden-polish up to MAX_BRACKETS grid minima per state.

    Returns arrays ``(theta, value)`` of shape ``(m, MAX_BRACKETS)`` padded
    with ``nan``.
    """
    m, n = values.shape
    mask = _local_minima(values, include_edges)
    # keep the lowest MAX_BRACKETS candidates per state (flat profiles mark everything)
    ranked = np.where(mask, values, np.inf)
    order = np.argsort(ranked, axis=1, kind="stable")[:, :MAX_BRACKETS]
    valid = np.isfinite(np.take_along_axis(ranked, order, axis=1))
    rows, slots = np.nonzero(valid)
    idx = order[rows, slots]
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, n - 1)]
    thetas = np.full((m, MAX_BRACKETS), np.nan)
    vals = np.full((m, MAX_BRACKETS), np.nan)
    if rows.size:
        rs1, rc1, rc3 = s1[rows], c1[rows], c3[rows]
        x, fx = golden_section(lambda t: profile(rs1, rc1, rc3, t), lo, hi)
        thetas[rows, slots] = x
        vals[rows, slots] = fx
    return thetas, vals


def _optimize_block(profile, s1, c1, c3, n):
    grid = np.linspace(0.0, HALF_PI, n)
    cos_g, sin_g = np.cos(grid), np.sin(grid)
    cos_g[-1] = 0.0
    values = profile(s1[:, None], c1[:, None], c3[:, None], grid[None, :], cos_g, sin_g)
    cand_t, cand_v = _polish(profile, s1, c1, c3, grid, values, include_edges=True)
    # exact endpoints always compete
    cand_t = np.concatenate([np.zeros((len(s1), 1)), np.full((len(s1), 1), HALF_PI), cand_t], axis=1)
    cand_v = np.concatenate([values[:, :1], values[:, -1:], cand_v], axis=1)

    labels = np.where(cand_t <= ENDPOINT_TOL, PhaseLabel.ZERO,
                      np.where(cand_t >= HALF_PI - ENDPOINT_TOL, PhaseLabel.PI_HALF,
                               PhaseLabel.THETA))
    finite_v = np.where(np.isnan(cand_v), np.inf, cand_v)
    best = finite_v.min(axis=1)
    near = finite_v <= best[:, None] + TIE_TOL
    # lexicographic choice among near-ties: phase priority, then smallest angle
    key = np.where(near, labels * 10.0 + cand_t, np.inf)
    pick = np.argmin(key, axis=1)
    ar = np.arange(len(s1))
    interior = (labels == PhaseLabel.THETA) & np.isfinite(finite_v)
    theta_branch = np.where(interior, finite_v, np.inf).min(axis=1)
    return {
        "value": finite_v[ar, pick],
        "theta": cand_t[ar, pick],
        "phase": labels[ar, pick].astype(np.int8),
        "interior": np.where(np.isfinite(theta_branch), theta_branch, np.nan),
    }


@dataclass
class OptimizationBatch:
    """Vectorized optimization output; one entry per input state."""

    value: np.ndarray
    theta: np.ndarray
    phase: np.ndarray
    zero_branch: np.ndarray
    pi_half_branch: np.ndarray
    interior_branch: np.ndarray


def optimize_many(s1, c1, c3, measure="deficit", n=GRID_POINTS):
    """Optimize ``measure`` (``"deficit"`` or ``"discord"``) for many states.

    Inputs are broadcast to a common 1-D shape.  No domain validation is
    done here; callers pass points of the tetrahedron.
    """
    profile = PROFILES[measure]
    s1, c1, c3 = (np.ravel(a).astype(float) for a in np.broadcast_arrays(s1, c1, c3))
    m = s1.size
    out = {k: np.empty(m) for k in ("value", "theta", "interior")}
    out["phase"] = np.empty(m, dtype=np.int8)
    for start in range(0, m, CHUNK):
        sl = slice(start, start + CHUNK)
        block = _optimize_block(profile, s1[sl], c1[sl], c3[sl], n)
        for key, arr in block.items():
            out[key][sl] = arr
    zero = entropy.branch_zero_values(s1, c1, c3)
    half = entropy.branch_pi_half_values(s1, c1, c3)
    if measure == "discord":
        half = half + _binary((1.0 + s1) / 2.0) - entropy.LN2
    return OptimizationBatch(out["value"], out["theta"], out["phase"], zero, half, out["interior"])


def _result(batch):
    interior = float(batch.interior_branch[0])
    return DeficitResult(
        value=float(batch.value[0]),
        phase=PhaseLabel(int(batch.phase[0])),
        theta_opt=float(batch.theta[0]),
        branch_values=(float(batch.zero_branch[0]), float(batch.pi_half_branch[0]),
                       None if math.isnan(interior) else interior),
    )


# ---------------------------------------------------------------------------
# state-level API

def _check_angle(theta):
    theta = float(theta)
    if not 0.0 <= theta <= HALF_PI + 1e-15:
        raise DomainError(f"measurement angle {theta} outside [0, pi/2]",
                          constraint="0 <= theta <= pi/2")
    return theta


def deficit_at(x, theta):
    """Measurement-dependent one-way deficit ``Delta(theta)``."""
    return entropy.post_entropy(x, _check_angle(theta)) - entropy.pre_entropy(x)


def deficit_branch_0(x):
    """Deficit for the z-axis measurement (closed form, independent of s1)."""
    return float(entropy.branch_zero_values(x.s1, x.c1, x.c3))


def deficit_branch_pi2(x):
    """Deficit for a measurement in the xy plane (closed form)."""
    return float(entropy.branch_pi_half_values(x.s1, x.c1, x.c3))


def minimize_interior(x, n=GRID_POINTS):
    """Global minimum ``(theta, value)`` of ``Delta(theta)`` on ``[0, pi/2]``."""
    batch = optimize_many(x.s1, x.c1, x.c3, "deficit", n)
    return float(batch.theta[0]), float(batch.value[0])


def deficit(x, n=GRID_POINTS):
    """Optimized one-way deficit with phase classification."""
    return _result(optimize_many(x.s1, x.c1, x.c3, "deficit", n))


def discord_at(x, theta):
    """Measurement-dependent discord ``Q(theta)``."""
    theta = _check_angle(theta)
    # correction first, so it vanishes exactly at theta = 0
    correction = (entropy.binary_entropy((1.0 + x.s1) / 2.0)
                  - entropy.binary_entropy((1.0 + x.s1 * math.cos(theta)) / 2.0))
    return deficit_at(x, theta) + correction


def discord(x, n=GRID_POINTS):
    """Optimized quantum discord, classified like :func:`deficit`."""
    return _result(optimize_many(x.s1, x.c1, x.c3, "discord", n))


def bell_diagonal_value(c1):
    """Deficit (= discord) on the edge ``c3 = -1``, ``s1 = 0`` of the tetrahedron."""
    c1 = float(c1)
    if abs(c1) > 1.0 + 1e-12:
        raise DomainError(f"|c1|={abs(c1)} exceeds 1", constraint="|c1| <= 1")
    c1 = max(-1.0, min(1.0, c1))
    return float(0.5 * (entropy._xlogx_raw(1 + c1) + entropy._xlogx_raw(1 - c1)))


def interior_window_minimum(s1, c1, c3, delta=1e-4, n=GRID_POINTS, edge_tol=1e-8):
    """Lowest local minimum of ``Delta`` strictly inside ``[delta, pi/2 - delta]``.

    Broadcasts over states.  Minima that polish onto a window edge (within
    ``edge_tol``) do not count; states without a genuine interior minimum
    get ``nan``.  Returns ``(theta, value)``.
    """
    s1, c1, c3 = (np.ravel(a).astype(float) for a in np.broadcast_arrays(s1, c1, c3))
    m = s1.size
    theta_out = np.full(m, np.nan)
    value_out = np.full(m, np.nan)
    lo_edge, hi_edge = delta, HALF_PI - delta
    grid = np.linspace(lo_edge, hi_edge, n)
    cos_g, sin_g = np.cos(grid), np.sin(grid)
    for start in range(0, m, CHUNK):
        sl = slice(start, start + CHUNK)
        bs1, bc1, bc3 = s1[sl], c1[sl], c3[sl]
        values = deficit_profile(bs1[:, None], bc1[:, None], bc3[:, None], grid[None, :], cos_g, sin_g)
        t, v = _polish(deficit_profile, bs1, bc1, bc3, grid, values, include_edges=True)
        genuine = (t > lo_edge + edge_tol) & (t < hi_edge - edge_tol)
        v = np.where(genuine, v, np.inf)
        pick = np.argmin(v, axis=1)
        ar = np.arange(len(bs1))
        best_v = v[ar, pick]
        ok = np.isfinite(best_v)
        theta_out[sl] = np.where(ok, t[ar, pick], np.nan)
        value_out[sl] = np.where(ok, best_v, np.nan)
    return theta_out, value_out
