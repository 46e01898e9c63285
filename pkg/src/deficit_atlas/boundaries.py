"""Critical lines separating the deficit phases.

Four conditions delimit the phases:

``ZERO``
    ``S~''(0) = 0``; the interior minimum is born at theta = 0 (angle continuous).
``PI_HALF``
    ``S~''(pi/2) = 0``; same at theta = pi/2.
``ZERO_PRIME``
    ``Delta_0`` equals a separate interior minimum of a bimodal profile
    (the optimal angle jumps by less than pi/2).
``EQUAL``
    ``Delta_0 = Delta_pi/2`` (the optimal angle jumps by exactly pi/2).

Curves are traced by natural-parameter continuation: march one coordinate in
fixed steps and bisect for the other, seeding each bracket from the
previous root.  Only the quadrant ``s1 >= 0, c1 >= 0`` is traced; the rest
follows from the reflection symmetries.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import correlations, entropy
from .errors import (BracketError, ConvergenceError, DomainError, EmptyCurve,
                     NoInteriorMinimum, NotFound, SingularInput)
from .state import XxzState, c1_max, s1_max

WINDOW_DELTA = 1e-4
JUMP_MIN = 1e-2
PHYSICAL_RTOL = 1e-6
FLAT_PROFILE = 1e-10
HALF_PI = math.pi / 2
XTOL = 1e-9
RESIDUAL_TOL = 1e-8
MAX_BISECT = 80
DEFAULT_STEP = 0.002
SEED_COLUMNS = 200
SEED_SAMPLES = 64
BRACKET_STEPS = 5
WIDEN_FACTOR = 2.0
MAX_WIDEN = 5
MAX_HALVINGS = 6
FRONTIER_ITER = 45
MULTISECT_PARTS = 16
BRACKET_SAMPLES = 17


class BoundaryKind(str, enum.Enum):
    ZERO = "zero"
    PI_HALF = "pi2"
    ZERO_PRIME = "zeroprime"
    EQUAL = "equal"

    @property
    def figure_label(self):
        return {"zero": "0", "pi2": "1", "zeroprime": "0'", "equal": "2"}[self.value]


# ---------------------------------------------------------------------------
# residuals

def residual_values(kind, s1, c1, c3):
    """Residual of ``kind`` broadcast over arrays; ``nan`` where undefined."""
    kind = BoundaryKind(kind)
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    if kind is BoundaryKind.ZERO:
        return entropy.d2_zero_values(s1, c1, c3)
    if kind is BoundaryKind.PI_HALF:
        return entropy.d2_pi_half_values(s1, c1, c3)
    zero = entropy.branch_zero_values(s1, c1, c3)
    if kind is BoundaryKind.EQUAL:
        return zero - entropy.branch_pi_half_values(s1, c1, c3)
    theta, interior = correlations.interior_window_minimum(s1, c1, c3, delta=WINDOW_DELTA)
    # a minimum hugging an endpoint is that endpoint's own basin, not a rival
    theta, interior = theta.reshape(s1.shape), interior.reshape(s1.shape)
    rival = (theta >= JUMP_MIN) & (theta <= HALF_PI - JUMP_MIN)
    return np.where(rival, zero - interior, np.nan)


def residual(kind, x):
    """Residual of the critical condition ``kind`` at state ``x``.

    Raises
    ------
    SingularInput
        For the curvature conditions on their singular sets.
    NoInteriorMinimum
        For ``ZERO_PRIME`` when the profile has no minimum strictly inside
        ``[1e-4, pi/2 - 1e-4]``, or only one within ``1e-2`` rad of an
        endpoint (the endpoint's own basin rather than a rival minimum).
    """
    kind = BoundaryKind(kind)
    if kind is BoundaryKind.ZERO:
        return entropy.d2_post_at_zero(x)
    if kind is BoundaryKind.PI_HALF:
        return entropy.d2_post_at_pi_half(x)
    val = float(residual_values(kind, x.s1, x.c1, x.c3))
    if math.isnan(val):
        raise NoInteriorMinimum(f"no interior minimum of the deficit profile at {x.as_tuple()}")
    return val


# ---------------------------------------------------------------------------
# bisection

def bisect(f, lo, hi, f_lo=None, f_hi=None, xtol=XTOL, ftol=None, max_iter=MAX_BISECT):
    """Root of ``f`` in ``[lo, hi]`` by bisection.

    Stops once the bracket is narrower than ``xtol`` and, if ``ftol`` is
    given, ``|f|`` at the midpoint is below it (or the bracket has collapsed
    to rounding level).  Returns ``(root, f(root))``.
    """
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo == 0.0:
        return lo, 0.0
    if f_hi == 0.0:
        return hi, 0.0
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={f_lo!r}, {f_hi!r}",
                           lo, hi, f_lo, f_hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if not np.isfinite(f_mid):
            raise BracketError(f"residual undefined at {mid}", lo, hi, f_lo, f_hi)
        if f_mid == 0.0:
            return mid, 0.0
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        width = hi - lo
        if width < xtol and (ftol is None or abs(f_mid) < ftol
                             or width < 4 * np.finfo(float).eps * max(1.0, abs(mid))):
            return mid, f_mid
    raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")


def _resolve_bracket(f, lo, hi):
    """Move bracket ends off points where ``f`` is undefined (nan).

    Face points may sit on a removable log singularity, so a short inward
    nudge is tried first.  If one end is still undefined, the frontier of
    the defined region is located by bisection on definedness and used as
    the new end; this matters for the bimodal condition, whose residual
    only exists in a thin band next to its zero set.
    Returns ``(lo, f_lo, hi, f_hi)``.
    """
    def nudged(u, inward):
        val = f(u)
        for step in (1e-12, 1e-9, 1e-6):
            if np.isfinite(val):
                return u, val
            val = f(u + inward * step)
            if np.isfinite(val):
                return u + inward * step, val
        return u, val

    lo, f_lo = nudged(lo, 1.0)
    hi, f_hi = nudged(hi, -1.0)
    if np.isfinite(f_lo) == np.isfinite(f_hi):
        return lo, f_lo, hi, f_hi
    good, bad, f_good = (lo, hi, f_lo) if np.isfinite(f_lo) else (hi, lo, f_hi)
    for _ in range(MAX_BISECT):
        if abs(good - bad) < 1e-13:
            break
        mid = 0.5 * (good + bad)
        f_mid = f(mid)
        if np.isfinite(f_mid):
            good, f_good = mid, f_mid
        else:
            bad = mid
    if good < bad:
        return lo, f_lo, good, f_good
    return good, f_good, hi, f_hi


def _scan_defined(f, lo, hi, n=SEED_SAMPLES):
    """Sub-bracket holding a sign change of ``f`` when both ends are undefined."""
    us = np.linspace(lo, hi, n + 1)
    vals = np.array([f(u) for u in us])
    fin = np.isfinite(vals)
    for k in range(n):
        if not (fin[k] or fin[k + 1]):
            continue
        if fin[k] and fin[k + 1] and np.sign(vals[k]) == np.sign(vals[k + 1]):
            continue
        a, f_a, b, f_b = _resolve_bracket(f, us[k], us[k + 1])
        if np.isfinite(f_a) and np.isfinite(f_b) and np.sign(f_a) != np.sign(f_b):
            return a, f_a, b, f_b
    return lo, vals[0], hi, vals[-1]


def _multisect_frontier(fv, good, bad, parts=MULTISECT_PARTS, tol=1e-13):
    """Last defined point before the undefined end, by vectorized multisection."""
    f_good = float(fv(np.array([good]))[0])
    while abs(bad - good) > tol:
        us = np.linspace(good, bad, parts + 1)[1:-1]
        fs = fv(us)
        ok = np.isfinite(fs)
        first_bad = len(us) if ok.all() else int(np.argmin(ok))
        if first_bad > 0:
            good, f_good = us[first_bad - 1], float(fs[first_bad - 1])
        if first_bad < len(us):
            bad = us[first_bad]
    return good, f_good


def _multisect_root(fv, lo, hi, f_lo, f_hi, parts=MULTISECT_PARTS):
    """Sign-change root by vectorized multisection (bisection with ``parts`` slices).

    Returns ``(u, f(u))`` for the better end of the final bracket.
    """
    for _ in range(MAX_BISECT):
        us = np.linspace(lo, hi, parts + 1)[1:-1]
        fs = fv(us)
        if not np.isfinite(fs).all():
            raise BracketError(f"residual undefined inside [{lo}, {hi}]", lo, hi, f_lo, f_hi)
        exact = np.nonzero(fs == 0.0)[0]
        if exact.size:
            return us[exact[0]], 0.0
        xs = np.concatenate(([lo], us, [hi]))
        ys = np.concatenate(([f_lo], fs, [f_hi]))
        k = int(np.nonzero(np.sign(ys[:-1]) != np.sign(ys[1:]))[0][0])
        lo, hi, f_lo, f_hi = xs[k], xs[k + 1], ys[k], ys[k + 1]
        u, f_u = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
        width = hi - lo
        if width < XTOL and (abs(f_u) < RESIDUAL_TOL
                             or width < 4 * np.finfo(float).eps * max(1.0, abs(u))):
            return u, f_u
    raise ConvergenceError("multisection did not converge")


_AXES = ("s1", "c1")


def solve_boundary(kind, c3, fixed, lo, hi, xtol=XTOL):
    """Bisect the residual of ``kind`` along one axis of the slice ``c3``.

    ``fixed`` is ``(axis, value)`` with axis ``"s1"`` or ``"c1"``; the root is
    sought along the other axis between ``lo`` and ``hi``.

    Raises BracketError when the residual has the same sign at both ends.
    """
    kind = BoundaryKind(kind)
    axis, value = fixed
    if axis not in _AXES:
        raise ValueError(f"fixed axis must be one of {_AXES}, got {axis!r}")

    def state(u):
        return XxzState(value, u, c3) if axis == "s1" else XxzState(u, value, c3)

    def f(u):
        return residual(kind, state(u))

    def f_nan(u):
        try:
            return f(u)
        except (SingularInput, NoInteriorMinimum):
            return math.nan

    # a bracket reaching past the slice rectangle is cut back to it
    limit = c1_max(c3) if axis == "s1" else s1_max(c3)
    lo, hi = max(float(lo), -limit), min(float(hi), limit)
    if lo >= hi:
        raise BracketError(f"bracket lies outside the slice (|u| <= {limit})", lo, hi,
                           math.nan, math.nan)
    state(lo), state(hi)
    lo, f_lo, hi, f_hi = _resolve_bracket(f_nan, lo, hi)
    if not (np.isfinite(f_lo) or np.isfinite(f_hi)):
        lo, f_lo, hi, f_hi = _scan_defined(f_nan, lo, hi)
        if kind is BoundaryKind.ZERO_PRIME and not (np.isfinite(f_lo) or np.isfinite(f_hi)):
            raise NoInteriorMinimum(f"no interior minimum anywhere on [{lo}, {hi}]")
    root, _ = bisect(f, lo, hi, f_lo, f_hi, xtol=xtol)
    state(root)
    return root


# ---------------------------------------------------------------------------
# continuation

@dataclass(frozen=True)
class _Chart:
    """Two-parameter patch: marching coordinate ``t`` and free coordinate ``u``."""

    to_state: Callable
    t_lo: float
    t_hi: float
    u_hi: Callable
    u_lo: float = 0.0


def _slice_chart(kind, c3):
    smax, cmax = s1_max(c3), c1_max(c3)
    if kind is BoundaryKind.ZERO_PRIME:
        return _Chart(lambda t, u: (t, u, c3), 0.0, smax, lambda t: cmax)
    return _Chart(lambda t, u: (u, t, c3), 0.0, cmax, lambda t: smax)


def _face_chart(face):
    if face == "upper":
        return _Chart(lambda t, u: (u, (1.0 - np.asarray(t)) / 2.0, t), -1.0, 1.0,
                      lambda t: (1.0 + t) / 2.0)
    if face == "lower":
        return _Chart(lambda t, u: ((1.0 + np.asarray(t)) / 2.0, u, t), -1.0, 1.0,
                      lambda t: (1.0 - t) / 2.0)
    raise ValueError(f"unknown face {face!r}")


@dataclass
class BoundaryCurve:
    """Traced polyline of one critical condition.

    ``points`` has columns ``(s1, c1, c3)``.  For slice curves ``c3`` is the
    constant slice height; face curves set ``face`` and leave ``c3`` None.
    ``start_flag``/``end_flag`` are ``"edge"`` when the march ran into the
    border of its chart and ``"junction"`` when the root was lost inside.
    """

    kind: BoundaryKind
    c3: Optional[float]
    points: np.ndarray
    start_flag: str
    end_flag: str
    face: Optional[str] = None

    @property
    def s1(self):
        return self.points[:, 0]

    @property
    def c1(self):
        return self.points[:, 1]

    def __len__(self):
        return len(self.points)


class _Tracer:
    def __init__(self, kind, chart, step):
        self.kind = BoundaryKind(kind)
        self.chart = chart
        self.step = step

    def values(self, t, u):
        s1, c1, c3 = self.chart.to_state(np.asarray(t, dtype=float), np.asarray(u, dtype=float))
        with np.errstate(all="ignore"):
            return residual_values(self.kind, s1, c1, c3)

    def value(self, t, u):
        return float(self.values(t, u))

    def refine(self, t, lo, hi, f_lo, f_hi):
        """Root between a sign change, or None if the residual stays large."""
        fv = lambda us: self.values(t, us)
        try:
            u, f_u = _multisect_root(fv, lo, hi, f_lo, f_hi)
        except (BracketError, ConvergenceError):
            return None
        return u if abs(f_u) < RESIDUAL_TOL else None

    def root(self, t, lo, hi, center=None):
        """Root in u on [lo, hi] at fixed t nearest ``center``, or None."""
        fv = lambda us: self.values(t, us)
        us = np.linspace(lo, hi, BRACKET_SAMPLES)
        vs = fv(us)
        fin = np.isfinite(vs)
        candidates = []
        for k in range(BRACKET_SAMPLES - 1):
            a, b, fa, fb = us[k], us[k + 1], vs[k], vs[k + 1]
            if fin[k] != fin[k + 1]:
                # the defined side may hold a thin band reaching a root
                if fin[k]:
                    b, fb = _multisect_frontier(fv, a, b)
                else:
                    a, fa = _multisect_frontier(fv, b, a)
            elif not fin[k]:
                continue
            if np.isfinite(fa) and np.isfinite(fb) and np.sign(fa) != np.sign(fb):
                candidates.append((a, b, fa, fb))
        center = 0.5 * (lo + hi) if center is None else center
        candidates.sort(key=lambda c: abs(0.5 * (c[0] + c[1]) - center))
        for a, b, fa, fb in candidates:
            u = self.refine(t, a, b, fa, fb)
            if u is not None:
                return u
        return None

    def _frontier(self, t, good, bad):
        """Vectorized bisection on definedness between paired samples."""
        for _ in range(FRONTIER_ITER):
            mid = 0.5 * (good + bad)
            ok = np.isfinite(self.values(t, mid))
            good = np.where(ok, mid, good)
            bad = np.where(ok, bad, mid)
        return good, self.values(t, good)

    def seed(self):
        chart = self.chart
        ts = np.linspace(chart.t_lo, chart.t_hi, SEED_COLUMNS)
        frac = np.linspace(0.0, 1.0, SEED_SAMPLES)
        u_hi = np.array([chart.u_hi(t) for t in ts])
        us = chart.u_lo + (u_hi[:, None] - chart.u_lo) * frac[None, :]
        tt = np.repeat(ts[:, None], SEED_SAMPLES, axis=1)
        vals = self.values(tt, us)
        fin = np.isfinite(vals)
        lo_u, lo_f = us[:, :-1].copy(), vals[:, :-1].copy()
        hi_u, hi_f = us[:, 1:].copy(), vals[:, 1:].copy()
        # a defined/undefined pair may hide a thin band holding a root:
        # replace the undefined end by the frontier of the defined region
        mixed = fin[:, :-1] ^ fin[:, 1:]
        if mixed.any():
            i, k = np.nonzero(mixed)
            left_ok = fin[i, k]
            good = np.where(left_ok, us[i, k], us[i, k + 1])
            bad = np.where(left_ok, us[i, k + 1], us[i, k])
            u_f, f_f = self._frontier(ts[i], good, bad)
            hi_u[i[left_ok], k[left_ok]] = u_f[left_ok]
            hi_f[i[left_ok], k[left_ok]] = f_f[left_ok]
            lo_u[i[~left_ok], k[~left_ok]] = u_f[~left_ok]
            lo_f[i[~left_ok], k[~left_ok]] = f_f[~left_ok]
        change = np.isfinite(lo_f) & np.isfinite(hi_f) & (np.sign(lo_f) != np.sign(hi_f))
        order = range(SEED_COLUMNS - 1, -1, -1) if self.kind is BoundaryKind.ZERO_PRIME else range(SEED_COLUMNS)
        for i in order:
            if u_hi[i] <= chart.u_lo:
                continue
            for k in np.nonzero(change[i])[0]:
                u = self.refine(ts[i], lo_u[i, k], hi_u[i, k], lo_f[i, k], hi_f[i, k])
                if u is not None:
                    return ts[i], u
        raise EmptyCurve(f"no {self.kind.value} boundary root in {SEED_COLUMNS} seed columns")

    def _next_root(self, t_next, u):
        chart = self.chart
        u_top = chart.u_hi(t_next)
        half = BRACKET_STEPS * self.step
        for _ in range(MAX_WIDEN + 1):
            lo = max(chart.u_lo, u - half)
            hi = min(u_top, u + half)
            root = self.root(t_next, lo, hi, center=u) if hi > lo else None
            if root is not None or (lo == chart.u_lo and hi == u_top):
                return root
            half *= WIDEN_FACTOR
        return None

    def march(self, t0, u0, direction):
        chart = self.chart
        t_end = chart.t_hi if direction > 0 else chart.t_lo
        pts = []
        t, u = t0, u0
        h = self.step
        if t == t_end:
            return pts, "edge"
        while True:
            t_next = t + direction * h
            final = (t_next - t_end) * direction >= 0
            if final:
                t_next = t_end
            if chart.u_hi(t_next) < chart.u_lo:
                return pts, "edge"
            root = self._next_root(t_next, u)
            if root is None:
                # approach junctions and steep stretches with shorter steps
                if h > self.step / 2 ** MAX_HALVINGS:
                    h /= 2.0
                    continue
                near_side = chart.u_hi(t) - u <= BRACKET_STEPS * self.step
                return pts, "edge" if near_side else "junction"
            t, u = t_next, root
            pts.append((t, u))
            if final:
                return pts, "edge"

    def trace(self):
        t0, u0 = self.seed()
        back, start_flag = self.march(t0, u0, -1)
        fwd, end_flag = self.march(t0, u0, +1)
        tu = np.array(back[::-1] + [(t0, u0)] + fwd, dtype=float)
        s1, c1, c3 = self.chart.to_state(tu[:, 0], tu[:, 1])
        pts = np.column_stack(np.broadcast_arrays(s1, c1, c3)).astype(float)
        return tu, pts, start_flag, end_flag


def _physical_mask(kind, points):
    """Points where the tied branch is also the global minimum.

    The zero set of a residual continues past the phase boundary into
    regions where another minimum is deeper; those stretches separate
    nothing and are hidden.  The gap is judged relative to the depth of the
    profile, and nearly flat profiles (the slice tip) separate nothing.
    """
    s1, c1, c3 = points.T
    best = correlations.optimize_many(s1, c1, c3)
    if kind is BoundaryKind.PI_HALF:
        tied = best.pi_half_branch
    elif kind is BoundaryKind.EQUAL:
        tied = np.minimum(best.zero_branch, best.pi_half_branch)
    else:
        tied = best.zero_branch
    mid = correlations.deficit_profile(s1, c1, c3, np.full_like(s1, HALF_PI / 2))
    depth = np.maximum.reduce([best.zero_branch, best.pi_half_branch, mid]) - best.value
    return (depth > FLAT_PROFILE) & (tied - best.value <= PHYSICAL_RTOL * depth + 1e-12)


def _longest_run(mask):
    best, start = (0, 0), None
    for i, flag in enumerate(np.append(mask, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def trace_slice(kind, c3, step=DEFAULT_STEP, physical=True):
    """Trace the ``kind`` boundary in the slice ``c3 = const`` (first quadrant).

    ``ZERO``, ``PI_HALF`` and ``EQUAL`` march in ``c1`` and solve for ``s1``;
    ``ZERO_PRIME`` marches in ``s1`` and solves for ``c1``.

    With ``physical`` set, the curve is cut to its longest stretch that
    actually separates two phases (see ``_physical_mask``); the cut ends are
    flagged ``"junction"``.

    Raises EmptyCurve when no root is found in the seed scan or, with
    ``physical``, when the whole zero set is hidden.
    """
    kind = BoundaryKind(kind)
    if not -1.0 < c3 < 1.0:
        raise DomainError(f"slice height c3={c3} outside (-1, 1)", constraint="-1 < c3 < 1")
    if not 0.0 < step <= 0.05:
        raise ValueError(f"step {step} outside (0, 0.05]")
    _, pts, start_flag, end_flag = _Tracer(kind, _slice_chart(kind, c3), step).trace()
    curve = BoundaryCurve(kind, float(c3), pts, start_flag, end_flag)
    return _clip_physical(curve) if physical else curve


def _clip_physical(curve):
    lo, hi = _longest_run(_physical_mask(curve.kind, curve.points))
    if hi == lo:
        raise EmptyCurve(f"{curve.kind.value} zero set separates no phases")
    return BoundaryCurve(curve.kind, curve.c3, curve.points[lo:hi],
                         curve.start_flag if lo == 0 else "junction",
                         curve.end_flag if hi == len(curve.points) else "junction",
                         curve.face)


def trace_slice_all(c3, step=DEFAULT_STEP, kinds=tuple(BoundaryKind)):
    """All non-empty boundary curves of a slice."""
    curves = []
    for kind in kinds:
        try:
            curves.append(trace_slice(kind, c3, step))
        except EmptyCurve:
            pass
    return curves


# ---------------------------------------------------------------------------
# crossings along a traced curve

def _crossing_along(tracer, tu, other, tol=1e-10):
    """Where the residual ``other`` changes sign along a traced curve.

    Bisects on the marching coordinate; at every trial ``t`` the curve is
    re-solved for ``u`` so the returned point lies on both zero sets.
    Returns ``(t, u)`` or None.
    """
    other = BoundaryKind(other)

    def other_at(t, u):
        s1, c1, c3 = tracer.chart.to_state(np.asarray(t, dtype=float), np.asarray(u, dtype=float))
        return float(residual_values(other, s1, c1, c3))

    vals = np.array([other_at(t, u) for t, u in tu])
    for i in range(len(tu) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or np.sign(a) == np.sign(b):
            continue
        (t_a, u_a), (t_b, u_b) = tu[i], tu[i + 1]
        margin = abs(u_b - u_a) + BRACKET_STEPS * tracer.step

        def solve_u(t):
            lo = max(tracer.chart.u_lo, min(u_a, u_b) - margin)
            hi = min(tracer.chart.u_hi(t), max(u_a, u_b) + margin)
            return tracer.root(t, lo, hi)

        lo_t, hi_t, f_lo = t_a, t_b, a
        t_mid, u_mid = t_a, u_a
        for _ in range(MAX_BISECT):
            t_mid = 0.5 * (lo_t + hi_t)
            u_mid = solve_u(t_mid)
            if u_mid is None:
                break
            f_mid = other_at(t_mid, u_mid)
            if np.sign(f_mid) == np.sign(f_lo):
                lo_t, f_lo = t_mid, f_mid
            else:
                hi_t = t_mid
            if abs(hi_t - lo_t) < tol:
                return t_mid, u_mid
        if u_mid is not None:
            return t_mid, u_mid
    return None


@dataclass(frozen=True)
class TriplePoint:
    """Point where the Zero, PiHalf and Theta phases meet."""

    s1: float
    c1: float
    c3: float
    zero_branch: float
    pi_half_branch: float
    interior_branch: float


def _window_value(s1, c1, c3):
    # global minimum of Delta over [delta, pi/2 - delta], edges included
    _, interior = correlations.interior_window_minimum(s1, c1, c3, delta=WINDOW_DELTA)
    x = XxzState(s1, c1, c3)
    edges = [correlations.deficit_at(x, WINDOW_DELTA),
             correlations.deficit_at(x, math.pi / 2 - WINDOW_DELTA)]
    return float(np.nanmin(np.append(interior, edges)))


def find_triple_point(c3, step=DEFAULT_STEP):
    """Intersection of the ``EQUAL`` line with the ``PI_HALF`` line at ``c3``.

    Raises NotFound when the lines do not cross inside the slice.
    """
    tracer = _Tracer(BoundaryKind.PI_HALF, _slice_chart(BoundaryKind.PI_HALF, c3), step)
    try:
        tu, _, _, _ = tracer.trace()
    except EmptyCurve as exc:
        raise NotFound(f"no pi/2 boundary at c3={c3}") from exc
    hit = _crossing_along(tracer, tu, BoundaryKind.EQUAL)
    if hit is None:
        raise NotFound(f"equal-branch line does not meet the pi/2 boundary at c3={c3}")
    s1, c1, _ = (float(v) for v in tracer.chart.to_state(*hit))
    x = XxzState(s1, c1, c3)
    zero, half = correlations.deficit_branch_0(x), correlations.deficit_branch_pi2(x)
    if abs(zero - half) > 1e-6 or abs(residual(BoundaryKind.PI_HALF, x)) > 1e-6:
        raise NotFound(f"crossing at {x.as_tuple()} failed verification")
    return TriplePoint(s1, c1, float(c3), zero, half, _window_value(s1, c1, c3))


# ---------------------------------------------------------------------------
# faces

def _edge_zero_residual(c3):
    """``S~''(0)`` on the edge ``s1 = (1+c3)/2``, ``c1 = (1-c3)/2``.

    The logarithm of the vanishing eigenvalue drops out identically on this
    edge, leaving a finite expression.
    """
    s1, c1 = (1.0 + c3) / 2.0, (1.0 - c3) / 2.0
    big = math.log(2.0 * (1.0 + c3))
    d = 1.0 - c3
    if abs(s1 + c3) < entropy.EDGE_SWITCH:
        ratio = 2.0 / d
    else:
        ratio = (big - math.log(d)) / (s1 + c3)
    return 0.25 * ((s1 + c3) * big - 2.0 * c3 * math.log(d) - c1 ** 2 * ratio - c1 * math.log(d))


def _edge_pi_half_residual(c3):
    return float(entropy.d2_pi_half_values((1.0 + c3) / 2.0, (1.0 - c3) / 2.0, c3))


def _scan_root(f, lo, hi, n=400):
    """First root of scalar ``f`` on ``[lo, hi]`` found by scanning then bisecting."""
    xs = np.linspace(lo, hi, n)
    fs = np.array([f(x) for x in xs])
    for i in range(n - 1):
        if np.isfinite(fs[i]) and np.isfinite(fs[i + 1]) and np.sign(fs[i]) != np.sign(fs[i + 1]):
            root, _ = bisect(f, xs[i], xs[i + 1], fs[i], fs[i + 1], xtol=1e-12)
            return root
    raise NotFound(f"no root on [{lo}, {hi}]")


@dataclass
class FaceDiagram:
    """Boundary curves on the two adjacent half-faces plus the edge landmarks.

    ``landmarks`` maps ``"a"``, ``"b"``, ``"c"`` to ``(s1, c1, c3)``.
    """

    curves: list
    landmarks: dict = field(default_factory=dict)


FACE_KINDS = {
    "upper": (BoundaryKind.ZERO, BoundaryKind.PI_HALF),
    "lower": (BoundaryKind.ZERO_PRIME, BoundaryKind.PI_HALF, BoundaryKind.EQUAL),
}


def _trace_face(kind, face, step):
    tracer = _Tracer(kind, _face_chart(face), step)
    tu, pts, start_flag, end_flag = tracer.trace()
    return tracer, tu, BoundaryCurve(kind, None, pts, start_flag, end_flag, face=face)


def face_landmarks(lower_pi_half=None, step=DEFAULT_STEP):
    """Locate the edge points "a", "b" and the face point "c".

    "a" and "b" are roots in ``c3`` of the 0- and pi/2-curvature residuals on
    the edge shared by the two faces.  "c" is where the ``EQUAL`` condition
    is met along the pi/2 curve of the face ``s1 = (1+c3)/2``; there the
    pi/2 and 0' curves end together.
    """
    c3_a = _scan_root(_edge_zero_residual, -0.3, 0.3)
    c3_b = _scan_root(_edge_pi_half_residual, -0.9, 0.0)
    if lower_pi_half is None:
        tracer, tu, _ = _trace_face(BoundaryKind.PI_HALF, "lower", step)
    else:
        tracer, tu = lower_pi_half
    hit = _crossing_along(tracer, tu, BoundaryKind.EQUAL)
    if hit is None:
        raise NotFound("pi/2 and equal-branch lines do not meet on the face s1=(1+c3)/2")
    c_point = tuple(float(v) for v in tracer.chart.to_state(*hit))
    edge = lambda c3: (float((1.0 + c3) / 2.0), float((1.0 - c3) / 2.0), float(c3))
    return {"a": edge(c3_a), "b": edge(c3_b), "c": c_point}


def trace_faces(step=DEFAULT_STEP, physical=True):
    """Boundary curves on the faces ``c1 = (1-c3)/2`` and ``s1 = (1+c3)/2``.

    Both faces are parameterized by ``c3``; the free coordinate is ``s1`` on
    the first and ``c1`` on the second.  The sign choice ``c1 > 0`` for the
    first face is immaterial since every quantity is even in ``c1``.
    """
    if not 0.0 < step <= 0.05:
        raise ValueError(f"step {step} outside (0, 0.05]")
    curves = []
    lower_pi_half = None
    for face, kinds in FACE_KINDS.items():
        for kind in kinds:
            try:
                tracer, tu, curve = _trace_face(kind, face, step)
            except EmptyCurve:
                continue
            if face == "lower" and kind is BoundaryKind.PI_HALF:
                lower_pi_half = (tracer, tu)
            if physical:
                try:
                    curve = _clip_physical(curve)
                except EmptyCurve:
                    continue
            curves.append(curve)
    return FaceDiagram(curves, face_landmarks(lower_pi_half, step))
