"""Built-in verification suite.

Each check reproduces one published number or property at a fixed
tolerance and returns a :class:`CheckResult`.  The CLI ``verify`` command and
the acceptance tests share these functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import boundaries, correlations, diagram, entropy
from .boundaries import BoundaryKind
from .correlations import PhaseLabel
from .errors import NotFound
from .state import XxzState

SEED = 20240611
RANDOM_STATES = 1000
ENDPOINT_C = 50.0        # |Delta(eps) - Delta(0)| <= C eps^2
FD_DIGITS = 40
FD_STEP = mpmath.mpf("1e-12")
SINGULAR_GAP = 1e-6


@dataclass
class Row:
    """One compared quantity inside a check."""

    label: str
    expected: object
    computed: object
    tolerance: str
    passed: bool


@dataclass
class CheckResult:
    number: int
    name: str
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.rows) and all(r.passed for r in self.rows)

    def add(self, label, expected, computed, tolerance, passed):
        self.rows.append(Row(label, expected, computed, tolerance, bool(passed)))

    def close(self, label, expected, computed, tol):
        self.add(label, expected, computed, f"abs {tol:g}", abs(computed - expected) <= tol)

    def as_dict(self):
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "rows": [r.__dict__ for r in self.rows],
        }


def random_states(n, rng):
    """Uniform sample of the tetrahedron (flat Dirichlet weights mapped linearly)."""
    q = rng.dirichlet(np.ones(4), size=n)
    return np.column_stack([q[:, 0] + q[:, 1] + 2 * q[:, 2] - 1,
                            q[:, 0] - q[:, 1],
                            1 - 2 * (q[:, 0] + q[:, 1])])


# ---------------------------------------------------------------------------
# quantitative checks

def check_pi_half_endpoint_c3_01():
    res = CheckResult(1, "pi/2 boundary root, c3=0.1, c1=0.45")
    root = boundaries.solve_boundary(BoundaryKind.PI_HALF, 0.1, ("c1", 0.45), 0.3, 0.5)
    res.close("s1", 0.416297, root, 1e-4)
    return res


def check_zero_endpoint_c3_01():
    res = CheckResult(2, "0 boundary root, c3=0.1, c1=0.45")
    root = boundaries.solve_boundary(BoundaryKind.ZERO, 0.1, ("c1", 0.45), 0.45, 0.55)
    res.close("s1", 0.502469, root, 1e-4)
    return res


def check_theta_area_c3_01():
    res = CheckResult(3, "Theta segment area and fraction, c3=0.1")
    segment, fraction = diagram.theta_region_area(0.1)
    expected = 0.008639
    res.add("segment", expected, segment, "rel 3%", abs(segment - expected) <= 0.03 * expected)
    res.close("fraction", 0.035, fraction, 0.002)
    return res


def check_slice_c3_0():
    res = CheckResult(4, "slice c3=0: 0 line c1=s1, pi/2 endpoint, Theta fraction")
    curve = boundaries.trace_slice(BoundaryKind.ZERO, 0.0)
    dev = float(np.max(np.abs(curve.s1 - curve.c1)))
    res.add("max|s1-c1| on 0 line", 0.0, dev, "abs 1e-06", dev < 1e-6)
    root = boundaries.solve_boundary(BoundaryKind.PI_HALF, 0.0, ("c1", 0.5), 0.3, 0.5)
    res.close("pi/2 endpoint s1", 0.415037, root, 1e-4)
    _, fraction = diagram.theta_region_area(0.0)
    res.close("Theta fraction", 0.042, fraction, 0.003)
    return res


def check_zero_prime_c3_m02():
    res = CheckResult(5, "0' boundary at c3=-0.2, s1=0.4")
    root = boundaries.solve_boundary(BoundaryKind.ZERO_PRIME, -0.2, ("s1", 0.4), 0.5, 0.65)
    res.close("c1", 0.576208, root, 1e-4)
    return res


def check_zero_prime_c3_m04():
    res = CheckResult(6, "0' boundary at c3=-0.4, s1=0.3")
    root = boundaries.solve_boundary(BoundaryKind.ZERO_PRIME, -0.4, ("s1", 0.3), 0.55, 0.7)
    res.close("c1", 0.652165, root, 1e-4)
    return res


_LANDMARKS = {}


def _landmarks():
    if not _LANDMARKS:
        _LANDMARKS.update(boundaries.face_landmarks())
    return _LANDMARKS


def check_landmark_b():
    res = CheckResult(7, "face landmark b (pi/2 line meets the edge)")
    res.close("c3", -0.350302, _landmarks()["b"][2], 1e-3)
    return res


def check_landmark_c():
    res = CheckResult(8, "face landmark c (pi/2 and 0' lines meet)")
    res.close("c3", -0.538191, _landmarks()["c"][2], 2e-3)
    return res


def check_bifurcations_c3_015():
    res = CheckResult(9, "curvature roots at c3=0.15, c1=0.425")
    half = boundaries.solve_boundary(BoundaryKind.PI_HALF, 0.15, ("c1", 0.425), 0.3, 0.45)
    zero = boundaries.solve_boundary(BoundaryKind.ZERO, 0.15, ("c1", 0.425), 0.45, 0.575)
    res.close("S''(pi/2)=0 at s1", 0.406975, half, 1e-4)
    res.close("S''(0)=0 at s1", 0.483997, zero, 1e-4)
    return res


def check_upper_band():
    res = CheckResult(10, "states with c3 >= 1/3 are all phase 0")
    rng = np.random.default_rng(SEED + 10)
    c3 = rng.uniform(1.0 / 3.0, 1.0, RANDOM_STATES)
    s1 = rng.uniform(-1.0, 1.0, RANDOM_STATES) * (1.0 + c3) / 2.0
    c1 = rng.uniform(-1.0, 1.0, RANDOM_STATES) * (1.0 - c3) / 2.0
    phase = correlations.optimize_many(s1, c1, c3).phase
    n_zero = int(np.count_nonzero(phase == PhaseLabel.ZERO))
    res.add("phase 0 count", RANDOM_STATES, n_zero, "exact", n_zero == RANDOM_STATES)
    return res


def check_bell_edge():
    res = CheckResult(11, "Bell edge c3=-1, s1=0")
    for c1 in (-1.0, -0.5, 0.0, 0.5, 1.0):
        got = correlations.deficit(XxzState(0.0, c1, -1.0)).value
        res.close(f"deficit at c1={c1:g}", correlations.bell_diagonal_value(c1), got, 1e-10)
    got = correlations.deficit(XxzState(0.0, 1.0, -1.0)).value
    res.close("deficit at |c1|=1 (ln 2)", math.log(2.0), got, 1e-10)
    return res


def check_triple_point():
    res = CheckResult(12, "triple point at c3=-0.6, none at c3=-0.3")
    tp = boundaries.find_triple_point(-0.6)
    vals = (tp.zero_branch, tp.pi_half_branch, tp.interior_branch)
    spread = max(vals) - min(vals)
    res.add("branch spread at c3=-0.6", 0.0, spread, "abs 1e-06", spread <= 1e-6)
    try:
        boundaries.find_triple_point(-0.3)
        absent = False
    except NotFound:
        absent = True
    res.add("NotFound at c3=-0.3", True, absent, "exact", absent)
    return res


# ---------------------------------------------------------------------------
# property checks

def check_oracle_spectrum():
    res = CheckResult(13, "closed-form post-measurement spectrum vs matrix oracle")
    rng = np.random.default_rng(SEED + 13)
    pts = random_states(RANDOM_STATES, rng)
    thetas = rng.uniform(0.0, math.pi / 2, RANDOM_STATES)
    phis = rng.uniform(0.0, 2 * math.pi, RANDOM_STATES)
    worst = 0.0
    for (s1, c1, c3), th, ph in zip(pts, thetas, phis):
        x = XxzState(s1, c1, c3)
        analytic = np.sort(entropy.post_spectrum(x, th).as_array())[::-1]
        oracle = entropy.oracle_spectrum(entropy.oracle_post_matrix(x, th, ph)).as_array()
        worst = max(worst, float(np.max(np.abs(analytic - oracle))))
    res.add("max eigenvalue difference", 0.0, worst, "abs 1e-10", worst <= 1e-10)
    return res


def _post_entropy_mp(s1, c1, c3, theta):
    ct, st = mpmath.cos(theta), mpmath.sin(theta)
    total = mpmath.mpf(0)
    for sign in (1, -1):
        base = 1 + sign * s1 * ct
        root = mpmath.sqrt((s1 + sign * c3 * ct) ** 2 + c1 ** 2 * st ** 2)
        for lam in ((base + root) / 4, (base - root) / 4):
            if lam > 0:
                total -= lam * mpmath.log(lam)
    return total


def finite_difference_d2(s1, c1, c3, at):
    """Central second difference of ``S~`` at ``0`` or ``pi/2`` in high precision."""
    with mpmath.workdps(FD_DIGITS):
        s1, c1, c3 = mpmath.mpf(s1), mpmath.mpf(c1), mpmath.mpf(c3)
        t0 = mpmath.mpf(0) if at == 0 else mpmath.pi / 2
        h = FD_STEP
        f = lambda t: _post_entropy_mp(s1, c1, c3, t)
        return float((f(t0 + h) - 2 * f(t0) + f(t0 - h)) / h ** 2)


def _away_from_singular(s1, c1, c3):
    q = (1 + 2 * c1 - c3, 1 - 2 * c1 - c3, 1 + 2 * s1 + c3, 1 - 2 * s1 + c3)
    return (min(q) / 4 > SINGULAR_GAP and abs(s1 - c3) > SINGULAR_GAP
            and abs(s1 + c3) > SINGULAR_GAP)


def check_second_derivatives():
    res = CheckResult(14, "closed-form S''(0), S''(pi/2) vs finite differences")
    rng = np.random.default_rng(SEED + 14)
    worst = {0: 0.0, 1: 0.0}
    used = 0
    while used < RANDOM_STATES:
        s1, c1, c3 = random_states(1, rng)[0]
        if not _away_from_singular(s1, c1, c3):
            continue
        x = XxzState(s1, c1, c3)
        used += 1
        for key, analytic in ((0, entropy.d2_post_at_zero(x)), (1, entropy.d2_post_at_pi_half(x))):
            fd = finite_difference_d2(s1, c1, c3, key)
            rel = abs(analytic - fd) / max(abs(fd), 1e-300)
            worst[key] = max(worst[key], rel)
    res.add("max rel error at 0", 0.0, worst[0], "rel 1e-05", worst[0] < 1e-5)
    res.add("max rel error at pi/2", 0.0, worst[1], "rel 1e-05", worst[1] < 1e-5)
    return res


def check_symmetries():
    res = CheckResult(15, "reflection symmetries and S~(theta) = S~(pi - theta)")
    rng = np.random.default_rng(SEED + 15)
    s1, c1, c3 = random_states(RANDOM_STATES, rng).T
    for measure in ("deficit", "discord"):
        base = correlations.optimize_many(s1, c1, c3, measure).value
        worst = 0.0
        for ss, cs in ((-1, 1), (1, -1), (-1, -1)):
            other = correlations.optimize_many(ss * s1, cs * c1, c3, measure).value
            worst = max(worst, float(np.max(np.abs(other - base))))
        res.add(f"{measure} reflection max diff", 0.0, worst, "abs 1e-10", worst <= 1e-10)
    worst = 0.0
    thetas = rng.uniform(0.0, math.pi, RANDOM_STATES)
    phis = rng.uniform(0.0, 2 * math.pi, RANDOM_STATES)
    for a, b, c, th, ph in zip(s1, c1, c3, thetas, phis):
        x = XxzState(a, b, c)
        left = entropy.quaternary_entropy(entropy.oracle_spectrum(entropy.oracle_post_matrix(x, th, ph)))
        right = entropy.quaternary_entropy(
            entropy.oracle_spectrum(entropy.oracle_post_matrix(x, math.pi - th, ph)))
        worst = max(worst, abs(left - right))
    res.add("oracle S~(theta) - S~(pi-theta)", 0.0, worst, "abs 1e-12", worst <= 1e-12)
    return res


def check_nonnegativity_and_stationarity():
    res = CheckResult(16, "Delta(theta) >= 0 and stationary endpoints")
    rng = np.random.default_rng(SEED + 16)
    s1, c1, c3 = (a[:, None] for a in random_states(RANDOM_STATES, rng).T)
    grid = np.concatenate([np.linspace(0.0, math.pi / 2, 201),
                           rng.uniform(0.0, math.pi / 2, 55)])[None, :]
    lowest = float(np.min(correlations.deficit_profile(s1, c1, c3, grid)))
    res.add("min Delta(theta)", ">= -1e-10", lowest, "abs 1e-10", lowest >= -1e-10)
    worst = 0.0
    for eps in (1e-2, 1e-3, 1e-4):
        for end, inner in ((0.0, eps), (math.pi / 2, math.pi / 2 - eps)):
            a = correlations.deficit_profile(s1, c1, c3, np.array([[end]]))
            b = correlations.deficit_profile(s1, c1, c3, np.array([[inner]]))
            worst = max(worst, float(np.max(np.abs(b - a))) / eps ** 2)
    res.add("max |Delta(end+eps)-Delta(end)|/eps^2", f"<= {ENDPOINT_C:g}", worst,
            f"C = {ENDPOINT_C:g}", worst <= ENDPOINT_C)
    return res


def check_discord_coincidence():
    res = CheckResult(17, "Q = Delta at theta=0 and for s1=0")
    rng = np.random.default_rng(SEED + 17)
    pts = random_states(RANDOM_STATES, rng)
    exact = all(correlations.discord_at(XxzState(*p), 0.0) == correlations.deficit_at(XxzState(*p), 0.0)
                for p in pts)
    res.add("Q(0) == Delta(0)", True, exact, "exact", exact)
    c3 = rng.uniform(-1.0, 1.0, 100)
    c1 = rng.uniform(-1.0, 1.0, 100) * (1.0 - c3) / 2.0
    s1 = np.zeros(100)
    q = correlations.optimize_many(s1, c1, c3, "discord").value
    d = correlations.optimize_many(s1, c1, c3, "deficit").value
    worst = float(np.max(np.abs(q - d)))
    res.add("max |Q - Delta| at s1=0", 0.0, worst, "abs 1e-10", worst <= 1e-10)
    return res


def check_grid_doubling():
    res = CheckResult(18, "optimized Delta stable under grid doubling")
    rng = np.random.default_rng(SEED + 18)
    generic = random_states(RANDOM_STATES - 100, rng)
    c3 = rng.uniform(-0.21, -0.19, 100)
    c1 = np.minimum(rng.uniform(0.57, 0.59, 100), (1 - c3) / 2)
    s1 = np.minimum(rng.uniform(0.39, 0.41, 100), (1 + c3) / 2)
    pts = np.vstack([generic, np.column_stack([s1, c1, c3])])
    coarse = correlations.optimize_many(*pts.T, n=correlations.GRID_POINTS).value
    fine = correlations.optimize_many(*pts.T, n=2 * correlations.GRID_POINTS - 1).value
    worst = float(np.max(np.abs(coarse - fine)))
    res.add("max |Delta(n) - Delta(2n)|", 0.0, worst, "abs 1e-10", worst < 1e-10)
    return res


CHECKS = (
    check_pi_half_endpoint_c3_01,
    check_zero_endpoint_c3_01,
    check_theta_area_c3_01,
    check_slice_c3_0,
    check_zero_prime_c3_m02,
    check_zero_prime_c3_m04,
    check_landmark_b,
    check_landmark_c,
    check_bifurcations_c3_015,
    check_upper_band,
    check_bell_edge,
    check_triple_point,
    check_oracle_spectrum,
    check_second_derivatives,
    check_symmetries,
    check_nonnegativity_and_stationarity,
    check_discord_coincidence,
    check_grid_doubling,
)


def run_check(check):
    """Run one check, turning an unexpected exception into a failed row."""
    try:
        return check()
    except Exception as exc:  # noqa: BLE001 - reported as a failure
        number = CHECKS.index(check) + 1 if check in CHECKS else 0
        res = CheckResult(number, check.__name__)
        res.add("error", "no exception", f"{type(exc).__name__}: {exc}", "-", False)
        return res


def run_all():
    return [run_check(check) for check in CHECKS]


def format_row(res):
    status = "PASS" if res.passed else "FAIL"
    parts = [f"{r.label}: expected {_show(r.expected)}, got {_show(r.computed)} ({r.tolerance})"
             for r in res.rows]
    return f"[{status}] criterion {res.number:2d} {res.name}: " + "; ".join(parts)


def _show(v):
    return f"{v:.9g}" if isinstance(v, float) else str(v)
