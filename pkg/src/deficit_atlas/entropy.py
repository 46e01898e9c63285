"""Entropy kernels for symmetric XXZ states.

Everything is in nats.  The ``*_values`` functions broadcast over numpy
arrays of ``(s1, c1, c3, theta)`` and are the workhorses used by the
optimizer and the diagram scanner; the state-level wrappers take an
:class:`~deficit_atlas.state.XxzState` and return Python floats or a
:class:`Spectrum4`.

The measurement is a von Neumann projector on qubit B tilted by the polar
angle ``theta`` from the z axis.  The azimuth drops out of the spectrum, so
only ``theta`` in ``[0, pi/2]`` is needed (``theta -> pi - theta`` is a
symmetry).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SingularInput

LN2 = math.log(2.0)
ZERO_FLOOR = 1e-300
NEGATIVE_CLIP = 1e-12
EDGE_SWITCH = 1e-8   # |s1 +- c3| below this uses the analytic limit in d2 at 0
SMALL_R = 1e-6       # r below this uses the series form of d2 at pi/2


def neg_xlogx(p):
    """Elementwise ``-p ln p`` with ``0 ln 0 = 0``.

    Values in ``[-1e-12, 0)`` are rounding noise and count as zero; anything
    more negative raises :class:`DomainError`.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < -NEGATIVE_CLIP):
        raise DomainError(f"negative probability {p.min()!r}", constraint="p >= 0")
    pos = p > ZERO_FLOOR
    safe = np.where(pos, p, 1.0)
    return np.where(pos, -safe * np.log(safe), 0.0)


def _xlogx_raw(p):
    # no sign check: callers pass 1 +- something on the closed domain
    p = np.asarray(p, dtype=float)
    pos = p > ZERO_FLOOR
    safe = np.where(pos, p, 1.0)
    return np.where(pos, safe * np.log(safe), 0.0)


@dataclass(frozen=True)
class Spectrum4:
    """Four eigenvalues of a two-qubit density matrix (in a fixed order)."""

    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            object.__setattr__(self, name, float(getattr(self, name)))
        ps = self.as_array()
        if np.any(ps < -NEGATIVE_CLIP):
            raise DomainError(f"negative eigenvalue in {tuple(ps)}", constraint="p >= 0")
        if abs(math.fsum(ps) - 1.0) > 1e-12:
            raise DomainError(f"spectrum sums to {math.fsum(ps)}", constraint="sum p = 1")

    def as_array(self):
        return np.array([self.p1, self.p2, self.p3, self.p4], dtype=float)

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3, self.p4))

    def sorted(self):
        return Spectrum4(*sorted(self, reverse=True))


def binary_entropy(x):
    """Shannon entropy ``h(x)`` of the distribution ``(x, 1 - x)``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -NEGATIVE_CLIP) or np.any(xa > 1.0 + NEGATIVE_CLIP):
        raise DomainError(f"binary entropy argument {x!r} outside [0, 1]", constraint="0 <= x <= 1")
    xa = np.clip(xa, 0.0, 1.0)
    out = neg_xlogx(xa) + neg_xlogx(1.0 - xa)
    return float(out) if out.ndim == 0 else out


def quaternary_entropy(s):
    """``-sum p ln p`` over the four entries of a :class:`Spectrum4`."""
    return float(np.sum(neg_xlogx(s.as_array())))


# ---------------------------------------------------------------------------
# broadcasting kernels

def pre_eigenvalues(s1, c1, c3):
    """Eigenvalues ``(1 +- 2 s1 + c3)/4, (1 +- 2 c1 - c3)/4`` of rho."""
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    return np.stack([
        (1.0 + 2.0 * s1 + c3) / 4.0,
        (1.0 - 2.0 * s1 + c3) / 4.0,
        (1.0 + 2.0 * c1 - c3) / 4.0,
        (1.0 - 2.0 * c1 - c3) / 4.0,
    ])


def pre_entropy_values(s1, c1, c3):
    return np.sum(neg_xlogx(pre_eigenvalues(s1, c1, c3)), axis=0)


def post_eigenvalues(s1, c1, c3, theta, cos_t=None, sin_t=None):
    """Spectrum of the measured state, stacked along a new leading axis.

    ``cos_t``/``sin_t`` may be passed precomputed when the same angle grid
    is reused across many states.
    """
    if cos_t is None:
        cos_t = np.cos(theta)
    if sin_t is None:
        sin_t = np.sin(theta)
    transverse = (c1 * sin_t) ** 2
    root_a = np.sqrt((s1 + c3 * cos_t) ** 2 + transverse)
    root_b = np.sqrt((s1 - c3 * cos_t) ** 2 + transverse)
    mag = s1 * cos_t
    return np.stack([
        (1.0 + mag + root_a) / 4.0,
        (1.0 + mag - root_a) / 4.0,
        (1.0 - mag + root_b) / 4.0,
        (1.0 - mag - root_b) / 4.0,
    ])


def post_entropy_values(s1, c1, c3, theta, cos_t=None, sin_t=None):
    """Post-measurement entropy ``S~(theta)``, broadcasting."""
    lam = post_eigenvalues(s1, c1, c3, theta, cos_t, sin_t)
    # the two small eigenvalues can come out at -1e-17 on the faces
    pos = lam > ZERO_FLOOR
    safe = np.where(pos, lam, 1.0)
    return -np.sum(np.where(pos, safe * np.log(safe), 0.0), axis=0)


def branch_zero_values(s1, c1, c3):
    """``S~(0) - S``: the deficit with the z-axis measurement (independent of s1)."""
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    return (-0.5 * _xlogx_raw(1.0 - c3)
            + 0.25 * (_xlogx_raw(1.0 + 2.0 * c1 - c3) + _xlogx_raw(1.0 - 2.0 * c1 - c3)))


def branch_pi_half_values(s1, c1, c3):
    """``S~(pi/2) - S``: the deficit with the x-axis measurement."""
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    r = np.minimum(np.hypot(s1, c1), 1.0)
    return (-0.5 * (_xlogx_raw(1.0 + r) + _xlogx_raw(1.0 - r))
            + 0.25 * (_xlogx_raw(1.0 + 2.0 * c1 - c3) + _xlogx_raw(1.0 - 2.0 * c1 - c3)
                      + _xlogx_raw(1.0 + 2.0 * s1 + c3) + _xlogx_raw(1.0 - 2.0 * s1 + c3)))


def _ratio_log1p(num, den, limit):
    """``log1p(2 num/den)/num`` with the removable point ``num = 0`` set to ``limit``."""
    small = np.abs(num) < EDGE_SWITCH
    safe = np.where(small, 1.0, num)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log1p(2.0 * safe / den) / safe
    return np.where(small, limit, val)


def d2_zero_values(s1, c1, c3):
    """Second angular derivative of ``S~`` at ``theta = 0``.

    Returns ``nan`` on the singular set (``1 - c3 <= 0`` or a vanishing
    ``1 +- 2 s1 + c3``).
    """
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    a = 1.0 + 2.0 * s1 + c3
    b = 1.0 - 2.0 * s1 + c3
    d = 1.0 - c3
    bad = (a <= 0) | (b <= 0) | (d <= 0)
    a, b, d = (np.where(bad, 1.0, v) for v in (a, b, d))
    limit = 2.0 / d
    # ln(a/d)/(s1+c3) and ln(d/b)/(s1-c3), with a = d + 2(s1+c3), b = d + 2(c3-s1)
    term_plus = _ratio_log1p(s1 + c3, d, limit)
    term_minus = _ratio_log1p(c3 - s1, d, limit)
    val = 0.25 * (s1 * (np.log(a) - np.log(b))
                  + c3 * (np.log(a) + np.log(b) - 2.0 * np.log(d))
                  - c1 ** 2 * (term_plus + term_minus))
    return np.where(bad, np.nan, val)


def d2_pi_half_values(s1, c1, c3):
    """Second angular derivative of ``S~`` at ``theta = pi/2``; ``nan`` for r >= 1."""
    s1, c1, c3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s1, c1, c3)))
    r = np.hypot(s1, c1)
    bad = r >= 1.0
    small = r < SMALL_R
    rs = np.where(small | bad, 0.5, r)
    log_ratio = np.log1p(rs) - np.log1p(-rs)
    full = (c1 ** 2 * (rs ** 2 - c3 ** 2) / (2.0 * rs ** 3) * log_ratio
            - 0.5 * s1 ** 2 * ((1.0 + c3 / rs) ** 2 / (1.0 + rs)
                               + (1.0 - c3 / rs) ** 2 / (1.0 - rs)))
    # r -> 0: the c3^2/r^2 pieces cancel; expand ln((1+r)/(1-r)) = 2r + 2r^3/3 + 2r^5/5
    series = c1 ** 2 - c3 ** 2 - s1 ** 2 * (1.0 - c3) ** 2 - c1 ** 2 * c3 ** 2 / 3.0
    out = np.where(small, series, full)
    return np.where(bad, np.nan, out)


# ---------------------------------------------------------------------------
# state-level API

def _angle(theta):
    theta = float(theta)
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise DomainError(f"measurement angle {theta} outside [0, pi/2]",
                          constraint="0 <= theta <= pi/2")
    return theta


def pre_spectrum(x):
    """Eigenvalues ``(lambda1..lambda4)`` of the state."""
    lam = pre_eigenvalues(x.s1, x.c1, x.c3)
    return Spectrum4(*np.where((lam < 0) & (lam >= -NEGATIVE_CLIP), 0.0, lam))


def pre_entropy(x):
    """von Neumann entropy of the state before measurement."""
    return quaternary_entropy(pre_spectrum(x))


def post_spectrum(x, theta):
    """Eigenvalues ``(Lambda1..Lambda4)`` after measuring qubit B at ``theta``."""
    lam = post_eigenvalues(x.s1, x.c1, x.c3, _angle(theta))
    return Spectrum4(*np.where((lam < 0) & (lam >= -NEGATIVE_CLIP), 0.0, lam))


def post_entropy(x, theta):
    """Post-measurement entropy ``S~(theta)``."""
    return quaternary_entropy(post_spectrum(x, theta))


def post_entropy_at_zero(x):
    """Closed form of ``S~(0)``."""
    s1, c1, c3 = x.as_tuple()
    return float(2 * LN2 - 0.5 * _xlogx_raw(1 - c3)
                 - 0.25 * (_xlogx_raw(1 + 2 * s1 + c3) + _xlogx_raw(1 - 2 * s1 + c3)))


def post_entropy_at_pi_half(x):
    """Closed form of ``S~(pi/2)``."""
    r = min(math.hypot(x.s1, x.c1), 1.0)
    return float(2 * LN2 - 0.5 * (_xlogx_raw(1 + r) + _xlogx_raw(1 - r)))


def cond_entropy(x, theta):
    """Conditional entropy ``S~(theta) - h((1 + s1 cos theta)/2)``."""
    theta = _angle(theta)
    return post_entropy(x, theta) - binary_entropy((1.0 + x.s1 * math.cos(theta)) / 2.0)


def d2_post_at_zero(x):
    """``d^2 S~/d theta^2`` at ``theta = 0``.

    Raises
    ------
    SingularInput
        If ``1 - c3 <= 0`` or ``1 +- 2 s1 + c3 <= 0`` (faces of the tetrahedron
        where a logarithm diverges).
    """
    val = float(d2_zero_values(x.s1, x.c1, x.c3))
    if math.isnan(val):
        raise SingularInput(f"second derivative at theta=0 is singular at {x.as_tuple()}")
    return val


def d2_post_at_pi_half(x):
    """``d^2 S~/d theta^2`` at ``theta = pi/2``; SingularInput when ``r >= 1``."""
    val = float(d2_pi_half_values(x.s1, x.c1, x.c3))
    if math.isnan(val):
        raise SingularInput(f"second derivative at theta=pi/2 is singular at {x.as_tuple()}")
    return val


# ---------------------------------------------------------------------------
# matrix oracle (tests and verification only)

def oracle_post_matrix(x, theta, phi):
    """Averaged post-measurement density matrix for polar/azimuthal angles.

    Entries are written out explicitly for the lower triangle; the upper
    triangle follows from Hermiticity.
    """
    s1, c1, c3 = x.as_tuple()
    e = np.exp(1j * phi)
    st2 = math.sin(theta) ** 2
    ct2 = math.cos(theta) ** 2
    s2t = math.sin(2 * theta)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 1 + s1 + (s1 + c3) * ct2
    m[1, 1] = 1 - c3 + (s1 + c3) * st2
    m[2, 2] = 1 - c3 - (s1 - c3) * st2
    m[3, 3] = 1 - s1 - (s1 - c3) * ct2
    m[1, 0] = 0.5 * (s1 + c3) * e * s2t
    m[2, 0] = 0.5 * c1 * e * s2t
    m[2, 1] = c1 * st2
    m[3, 0] = c1 * e ** 2 * st2
    m[3, 1] = -0.5 * c1 * e * s2t
    m[3, 2] = 0.5 * (s1 - c3) * e * s2t
    lower = np.tril(m, -1)
    return (np.diag(np.diag(m)) + lower + lower.conj().T) / 4.0


def jacobi_eigenvalues(a, tol=1e-13, max_sweeps=100):
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all ``(p, q)`` pairs until the off-diagonal Frobenius norm
    drops below ``tol``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.square(a - np.diag(np.diag(a))))))
        if off < tol:
            return np.diag(a).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def oracle_spectrum(m):
    """Eigenvalues of a 4x4 Hermitian matrix, sorted descending.

    The complex matrix ``A + iB`` is embedded as the real symmetric
    ``[[A, -B], [B, A]]``, whose spectrum is that of ``m`` with every value
    doubled.
    """
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise DomainError("matrix is not Hermitian", constraint="m = m^H")
    re, im = m.real, m.imag
    embedded = np.block([[re, -im], [im, re]])
    vals = np.sort(jacobi_eigenvalues(embedded))[::-1]
    return Spectrum4(*vals[::2])
