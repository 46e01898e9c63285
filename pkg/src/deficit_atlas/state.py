"""Parameter-space types for symmetric XXZ two-qubit X states.

A symmetric XXZ state is fixed by three correlators: the magnetization
``s1 = <sz x 1> = <1 x sz>``, the transverse correlator
``c1 = <sx x sx> = <sy x sy>`` and the longitudinal correlator
``c3 = <sz x sz>``.  Positivity of the density matrix confines ``(s1, c1, c3)``
to the tetrahedron

    -1 <= c3 <= 1,   |s1| <= (1 + c3)/2,   |c1| <= (1 - c3)/2,

which is the image of the probability simplex under the Bell-mixture map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError

BOUNDARY_TOL = 1e-12
SUBCLASS_TOL = 1e-12


def _check_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name}={value!r} is not a finite real", constraint="finite")


@dataclass(frozen=True)
class XxzState:
    """Correlator triple ``(s1, c1, c3)`` inside the tetrahedron.

    Construction validates the tetrahedron inequalities (inclusive, with an
    absolute slack of ``1e-12``) and raises :class:`DomainError` otherwise.
    """

    s1: float
    c1: float
    c3: float

    def __post_init__(self):
        s1, c1, c3 = float(self.s1), float(self.c1), float(self.c3)
        _check_finite(s1=s1, c1=c1, c3=c3)
        if not -1.0 - BOUNDARY_TOL <= c3 <= 1.0 + BOUNDARY_TOL:
            raise DomainError(f"c3={c3} outside [-1, 1]", constraint="-1 <= c3 <= 1")
        if abs(s1) > (1.0 + c3) / 2.0 + BOUNDARY_TOL:
            raise DomainError(
                f"|s1|={abs(s1)} exceeds (1+c3)/2={(1.0 + c3) / 2.0}",
                constraint="|s1| <= (1+c3)/2",
            )
        if abs(c1) > (1.0 - c3) / 2.0 + BOUNDARY_TOL:
            raise DomainError(
                f"|c1|={abs(c1)} exceeds (1-c3)/2={(1.0 - c3) / 2.0}",
                constraint="|c1| <= (1-c3)/2",
            )
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c3", c3)

    def reflected(self, s1_sign=1, c1_sign=1):
        """Mirror image under ``s1 -> -s1`` and/or ``c1 -> -c1``."""
        return XxzState(s1_sign * self.s1, c1_sign * self.c1, self.c3)

    def as_tuple(self):
        return (self.s1, self.c1, self.c3)


def validate(s1, c1, c3):
    """Return the :class:`XxzState` for ``(s1, c1, c3)`` or raise DomainError."""
    return XxzState(s1, c1, c3)


def s1_max(c3):
    """Half-width of the slice rectangle along ``s1`` at height ``c3``."""
    return (1.0 + c3) / 2.0


def c1_max(c3):
    """Half-width of the slice rectangle along ``c1`` at height ``c3``."""
    return (1.0 - c3) / 2.0


@dataclass(frozen=True)
class BellMixWeights:
    """Weights of |Psi+>, |Psi->, |00>, |11> in the Bell-mixture form."""

    q1: float
    q2: float
    q3: float
    q4: float

    def __post_init__(self):
        qs = (self.q1, self.q2, self.q3, self.q4)
        _check_finite(q1=qs[0], q2=qs[1], q3=qs[2], q4=qs[3])
        for i, q in enumerate(qs, start=1):
            if q < -BOUNDARY_TOL:
                raise DomainError(f"q{i}={q} is negative", constraint=f"q{i} >= 0")
        total = math.fsum(qs)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"weights sum to {total}, not 1", constraint="q1+q2+q3+q4 = 1")

    def as_tuple(self):
        return (self.q1, self.q2, self.q3, self.q4)


def from_bell_mixture(w):
    """Map Bell-mixture weights to correlators."""
    q1, q2, q3, _ = w.as_tuple()
    return XxzState(q1 + q2 + 2.0 * q3 - 1.0, q1 - q2, 1.0 - 2.0 * (q1 + q2))


def to_bell_mixture(x):
    """Inverse of :func:`from_bell_mixture`; the weights are the eigenvalues of rho."""
    s1, c1, c3 = x.as_tuple()
    q = [
        (1.0 + 2.0 * c1 - c3) / 4.0,
        (1.0 - 2.0 * c1 - c3) / 4.0,
        (1.0 + 2.0 * s1 + c3) / 4.0,
        (1.0 - 2.0 * s1 + c3) / 4.0,
    ]
    # faces of the tetrahedron produce -1e-17 style weights
    q = [0.0 if -BOUNDARY_TOL <= qi < 0.0 else qi for qi in q]
    return BellMixWeights(*q)


@dataclass(frozen=True)
class GeneralXState:
    """Seven-correlator X state (complex off-diagonals allowed)."""

    s1: float
    s2: float
    c1: float
    c2: float
    c12: float
    c21: float
    c3: float

    def __post_init__(self):
        values = dict(s1=self.s1, s2=self.s2, c1=self.c1, c2=self.c2,
                      c12=self.c12, c21=self.c21, c3=self.c3)
        _check_finite(**values)
        for name, value in values.items():
            if abs(value) > 1.0 + BOUNDARY_TOL:
                raise DomainError(f"{name}={value} outside [-1, 1]", constraint=f"|{name}| <= 1")
        u2 = (self.c1 - self.c2) ** 2 + (self.c12 + self.c21) ** 2
        v2 = (self.c1 + self.c2) ** 2 + (self.c12 - self.c21) ** 2
        if (1 + self.c3) ** 2 - (self.s1 + self.s2) ** 2 < u2 - BOUNDARY_TOL:
            raise DomainError(
                "outer block of rho is not positive semidefinite",
                constraint="(1+c3)^2 - (s1+s2)^2 >= (c1-c2)^2 + (c12+c21)^2",
            )
        if (1 - self.c3) ** 2 - (self.s1 - self.s2) ** 2 < v2 - BOUNDARY_TOL:
            raise DomainError(
                "inner block of rho is not positive semidefinite",
                constraint="(1-c3)^2 - (s1-s2)^2 >= (c1+c2)^2 + (c12-c21)^2",
            )


@dataclass(frozen=True)
class ReducedXState:
    """Real X form ``(s1, s2, c3, u, v)`` reached by local z-rotations."""

    s1: float
    s2: float
    c3: float
    u: float
    v: float
    xxz: Optional[XxzState] = None

    @property
    def is_symmetric_xxz(self):
        return self.xxz is not None


def reduce_general_x(g):
    """Remove the off-diagonal phases of a general X state.

    The outer and inner anti-diagonal entries become the nonnegative moduli
    ``u`` and ``v``.  When ``g`` belongs to the symmetric XXZ subclass
    (``s1 = s2``, ``c1 = c2``, ``c12 = c21 = 0``) the matching
    :class:`XxzState` is attached as ``xxz``.
    """
    u = math.hypot(g.c1 - g.c2, g.c12 + g.c21)
    v = math.hypot(g.c1 + g.c2, g.c12 - g.c21)
    xxz = None
    if (abs(g.s1 - g.s2) <= SUBCLASS_TOL and abs(g.c1 - g.c2) <= SUBCLASS_TOL
            and abs(g.c12) <= SUBCLASS_TOL and abs(g.c21) <= SUBCLASS_TOL):
        xxz = XxzState(g.s1, g.c1, g.c3)
    return ReducedXState(g.s1, g.s2, g.c3, u, v, xxz)
