"""Closed-form predicates in the plane and in space: spindles, cones, balls.

A spindle ``fuso(a, b, R)`` is the intersection of every closed ball of
radius ``R`` that contains both ``a`` and ``b``.  It is a lens of revolution
about the line ``ab`` with cusps at the two endpoints.  Membership reduces to
a single inequality in the half-plane spanned by the axis and the query
point: with ``s = |a - b| / 2`` and ``h = sqrt(R**2 - s**2)``, a point with
axial coordinate ``u`` (measured from the midpoint) and axis distance ``v``
belongs to the spindle iff ``u**2 + (v + h)**2 <= R**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from reachkit import _kernels
from reachkit.errors import DomainError

__all__ = [
    "Ball",
    "Cone",
    "Spindle",
    "as_point",
    "cone_contains",
    "federer_inequality_slack",
    "spindle_contains",
    "spindle_mask",
    "spindle_subset_sampled",
]


def as_point(p, d=None) -> np.ndarray:
    """Validate ``p`` as a finite point of E^2 or E^3 and return a float array."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.shape[0] not in (2, 3):
        raise DomainError(f"a point needs 2 or 3 coordinates, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise DomainError(f"expected a point of E^{d}, got {arr.shape[0]} coordinates")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"point has non-finite coordinates: {arr.tolist()}")
    return arr


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class Spindle:
    """The lens ``fuso(a, b, R)``; requires ``0 < |a - b| < 2R``."""

    a: np.ndarray
    b: np.ndarray
    R: float

    def __post_init__(self):
        a = as_point(self.a)
        b = as_point(self.b, a.shape[0])
        R = _positive("R", self.R)
        dist = float(np.linalg.norm(b - a))
        if dist == 0:
            raise DomainError("spindle endpoints coincide (a == b)")
        if not dist < 2 * R:
            raise DomainError(f"spindle needs |a-b| < 2R, got |a-b| = {dist} with R = {R}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "R", R)

    @property
    def ndim(self) -> int:
        return self.a.shape[0]

    @property
    def half_length(self) -> float:
        return 0.5 * float(np.linalg.norm(self.b - self.a))

    @property
    def ring_radius(self) -> float:
        """Distance from the midpoint to the centres of the two extreme balls."""
        s = self.half_length
        return math.sqrt(self.R * self.R - s * s)

    def contains(self, p, tol=0.0) -> bool:
        return spindle_contains(self, p, tol)

    def mask(self, points, tol=0.0) -> np.ndarray:
        return spindle_mask(self, points, tol)

    def boundary_polyline(self, n=128) -> np.ndarray:
        """Closed planar outline (2-D spindles only), ``n`` points."""
        if self.ndim != 2:
            raise DomainError("outline is only defined for planar spindles")
        s, hh, R = self.half_length, self.ring_radius, self.R
        e = (self.b - self.a) / (2 * s)
        nrm = np.array([-e[1], e[0]])
        mid = 0.5 * (self.a + self.b)
        half = n // 2
        u = np.linspace(-s, s, half)
        v = np.sqrt(np.maximum(R * R - u * u, 0.0)) - hh
        upper = mid + np.outer(u, e) + np.outer(v, nrm)
        lower = mid + np.outer(u[::-1], e) - np.outer(v[::-1], nrm)
        return np.vstack([upper, lower[1:], upper[:1]])[:n]


@dataclass(frozen=True, eq=False)
class Cone:
    """Open cone of directions ``v`` with ``cos(v, b - a) > |b - a| / (2R)``."""

    apex: np.ndarray
    target: np.ndarray
    R: float

    def __post_init__(self):
        a = as_point(self.apex)
        b = as_point(self.target, a.shape[0])
        R = _positive("R", self.R)
        dist = float(np.linalg.norm(b - a))
        if not 0 < dist < 2 * R:
            raise DomainError(f"cone needs 0 < |a-b| < 2R, got {dist} with R = {R}")
        object.__setattr__(self, "apex", a)
        object.__setattr__(self, "target", b)
        object.__setattr__(self, "R", R)


@dataclass(frozen=True, eq=False)
class Ball:
    """``B(center, radius)`` when ``open`` else ``D(center, radius)``."""

    center: np.ndarray
    radius: float
    open: bool = True

    def __post_init__(self):
        c = as_point(self.center)
        r = float(self.radius)
        if not (r >= 0 and math.isfinite(r)):
            raise DomainError(f"ball radius must be a nonnegative finite number, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def contains(self, p) -> bool:
        dist = float(np.linalg.norm(as_point(p, self.center.shape[0]) - self.center))
        return dist < self.radius if self.open else dist <= self.radius


def spindle_contains(s: Spindle, p, tol=0.0) -> bool:
    """True iff ``p`` lies in ``fuso(a, b, R)`` grown by ``tol`` (negative shrinks).

    The endpoints themselves always belong to the spindle.
    """
    p = as_point(p, s.ndim)
    return bool(_kernels.lens_contains(p, s.a, s.b, s.R, float(tol)))


def spindle_mask(s: Spindle, points, tol=0.0) -> np.ndarray:
    """Vectorised :func:`spindle_contains` over an ``(n, d)`` array."""
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, s.ndim)
    return _kernels.lens_mask(pts, s.a, s.b, s.R, float(tol))


def _lens_samples(s: Spindle, samples: int) -> np.ndarray:
    """Deterministic Halton points in the open lens plus both endpoints."""
    d = s.ndim
    q = qmc.Halton(d=d, scramble=False).random(samples + 1)[1:]
    half, hh, R = s.half_length, s.ring_radius, s.R
    e = (s.b - s.a) / (2 * half)
    mid = 0.5 * (s.a + s.b)
    u = -half + 2 * half * q[:, 0]
    vmax = np.sqrt(np.maximum(R * R - u * u, 0.0)) - hh
    if d == 2:
        nrm = np.array([-e[1], e[0]])
        pts = mid + np.outer(u, e) + np.outer((2 * q[:, 1] - 1) * vmax, nrm)
    else:
        # orthonormal frame (n1, n2) perpendicular to the axis
        helper = np.eye(3)[np.argmin(np.abs(e))]
        n1 = np.cross(e, helper)
        n1 /= np.linalg.norm(n1)
        n2 = np.cross(e, n1)
        phi = 2 * np.pi * q[:, 2]
        r = q[:, 1] * vmax
        radial = np.outer(np.cos(phi), n1) + np.outer(np.sin(phi), n2)
        pts = mid + np.outer(u, e) + r[:, None] * radial
    return np.vstack([s.a, s.b, pts])


def spindle_subset_sampled(outer: Spindle, c, d, samples: int = 500) -> bool:
    """Sampled check that ``fuso(c, d, R)`` lies inside ``outer`` (same ``R``).

    A testing aid for the nesting property of spindles, not a proof.
    """
    if int(samples) < 1:
        raise DomainError("samples must be a positive integer")
    c = as_point(c, outer.ndim)
    d = as_point(d, outer.ndim)
    for name, p in (("c", c), ("d", d)):
        if not spindle_contains(outer, p):
            raise DomainError(f"{name} = {p.tolist()} is not in the outer spindle")
    inner = Spindle(c, d, outer.R)
    return bool(np.all(spindle_mask(outer, _lens_samples(inner, int(samples)))))


def cone_contains(c: Cone, v) -> bool:
    """True iff direction ``v`` makes ``cos(v, b - a) > |b - a| / (2R)`` (strict)."""
    v = as_point(v, c.apex.shape[0])
    nv = float(np.linalg.norm(v))
    if nv == 0:
        raise DomainError("the zero vector is not a direction")
    w = c.target - c.apex
    nw = float(np.linalg.norm(w))
    return float(np.dot(v / nv, w / nw)) > nw / (2 * c.R)


def federer_inequality_slack(x, foot, b, reach_at_foot) -> float:
    """``(x - foot, foot - b) + |foot - b|**2 * |x - foot| / (2 * reach_at_foot)``.

    For ``foot`` the projection of ``x`` onto a closed set whose local reach at
    ``foot`` is at least ``reach_at_foot``, the value is nonnegative for every
    ``b`` in the set.
    """
    reach_at_foot = _positive("reach_at_foot", reach_at_foot)
    x = as_point(x)
    foot = as_point(foot, x.shape[0])
    b = as_point(b, x.shape[0])
    n = x - foot
    t = foot - b
    return float(np.dot(n, t) + np.dot(t, t) * np.linalg.norm(n) / (2 * reach_at_foot))
