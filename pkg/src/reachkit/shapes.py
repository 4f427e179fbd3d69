"""Analytic shapes and their rasterisation onto a :class:`~reachkit.grid.GridSpec`.

A cell is occupied iff its centre satisfies the shape's predicate, evaluated
with an absolute slack of ``1e-9 * h`` so that centres lying exactly on a
boundary are not lost to rounding.  Point lists are the one exception: each
point also marks its nearest cell, so a zero-thickness point is never lost.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from reachkit.errors import DomainError, GridFormatError, WindowError
from reachkit.grid import GridSet, GridSpec

_EPS = 1e-9


def _seg_dist(pts, p, q):
    pq = q - p
    L2 = float(pq @ pq)
    if L2 == 0:
        return np.linalg.norm(pts - p, axis=1)
    t = np.clip((pts - p) @ pq / L2, 0.0, 1.0)
    return np.linalg.norm(pts - (p + t[:, None] * pq), axis=1)


class Shape:
    """Base class: subclasses implement ``contains`` and ``extent``."""

    def contains(self, pts: np.ndarray, eps: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def extent(self):
        """``(lo, hi)`` bounding box, or ``None`` for unbounded shapes."""
        return None

    def mask(self, spec: GridSpec) -> np.ndarray:
        return self.contains(spec.centers(), _EPS * spec.h).reshape(spec.dims)

    def __or__(self, other):
        return Union([self, other])

    def __and__(self, other):
        return Intersection([self, other])

    def __invert__(self):
        return Complement(self)


@dataclass
class Ball(Shape):
    center: tuple
    radius: float

    def contains(self, pts, eps=0.0):
        return np.linalg.norm(pts - np.asarray(self.center, float), axis=1) <= self.radius + eps

    def extent(self):
        c = np.asarray(self.center, float)
        return c - self.radius, c + self.radius


@dataclass
class Shell(Shape):
    """Closed annulus / spherical shell ``r_in <= |x - center| <= r_out``."""

    center: tuple
    r_in: float
    r_out: float

    def contains(self, pts, eps=0.0):
        r = np.linalg.norm(pts - np.asarray(self.center, float), axis=1)
        return (r >= self.r_in - eps) & (r <= self.r_out + eps)

    def extent(self):
        c = np.asarray(self.center, float)
        return c - self.r_out, c + self.r_out


@dataclass
class Segment(Shape):
    p: tuple
    q: tuple
    thicken: float = 0.0

    def contains(self, pts, eps=0.0):
        return _seg_dist(pts, np.asarray(self.p, float), np.asarray(self.q, float)) <= self.thicken + eps

    def extent(self):
        ends = np.array([self.p, self.q], float)
        return ends.min(axis=0) - self.thicken, ends.max(axis=0) + self.thicken


@dataclass
class PointList(Shape):
    points: list
    thicken: float = 0.0

    def _arr(self):
        return np.asarray(self.points, float).reshape(len(self.points), -1)

    def contains(self, pts, eps=0.0):
        out = np.zeros(len(pts), dtype=bool)
        for p in self._arr():
            out |= np.linalg.norm(pts - p, axis=1) <= self.thicken + eps
        return out

    def extent(self):
        if not self.points:
            return None
        arr = self._arr()
        return arr.min(axis=0) - self.thicken, arr.max(axis=0) + self.thicken

    def mask(self, spec):
        m = super().mask(spec) if self.points else np.zeros(spec.dims, dtype=bool)
        for p in (self._arr() if self.points else []):
            m[spec.nearest_index(p)] = True
        return m


@dataclass
class Polygon(Shape):
    """Planar polygon: filled (even-odd rule) or, with ``boundary_only``, its thickened outline."""

    vertices: list
    thicken: float = 0.0
    boundary_only: bool = False

    def contains(self, pts, eps=0.0):
        v = np.asarray(self.vertices, float)
        if pts.shape[1] != 2 or v.ndim != 2 or v.shape[1] != 2:
            raise DomainError("polygons are planar")
        near = np.zeros(len(pts), dtype=bool)
        for i in range(len(v)):
            near |= _seg_dist(pts, v[i], v[(i + 1) % len(v)]) <= self.thicken + eps
        if self.boundary_only:
            return near
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), dtype=bool)
        for i in range(len(v)):
            (x1, y1), (x2, y2) = v[i], v[(i + 1) % len(v)]
            crosses = (y1 > y) != (y2 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (x < xint)
        return inside | near

    def extent(self):
        v = np.asarray(self.vertices, float)
        return v.min(axis=0) - self.thicken, v.max(axis=0) + self.thicken


@dataclass
class HalfSpace(Shape):
    """``{x : (normal, x) >= offset}``."""

    normal: tuple
    offset: float

    def contains(self, pts, eps=0.0):
        return pts @ np.asarray(self.normal, float) >= self.offset - eps


@dataclass
class Union(Shape):
    parts: list

    def contains(self, pts, eps=0.0):
        out = np.zeros(len(pts), dtype=bool)
        for s in self.parts:
            out |= s.contains(pts, eps)
        return out

    def mask(self, spec):
        out = np.zeros(spec.dims, dtype=bool)
        for s in self.parts:
            out |= s.mask(spec)
        return out

    def extent(self):
        ext = [s.extent() for s in self.parts]
        if not ext or any(e is None for e in ext):
            return None
        return np.min([e[0] for e in ext], axis=0), np.max([e[1] for e in ext], axis=0)


@dataclass
class Intersection(Shape):
    parts: list

    def contains(self, pts, eps=0.0):
        out = np.ones(len(pts), dtype=bool)
        for s in self.parts:
            out &= s.contains(pts, eps)
        return out

    def mask(self, spec):
        out = np.ones(spec.dims, dtype=bool)
        for s in self.parts:
            out &= s.mask(spec)
        return out

    def extent(self):
        ext = [e for e in (s.extent() for s in self.parts) if e is not None]
        if not ext:
            return None
        return np.max([e[0] for e in ext], axis=0), np.min([e[1] for e in ext], axis=0)


@dataclass
class Complement(Shape):
    """Complement within the grid window."""

    shape: Shape

    def contains(self, pts, eps=0.0):
        return ~self.shape.contains(pts, -eps)

    def mask(self, spec):
        return ~self.shape.mask(spec)


def rasterize(shape: Shape, spec: GridSpec) -> GridSet:
    """Occupy every cell whose centre belongs to ``shape``.

    Raises :class:`WindowError` when a bounded shape pokes out of the window.
    """
    ext = shape.extent()
    if ext is not None:
        lo, hi = (np.asarray(v, float) for v in ext)
        if lo.shape != (spec.ndim,):
            raise DomainError(f"shape is {lo.shape[0]}-dimensional, grid is {spec.ndim}-dimensional")
        half = 0.5 * spec.h
        if np.any(lo < spec.lo - half) or np.any(hi > spec.hi + half):
            raise WindowError(
                f"shape extent [{lo.tolist()}, {hi.tolist()}] exceeds the grid window "
                f"[{spec.lo.tolist()}, {spec.hi.tolist()}]")
    return GridSet(spec, shape.mask(spec))


# ---------------------------------------------------------------------------
# JSON descriptions
# ---------------------------------------------------------------------------

_SIMPLE = {
    "ball": (Ball, ("center", "radius")),
    "shell": (Shell, ("center", "r_in", "r_out")),
    "annulus": (Shell, ("center", "r_in", "r_out")),
    "segment": (Segment, ("p", "q")),
    "halfspace": (HalfSpace, ("normal", "offset")),
}


def shape_from_dict(d: dict) -> Shape:
    """Build a shape from its JSON description.

    ``{"points": [[x, y], ...], "thicken": r}`` is a point list; anything else
    needs a ``"type"`` key (ball, shell/annulus, segment, points, polygon,
    halfspace, union, intersection, complement).
    """
    if not isinstance(d, dict):
        raise GridFormatError(f"shape description must be an object, got {type(d).__name__}")
    if "type" not in d and "points" in d:
        d = dict(d, type="points")
    kind = str(d.get("type", "")).lower()
    try:
        if kind in _SIMPLE:
            cls, keys = _SIMPLE[kind]
            extra = {"thicken": float(d.get("thicken", 0.0))} if kind == "segment" else {}
            return cls(*[d[k] for k in keys], **extra)
        if kind == "points":
            return PointList([list(map(float, p)) for p in d["points"]], float(d.get("thicken", 0.0)))
        if kind == "polygon":
            return Polygon(d["vertices"], float(d.get("thicken", 0.0)), bool(d.get("boundary_only", False)))
        if kind in ("union", "intersection"):
            parts = [shape_from_dict(p) for p in d["parts"]]
            return Union(parts) if kind == "union" else Intersection(parts)
        if kind == "complement":
            return Complement(shape_from_dict(d["shape"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise GridFormatError(f"bad {kind or 'shape'} description: {exc}") from exc
    raise GridFormatError(f"unknown shape type {kind!r}")


def load_shape(path):
    """Read a JSON shape file; returns ``(shape, document)``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GridFormatError(f"cannot read shape file {path}: {exc}") from exc
    return shape_from_dict(doc.get("shape", doc) if isinstance(doc, dict) else doc), doc
