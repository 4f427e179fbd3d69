"""Reach analysis of grid sets.

Two independent routes:

* :func:`unp_reach_estimate` looks for cells with more than one nearest
  point on the set (the complement of Unp) and reports the smallest distance
  at which one occurs.
* :func:`certify_reach` checks, pair by pair, that the part of the set lying
  inside the spindle of two of its points is connected; reach >= R holds iff
  this is so for every pair closer than 2R.

Grid tolerance
--------------
With ``slack = h*sqrt(d)/2`` (the largest offset between a point and the
centre of its cell), the pair check skips pairs with
``2R - 2*slack <= |b1 - b2| < 2R`` (counted as ``boundary_skipped``),
inflates each spindle by ``2*slack`` and uses full adjacency.  The inflation
is twice the per-point offset because the occupied centre nearest to a point
of a rasterised set can sit a full cell diagonal away when the point's own
cell centre falls outside the set.  All three bias the verdict
towards "connected", so a violation is a strong statement while a
certificate means reach >= R up to O(h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.spatial import cKDTree

from reachkit import _kernels
from reachkit.errors import DomainError, WindowError
from reachkit.geometry import Ball, as_point
from reachkit.grid import Adjacency, GridSet, connected_components, distance_transform

__all__ = [
    "MedialPoint",
    "ReachVerdict",
    "SearchResult",
    "UnpReport",
    "ViolationWitness",
    "certify_reach",
    "check_ball_intersection",
    "check_sphere_convexity",
    "check_spindle_intersection",
    "default_slack",
    "reach_search",
    "section_mask",
    "unp_reach_estimate",
]

CHUNK_PAIRS = 200_000
_ENUMERATE_LIMIT = 5_000_000


@dataclass
class ViolationWitness:
    b1: np.ndarray
    b2: np.ndarray
    component_labels: np.ndarray = field(repr=False)
    nearest_gap: float

    def to_dict(self):
        return {"b1": self.b1.tolist(), "b2": self.b2.tolist(), "gap": self.nearest_gap}


@dataclass
class ReachVerdict:
    mode: str
    R: float
    slack: float
    witness: ViolationWitness | None = None
    pairs_checked: int = 0
    boundary_skipped: int = 0
    sampled: bool = False

    def __post_init__(self):
        if self.mode not in ("certified", "violated"):
            raise DomainError(f"unknown verdict mode {self.mode!r}")
        if self.mode == "violated" and self.witness is None:
            raise DomainError("a violated verdict needs a witness")

    @property
    def certified(self) -> bool:
        return self.mode == "certified"

    def to_dict(self):
        return {
            "mode": self.mode,
            "R": self.R,
            "slack": self.slack,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "pairs_checked": self.pairs_checked,
            "boundary_skipped": self.boundary_skipped,
            "sampled": self.sampled,
        }


@dataclass
class MedialPoint:
    point: np.ndarray
    delta: float
    feet: list


@dataclass
class UnpReport:
    reach_estimate: float
    medial_points: list
    R_max_tested: float

    def to_dict(self, limit=1000):
        pts = sorted(self.medial_points, key=lambda m: m.delta)[:limit]
        return {
            "reach_estimate": self.reach_estimate,
            "R_max_tested": self.R_max_tested,
            "medial_count": len(self.medial_points),
            "medial_points": [
                {"point": m.point.tolist(), "delta": m.delta, "feet": [f.tolist() for f in m.feet]}
                for m in pts
            ],
        }


@dataclass
class SearchResult:
    """Bisection outcome.

    ``lo``/``hi`` are the last certified and violated test radii.  Because the
    pair check only examines pairs closer than ``2(R - slack)``, a transition at
    radius ``R`` places the reach near ``R - slack``; ``reach_lo``/``reach_hi``
    carry that shifted bracket and ``estimate`` is its midpoint.
    """

    estimate: float
    lo: float
    hi: float
    slack: float
    violation_found: bool

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def reach_lo(self) -> float:
        return self.lo - self.slack

    @property
    def reach_hi(self) -> float:
        return self.hi - self.slack

    def to_dict(self):
        return {
            "estimate": self.estimate,
            "R_lo": self.lo,
            "R_hi": self.hi,
            "width": self.width,
            "slack": self.slack,
            "reach_bracket": [self.reach_lo, self.reach_hi],
            "violation_found": self.violation_found,
        }


def default_slack(g: GridSet) -> float:
    return g.spec.h * math.sqrt(g.ndim) / 2


def _require_nonempty(K: GridSet):
    if K.is_empty:
        raise DomainError("the set is empty")


def _positive(name, v):
    v = float(v)
    if not (v > 0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive, got {v}")
    return v


# ---------------------------------------------------------------------------
# Unp-based estimate
# ---------------------------------------------------------------------------


def unp_reach_estimate(K: GridSet, R_max, foot_tol=None, sep_tol=None, min_angle=math.pi / 2) -> UnpReport:
    """Smallest distance at which a cell sees two clearly distinct nearest points.

    A cell ``x`` (outside ``K``, ``0 < delta(x) < R_max``) is medial when some
    full neighbour ``y`` has a nearest point ``f(y)`` that is also nearly
    nearest for ``x`` (``|x - f(y)| <= delta(x) + foot_tol``), lies more than
    ``sep_tol`` from ``f(x)``, and is seen from ``x`` at an angle of at least
    ``min_angle`` from ``f(x)``.  The angle condition keeps the flat-ish
    near-feet of smooth boundaries from counting as a second projection.
    """
    _require_nonempty(K)
    R_max = _positive("R_max", R_max)
    spec = K.spec
    h, d = spec.h, spec.ndim
    foot_tol = h * math.sqrt(d) if foot_tol is None else float(foot_tol)
    sep_tol = 4 * h if sep_tol is None else float(sep_tol)
    if K.margin() < R_max + 2 * h:
        raise WindowError(f"window too small for R_max: margin {K.margin():.6g} < {R_max + 2 * h:.6g}")
    df = distance_transform(K, feet=True)
    feet = df.foot_indices()
    idx = np.indices(spec.dims)
    idx = np.moveaxis(idx, 0, -1)
    query = (~K.occupancy) & (df.values < R_max) & ~spec.frontier(h)
    medial = np.zeros(spec.dims, dtype=bool)
    extra = {}
    cos_lim = math.cos(min_angle)
    sep2 = (sep_tol / h) ** 2
    for off in Adjacency.FULL.offsets(d):
        # view of the neighbour y = x + off, aligned with x
        src = tuple(slice(max(0, -o), n - max(0, o)) for o, n in zip(off, spec.dims))
        dst = tuple(slice(s.start + o, s.stop + o) for s, o in zip(src, off))
        q = query[src] & ~K.occupancy[dst]
        if not q.any():
            continue
        x = idx[src][q]
        fx = feet[src][q]
        fy = feet[dst][q]
        vx = (fx - x).astype(float)
        vy = (fy - x).astype(float)
        nx = np.linalg.norm(vx, axis=1)
        ny = np.linalg.norm(vy, axis=1)
        dist_x = df.values[src][q]
        ok = (((fx - fy) ** 2).sum(axis=1) > sep2)
        ok &= ny * h <= dist_x + foot_tol
        ok &= (vx * vy).sum(axis=1) <= cos_lim * nx * ny
        for xi, fyi in zip(x[ok], fy[ok]):
            key = tuple(xi)
            medial[key] = True
            extra.setdefault(key, []).append(tuple(fyi))
    points = []
    for key in sorted(extra):
        own = tuple(feet[key])
        fs = [own] + sorted(set(extra[key]) - {own})
        points.append(MedialPoint(spec.to_world(key), float(df.values[key]),
                                  [spec.to_world(f) for f in fs]))
    estimate = min((m.delta for m in points), default=R_max)
    return UnpReport(min(estimate, R_max), points, R_max)


# ---------------------------------------------------------------------------
# spindle certifier
# ---------------------------------------------------------------------------


def _pair_chunks(cells, h, lim, R2, chunk):
    """Yield ``(pairs, boundary_skipped)`` in lexicographic pair order."""
    n = len(cells)
    buf, skipped, size = [], 0, 0
    for i in range(n - 1):
        diff = cells[i + 1:] - cells[i]
        dist = h * np.sqrt((diff * diff).sum(axis=1).astype(float))
        valid = dist < lim
        skipped += int(np.count_nonzero(~valid & (dist < R2)))
        js = np.flatnonzero(valid) + i + 1
        if len(js):
            buf.append(np.column_stack([np.full(len(js), i), js]))
            size += len(js)
        if size >= chunk:
            yield np.concatenate(buf), skipped
            buf, skipped, size = [], 0, 0
    if buf or skipped:
        yield (np.concatenate(buf) if buf else np.empty((0, 2), np.int64)), skipped


def _sample_pairs(cells, h, lim, R2, budget, rng):
    n = len(cells)
    total = n * (n - 1) // 2
    if total <= _ENUMERATE_LIMIT:
        chunks = list(_pair_chunks(cells, h, lim, R2, _ENUMERATE_LIMIT))
        pairs = np.concatenate([c for c, _ in chunks]) if chunks else np.empty((0, 2), np.int64)
        skipped = sum(s for _, s in chunks)
        if len(pairs) <= budget:
            return pairs, skipped, False
        pick = np.sort(rng.choice(len(pairs), size=budget, replace=False))
        return pairs[pick], skipped, True
    # linear pair ids -> (i, j) with i < j, rejection on distance
    got, skipped, seen = [], 0, set()
    need = budget
    for _ in range(64):
        ids = rng.choice(total, size=min(total, 4 * need), replace=False)
        ids = np.array([k for k in ids if k not in seen], dtype=np.int64)
        seen.update(ids.tolist())
        i = (n - 2 - np.floor(np.sqrt(-8.0 * ids + 4.0 * n * (n - 1) - 7) / 2 - 0.5)).astype(np.int64)
        j = ids + i + 1 - n * (n - 1) // 2 + (n - i) * ((n - i) - 1) // 2
        diff = cells[j] - cells[i]
        dist = h * np.sqrt((diff * diff).sum(axis=1).astype(float))
        valid = dist < lim
        skipped += int(np.count_nonzero(~valid & (dist < R2)))
        got.append(np.column_stack([i[valid], j[valid]])[:need])
        need -= len(got[-1])
        if need <= 0:
            break
    pairs = np.concatenate(got)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order], skipped, True


def section_mask(K: GridSet, b1, b2, R, slack) -> np.ndarray:
    """Cells of ``K`` inside ``fuso(b1, b2, R)`` grown by ``slack`` (world points)."""
    spec = K.spec
    occ_idx = K.indices()
    a = spec.to_index_units(b1)
    b = spec.to_index_units(b2)
    inside = _kernels.lens_mask(occ_idx.astype(float), a, b, R / spec.h, slack / spec.h)
    out = np.zeros(spec.dims, dtype=bool)
    out[tuple(occ_idx[inside].T)] = True
    return out


def _witness(K, adjacency, c1, c2, R, grow):
    spec = K.spec
    b1, b2 = spec.to_world(c1), spec.to_world(c2)
    labels, _ = connected_components(K, adjacency, section_mask(K, b1, b2, R, grow))
    l1, l2 = labels[tuple(c1)], labels[tuple(c2)]
    p1 = spec.to_world(np.argwhere(labels == l1))
    p2 = spec.to_world(np.argwhere(labels == l2))
    gap = float(cKDTree(p2).query(p1)[0].min())
    return ViolationWitness(b1, b2, labels, gap)


def certify_reach(K: GridSet, R, adjacency=Adjacency.FULL, pair_budget=None, seed=0,
                  slack=None, pairs="boundary", candidates=None) -> ReachVerdict:
    """Check that ``K`` meets every spindle ``fuso(b1, b2, R)`` in a connected set.

    ``pairs="boundary"`` (default) only pairs cells on the boundary of ``K``: a
    disconnected section always has a closest pair across the gap, and those
    two points see the complement next to them.  ``pairs="all"`` pairs every
    occupied cell.  ``candidates`` further restricts the endpoints (used to
    keep window-frontier cells out of erosion certificates); paths may still
    pass through any occupied cell.  Pairs are examined in lexicographic order
    of row-major cell index and the first failure is reported.
    """
    _require_nonempty(K)
    R = _positive("R", R)
    adjacency = Adjacency.parse(adjacency)
    spec = K.spec
    h = spec.h
    slack = default_slack(K) if slack is None else float(slack)
    if pairs not in ("boundary", "all"):
        raise DomainError(f"pairs must be 'boundary' or 'all', got {pairs!r}")
    ends = K.boundary().occupancy if pairs == "boundary" else K.occupancy
    if candidates is not None:
        ends = ends & np.asarray(candidates, dtype=bool).reshape(spec.dims)
    cells = np.argwhere(ends).astype(np.int64)
    lim = 2 * R - 2 * slack
    occ = np.ascontiguousarray(K.occupancy.ravel()).astype(np.bool_)
    shape = np.asarray(spec.dims, dtype=np.int64)
    strides = spec.strides
    offsets = adjacency.offsets(spec.ndim)
    fast = adjacency is Adjacency.FULL

    def run(batch):
        if not len(batch):
            return -1
        ok = _kernels.check_pairs(occ, shape, strides, cells, np.ascontiguousarray(batch, dtype=np.int64),
                                  R / h, 2 * slack / h, offsets, fast,
                                  4 * numba.get_num_threads())
        bad = np.flatnonzero(~ok)
        return int(bad[0]) if len(bad) else -1

    checked, skipped, sampled = 0, 0, False
    if pair_budget is not None:
        rng = np.random.default_rng(seed)
        batch, skipped, sampled = _sample_pairs(cells, h, lim, 2 * R, int(pair_budget), rng)
        batches = [batch[k:k + CHUNK_PAIRS] for k in range(0, len(batch), CHUNK_PAIRS)]
        source = ((b, 0) for b in batches)
    else:
        source = _pair_chunks(cells, h, lim, 2 * R, CHUNK_PAIRS)
    for batch, sk in source:
        skipped += sk
        bad = run(batch)
        if bad >= 0:
            checked += bad + 1
            i, j = batch[bad]
            wit = _witness(K, adjacency, cells[i], cells[j], R, 2 * slack)
            return ReachVerdict("violated", R, slack, wit, checked, skipped, sampled)
        checked += len(batch)
    return ReachVerdict("certified", R, slack, None, checked, skipped, sampled)


def reach_search(K: GridSet, R_lo, R_hi, iters=6, **certify_kw) -> SearchResult:
    """Bisect on R between a certified ``R_lo`` and ``R_hi``."""
    R_lo, R_hi = float(R_lo), float(R_hi)
    if not 0 < R_lo < R_hi:
        raise DomainError(f"need 0 < R_lo < R_hi, got [{R_lo}, {R_hi}]")
    if int(iters) < 1:
        raise DomainError("iters must be >= 1")
    first = certify_reach(K, R_lo, **certify_kw)
    if not first.certified:
        raise DomainError(f"bracket invalid: the set is not certified at R_lo = {R_lo}")
    lo, hi, seen = R_lo, R_hi, False
    for _ in range(int(iters)):
        mid = 0.5 * (lo + hi)
        if certify_reach(K, mid, **certify_kw).certified:
            lo = mid
        else:
            hi, seen = mid, True
    slack = first.slack
    if not seen:
        return SearchResult(R_hi, lo, hi, slack, False)
    return SearchResult(0.5 * (lo + hi) - slack, lo, hi, slack, True)


# ---------------------------------------------------------------------------
# property checks built on the certifier
# ---------------------------------------------------------------------------


def check_ball_intersection(K: GridSet, center, r, R, **certify_kw) -> ReachVerdict:
    """Certify reach >= R for ``K`` cut by the closed ball ``D(center, r)``, ``r <= R``."""
    _require_nonempty(K)
    R = _positive("R", R)
    r = float(r)
    if not 0 <= r <= R:
        raise DomainError(f"ball radius must satisfy 0 <= r <= R, got r = {r}, R = {R}")
    c = as_point(center, K.ndim)
    dist = np.linalg.norm(K.spec.centers() - c, axis=1).reshape(K.spec.dims)
    cut = K.with_occupancy(K.occupancy & (dist <= r + 1e-9 * K.spec.h))
    if cut.is_empty:
        raise DomainError("ball does not meet K")
    return certify_reach(cut, R, **certify_kw)


def check_spindle_intersection(K: GridSet, a, b, R, **certify_kw) -> ReachVerdict:
    """Certify reach >= R for ``K`` cut by ``fuso(a, b, R)``; ``|a - b| <= 2R``.

    The cut uses the same ``2*slack`` inflation as the pair check, so it is
    the very section the certifier saw for this pair; a thinner cut leaves
    sub-cell slivers at the cusps that rasterise as loose cells.  At
    ``|a - b| = 2R`` the only radius-R ball holding both points is the one
    centred at their midpoint, which is then used as the cut.
    """
    _require_nonempty(K)
    R = _positive("R", R)
    spec = K.spec
    a = as_point(a, K.ndim)
    b = as_point(b, K.ndim)
    slack = certify_kw.get("slack")
    slack = default_slack(K) if slack is None else float(slack)
    pts = K.points()
    tree = cKDTree(pts)
    for name, p in (("a", a), ("b", b)):
        # a boundary point can sit a full cell diagonal from the nearest occupied centre
        if tree.query(p)[0] > 2 * slack + 1e-9 * spec.h:
            raise DomainError(f"{name} = {p.tolist()} is not in K")
    dist = float(np.linalg.norm(b - a))
    if dist > 2 * R * (1 + 1e-12):
        raise DomainError(f"need |a-b| <= 2R, got {dist} with R = {R}")
    if dist == 0:
        cut = K.occupancy & False
        cut[spec.nearest_index(a)] = True
    elif dist >= 2 * R:
        centers = spec.centers()
        near = np.linalg.norm(centers - 0.5 * (a + b), axis=1) <= R + 2 * slack
        cut = K.occupancy & near.reshape(spec.dims)
    else:
        cut = section_mask(K, a, b, R, 2 * slack)
    return certify_reach(K.with_occupancy(cut), R, **certify_kw)


def _slerp(u1, u2, t):
    dot = np.clip((u1 * u2).sum(axis=-1), -1.0, 1.0)
    om = np.arccos(dot)[:, None]
    so = np.sin(om)
    small = so[:, 0] < 1e-12
    so[small] = 1.0
    w1 = np.where(small[:, None], 1 - t[None, :], np.sin((1 - t)[None, :] * om) / so)
    w2 = np.where(small[:, None], t[None, :], np.sin(t[None, :] * om) / so)
    return w1[:, :, None] * u1[:, None, :] + w2[:, :, None] * u2[:, None, :]


def check_sphere_convexity(K: GridSet, ball: Ball, R, arc_samples=32, slack=None) -> bool:
    """Sampled check that ``K`` meets the sphere ``dB`` in a set convex in that sphere.

    ``ball`` must be open with radius ``R`` and must not meet ``K``.  Every pair
    of contact cells closer than ``2R - 2*slack`` must have its minor
    great-circle arc within ``h*sqrt(d)`` of occupied cells.
    """
    _require_nonempty(K)
    R = _positive("R", R)
    if not isinstance(ball, Ball) or not ball.open:
        raise DomainError("check_sphere_convexity needs an open Ball")
    if not math.isclose(ball.radius, R, rel_tol=1e-12):
        raise DomainError(f"ball radius {ball.radius} differs from R = {R}")
    spec = K.spec
    h, d = spec.h, K.ndim
    slack = default_slack(K) if slack is None else float(slack)
    c = as_point(ball.center, d)
    pts = K.points()
    rad = np.linalg.norm(pts - c, axis=1)
    if np.any(rad < R - slack):
        raise DomainError("ball meets K")
    reach_tol = h * math.sqrt(d)
    T = pts[np.abs(rad - R) <= reach_tol]
    if len(T) < 2:
        return True
    units = (T - c) / np.linalg.norm(T - c, axis=1)[:, None]
    tree = cKDTree(pts)
    t = np.linspace(0.0, 1.0, int(arc_samples))
    lim = 2 * R - 2 * slack
    for i in range(len(T) - 1):
        dist = np.linalg.norm(T[i + 1:] - T[i], axis=1)
        js = np.flatnonzero(dist < lim) + i + 1
        if not len(js):
            continue
        arcs = c + R * _slerp(np.repeat(units[i:i + 1], len(js), axis=0), units[js], t)
        dd, _ = tree.query(arcs.reshape(-1, d), distance_upper_bound=reach_tol * (1 + 1e-9))
        if not np.all(np.isfinite(dd)):
            return False
    return True
