"""R-hulls by double erosion.

The R-hull of ``A`` is the smallest superset with reach at least ``R``.  It
exists exactly when the erosion ``A'_R = {x : delta_A(x) >= R}`` has reach at
least ``R``, and then equals the closing ``(A'_R)'_R``, which is also the
intersection of the complements of all open radius-R balls centred in
``A'_R``.

``A'_R`` is unbounded, so everything here runs on a finite window.  A window
margin of ``2R + 2h`` around ``A`` keeps every eroded point that can touch the
hull inside the window.  Certification ignores pair endpoints in a frontier
band along the window edge, where truncation creates boundary that the
continuous erosion does not have.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from reachkit import _kernels
from reachkit.errors import DomainError, HullUnboundedWarning
from reachkit.geometry import as_point
from reachkit.grid import Adjacency, GridSet, check_erosion_window, distance_transform, erode
from reachkit.reach import ReachVerdict, certify_reach, default_slack

__all__ = [
    "HullReport",
    "admits_rhull",
    "closing",
    "frontier_width",
    "hull_as_ball_intersection",
    "witness_arc",
]

UNDETERMINED = "undetermined"


@dataclass
class HullReport:
    """Outcome of :func:`admits_rhull`.

    ``admits`` is ``True``, ``False`` or ``"undetermined"`` (the erosion left
    the window, so the window cannot decide).
    """

    admits: bool | str
    R: float
    margin: float
    eroded: GridSet = field(repr=False)
    verdict: ReachVerdict | None = None
    hull: GridSet | None = field(default=None, repr=False)
    sandwich_ok: bool | None = None
    witness_arc: list | None = None
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.admits is True and (self.hull is None or not self.verdict.certified):
            raise DomainError("admits=True needs a hull and a certified verdict")
        if self.admits is False and (self.verdict is None or self.verdict.certified):
            raise DomainError("admits=False needs a violated verdict")

    def to_dict(self, hull_file=None):
        return {
            "admits": self.admits,
            "R": self.R,
            "margin": self.margin,
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
            "sandwich_ok": self.sandwich_ok,
            "hull_file": None if hull_file is None else str(hull_file),
            "witness_arc": None if self.witness_arc is None else [list(c) for c in self.witness_arc],
            "flags": list(self.flags),
        }


def _radius(R):
    R = float(R)
    if not (R > 0 and math.isfinite(R)):
        raise DomainError(f"R must be positive and finite, got {R}")
    return R


def _check_input(A: GridSet, R, check_window=True):
    if A.is_empty:
        raise DomainError("the set is empty")
    R = _radius(R)
    if check_window:
        check_erosion_window(A, 2 * R + 2 * A.spec.h, what="a hull of this radius")
    return R


def frontier_width(R, slack, h) -> float:
    """Band along the window edge whose eroded cells may not be pair endpoints.

    A spindle of two points closer than ``2R`` sits inside the ball of radius
    ``R`` around their midpoint, so endpoints farther than ``R`` plus the
    inflation from the edge have their whole section inside the window.
    """
    return R + 2 * slack + h


def closing(A: GridSet, R, check_window=True) -> GridSet:
    """``(A'_R)'_R`` on the window.

    When the erosion is empty within the window the result is the full window
    and a :class:`HullUnboundedWarning` is issued.  That can only happen with
    ``check_window=False``, which skips the ``2R + 2h`` margin requirement and
    leaves cells near the window edge unreliable.
    """
    R = _check_input(A, R, check_window)
    E = erode(A, R, check_window=False)
    if E.is_empty:
        warnings.warn("hull unbounded within window: the erosion is empty", HullUnboundedWarning,
                      stacklevel=2)
        return GridSet.full(A.spec)
    return erode(E, R, check_window=False)


def hull_as_ball_intersection(A: GridSet, R, check_window=True) -> GridSet:
    """Window minus every open ball ``B(x, R)`` centred at an eroded cell ``x``.

    Balls around eroded cells lying deeper than ``R`` inside the erosion only
    cover eroded cells, which their own balls already remove, so they are
    skipped.
    """
    R = _check_input(A, R, check_window)
    spec = A.spec
    E = erode(A, R, check_window=False)
    if E.is_empty:
        warnings.warn("hull unbounded within window: the erosion is empty", HullUnboundedWarning,
                      stacklevel=2)
        return GridSet.full(spec)
    depth = distance_transform(~E).values
    centres = np.argwhere(E.occupancy & (depth < R)).astype(np.int64)
    reach_cells = int(math.ceil(R / spec.h))
    rng = np.arange(-reach_cells, reach_cells + 1)
    offs = np.stack(np.meshgrid(*([rng] * spec.ndim), indexing="ij"), axis=-1).reshape(-1, spec.ndim)
    d2 = (offs * offs).sum(axis=1).astype(np.float64)
    stencil = np.ascontiguousarray(offs[spec.h * np.sqrt(d2) < R], dtype=np.int64)
    excluded = np.ascontiguousarray(E.occupancy.ravel()).copy()
    _kernels.mark_balls(centres, np.asarray(spec.dims, dtype=np.int64), spec.strides, stencil, excluded)
    return A.with_occupancy(~excluded.reshape(spec.dims))


def witness_arc(A: GridSet, R, a, b, slack=None, adjacency=Adjacency.FULL):
    """Shortest cell path from ``a`` to ``b`` through ``{delta_A >= R - slack}``
    inside ``fuso(a, b, R)`` grown by ``slack``; ``None`` when there is none.

    Path length is Euclidean (steps of length 1, sqrt 2, sqrt 3 in cell
    units); ties go to the cell popped first, i.e. the lexicographically
    smallest index, so the path is reproducible.  Returns index tuples.
    """
    if A.is_empty:
        raise DomainError("the set is empty")
    R = _radius(R)
    spec = A.spec
    adjacency = Adjacency.parse(adjacency)
    slack = default_slack(A) if slack is None else float(slack)
    a = as_point(a, A.ndim)
    b = as_point(b, A.ndim)
    ia = tuple(int(v) for v in spec.nearest_index(a))
    ib = tuple(int(v) for v in spec.nearest_index(b))
    delta = distance_transform(A).values
    for name, cell in (("a", ia), ("b", ib)):
        if delta[cell] < R - slack:
            raise DomainError(f"delta_A({name}) = {delta[cell]:.6g} is below R - slack = {R - slack:.6g}")
    dist = float(np.linalg.norm(b - a))
    if not dist < 2 * R:
        raise DomainError(f"B(a,R) and B(b,R) do not meet: |a-b| = {dist:.6g} >= 2R = {2 * R:.6g}")
    if ia == ib:
        return [ia]
    pa, pb = spec.to_index_units(a), spec.to_index_units(b)
    idx = spec.index_grid().astype(np.float64)
    allowed = _kernels.lens_mask(idx, pa, pb, R / spec.h, slack / spec.h).reshape(spec.dims)
    allowed &= delta >= R - slack
    allowed[ia] = allowed[ib] = True

    offsets = [(tuple(int(v) for v in o), math.sqrt(float(o @ o))) for o in adjacency.offsets(spec.ndim)]
    best = {ia: 0.0}
    parent = {ia: None}
    heap = [(0.0, ia)]
    while heap:
        cost, cur = heapq.heappop(heap)
        if cost > best[cur]:
            continue
        if cur == ib:
            path = []
            while cur is not None:
                path.append(cur)
                cur = parent[cur]
            return path[::-1]
        for o, step in offsets:
            nxt = tuple(c + d for c, d in zip(cur, o))
            if any(k < 0 or k >= n for k, n in zip(nxt, spec.dims)) or not allowed[nxt]:
                continue
            c2 = cost + step
            if c2 < best.get(nxt, math.inf) - 1e-12:
                best[nxt] = c2
                parent[nxt] = cur
                heapq.heappush(heap, (c2, nxt))
    return None


def admits_rhull(A: GridSet, R, adjacency=Adjacency.FULL, pair_budget=None, seed=0,
                 slack=None, check_window=True) -> HullReport:
    """Decide at grid tolerance whether ``A`` admits an R-hull.

    The erosion is certified for reach ``>= R``; on success the hull is the
    closing and ``sandwich_ok`` records ``A <= hull <= {delta_A < R}``.
    """
    R = _check_input(A, R, check_window)
    spec = A.spec
    slack = default_slack(A) if slack is None else float(slack)
    E = erode(A, R, check_window=False)
    margin = A.margin()
    if E.is_empty:
        return HullReport(UNDETERMINED, R, margin, E, flags=["erosion escaped window"])
    candidates = ~spec.frontier(frontier_width(R, slack, spec.h))
    verdict = certify_reach(E, R, adjacency=adjacency, pair_budget=pair_budget, seed=seed,
                            slack=slack, candidates=candidates)
    flags = ["sampled"] if verdict.sampled else []
    if not verdict.certified:
        w = verdict.witness
        arc = witness_arc(A, R, w.b1, w.b2, slack=slack, adjacency=adjacency)
        if arc is not None:
            flags.append("arc found between witness cells at looser tolerance")
        return HullReport(False, R, margin, E, verdict, witness_arc=arc, flags=flags)
    hull = erode(E, R, check_window=False)
    sandwich = A.issubset(hull) and hull.issubset(~E)
    return HullReport(True, R, margin, E, verdict, hull, sandwich, flags=flags)
