"""Discretised compact sets on uniform grids.

A cell stands for exactly one point, its centre ``origin + h * index``.
Distances are therefore centre-to-centre, and squared distances between
cells are integers in index units.  That makes the separable distance
transform exact: the value stored for each cell is ``h * sqrt(k)`` for the
integer ``k`` it found, which any brute-force search reproduces bit for bit.
"""

from __future__ import annotations

import enum
import io
import math
import os
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import ndimage

from reachkit import _kernels
from reachkit.errors import DomainError, GridFormatError, WindowError

MAX_CELLS = 10**8


class Adjacency(enum.Enum):
    FACE = "face"
    FULL = "full"

    def structure(self, d: int) -> np.ndarray:
        return ndimage.generate_binary_structure(d, 1 if self is Adjacency.FACE else d)

    def offsets(self, d: int) -> np.ndarray:
        """Neighbour offsets in lexicographic order."""
        offs = [o for o in product((-1, 0, 1), repeat=d) if any(o)]
        if self is Adjacency.FACE:
            offs = [o for o in offs if sum(map(abs, o)) == 1]
        return np.array(offs, dtype=np.int64)

    @classmethod
    def parse(cls, value) -> "Adjacency":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"adjacency must be 'face' or 'full', got {value!r}") from None


@dataclass(frozen=True)
class GridSpec:
    origin: tuple
    h: float
    dims: tuple

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        dims = tuple(int(n) for n in self.dims)
        h = float(self.h)
        if len(origin) not in (2, 3) or len(dims) != len(origin):
            raise DomainError(f"grid needs matching 2-D or 3-D origin and dims, got {origin}, {dims}")
        if not (h > 0 and math.isfinite(h)):
            raise DomainError(f"grid spacing must be positive, got {h}")
        if not all(math.isfinite(v) for v in origin):
            raise DomainError("grid origin must be finite")
        if min(dims) < 1:
            raise DomainError(f"grid dims must be >= 1, got {dims}")
        if math.prod(dims) > MAX_CELLS:
            raise DomainError(f"grid has {math.prod(dims)} cells, above the cap of {MAX_CELLS}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "h", h)

    @classmethod
    def around(cls, lo, hi, h, margin=0.0) -> "GridSpec":
        """Smallest lattice-aligned window (origin a multiple of ``h``) covering ``[lo-margin, hi+margin]``."""
        lo = np.asarray(lo, dtype=float) - margin
        hi = np.asarray(hi, dtype=float) + margin
        i0 = np.floor(lo / h + 1e-9).astype(int)
        i1 = np.ceil(hi / h - 1e-9).astype(int)
        return cls(tuple(i0 * h), h, tuple(i1 - i0 + 1))

    @classmethod
    def from_window(cls, lo, hi, h) -> "GridSpec":
        """Window whose first cell centre sits at ``lo`` and last at or just past ``hi``."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(hi < lo):
            raise DomainError("window upper corner below lower corner")
        dims = np.floor((hi - lo) / h + 0.5).astype(int) + 1
        return cls(tuple(lo), h, tuple(dims))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.origin)

    @property
    def hi(self) -> np.ndarray:
        return self.lo + self.h * (np.asarray(self.dims) - 1)

    @property
    def strides(self) -> np.ndarray:
        """C-order strides in elements."""
        return np.array(np.empty(self.dims, dtype=np.bool_).strides, dtype=np.int64)

    def to_world(self, index) -> np.ndarray:
        return self.lo + self.h * np.asarray(index, dtype=float)

    def to_index_units(self, point) -> np.ndarray:
        return (np.asarray(point, dtype=float) - self.lo) / self.h

    def nearest_index(self, point) -> tuple:
        idx = np.floor(self.to_index_units(point) + 0.5).astype(int)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.dims)):
            raise WindowError(f"point {np.asarray(point).tolist()} lies outside the grid window")
        return tuple(int(i) for i in idx)

    def index_grid(self) -> np.ndarray:
        """``(n, d)`` integer indices of every cell in C order."""
        return np.indices(self.dims).reshape(self.ndim, -1).T

    def centers(self) -> np.ndarray:
        return self.to_world(self.index_grid())

    def frontier(self, width) -> np.ndarray:
        """Cells closer than ``width`` to the window boundary."""
        idx = np.indices(self.dims)
        dims = np.asarray(self.dims).reshape((-1,) + (1,) * self.ndim)
        edge = np.minimum(idx, dims - 1 - idx).min(axis=0)
        return edge * self.h < width


class GridSet:
    """Occupied cells of a :class:`GridSpec`; immutable."""

    __slots__ = ("spec", "occupancy")

    def __init__(self, spec: GridSpec, occupancy):
        occ = np.array(occupancy, dtype=bool)
        if occ.shape != spec.dims:
            if occ.size != spec.size:
                raise DomainError(f"occupancy has {occ.size} cells, grid has {spec.size}")
            occ = occ.reshape(spec.dims)
        occ.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "occupancy", occ)

    def __setattr__(self, name, value):
        raise AttributeError("GridSet is immutable")

    @classmethod
    def empty(cls, spec):
        return cls(spec, np.zeros(spec.dims, dtype=bool))

    @classmethod
    def full(cls, spec):
        return cls(spec, np.ones(spec.dims, dtype=bool))

    def __repr__(self):
        return f"GridSet(dims={self.spec.dims}, h={self.spec.h}, occupied={self.count})"

    @property
    def ndim(self) -> int:
        return self.spec.ndim

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    @property
    def is_empty(self) -> bool:
        return not self.occupancy.any()

    def indices(self) -> np.ndarray:
        return np.argwhere(self.occupancy)

    def points(self) -> np.ndarray:
        return self.spec.to_world(self.indices())

    def with_occupancy(self, occ) -> "GridSet":
        return GridSet(self.spec, occ)

    def _check_same(self, other):
        if not isinstance(other, GridSet) or other.spec != self.spec:
            raise DomainError("set operations need two GridSets on the same grid")

    def __and__(self, other):
        self._check_same(other)
        return self.with_occupancy(self.occupancy & other.occupancy)

    def __or__(self, other):
        self._check_same(other)
        return self.with_occupancy(self.occupancy | other.occupancy)

    def __sub__(self, other):
        self._check_same(other)
        return self.with_occupancy(self.occupancy & ~other.occupancy)

    def __invert__(self):
        return self.with_occupancy(~self.occupancy)

    def __eq__(self, other):
        return (isinstance(other, GridSet) and other.spec == self.spec
                and np.array_equal(other.occupancy, self.occupancy))

    __hash__ = None

    def issubset(self, other) -> bool:
        self._check_same(other)
        return not np.any(self.occupancy & ~other.occupancy)

    def margin(self) -> float:
        """Smallest gap between the occupied bounding box and the window edge."""
        if self.is_empty:
            return math.inf
        idx = self.indices()
        low = idx.min(axis=0)
        high = np.asarray(self.spec.dims) - 1 - idx.max(axis=0)
        return float(min(low.min(), high.min()) * self.spec.h)

    def boundary(self) -> "GridSet":
        """Occupied cells with an unoccupied (or out-of-window) full neighbour."""
        inner = ndimage.binary_erosion(self.occupancy, Adjacency.FULL.structure(self.ndim),
                                       border_value=0)
        return self.with_occupancy(self.occupancy & ~inner)


@dataclass(frozen=True)
class DistanceField:
    """Distance from every cell centre to the nearest occupied centre.

    ``sqdist`` holds the integer squared distance in index units, ``values``
    the world distance ``h * sqrt(sqdist)``, and ``feet`` (when requested) the
    flat C-order index of one nearest occupied cell.
    """

    spec: GridSpec
    values: np.ndarray
    sqdist: np.ndarray
    feet: np.ndarray | None = field(default=None, repr=False)

    def foot_indices(self) -> np.ndarray:
        if self.feet is None:
            raise DomainError("distance field was computed without feet")
        return np.stack(np.unravel_index(self.feet, self.spec.dims), axis=-1)


def distance_transform(g: GridSet, feet=False) -> DistanceField:
    """Exact Euclidean distance transform by separable lower envelopes of parabolas."""
    if g.is_empty:
        raise DomainError("distance to the empty set is infinite; handle empty sets explicitly")
    d = g.ndim
    f = np.where(g.occupancy, 0.0, np.inf)
    feat = np.where(g.occupancy, np.arange(g.spec.size).reshape(g.spec.dims), -1)
    for axis in range(d):
        fa = np.ascontiguousarray(np.moveaxis(f, axis, -1))
        ia = np.ascontiguousarray(np.moveaxis(feat, axis, -1))
        shape = fa.shape
        fo, io_ = _kernels.edt_pass(fa.reshape(-1, shape[-1]), ia.reshape(-1, shape[-1]))
        f = np.moveaxis(fo.reshape(shape), -1, axis)
        feat = np.moveaxis(io_.reshape(shape), -1, axis)
    sq = np.ascontiguousarray(f).astype(np.int64)
    values = g.spec.h * np.sqrt(sq.astype(np.float64))
    for arr in (values, sq):
        arr.setflags(write=False)
    return DistanceField(g.spec, values, sq, np.ascontiguousarray(feat) if feet else None)


def check_erosion_window(g: GridSet, needed: float, what="erosion radius"):
    if g.margin() < needed:
        raise WindowError(f"window too small for {what}: margin {g.margin():.6g} < required {needed:.6g}")


def erode(g: GridSet, R: float, check_window=True) -> GridSet:
    """Cells at distance >= R from ``g`` (the set A'_R restricted to the window)."""
    R = float(R)
    if not R > 0:
        raise DomainError(f"erosion radius must be positive, got {R}")
    if check_window:
        check_erosion_window(g, R + 2 * g.spec.h)
    return g.with_occupancy(distance_transform(g).values >= R)


def connected_components(g: GridSet, adjacency=Adjacency.FULL, mask=None):
    """Label occupied cells (restricted to ``mask``); returns ``(labels, count)``.

    Labels start at 1 and follow row-major order of each component's first cell;
    0 marks cells outside the set.
    """
    adjacency = Adjacency.parse(adjacency)
    occ = g.occupancy if mask is None else g.occupancy & np.asarray(mask, dtype=bool).reshape(g.spec.dims)
    labels, count = ndimage.label(occ, structure=adjacency.structure(g.ndim))
    return labels, int(count)


# ---------------------------------------------------------------------------
# text grid format
# ---------------------------------------------------------------------------


def format_grid(g: GridSet) -> str:
    spec = g.spec
    head = ["GRIDSET", str(spec.ndim), repr(spec.h)]
    head += [str(n) for n in spec.dims] + [repr(v) for v in spec.origin]
    out = io.StringIO()
    out.write(" ".join(head) + "\n")
    occ = g.occupancy.astype(np.uint8)
    slices = [occ] if spec.ndim == 2 else list(occ)
    for k, sl in enumerate(slices):
        if k:
            out.write("\n")
        for row in sl:
            out.write("".join("1" if c else "0" for c in row) + "\n")
    return out.getvalue()


def parse_grid(text: str) -> GridSet:
    lines = text.splitlines()
    if not lines:
        raise GridFormatError("empty grid file")
    head = lines[0].split()
    try:
        if head[0] != "GRIDSET":
            raise GridFormatError("grid file must start with 'GRIDSET'")
        d = int(head[1])
        if d not in (2, 3) or len(head) != 3 + 2 * d:
            raise GridFormatError(f"malformed GRIDSET header: {lines[0]!r}")
        h = float(head[2])
        dims = tuple(int(v) for v in head[3:3 + d])
        origin = tuple(float(v) for v in head[3 + d:])
    except (IndexError, ValueError) as exc:
        raise GridFormatError(f"malformed GRIDSET header: {lines[0]!r}") from exc
    try:
        spec = GridSpec(origin, h, dims)
    except DomainError as exc:
        raise GridFormatError(str(exc)) from exc
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    rows = []
    for ln in body:
        ln = ln.strip()
        if not ln:
            continue
        if set(ln) - {"0", "1"}:
            raise GridFormatError(f"grid rows may only contain '0' and '1': {ln[:40]!r}")
        rows.append([c == "1" for c in ln])
    want_rows = dims[0] if d == 2 else dims[0] * dims[1]
    if len(rows) != want_rows or any(len(r) != dims[-1] for r in rows):
        raise GridFormatError(f"grid body does not match dims {dims}")
    return GridSet(spec, np.array(rows, dtype=bool).reshape(dims))


def write_grid(g: GridSet, path):
    with open(path, "w") as fh:
        fh.write(format_grid(g))


def read_grid(path) -> GridSet:
    if not os.path.exists(path):
        raise GridFormatError(f"no such grid file: {path}")
    with open(path) as fh:
        return parse_grid(fh.read())
