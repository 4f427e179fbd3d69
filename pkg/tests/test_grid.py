import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from reachkit.errors import DomainError, GridFormatError, WindowError
from reachkit.grid import (
    Adjacency,
    GridSet,
    GridSpec,
    connected_components,
    distance_transform,
    erode,
    format_grid,
    parse_grid,
    read_grid,
    write_grid,
)
from reachkit.shapes import PointList, rasterize

import oracles as O


def grid(occ, h=1.0, origin=None):
    occ = np.asarray(occ, dtype=bool)
    return GridSet(GridSpec(origin or (0.0,) * occ.ndim, h, occ.shape), occ)


occupancies = st.integers(2, 3).flatmap(
    lambda d: arrays(bool, st.tuples(*[st.integers(1, 12 if d == 2 else 6)] * d))
).filter(lambda a: a.any())


# --- GridSpec ---------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(DomainError):
        GridSpec((0, 0), 0, (3, 3))
    with pytest.raises(DomainError):
        GridSpec((0, 0), 1, (0, 3))
    with pytest.raises(DomainError):
        GridSpec((0,), 1, (3,))
    with pytest.raises(DomainError):
        GridSpec((0, 0), 1, (3, 3, 3))
    with pytest.raises(DomainError):
        GridSpec((0, float("inf")), 1, (3, 3))
    with pytest.raises(DomainError):
        GridSpec((0, 0, 0), 1, (1000, 1000, 1000))


def test_spec_around_is_lattice_aligned():
    s = GridSpec.around((-1, -1), (1, 1), 0.5, margin=0.2)
    assert s.origin == (-1.5, -1.5) and s.dims == (7, 7)
    assert np.allclose(s.hi, (1.5, 1.5))


def test_nearest_index_and_window():
    s = GridSpec.from_window((-1, -1), (1, 1), 0.5)
    assert s.dims == (5, 5)
    assert s.nearest_index((0.1, -0.9)) == (2, 0)
    with pytest.raises(WindowError):
        s.nearest_index((2, 0))


def test_gridset_is_immutable_and_validated():
    g = grid(np.eye(3))
    with pytest.raises(AttributeError):
        g.spec = None
    with pytest.raises(ValueError):
        g.occupancy[0, 0] = False
    with pytest.raises(DomainError):
        GridSet(g.spec, np.zeros(5))


def test_set_algebra_requires_same_grid():
    a = grid(np.eye(3))
    b = grid(np.eye(3), h=0.5)
    with pytest.raises(DomainError):
        a & b
    assert (a | ~a) == GridSet.full(a.spec)
    assert (a - a).is_empty
    assert a.issubset(a | ~a)


def test_margin():
    occ = np.zeros((10, 10), bool)
    occ[3, 4] = True
    assert grid(occ, h=0.5).margin() == pytest.approx(1.5)
    assert GridSet.empty(GridSpec((0, 0), 1, (3, 3))).margin() == math.inf


# --- rasterize -------------------------------------------------------------------


def test_rasterize_examples():
    from reachkit.shapes import Ball

    s = GridSpec.from_window((-1, -1), (1, 1), 0.5)
    assert rasterize(Ball((0, 0), 1), s).count == 13
    assert rasterize(PointList([]), s).is_empty
    s2 = GridSpec.from_window((-1, -1), (2, 1), 0.25)
    assert rasterize(PointList([[0, 0], [1, 0]]), s2).count == 2


def test_rasterize_outside_window_lists_extent():
    from reachkit.shapes import Ball

    s = GridSpec.from_window((-1, -1), (1, 1), 0.5)
    with pytest.raises(WindowError, match=r"\[\[2.0, -1.0\], \[4.0, 1.0\]\]"):
        rasterize(Ball((3, 0), 1), s)


# --- distance transform ----------------------------------------------------------


def test_edt_examples():
    occ = np.zeros((5, 6), bool)
    occ[0, 0] = True
    assert distance_transform(grid(occ)).values[3, 4] == 5
    assert not distance_transform(grid(np.ones((4, 4)))).values.any()
    with pytest.raises(DomainError):
        distance_transform(grid(np.zeros((4, 4))))


@pytest.mark.parametrize("seed", range(4))
def test_edt_matches_oracle_bitwise(seed):
    rng = np.random.default_rng(seed)
    occ = rng.random((32, 32)) < 0.05
    occ[rng.integers(32), rng.integers(32)] = True
    h = 0.037
    assert np.array_equal(distance_transform(grid(occ, h)).values, O.edt(occ, h))


def test_edt_3d_matches_oracle_bitwise():
    rng = np.random.default_rng(11)
    occ = rng.random((12, 9, 14)) < 0.01
    occ[0, 0, 0] = True
    assert np.array_equal(distance_transform(grid(occ, 0.1)).values, O.edt(occ, 0.1))


@settings(max_examples=60, deadline=None)
@given(occupancies)
def test_edt_property_matches_oracle(occ):
    assert np.array_equal(distance_transform(grid(occ, 0.3)).values, O.edt(occ, 0.3))


def test_edt_feet_are_nearest():
    rng = np.random.default_rng(5)
    occ = rng.random((20, 20)) < 0.03
    occ[3, 3] = True
    g = grid(occ)
    df = distance_transform(g, feet=True)
    feet = df.foot_indices()
    idx = np.moveaxis(np.indices(occ.shape), 0, -1)
    assert occ[tuple(feet.reshape(-1, 2).T)].all()
    assert np.array_equal(((feet - idx) ** 2).sum(axis=-1), df.sqdist)
    with pytest.raises(DomainError):
        distance_transform(g).foot_indices()


@settings(max_examples=40, deadline=None)
@given(occupancies)
def test_edt_zero_iff_occupied_and_lipschitz(occ):
    g = grid(occ, 0.5)
    v = distance_transform(g).values
    assert np.array_equal(v == 0, occ)
    for o in Adjacency.FULL.offsets(occ.ndim):
        src = tuple(slice(max(0, -k), n - max(0, k)) for k, n in zip(o, occ.shape))
        dst = tuple(slice(s.start + k, s.stop + k) for s, k in zip(src, o))
        assert np.all(np.abs(v[src] - v[dst]) <= 0.5 * math.sqrt(float(o @ o)) + 1e-12)


# --- erosion ---------------------------------------------------------------------


def test_erode_single_point():
    s = GridSpec.from_window((-3, -3), (3, 3), 0.1)
    g = rasterize(PointList([[0, 0]]), s)
    r = np.linalg.norm(s.centers(), axis=1).reshape(s.dims)
    assert np.array_equal(erode(g, 1).occupancy, r >= 1 - 1e-9)


def test_erode_full_and_errors():
    s = GridSpec.from_window((0, 0), (1, 1), 0.1)
    full = GridSet.full(s)
    assert erode(full, 0.5, check_window=False).is_empty
    with pytest.raises(WindowError, match="window too small"):
        erode(full, 0.5)
    with pytest.raises(DomainError):
        erode(full, 0, check_window=False)


def test_erode_two_points_matches_analytic():
    # two points at R/2: complement of the union of two radius-R discs
    R, h = 1.0, 0.02
    s = GridSpec.around((0, 0), (0.5, 0), h, margin=R + 3 * h)
    g = rasterize(PointList([[0, 0], [0.5, 0]]), s)
    c = s.centers()
    analytic = (np.linalg.norm(c, axis=1) >= R - 1e-9) & (np.linalg.norm(c - (0.5, 0), axis=1) >= R - 1e-9)
    assert np.array_equal(erode(g, R).occupancy.ravel(), analytic)


@settings(max_examples=40, deadline=None)
@given(occupancies, st.floats(0.5, 3), st.floats(0.5, 3))
def test_erosion_nesting_and_antimonotone(occ, r1, r2):
    g = grid(occ)
    lo, hi = sorted((r1, r2))
    assert erode(g, hi, check_window=False).issubset(erode(g, lo, check_window=False))
    bigger = g | grid(np.roll(occ, 1, axis=0))
    assert erode(bigger, lo, check_window=False).issubset(erode(g, lo, check_window=False))


# --- components ------------------------------------------------------------------


def test_component_examples():
    face = grid([[1, 1], [0, 0]])
    diag = grid([[1, 0], [0, 1]])
    assert connected_components(face, "face")[1] == 1
    assert connected_components(diag, "face")[1] == 2
    assert connected_components(diag, "full")[1] == 1
    with pytest.raises(DomainError):
        connected_components(diag, "corner")


def test_component_labels_follow_row_major_order():
    g = grid([[0, 0, 1], [1, 0, 0], [0, 0, 1]])
    labels, n = connected_components(g, Adjacency.FACE)
    assert n == 3 and labels[0, 2] == 1 and labels[1, 0] == 2 and labels[2, 2] == 3


def test_component_mask():
    g = grid([[1, 1, 1]])
    assert connected_components(g, mask=[[True, False, True]])[1] == 2


@pytest.mark.parametrize("seed", range(3))
def test_components_match_oracle(seed):
    rng = np.random.default_rng(seed)
    occ = np.zeros((20, 20), bool)
    occ.ravel()[rng.choice(400, 100, replace=False)] = True
    for full in (True, False):
        n = connected_components(grid(occ), Adjacency.FULL if full else Adjacency.FACE)[1]
        assert n == O.component_count(occ, full)


@settings(max_examples=60, deadline=None)
@given(occupancies)
def test_components_adjacency_monotone(occ):
    g = grid(occ)
    assert connected_components(g, "face")[1] >= connected_components(g, "full")[1]


def test_boundary_cells():
    occ = np.zeros((5, 5), bool)
    occ[1:4, 1:4] = True
    b = grid(occ).boundary().occupancy
    assert b.sum() == 8 and not b[2, 2]


# --- text format -----------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(occupancies, st.floats(0.01, 2), st.floats(-5, 5))
def test_grid_file_round_trip(occ, h, o):
    g = grid(occ, h, origin=(o,) * occ.ndim)
    assert parse_grid(format_grid(g)) == g


def test_grid_file_on_disk(tmp_path):
    g = grid(np.eye(4, dtype=bool), 0.25, origin=(-1.0, 2.0))
    write_grid(g, tmp_path / "g.grid")
    assert read_grid(tmp_path / "g.grid") == g
    text = (tmp_path / "g.grid").read_text()
    assert text.splitlines()[0] == "GRIDSET 2 0.25 4 4 -1.0 2.0"


def test_grid_file_3d_slices_separated_by_blank_lines():
    g = grid(np.ones((2, 2, 3), bool))
    assert format_grid(g).split("\n")[3] == ""


@pytest.mark.parametrize("text", [
    "",
    "GRID 2 1 2 2 0 0\n00\n00\n",
    "GRIDSET 4 1 2 2 0 0\n",
    "GRIDSET 2 x 2 2 0 0\n00\n00\n",
    "GRIDSET 2 1 2 2 0 0\n00\n0\n",
    "GRIDSET 2 1 2 2 0 0\n0a\n00\n",
    "GRIDSET 2 -1 2 2 0 0\n00\n00\n",
])
def test_grid_file_errors(text):
    with pytest.raises(GridFormatError):
        parse_grid(text)


def test_read_missing_file(tmp_path):
    with pytest.raises(GridFormatError):
        read_grid(tmp_path / "nope.grid")
