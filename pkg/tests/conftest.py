import json
import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from reachkit import shapes as S  # noqa: E402
from reachkit.corpus import load_corpus  # noqa: E402
from reachkit.grid import GridSpec  # noqa: E402

H = 0.02


@pytest.fixture(scope="session")
def frozen():
    with open(os.path.join(os.path.dirname(__file__), "frozen.json")) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def circle_wide():
    """Unit circle shell two cells thick, window wide enough for R_max = 2."""
    spec = GridSpec.around((-1, -1), (1, 1), H, margin=2 + 3 * H)
    return S.rasterize(S.Shell((0, 0), 1 - H, 1 + H), spec)


@pytest.fixture(scope="session")
def circle_tight():
    spec = GridSpec.around((-1, -1), (1, 1), H, margin=0.1)
    return S.rasterize(S.Shell((0, 0), 1 - H, 1 + H), spec)


@pytest.fixture(scope="session")
def two_points():
    """Two cells at distance 1, h = 0.02."""
    spec = GridSpec.around((0, 0), (1, 0), H, margin=1 + 3 * H)
    return S.rasterize(S.PointList([[0, 0], [1, 0]]), spec)


@pytest.fixture(scope="session")
def annulus():
    return load_corpus("annulus")[0]


@pytest.fixture(scope="session")
def disc():
    return load_corpus("disc")[0]


@pytest.fixture(scope="session")
def example1():
    return load_corpus("example1")[0]


def hausdorff_cells(a, b):
    """Largest distance from a cell of the symmetric difference to the other set."""
    from reachkit.grid import distance_transform

    out = 0.0
    for src, dst in ((a, b), (b, a)):
        extra = src.occupancy & ~dst.occupancy
        if extra.any():
            out = max(out, float(distance_transform(dst).values[extra].max()))
    return out


SQRT2 = math.sqrt(2)
