import xml.etree.ElementTree as ET

import numpy as np
import pytest

from reachkit.errors import DomainError
from reachkit.geometry import Spindle
from reachkit.grid import GridSet, GridSpec, erode
from reachkit.rhull import closing
from reachkit.svg import render_svg

NS = "{http://www.w3.org/2000/svg}"


def groups(svg):
    root = ET.fromstring(svg.split("\n", 1)[1])
    return {g.get("id"): g for g in root.iter(NS + "g")}, root


def test_occupancy_only(example1):
    svg = render_svg(example1)
    g, root = groups(svg)
    assert list(g) == ["occupied"]
    assert len(g["occupied"]) == 2
    assert "generated" not in svg


def test_cells_are_y_up():
    occ = np.zeros((3, 2), bool)
    occ[0, 1] = True  # x index 0, top row
    s = render_svg(GridSet(GridSpec((0, 0), 1.0, (3, 2)), occ))
    rect = groups(s)[0]["occupied"][0]
    assert (rect.get("x"), rect.get("y"), rect.get("width")) == ("0", "0", "1")


def test_runs_merge_along_x():
    occ = np.zeros((4, 2), bool)
    occ[:, 0] = True
    rect = groups(render_svg(GridSet(GridSpec((0, 0), 1.0, (4, 2)), occ)))[0]["occupied"]
    assert len(rect) == 1 and rect[0].get("width") == "4" and rect[0].get("y") == "1"


def test_all_layers(example1):
    E = erode(example1, 1.0)
    svg = render_svg(example1, eroded=E, hull=closing(example1, 1.0),
                     spindles=[Spindle((0, 0), (0.5, 0), 1.0)],
                     witness_pair=[np.array([0.0, 0.0]), np.array([0.5, 0.0])],
                     witness_arc=[(103, 103), (104, 103)])
    g, _ = groups(svg)
    assert list(g) == ["eroded", "hull", "occupied", "spindles", "witness-arc", "witness-pair"]
    pts = g["spindles"][0].get("points").split()
    assert len(pts) == 128


def test_timestamp_comment(example1):
    assert "<!-- generated" in render_svg(example1, timestamp=True)
    assert render_svg(example1) == render_svg(example1)


def test_errors(example1):
    with pytest.raises(DomainError):
        render_svg(GridSet.full(GridSpec((0, 0, 0), 1.0, (2, 2, 2))))
    with pytest.raises(DomainError):
        render_svg(example1, hull=GridSet.full(GridSpec((0, 0), 1.0, (2, 2))))
    with pytest.raises(DomainError):
        render_svg(example1, spindles=["lens"])
