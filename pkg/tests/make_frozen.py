"""Regenerate ``frozen.json`` from the brute-force oracles (slow; run by hand).

    python3 tests/make_frozen.py
"""

import json
import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))
import oracles as O  # noqa: E402

from reachkit import shapes as S  # noqa: E402
from reachkit.corpus import corpus_names, load_corpus  # noqa: E402
from reachkit.grid import GridSpec  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "frozen.json")


def circle():
    h = 0.02
    spec = GridSpec.around((-1, -1), (1, 1), h, margin=2 + 3 * h)
    return S.rasterize(S.Shell((0, 0), 1 - h, 1 + h), spec), h


def two_points(h, dist=1.0, R_max=1.0):
    spec = GridSpec.around((0, 0), (dist, 0), h, margin=R_max + 3 * h)
    return S.rasterize(S.PointList([[0, 0], [dist, 0]]), spec), h


def small_sets():
    """Small planar sets for the brute-force certifier, with their test radii."""
    h = 0.1
    out = {}
    spec = GridSpec.around((0, 0), (0.5, 0), h, margin=0.3)
    out["two_points_R2"] = (S.rasterize(S.PointList([[0, 0], [0.5, 0]]), spec), [0.3, 1.0])
    spec = GridSpec.around((-1.2, -1.2), (1.2, 1.2), h, margin=0.2)
    out["ring"] = (S.rasterize(S.Shell((0, 0), 0.95, 1.2), spec), [0.8, 1.3])
    spec = GridSpec.around((0, 0), (1, 1), h, margin=0.2)
    L = S.Polygon([[0, 0], [1, 0], [1, 0.4], [0.4, 0.4], [0.4, 1], [0, 1]])
    out["lshape"] = (S.rasterize(L, spec), [0.5, 2.0])
    spec = GridSpec.around((-1, -1), (1, 1), h, margin=0.2)
    cup = S.Intersection([S.Shell((0, 0), 0.9, 1.1), S.HalfSpace((0, -1), -0.3)])
    out["cup"] = (S.rasterize(cup, spec), [0.5, 1.5])
    return out


def main():
    frozen = {}
    g, h = circle()
    frozen["circle_unp"] = O.medial_estimate(g.occupancy, h, 2.0, h * math.sqrt(2), 4 * h)
    for hh in (0.02, 0.05):
        g, _ = two_points(hh)
        frozen[f"two_point_unp_h{hh}"] = O.medial_estimate(g.occupancy, hh, 1.0, hh * math.sqrt(2), 4 * hh)
    spindle = {}
    for name, (a, b, R, p) in {
        "midpoint": ((-1, 0), (1, 0), 2, (0, 0)),
        "apex": ((-1, 0), (1, 0), 2, (0, 2 - math.sqrt(3))),
        "outside": ((-1, 0), (1, 0), 2, (0, 1)),
    }.items():
        spindle[name] = O.lens_max_distance(a, b, R, p)
    frozen["lens_max_distance"] = spindle
    cert = {}
    for name, (g, radii) in small_sets().items():
        occ, h = g.occupancy, g.spec.h
        slack = h * math.sqrt(2) / 2
        cert[name] = {str(R): O.certify(occ, h, R, slack, 2 * slack) for R in radii}
    frozen["certify_all_pairs"] = cert
    hulls = {}
    for name in corpus_names():
        g, doc = load_corpus(name, h=0.1)
        R = doc.get("R", 0.9)
        if g.spec.h != 0.1:
            continue
        hulls[name] = {"R": R, "cells": np.argwhere(O.closing(g.occupancy, 0.1, R)).tolist()}
    frozen["closing_h0.1"] = hulls
    with open(OUT, "w") as fh:
        json.dump(frozen, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
