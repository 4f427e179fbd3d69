"""Static SVG figures of planar grid sets.

Coordinates are world units with y pointing up: the viewBox spans the grid
window and every y is flipped on output.  Each layer is an SVG group with a
stable id, so figures diff cleanly.
"""

from __future__ import annotations

import datetime as _dt

import numpy as np

from reachkit.errors import DomainError
from reachkit.geometry import Spindle
from reachkit.grid import GridSet

_STYLE = {
    "occupied": "fill:#4a6fa5;stroke:none",
    "eroded": "fill:#d9a441;fill-opacity:0.35;stroke:none",
    "hull": "fill:#5aa469;fill-opacity:0.45;stroke:none",
    "spindles": "fill:none;stroke:#aa3355",
    "witness-arc": "fill:none;stroke:#111111",
    "witness-pair": "fill:#e03c31;stroke:none",
}


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, spec):
        self.spec = spec
        self.h = spec.h
        self.x0 = spec.lo[0] - self.h / 2
        self.y1 = spec.hi[1] + self.h / 2
        self.w = spec.dims[0] * self.h
        self.ht = spec.dims[1] * self.h

    def xy(self, p):
        return _fmt(p[0] - self.x0), _fmt(self.y1 - p[1])

    def runs(self, occ, layer):
        """One rect per horizontal run of occupied cells (index axis 0 is x)."""
        out = [f'<g id="{layer}" style="{_STYLE[layer]}">']
        h = self.h
        for j in range(occ.shape[1]):
            col = np.concatenate([[False], occ[:, j], [False]]).astype(np.int8)
            edges = np.flatnonzero(np.diff(col))
            for start, stop in zip(edges[::2], edges[1::2]):
                lo = self.spec.to_world((start, j)) - h / 2
                x, y = self.xy((lo[0], lo[1] + h))
                out.append(f'<rect x="{x}" y="{y}" width="{_fmt((stop - start) * h)}" height="{_fmt(h)}"/>')
        out.append("</g>")
        return out

    def polyline(self, pts):
        return '<polyline points="' + " ".join(",".join(self.xy(p)) for p in pts) + '"/>'


def render_svg(g: GridSet, eroded: GridSet | None = None, hull: GridSet | None = None,
               spindles=(), witness_pair=None, witness_arc=None, timestamp=False) -> str:
    """SVG text for a planar set and optional analysis layers.

    ``spindles`` holds :class:`~reachkit.geometry.Spindle` objects (outlines of
    128 points), ``witness_pair`` two world points, ``witness_arc`` a list of
    cell indices.  ``timestamp=True`` adds a generation-time comment.
    """
    if g.ndim != 2:
        raise DomainError("SVG rendering is only available for planar sets")
    cv = _Canvas(g.spec)
    stroke = _fmt(g.spec.h / 4)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(cv.w)} {_fmt(cv.ht)}" '
        f'width="{_fmt(cv.w / g.spec.h * 4)}" height="{_fmt(cv.ht / g.spec.h * 4)}">',
    ]
    if timestamp:
        lines.append(f"<!-- generated {_dt.datetime.now(_dt.timezone.utc).isoformat()} -->")
    for layer, s in (("eroded", eroded), ("hull", hull), ("occupied", g)):
        if s is not None:
            if s.spec != g.spec:
                raise DomainError(f"{layer} layer is on a different grid")
            lines += cv.runs(s.occupancy, layer)
    if spindles:
        lines.append(f'<g id="spindles" style="{_STYLE["spindles"]};stroke-width:{stroke}">')
        for sp in spindles:
            if not isinstance(sp, Spindle):
                raise DomainError("spindles must be Spindle objects")
            lines.append(cv.polyline(sp.boundary_polyline(128)))
        lines.append("</g>")
    if witness_arc:
        pts = g.spec.to_world(np.asarray(witness_arc))
        lines.append(f'<g id="witness-arc" style="{_STYLE["witness-arc"]};stroke-width:{stroke}">')
        lines.append(cv.polyline(pts))
        lines.append("</g>")
    if witness_pair is not None:
        lines.append(f'<g id="witness-pair" style="{_STYLE["witness-pair"]}">')
        for p in witness_pair:
            x, y = cv.xy(p)
            lines.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(g.spec.h)}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
