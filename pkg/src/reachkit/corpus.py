"""Bundled test shapes and the JSON-document-to-grid conversion used by the CLI.

A shape document is a JSON object with either a ``"shape"`` description or a
top-level point list, plus optional defaults ``"h"``, ``"R"`` and
``"margin"``.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from reachkit.errors import DomainError, GridFormatError
from reachkit.grid import GridSet, GridSpec, parse_grid
from reachkit.shapes import rasterize, shape_from_dict

__all__ = ["corpus_names", "corpus_path", "grid_from_document", "load_corpus", "load_document"]


def _data():
    return resources.files("reachkit") / "data"


def corpus_names() -> list[str]:
    """Names (file stems) of the bundled shapes, sorted."""
    return sorted({p.name.rsplit(".", 1)[0] for p in _data().iterdir()
                   if p.name.endswith((".json", ".grid"))})


def corpus_path(name: str):
    """Bundled file for ``name``; a bare stem prefers the JSON document."""
    for ext in ("", ".json", ".grid"):
        if ext == "" and not name.endswith((".json", ".grid")):
            continue
        p = _data() / f"{name}{ext}"
        if p.is_file():
            return p
    raise GridFormatError(f"no bundled shape named {name!r}")


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GridFormatError("a shape document must be a JSON object")
    return doc


def grid_from_document(doc: dict, h=None, window=None, margin=None, R=None) -> GridSet:
    """Rasterise a shape document.

    ``h`` and ``R`` fall back to the document.  Without an explicit
    ``window`` (``(lo, hi)``) the grid is fitted around the shape's extent
    with ``margin``, defaulting to the document's margin or ``2R + 3h``.
    """
    shape = shape_from_dict(doc.get("shape", doc))
    h = doc.get("h") if h is None else h
    if h is None:
        raise DomainError("grid spacing h is required (flag or document key)")
    h = float(h)
    if window is not None:
        lo, hi = window
        return rasterize(shape, GridSpec.from_window(lo, hi, h))
    ext = shape.extent()
    if ext is None:
        raise DomainError("unbounded shapes need an explicit window")
    if margin is None:
        margin = doc.get("margin")
    if margin is None:
        R = doc.get("R", 1.0) if R is None else R
        margin = 2 * float(R) + 3 * h
    return rasterize(shape, GridSpec.around(np.asarray(ext[0]), np.asarray(ext[1]), h, float(margin)))


def load_corpus(name: str, h=None, margin=None, R=None):
    """``(GridSet, document)`` for a bundled shape; ``.grid`` files carry no document."""
    p = corpus_path(name)
    text = p.read_text()
    if p.name.endswith(".grid"):
        return parse_grid(text), {}
    doc = load_document(text)
    return grid_from_document(doc, h=h, margin=margin, R=R), doc
