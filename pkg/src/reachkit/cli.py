"""``reachkit`` command line.

Inputs are ``.grid`` text files or JSON shape documents; reports are JSON
(sorted keys) that embed the resolved configuration.  Exit codes: 0 success,
1 negative verdict under ``--strict``, 2 unreadable input or bad flags,
3 domain error, 4 window too small.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from reachkit.corpus import grid_from_document, load_document
from reachkit.errors import DomainError, GridFormatError, WindowError
from reachkit.geometry import Ball, Spindle
from reachkit.grid import Adjacency, erode, read_grid, write_grid
from reachkit.reach import (
    certify_reach,
    check_ball_intersection,
    check_sphere_convexity,
    reach_search,
    unp_reach_estimate,
)
from reachkit.rhull import admits_rhull, closing
from reachkit.svg import render_svg

EXIT_OK, EXIT_STRICT, EXIT_PARSE, EXIT_DOMAIN, EXIT_WINDOW = 0, 1, 2, 3, 4

COMMANDS = ("rasterize", "reach-estimate", "reach-certify", "reach-search", "rhull",
            "check-thm22", "check-thm23", "render")

# flags each command cannot run without (after document defaults are applied)
_REQUIRED = {
    "rasterize": ("output",),
    "reach-estimate": ("R",),
    "reach-certify": ("R",),
    "reach-search": ("R_lo", "R_hi"),
    "rhull": ("R",),
    "check-thm22": ("R", "center", "r"),
    "check-thm23": ("R", "center"),
    "render": (),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reachkit", description="Reach certification and R-hulls of grid sets.")
    p.add_argument("command", choices=COMMANDS,
                   help="check-thm22 certifies K cut by the ball --center/--r; "
                        "check-thm23 tests that K meets the sphere of B(--center, R) in a convex set")
    p.add_argument("--input", required=True, help="a .grid file or a JSON shape document")
    p.add_argument("--output", help="report path (rasterize: grid path; render: SVG path); default stdout")
    p.add_argument("--R", type=float, help="test radius (reach-estimate: largest distance examined)")
    p.add_argument("--R-lo", dest="R_lo", type=float)
    p.add_argument("--R-hi", dest="R_hi", type=float)
    p.add_argument("--iters", type=int, default=6)
    p.add_argument("--h", type=float, help="grid spacing for JSON inputs")
    p.add_argument("--window", type=float, nargs="+", metavar="X",
                   help="x0 y0 x1 y1 (or x0 y0 z0 x1 y1 z1) for JSON inputs")
    p.add_argument("--margin", type=float, help="window margin around a JSON shape (default 2R + 3h)")
    p.add_argument("--adjacency", choices=("face", "full"), default="full")
    p.add_argument("--pair-budget", dest="pair_budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                   help="omit timings and timestamps so reruns are byte-identical (default on)")
    p.add_argument("--strict", action="store_true", help="exit 1 on a violated, false or undetermined outcome")
    p.add_argument("--svg", help="also write an SVG figure (planar inputs)")
    p.add_argument("--hull-output", dest="hull_output", help="rhull: write the hull grid here")
    p.add_argument("--center", type=float, nargs="+", metavar="X", help="ball centre")
    p.add_argument("--r", type=float, help="check-thm22: ball radius")
    p.add_argument("--arc-samples", dest="arc_samples", type=int, default=32)
    p.add_argument("--foot-tol", dest="foot_tol", type=float)
    p.add_argument("--sep-tol", dest="sep_tol", type=float)
    return p


def _load(args):
    path = Path(args.input)
    if not path.is_file():
        raise GridFormatError(f"no such input file: {path}")
    if path.suffix == ".grid":
        return read_grid(path)
    doc = load_document(path.read_text())
    # render only draws analysis layers for an explicit --R
    for key in ("h",) if args.command == "render" else ("R", "h"):
        if key in doc and getattr(args, key) is None:
            setattr(args, key, float(doc[key]))
    window = None
    if args.window is not None:
        w = args.window
        if len(w) not in (4, 6):
            raise DomainError("--window takes 4 (planar) or 6 (spatial) numbers")
        window = (w[: len(w) // 2], w[len(w) // 2:])
    R_for_margin = args.R_hi if args.command == "reach-search" else args.R
    return grid_from_document(doc, h=args.h, window=window, margin=args.margin, R=R_for_margin)


def _config(args, g):
    cfg = {k: v for k, v in vars(args).items()}
    cfg["h"] = g.spec.h
    cfg["window"] = [g.spec.lo.tolist(), g.spec.hi.tolist()]
    cfg["dims"] = list(g.spec.dims)
    return cfg


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _svg(args, g, **layers):
    if args.svg:
        Path(args.svg).write_text(render_svg(g, timestamp=not args.deterministic, **layers))


def _witness_layers(verdict, R):
    w = verdict.witness
    if w is None:
        return {}
    layers = {"witness_pair": [w.b1, w.b2]}
    if w.b1.shape[0] == 2:
        try:
            layers["spindles"] = [Spindle(w.b1, w.b2, R)]
        except DomainError:
            pass
    return layers


def run(args) -> int:
    """Execute a parsed command; returns the exit code."""
    g = _load(args)
    missing = [k for k in _REQUIRED[args.command] if getattr(args, k) is None]
    if missing:
        raise DomainError(f"{args.command} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
    adjacency = Adjacency.parse(args.adjacency)
    kw = {"adjacency": adjacency, "pair_budget": args.pair_budget, "seed": args.seed}
    cmd = args.command
    start = time.perf_counter()
    ok = True
    if cmd == "rasterize":
        write_grid(g, args.output)
        result = {"occupied": g.count, "grid_file": args.output}
        _svg(args, g)
    elif cmd == "reach-estimate":
        rep = unp_reach_estimate(g, args.R, args.foot_tol, args.sep_tol)
        result = rep.to_dict()
    elif cmd == "reach-certify":
        v = certify_reach(g, args.R, **kw)
        result, ok = v.to_dict(), v.certified
        _svg(args, g, **_witness_layers(v, args.R))
    elif cmd == "reach-search":
        res = reach_search(g, args.R_lo, args.R_hi, args.iters, **kw)
        result = res.to_dict()
    elif cmd == "rhull":
        rep = admits_rhull(g, args.R, **kw)
        if rep.hull is not None and args.hull_output:
            write_grid(rep.hull, args.hull_output)
        result = rep.to_dict(hull_file=args.hull_output if rep.hull is not None else None)
        ok = rep.admits is True
        layers = {"eroded": rep.eroded, "hull": rep.hull}
        if rep.verdict is not None:
            layers.update(_witness_layers(rep.verdict, args.R))
        if rep.witness_arc:
            layers["witness_arc"] = rep.witness_arc
        _svg(args, g, **layers)
    elif cmd == "check-thm22":
        v = check_ball_intersection(g, args.center, args.r, args.R, **kw)
        result, ok = v.to_dict(), v.certified
    elif cmd == "check-thm23":
        convex = check_sphere_convexity(g, Ball(args.center, args.R, open=True), args.R, args.arc_samples)
        result, ok = {"convex": convex}, convex
    else:  # render
        layers = {}
        if args.R is not None:
            layers["eroded"] = erode(g, args.R)
            layers["hull"] = closing(g, args.R)
        svg = render_svg(g, timestamp=not args.deterministic, **layers)
        _emit(svg, args.output)
        return EXIT_OK
    report = dict(result, command=cmd, config=_config(args, g))
    if not args.deterministic:
        report["elapsed_s"] = time.perf_counter() - start
    _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", None if cmd == "rasterize" else args.output)
    return EXIT_STRICT if args.strict and not ok else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except GridFormatError as exc:
        print(f"reachkit: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except WindowError as exc:
        print(f"reachkit: window error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except DomainError as exc:
        print(f"reachkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
