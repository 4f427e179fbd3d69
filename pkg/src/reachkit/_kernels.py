"""Compiled inner loops: lens membership, separable distance transform, pair checks.

Everything here works in grid index units (cell spacing 1) unless a function
says otherwise; callers in :mod:`reachkit.grid` and :mod:`reachkit.reach`
handle the conversion from world coordinates.
"""

import os

import numba
import numpy as np
from numba import njit, prange

numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_threads = os.environ.get("REACHKIT_THREADS")
if _threads:
    try:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


# ---------------------------------------------------------------------------
# lens (spindle) membership
# ---------------------------------------------------------------------------


@njit(cache=True)
def lens_frame(a, b, R):
    """Midpoint, unit axis and centre-ring radius of fuso(a, b, R)."""
    d = a.shape[0]
    m = np.empty(d)
    e = np.empty(d)
    L2 = 0.0
    for k in range(d):
        m[k] = (a[k] + b[k]) * 0.5
        e[k] = b[k] - a[k]
        L2 += e[k] * e[k]
    L = np.sqrt(L2)
    for k in range(d):
        e[k] /= L
    s = 0.5 * L
    hh = np.sqrt(R * R - s * s)
    return m, e, hh


@njit(cache=True)
def lens_lhs(p, m, e, hh):
    # squared distance from p to the farthest point of the ring of ball centres
    d = p.shape[0]
    u = 0.0
    for k in range(d):
        u += (p[k] - m[k]) * e[k]
    if d == 2:
        v = abs((p[0] - m[0]) * e[1] - (p[1] - m[1]) * e[0])
    else:
        w0 = p[0] - m[0]
        w1 = p[1] - m[1]
        w2 = p[2] - m[2]
        c0 = w1 * e[2] - w2 * e[1]
        c1 = w2 * e[0] - w0 * e[2]
        c2 = w0 * e[1] - w1 * e[0]
        v = np.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
    return u * u + (v + hh) * (v + hh)


@njit(cache=True)
def _same_point(p, q):
    for k in range(p.shape[0]):
        if p[k] != q[k]:
            return False
    return True


@njit(cache=True)
def lens_contains(p, a, b, R, tol):
    if _same_point(p, a) or _same_point(p, b):
        return True
    m, e, hh = lens_frame(a, b, R)
    return lens_lhs(p, m, e, hh) <= (R + tol) * (R + tol)


@njit(cache=True)
def lens_mask(points, a, b, R, tol):
    n = points.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    m, e, hh = lens_frame(a, b, R)
    rhs = (R + tol) * (R + tol)
    for i in range(n):
        p = points[i]
        if _same_point(p, a) or _same_point(p, b):
            out[i] = True
        else:
            out[i] = lens_lhs(p, m, e, hh) <= rhs
    return out


# ---------------------------------------------------------------------------
# separable squared-distance transform with feature (nearest site) tracking
# ---------------------------------------------------------------------------


@njit(cache=True)
def _envelope_row(f, feat, out, feat_out, v, z):
    n = f.shape[0]
    k = -1
    for q in range(n):
        if f[q] == np.inf:
            continue
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -np.inf
            z[1] = np.inf
            continue
        fq = f[q] + q * q
        while True:
            p = v[k]
            s = (fq - (f[p] + p * p)) / (2.0 * (q - p))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    if k < 0:
        for q in range(n):
            out[q] = np.inf
            feat_out[q] = -1
        return
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        out[q] = (q - p) * (q - p) + f[p]
        feat_out[q] = feat[p]


@njit(cache=True)
def edt_pass(f, feat):
    """Lower-envelope pass along the last axis of 2-D arrays ``f`` / ``feat``."""
    rows, n = f.shape
    out = np.empty_like(f)
    feat_out = np.empty_like(feat)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1)
    for r in range(rows):
        _envelope_row(f[r], feat[r], out[r], feat_out[r], v, z)
    return out, feat_out


# ---------------------------------------------------------------------------
# spindle-section connectivity for batches of cell pairs
# ---------------------------------------------------------------------------


@njit(cache=True)
def _flat(c, strides):
    f = 0
    for k in range(c.shape[0]):
        f += c[k] * strides[k]
    return f


@njit(cache=True)
def _segment_path_ok(occ, shape, strides, a, b, m, e, hh, rhs):
    # cells nearest to the segment samples form a full-adjacency chain
    d = a.shape[0]
    steps = 0.0
    for k in range(d):
        steps = max(steps, abs(b[k] - a[k]))
    n = int(np.ceil(steps))
    if n < 1:
        return True
    p = np.empty(d)
    c = np.empty(d, dtype=np.int64)
    for i in range(1, n):
        t = i / n
        for k in range(d):
            c[k] = int(np.floor(a[k] + (b[k] - a[k]) * t + 0.5))
            if c[k] < 0 or c[k] >= shape[k]:
                return False
            p[k] = c[k]
        if not occ[_flat(c, strides)]:
            return False
        if not (_same_point(p, a) or _same_point(p, b)):
            if lens_lhs(p, m, e, hh) > rhs:
                return False
    return True


@njit(cache=True)
def _pair_connected(occ, shape, strides, offsets, a, b, R, tol, fast, stamp, mark, stack):
    d = a.shape[0]
    m, e, hh = lens_frame(a, b, R)
    rhs = (R + tol) * (R + tol)
    if fast and _segment_path_ok(occ, shape, strides, a, b, m, e, hh, rhs):
        return True
    ca = np.empty(d, dtype=np.int64)
    cb = np.empty(d, dtype=np.int64)
    for k in range(d):
        ca[k] = int(a[k])
        cb[k] = int(b[k])
    start = _flat(ca, strides)
    target = _flat(cb, strides)
    nnb = offsets.shape[0]
    nb_idx = np.empty(nnb, dtype=np.int64)
    nb_key = np.empty(nnb)
    cur = np.empty(d, dtype=np.int64)
    nxt = np.empty(d, dtype=np.int64)
    p = np.empty(d)
    stamp[start] = mark
    stack[0] = start
    top = 1
    while top > 0:
        top -= 1
        c = stack[top]
        if c == target:
            return True
        rem = c
        for k in range(d):
            cur[k] = rem // strides[k]
            rem -= cur[k] * strides[k]
        cnt = 0
        for o in range(nnb):
            inside = True
            for k in range(d):
                nxt[k] = cur[k] + offsets[o, k]
                if nxt[k] < 0 or nxt[k] >= shape[k]:
                    inside = False
                    break
            if not inside:
                continue
            f = _flat(nxt, strides)
            if stamp[f] == mark or not occ[f]:
                continue
            for k in range(d):
                p[k] = nxt[k]
            if not (_same_point(p, a) or _same_point(p, b)):
                if lens_lhs(p, m, e, hh) > rhs:
                    continue
            key = 0.0
            for k in range(d):
                key += (p[k] - b[k]) * (p[k] - b[k])
            # insertion sort, farthest first so the nearest ends on top of the stack
            j = cnt
            while j > 0 and nb_key[j - 1] < key:
                nb_key[j] = nb_key[j - 1]
                nb_idx[j] = nb_idx[j - 1]
                j -= 1
            nb_key[j] = key
            nb_idx[j] = f
            cnt += 1
        for j in range(cnt):
            f = nb_idx[j]
            stamp[f] = mark
            stack[top] = f
            top += 1
    return False


@njit(parallel=True, cache=True)
def check_pairs(occ, shape, strides, cells, pairs, R, tol, offsets, fast, nchunk):
    """Return ``ok[i]`` = endpoints of pair ``i`` connected inside their lens section."""
    m = pairs.shape[0]
    ok = np.zeros(m, dtype=np.bool_)
    ncell = occ.shape[0]
    nchunk = min(m, nchunk)
    if nchunk == 0:
        return ok
    per = (m + nchunk - 1) // nchunk
    for ch in prange(nchunk):
        stamp = np.full(ncell, -1, dtype=np.int64)
        stack = np.empty(ncell, dtype=np.int64)
        lo = ch * per
        hi = min(m, lo + per)
        for i in range(lo, hi):
            a = cells[pairs[i, 0]].astype(np.float64)
            b = cells[pairs[i, 1]].astype(np.float64)
            ok[i] = _pair_connected(occ, shape, strides, offsets, a, b, R, tol, fast,
                                    stamp, i, stack)
    return ok


# ---------------------------------------------------------------------------
# ball marking for the hull-as-intersection construction
# ---------------------------------------------------------------------------


@njit(cache=True)
def mark_balls(centres, shape, strides, stencil, excluded):
    d = shape.shape[0]
    nxt = np.empty(d, dtype=np.int64)
    for i in range(centres.shape[0]):
        for o in range(stencil.shape[0]):
            inside = True
            for k in range(d):
                nxt[k] = centres[i, k] + stencil[o, k]
                if nxt[k] < 0 or nxt[k] >= shape[k]:
                    inside = False
                    break
            if inside:
                excluded[_flat(nxt, strides)] = True
