"""Numba JIT implementations of the hot kernels.

Semantics mirror ``numpy_impl`` exactly (same vertex ordering rules, same
pixel-center test, same neighbor scan order) so the two backends can be
swapped or diffed at will. See that module for the conventions.
"""

import numpy as np
from numba import njit

_EDGE_EPS = 1e-9


@njit(cache=True)
def _ccw(verts):
    v = np.empty((4, 2), dtype=np.float64)
    for i in range(4):
        v[i, 0] = verts[i, 0]
        v[i, 1] = verts[i, 1]
    area2 = 0.0
    for i in range(4):
        j = (i + 1) % 4
        area2 += v[i, 0] * v[j, 1] - v[j, 0] * v[i, 1]
    if area2 < 0.0:
        out = np.empty((4, 2), dtype=np.float64)
        for i in range(4):
            out[i, 0] = v[3 - i, 0]
            out[i, 1] = v[3 - i, 1]
        return out
    return v


@njit(cache=True)
def _point_inside(verts, pr, pc):
    for i in range(4):
        j = (i + 1) % 4
        er = verts[j, 0] - verts[i, 0]
        ec = verts[j, 1] - verts[i, 1]
        cross = er * (pc - verts[i, 1]) - ec * (pr - verts[i, 0])
        if cross < -_EDGE_EPS:
            return False
    return True


@njit(cache=True)
def quad_mask(verts, h, w):
    v = _ccw(verts)
    out = np.zeros((h, w), dtype=np.uint8)
    rmin = v[0, 0]
    rmax = v[0, 0]
    cmin = v[0, 1]
    cmax = v[0, 1]
    for i in range(1, 4):
        rmin = min(rmin, v[i, 0])
        rmax = max(rmax, v[i, 0])
        cmin = min(cmin, v[i, 1])
        cmax = max(cmax, v[i, 1])
    r0 = max(int(np.floor(rmin)), 0)
    r1 = min(int(np.ceil(rmax)), h - 1)
    c0 = max(int(np.floor(cmin)), 0)
    c1 = min(int(np.ceil(cmax)), w - 1)
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            if _point_inside(v, r + 0.5, c + 0.5):
                out[r, c] = 1
    return out


@njit(cache=True)
def quad_pair_counts(verts_a, verts_b):
    va = _ccw(verts_a)
    vb = _ccw(verts_b)
    rmin = va[0, 0]
    rmax = va[0, 0]
    cmin = va[0, 1]
    cmax = va[0, 1]
    for i in range(4):
        for v in (va, vb):
            rmin = min(rmin, v[i, 0])
            rmax = max(rmax, v[i, 0])
            cmin = min(cmin, v[i, 1])
            cmax = max(cmax, v[i, 1])
    r0 = int(np.floor(rmin))
    r1 = int(np.ceil(rmax))
    c0 = int(np.floor(cmin))
    c1 = int(np.ceil(cmax))
    inter = 0
    union = 0
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            pr = r + 0.5
            pc = c + 0.5
            in_a = _point_inside(va, pr, pc)
            in_b = _point_inside(vb, pr, pc)
            if in_a and in_b:
                inter += 1
            if in_a or in_b:
                union += 1
    return inter, union


@njit(cache=True)
def _fill_round(vals, ok, new_vals, new_ok):
    # Jacobi-style round: frontier means are computed from the previous
    # round's state only, matching the numpy backend bit for bit.
    h, w = vals.shape
    changed = False
    for r in range(h):
        for c in range(w):
            new_ok[r, c] = ok[r, c]
            new_vals[r, c] = vals[r, c]
            if ok[r, c]:
                continue
            acc = 0.0
            cnt = 0
            for dr in range(-1, 2):
                for dc in range(-1, 2):
                    if dr == 0 and dc == 0:
                        continue
                    rr = r + dr
                    cc = c + dc
                    if 0 <= rr < h and 0 <= cc < w and ok[rr, cc]:
                        acc += vals[rr, cc]
                        cnt += 1
            if cnt > 0:
                new_vals[r, c] = acc / cnt
                new_ok[r, c] = True
                changed = True
    return changed


def fill_missing(values, valid):
    """Fill invalid pixels by iterative neighborhood propagation."""
    vals = np.asarray(values, dtype=np.float64).copy()
    ok = np.asarray(valid, dtype=bool).copy()
    if ok.all():
        return vals
    if not ok.any():
        raise ValueError("fill_missing: no valid pixels to propagate from")
    buf_vals = np.empty_like(vals)
    buf_ok = np.empty_like(ok)
    while not ok.all():
        _fill_round(vals, ok, buf_vals, buf_ok)
        vals, buf_vals = buf_vals, vals
        ok, buf_ok = buf_ok, ok
    return vals
