"""Vectorized numpy implementations of the hot kernels.

Shared conventions (both backends implement exactly these):

* A quad is a (4, 2) float array of (row, col) vertices walking the
  perimeter. Orientation may be either winding; it is normalized first.
* Pixel (r, c) covers the unit square [r, r+1) x [c, c+1); it belongs to a
  quad iff its center (r + 0.5, c + 0.5) lies inside or on the boundary.
* Rasterization is grid-based, not canvas-based: pixels are counted over
  the quad's own bounding box, so negative coordinates work and results do
  not depend on any image size.
"""

import numpy as np

_EDGE_EPS = 1e-9


def _ccw(verts):
    """Return vertices in counter-clockwise order (positive shoelace area)."""
    v = np.asarray(verts, dtype=np.float64).reshape(4, 2)
    area2 = 0.0
    for i in range(4):
        j = (i + 1) % 4
        area2 += v[i, 0] * v[j, 1] - v[j, 0] * v[i, 1]
    if area2 < 0.0:
        v = v[::-1].copy()
    return v


def _inside(verts, rr, cc):
    """Boolean mask of points (rr, cc) inside the CCW quad (boundary counts)."""
    ok = np.ones(rr.shape, dtype=bool)
    for i in range(4):
        j = (i + 1) % 4
        er = verts[j, 0] - verts[i, 0]
        ec = verts[j, 1] - verts[i, 1]
        cross = er * (cc - verts[i, 1]) - ec * (rr - verts[i, 0])
        ok &= cross >= -_EDGE_EPS
    return ok


def quad_mask(verts, h, w):
    """Rasterize a convex quad onto an h x w grid.

    Returns a uint8 mask; pixels outside [0, h) x [0, w) are clipped away.
    """
    v = _ccw(verts)
    out = np.zeros((h, w), dtype=np.uint8)
    r0 = max(int(np.floor(v[:, 0].min())), 0)
    r1 = min(int(np.ceil(v[:, 0].max())), h - 1)
    c0 = max(int(np.floor(v[:, 1].min())), 0)
    c1 = min(int(np.ceil(v[:, 1].max())), w - 1)
    if r1 < r0 or c1 < c0:
        return out
    rr, cc = np.meshgrid(
        np.arange(r0, r1 + 1, dtype=np.float64) + 0.5,
        np.arange(c0, c1 + 1, dtype=np.float64) + 0.5,
        indexing="ij",
    )
    out[r0 : r1 + 1, c0 : c1 + 1] = _inside(v, rr, cc)
    return out

def quad_pair_counts(verts_a, verts_b):
    """Pixel counts (intersection, union) of two quads on the integer grid.

    Counted over the joint bounding box, so no image bounds are involved.
    """
    va = _ccw(verts_a)
    vb = _ccw(verts_b)
    allv = np.vstack([va, vb])
    r0 = int(np.floor(allv[:, 0].min()))
    r1 = int(np.ceil(allv[:, 0].max()))
    c0 = int(np.floor(allv[:, 1].min()))
    c1 = int(np.ceil(allv[:, 1].max()))
    rr, cc = np.meshgrid(
        np.arange(r0, r1 + 1, dtype=np.float64) + 0.5,
        np.arange(c0, c1 + 1, dtype=np.float64) + 0.5,
        indexing="ij",
    )
    in_a = _inside(va, rr, cc)
    in_b = _inside(vb, rr, cc)
    inter = int(np.count_nonzero(in_a & in_b))
    union = int(np.count_nonzero(in_a | in_b))
    return inter, union


# Neighbor scan order shared with the numba backend so the float sums are
# bitwise identical between the two.
_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def fill_missing(values, valid):
    """Fill invalid pixels by iterative neighborhood propagation.

    Each round, every missing pixel that touches at least one valid pixel
    (8-neighborhood) takes the mean of its valid neighbors; rounds repeat
    until nothing is missing. Equivalent to a nearest-valid-region fill that
    smooths across equidistant sources.
    """
    vals = np.asarray(values, dtype=np.float64).copy()
    ok = np.asarray(valid, dtype=bool).copy()
    if ok.all():
        return vals
    if not ok.any():
        raise ValueError("fill_missing: no valid pixels to propagate from")
    h, w = vals.shape
    while not ok.all():
        acc = np.zeros_like(vals)
        cnt = np.zeros((h, w), dtype=np.int64)
        for dr, dc in _NEIGHBORS:
            src_r = slice(max(dr, 0), h + min(dr, 0))
            src_c = slice(max(dc, 0), w + min(dc, 0))
            dst_r = slice(max(-dr, 0), h + min(-dr, 0))
            dst_c = slice(max(-dc, 0), w + min(-dc, 0))
            contrib = np.where(ok[src_r, src_c], vals[src_r, src_c], 0.0)
            acc[dst_r, dst_c] += contrib
            cnt[dst_r, dst_c] += ok[src_r, src_c]
        frontier = (~ok) & (cnt > 0)
        vals[frontier] = acc[frontier] / cnt[frontier]
        ok |= frontier
    return vals
