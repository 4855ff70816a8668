"""Synthetic scenes in the Cornell on-disk layout.

Each scene is a rotated bar on a textured table: the RGB image, an ASCII
point cloud with a plausible tabletop depth (object raised toward the
camera, a sprinkle of missing pixels), antipodal positive grasps across the
bar, and negatives along it. Useful for exercising the full ingestion /
training / evaluation pipeline without the real dataset.
"""

import math
from pathlib import Path

import numpy as np
from PIL import Image

from .. import kernels
from ..core.geometry import ImageGrasp, image_grasp_to_rect, wrap_angle

SYN_SHAPE = (240, 320)
_F, _CA, _CB = 600.0, 160.0, 120.0  # synthetic pinhole for point-cloud x/y


def _bar_scene(rng, shape):
    h, w = shape
    cr = h / 2.0 + rng.uniform(-10, 10)
    cc = w / 2.0 + rng.uniform(-10, 10)
    phi = wrap_angle(rng.uniform(-math.pi / 2, math.pi / 2))
    length = rng.uniform(90, 130)
    thick = rng.uniform(22, 40)
    bar = image_grasp_to_rect(
        ImageGrasp(center=(cr, cc), angle=phi, width=length), jaw_height=thick
    )
    mask = kernels.quad_mask(bar.vertices, h, w).astype(bool)

    rgb = np.empty((h, w, 3), dtype=np.uint8)
    base = rng.integers(90, 140)
    grad = np.linspace(-20, 20, w)[None, :]
    noise = rng.normal(0, 6, (h, w))
    table = np.clip(base + grad + noise, 0, 255)
    for ch, tint in enumerate((1.0, 0.96, 0.9)):
        rgb[:, :, ch] = (table * tint).astype(np.uint8)
    color = rng.integers(150, 255, 3)
    for ch in range(3):
        plane = rgb[:, :, ch].astype(np.float64)
        plane[mask] = np.clip(color[ch] + rng.normal(0, 5, mask.sum()), 0, 255)
        rgb[:, :, ch] = plane.astype(np.uint8)

    depth = 1.0 + 0.05 * (np.arange(h)[:, None] / h) + rng.normal(0, 0.002, (h, w))
    depth[mask] = 0.75 + rng.normal(0, 0.002, mask.sum())
    depth = depth.astype(np.float64)

    axis = np.array([-math.sin(phi), math.cos(phi)])  # bar long axis (row, col)
    positives, negatives = [], []
    for s in (-length / 4, 0.0, length / 4):
        center = (cr + s * axis[0], cc + s * axis[1])
        g = ImageGrasp(
            center=center,
            angle=wrap_angle(phi + math.pi / 2),
            width=min(thick + 24, 149.0),
        )
        positives.append(image_grasp_to_rect(g, jaw_height=16.0))
    negatives.append(
        image_grasp_to_rect(
            ImageGrasp(center=(cr, cc), angle=phi, width=min(length + 20, 149.0)),
            jaw_height=16.0,
        )
    )
    off = (cr + 70 * axis[1], cc - 70 * axis[0])
    off = (min(max(off[0], 20.0), h - 20.0), min(max(off[1], 20.0), w - 20.0))
    negatives.append(
        image_grasp_to_rect(ImageGrasp(center=off, angle=0.0, width=40.0), jaw_height=14.0)
    )
    return rgb, depth, positives, negatives


def _write_pcd(path, depth, missing):
    h, w = depth.shape
    rows, cols = np.nonzero(~missing)
    lines = [
        "# .PCD v.7 - Point Cloud Data file format",
        "VERSION .7",
        "FIELDS x y z rgb index",
        "SIZE 4 4 4 4 4",
        "TYPE F F F F U",
        "COUNT 1 1 1 1 1",
        f"WIDTH {len(rows)}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {len(rows)}",
        "DATA ascii",
    ]
    for r, c in zip(rows, cols):
        z = depth[r, c]
        x = (c - _CA) / _F * z
        y = (r - _CB) / _F * z
        lines.append(f"{x:.6f} {y:.6f} {z:.6f} 0 {r * w + c}")
    Path(path).write_text("\n".join(lines) + "\n")


def _write_rects(path, rects):
    lines = []
    for rect in rects:
        for row, col in rect.vertices:
            lines.append(f"{col:.4f} {row:.4f}")
    Path(path).write_text("\n".join(lines) + "\n")


def generate_synthetic_cgd(out_dir, n_scenes=8, seed=0, shape=SYN_SHAPE,
                           missing_fraction=0.02, nested=True):
    """Write n_scenes synthetic scenes in the raw Cornell layout.

    Returns a summary dict (ids, positives, negatives totals). ``nested``
    spreads scenes over two subfolders the way the real tree is packaged.
    """
    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    ids, n_pos, n_neg = [], 0, 0
    for i in range(n_scenes):
        sid = f"pcd{i:04d}"
        folder = out_dir / (f"{(i % 2) + 1:02d}" if nested else "")
        folder.mkdir(parents=True, exist_ok=True)
        rgb, depth, positives, negatives = _bar_scene(rng, shape)
        missing = rng.random(shape) < missing_fraction
        missing[0, 0] = False  # keep at least one valid pixel
        Image.fromarray(rgb).save(folder / f"{sid}r.png")
        _write_pcd(folder / f"{sid}.txt", depth, missing)
        _write_rects(folder / f"{sid}cpos.txt", positives)
        _write_rects(folder / f"{sid}cneg.txt", negatives)
        ids.append(sid)
        n_pos += len(positives)
        n_neg += len(negatives)
    return {"ids": ids, "scenes": n_scenes, "positives": n_pos, "negatives": n_neg,
            "shape": shape}
