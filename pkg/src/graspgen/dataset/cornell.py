"""Cornell Grasping Dataset ingestion.

Raw layout (possibly nested in subfolders):
    pcdNNNNr.png      RGB image
    pcdNNNN.txt       ASCII point cloud carrying depth
    pcdNNNNcpos.txt   positive grasp rectangles
    pcdNNNNcneg.txt   negative grasp rectangles

Rectangle files hold one "x y" pair per line, four lines per rectangle,
with x = column and y = row. Groups containing NaN are a known quirk of the
source data and are skipped.

The preprocessed cache written by :func:`write_cache` is self-contained:

    <cache>/index.jsonl    line 1: {"format": "graspgen-cache@1"}, then one
                           record per scene (sorted by id) with rectangle
                           vertices inline
    <cache>/rgb/<id>.png   byte-for-byte copy of the raw RGB image
    <cache>/depth/<id>.npy float32 depth in meters, missing pixels inpainted
"""

import json
import math
import shutil
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .. import kernels
from ..core.geometry import GraspRectangle
from ..errors import ParseError, VersionError

CACHE_FORMAT_VERSION = "graspgen-cache@1"
CGD_SHAPE = (480, 640)


@dataclass
class SceneRecord:
    """One dataset scene: image, depth, and its grasp annotations."""

    id: str
    rgb: np.ndarray
    depth: np.ndarray
    positives: list = field(default_factory=list)
    negatives: list = field(default_factory=list)

    def __post_init__(self):
        if self.rgb.shape[:2] != self.depth.shape:
            raise ValueError(
                f"rgb {self.rgb.shape[:2]} and depth {self.depth.shape} disagree"
            )

    @property
    def shape(self):
        return self.depth.shape


def parse_rect_file(path):
    """Read a CGD rectangle file into GraspRectangles.

    Returns (rectangles, skipped) where skipped counts 4-line groups dropped
    because they contained NaN coordinates.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) % 4 != 0:
        raise ParseError(f"{path}: line count {len(lines)} not divisible by 4")
    points = []
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'x y', got {line!r}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric pair {line!r}") from None
        points.append((y, x))  # file order is (col, row); we store (row, col)
    rects, skipped = [], 0
    for i in range(0, len(points), 4):
        group = points[i : i + 4]
        if any(math.isnan(v) for p in group for v in p):
            skipped += 1
            continue
        rects.append(GraspRectangle(np.array(group, dtype=np.float64)))
    return rects, skipped


def _parse_pcd_header(lines, path):
    fields = None
    points = None
    data_start = None
    for i, line in enumerate(lines):
        token = line.split("#", 1)[0].strip()
        if not token:
            continue
        key, _, rest = token.partition(" ")
        key = key.upper()
        if key == "FIELDS":
            fields = rest.split()
        elif key == "POINTS":
            points = int(rest)
        elif key == "DATA":
            if rest.strip().lower() != "ascii":
                raise ParseError(f"{path}: only ascii point clouds supported")
            data_start = i + 1
            break
    if fields is None or data_start is None:
        raise ParseError(f"{path}: missing FIELDS/DATA header")
    for name in ("z", "index"):
        if name not in fields:
            raise ParseError(f"{path}: field layout {fields} lacks {name!r}")
    return fields.index("z"), fields.index("index"), points, data_start


def pcd_to_depth(path, shape=CGD_SHAPE, inpaint=True):
    """Rebuild the depth image from an ASCII point cloud.

    Each point carries a row-major pixel index (row * width + col). Pixels
    with no point are missing; they are filled by iterative neighborhood
    inpainting unless ``inpaint`` is false (then they stay 0).
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    z_col, idx_col, _, data_start = _parse_pcd_header(lines, path)
    h, w = shape
    depth = np.zeros((h, w), dtype=np.float64)
    valid = np.zeros((h, w), dtype=bool)
    ncols = max(z_col, idx_col) + 1
    for lineno, line in enumerate(lines[data_start:], start=data_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) < ncols:
            raise ParseError(f"{path}:{lineno}: point row has {len(parts)} fields")
        try:
            z = float(parts[z_col])
            index = int(float(parts[idx_col]))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: malformed point {line!r}") from None
        r, c = divmod(index, w)
        if not (0 <= r < h):
            raise ParseError(f"{path}:{lineno}: index {index} outside {h}x{w}")
        depth[r, c] = z
        valid[r, c] = True
    if inpaint and valid.any() and not valid.all():
        depth = kernels.fill_missing(depth, valid)
    return depth.astype(np.float32)


def scan_raw(raw_dir):
    """Find scene ids under a raw CGD directory (recursively).

    Returns (scene_paths, missing) where scene_paths maps id -> dict of the
    four expected files and missing lists paths absent for partial scenes.
    """
    raw_dir = Path(raw_dir)
    ids = {}
    for png in sorted(raw_dir.rglob("pcd*r.png")):
        ids[png.name[: -len("r.png")]] = png.parent
    scenes, missing = {}, []
    for sid, folder in sorted(ids.items()):
        want = {
            "rgb": folder / f"{sid}r.png",
            "pcd": folder / f"{sid}.txt",
            "pos": folder / f"{sid}cpos.txt",
            "neg": folder / f"{sid}cneg.txt",
        }
        absent = [p for p in want.values() if not p.exists()]
        if absent:
            missing.extend(str(p) for p in absent)
        else:
            scenes[sid] = want
    return scenes, missing


def _rects_to_lists(rects):
    return [[[float(v) for v in vertex] for vertex in r.vertices] for r in rects]

def _rects_from_lists(lists):
    return [GraspRectangle(np.array(r, dtype=np.float64)) for r in lists]


def write_cache(raw_dir, cache_dir, shape=CGD_SHAPE):
    """Convert a raw CGD tree into the preprocessed cache.

    Idempotent: rerunning over an existing cache rewrites identical bytes.
    Returns a summary dict (scenes, positives, negatives, skipped_groups,
    missing files).
    """
    scenes, missing = scan_raw(raw_dir)
    cache_dir = Path(cache_dir)
    (cache_dir / "rgb").mkdir(parents=True, exist_ok=True)
    (cache_dir / "depth").mkdir(parents=True, exist_ok=True)
    records = []
    totals = {"scenes": 0, "positives": 0, "negatives": 0, "skipped_groups": 0}
    for sid, files in sorted(scenes.items()):
        pos, skipped_p = parse_rect_file(files["pos"])
        neg, skipped_n = parse_rect_file(files["neg"])
        depth = pcd_to_depth(files["pcd"], shape)
        shutil.copyfile(files["rgb"], cache_dir / "rgb" / f"{sid}.png")
        np.save(cache_dir / "depth" / f"{sid}.npy", depth)
        records.append(
            {
                "id": sid,
                "rgb": f"rgb/{sid}.png",
                "depth": f"depth/{sid}.npy",
                "positives": _rects_to_lists(pos),
                "negatives": _rects_to_lists(neg),
            }
        )
        totals["scenes"] += 1
        totals["positives"] += len(pos)
        totals["negatives"] += len(neg)
        totals["skipped_groups"] += skipped_p + skipped_n
    with open(cache_dir / "index.jsonl", "w") as f:
        f.write(json.dumps({"format": CACHE_FORMAT_VERSION}, sort_keys=True) + "\n")
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    totals["missing"] = missing
    return totals


def read_cache_index(cache_dir):
    """Return the list of scene records from a cache directory."""
    index = Path(cache_dir) / "index.jsonl"
    if not index.exists():
        raise ParseError(f"{index}: cache index not found")
    with open(index) as f:
        header = json.loads(f.readline())
        if header.get("format") != CACHE_FORMAT_VERSION:
            raise VersionError(
                f"{index}: format {header.get('format')!r}, "
                f"expected {CACHE_FORMAT_VERSION!r}"
            )
        return [json.loads(line) for line in f if line.strip()]


def load_scene(cache_dir, record):
    """Materialize a SceneRecord from a cache index record."""
    cache_dir = Path(cache_dir)
    rgb = np.asarray(Image.open(cache_dir / record["rgb"]).convert("RGB"))
    depth = np.load(cache_dir / record["depth"])
    return SceneRecord(
        id=record["id"],
        rgb=rgb,
        depth=depth,
        positives=_rects_from_lists(record["positives"]),
        negatives=_rects_from_lists(record["negatives"]),
    )


def load_cache(cache_dir):
    """Load every scene in a cache directory, sorted by id."""
    return [load_scene(cache_dir, rec) for rec in read_cache_index(cache_dir)]
