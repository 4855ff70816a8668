"""Cornell Grasping Dataset ingestion, augmentation, and splits."""

from .augment import (
    DEFAULT_MULTIPLICITY,
    OUT_SIZE,
    AugmentTransform,
    apply_transform,
    augment,
    augmented_grasp_count,
    build_transform,
    identity_transform,
    object_center,
    sample_transform,
    transform_rects,
)
from .cornell import (
    CACHE_FORMAT_VERSION,
    CGD_SHAPE,
    SceneRecord,
    load_cache,
    load_scene,
    parse_rect_file,
    pcd_to_depth,
    read_cache_index,
    scan_raw,
    write_cache,
)
from .normalize import InputTensor, center_crop, normalize_depth, normalize_input
from .splits import SplitSpec, derive_seed, make_splits
from .synthetic import generate_synthetic_cgd

__all__ = [
    "AugmentTransform",
    "CACHE_FORMAT_VERSION",
    "CGD_SHAPE",
    "DEFAULT_MULTIPLICITY",
    "InputTensor",
    "OUT_SIZE",
    "SceneRecord",
    "SplitSpec",
    "apply_transform",
    "augment",
    "augmented_grasp_count",
    "build_transform",
    "center_crop",
    "derive_seed",
    "generate_synthetic_cgd",
    "identity_transform",
    "load_cache",
    "load_scene",
    "make_splits",
    "normalize_depth",
    "normalize_input",
    "object_center",
    "parse_rect_file",
    "pcd_to_depth",
    "read_cache_index",
    "sample_transform",
    "scan_raw",
    "transform_rects",
    "write_cache",
]
