"""Training, loss, and rectangle-metric evaluation."""

from .data import GraspSamples
from .evaluate import (
    BASELINE_ACCURACY,
    BASELINE_PARAMS,
    EVAL_SCHEMA,
    RGINNET_SPLIT_ACCURACY,
    EvalReport,
    degenerate_predictor,
    eval_frame_scenes,
    evaluate_model,
    evaluate_scenes,
    maps_from_heads,
    model_predictor,
    oracle_predictor,
    scene_passes,
)
from .loss import HEAD_ORDER, huber, huber_loss
from .trainer import (
    METRICS_SCHEMA,
    TrainConfig,
    TrainResult,
    carve_validation,
    ensure_vqvae,
    overfit_one_batch,
    select_ids,
    train,
)

__all__ = [
    "BASELINE_ACCURACY",
    "BASELINE_PARAMS",
    "EVAL_SCHEMA",
    "EvalReport",
    "GraspSamples",
    "HEAD_ORDER",
    "METRICS_SCHEMA",
    "RGINNET_SPLIT_ACCURACY",
    "TrainConfig",
    "TrainResult",
    "carve_validation",
    "degenerate_predictor",
    "ensure_vqvae",
    "eval_frame_scenes",
    "evaluate_model",
    "evaluate_scenes",
    "huber",
    "huber_loss",
    "maps_from_heads",
    "model_predictor",
    "oracle_predictor",
    "overfit_one_batch",
    "scene_passes",
    "select_ids",
    "train",
]
