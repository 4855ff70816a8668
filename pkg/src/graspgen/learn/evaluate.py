"""Rectangle-metric evaluation and report serialization.

A scene passes when its top-1 decoded grasp clears the rectangle metric
against any of the scene's positive rectangles. Scenes without positives
are excluded from the accuracy and listed in the report metadata.

Reference results for the same benchmark are embedded for report
comparison: accuracy (percent) and trainable parameter counts, plus the
RGI-NNet accuracy ladder by labelled fraction.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..core.maps import GraspMapSet, decode_grasps
from ..core.metric import MetricThresholds, rectangle_metric
from ..dataset import apply_transform, identity_transform, load_scene, normalize_input, read_cache_index
from ..errors import DegenerateGraspError, InvalidGeometryError

EVAL_SCHEMA = "graspgen-eval@1"

BASELINE_ACCURACY = {"gg-cnn": 73.0, "gr-convnet": 97.7, "gi-nnet": 98.87}
BASELINE_PARAMS = {"gr-convnet": 1_900_900, "gi-nnet": 592_300}
RGINNET_SPLIT_ACCURACY = {
    0.1: 92.1348,
    0.3: 95.5056,
    0.5: 95.5056,
    0.7: 96.6292,
    0.9: 95.5056,
}


@dataclass
class EvalReport:
    accuracy: float
    results: list
    excluded: list
    thresholds: MetricThresholds
    model_id: str = ""
    baselines: dict = field(default_factory=lambda: {
        "accuracy": dict(BASELINE_ACCURACY),
        "params": dict(BASELINE_PARAMS),
    })

    def __post_init__(self):
        if self.results:
            mean = float(np.mean([1.0 if r["passed"] else 0.0 for r in self.results]))
            assert abs(mean - self.accuracy) < 1e-12

    def to_jsonl(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            header = {
                "schema": EVAL_SCHEMA,
                "model": self.model_id,
                "iou_min": self.thresholds.iou_min,
                "angle_max_deg": self.thresholds.angle_max_deg,
                "excluded": sorted(self.excluded),
                "baselines": self.baselines,
            }
            f.write(json.dumps(header, sort_keys=True) + "\n")
            for rec in sorted(self.results, key=lambda r: r["id"]):
                f.write(json.dumps(rec, sort_keys=True) + "\n")
            summary = {"accuracy": self.accuracy, "scenes": len(self.results)}
            f.write(json.dumps(summary, sort_keys=True) + "\n")
        return path


def maps_from_heads(heads, index=0):
    """One batch item of model output as a clipped GraspMapSet."""
    def plane(t):
        return t[index, 0].detach().cpu().numpy().astype(np.float32)

    return GraspMapSet(
        quality=np.clip(plane(heads.quality), 0.0, 1.0),
        sin2=np.clip(plane(heads.sin2), -1.0, 1.0),
        cos2=np.clip(plane(heads.cos2), -1.0, 1.0),
        width=np.clip(plane(heads.width), 0.0, 1.0),
    )


def scene_passes(grasp, positives, thresholds):
    """Rectangle metric that treats degenerate predictions as failures."""
    try:
        return rectangle_metric(grasp, positives, thresholds)
    except (DegenerateGraspError, InvalidGeometryError):
        return False


def evaluate_scenes(predict, scenes, thresholds=None, model_id=""):
    """Score top-1 predicted grasps over SceneRecords already in the
    network frame (224 x 224, rectangles aligned with the tensor).

    ``predict`` maps a SceneRecord to a GraspMapSet.
    """
    thresholds = thresholds or MetricThresholds()
    results, excluded = [], []
    for scene in sorted(scenes, key=lambda s: s.id):
        if not scene.positives:
            excluded.append(scene.id)
            continue
        maps = predict(scene)
        top = decode_grasps(maps, k=1)[0]
        passed = scene_passes(top, scene.positives, thresholds)
        results.append({"id": scene.id, "passed": bool(passed)})
    accuracy = (
        float(np.mean([1.0 if r["passed"] else 0.0 for r in results]))
        if results
        else 0.0
    )
    return EvalReport(accuracy, results, excluded, thresholds, model_id)


def model_predictor(model, mode, out_size=224):
    """Wrap a network as a SceneRecord -> GraspMapSet callable."""
    def predict(scene):
        tensor = normalize_input(scene, mode, out_size=out_size)
        x = torch.from_numpy(tensor.data[None])
        model.eval()
        with torch.no_grad():
            heads = model(x)
        return maps_from_heads(heads, 0)

    return predict


def eval_frame_scenes(cache_dir, ids, out_size=224):
    """Load cache scenes and warp each to the evaluation crop frame."""
    wanted = set(ids)
    scenes = []
    for rec in read_cache_index(cache_dir):
        if rec["id"] not in wanted:
            continue
        scene = load_scene(cache_dir, rec)
        scenes.append(apply_transform(scene, identity_transform(scene, out_size), out_size))
    return scenes


def evaluate_model(model, mode, cache_dir, ids, thresholds=None, model_id="",
                   out_size=224):
    from ..errors import InvalidInputError

    if not ids:
        raise InvalidInputError("evaluation needs a non-empty id list")
    scenes = eval_frame_scenes(cache_dir, ids, out_size)
    return evaluate_scenes(
        model_predictor(model, mode, out_size), scenes, thresholds, model_id
    )


def oracle_predictor(shape=(224, 224)):
    """Predictor that re-encodes each scene's own ground truth (accuracy 1)."""
    from ..core.maps import encode_target_maps

    def predict(scene):
        return encode_target_maps(scene.positives, shape)

    return predict


def degenerate_predictor(shape=(224, 224)):
    """All-zero maps: the deterministic tie-break grasp at (0, 0)."""
    def predict(scene):
        zero = np.zeros(shape, dtype=np.float32)
        return GraspMapSet(zero, zero.copy(), zero.copy(), zero.copy())

    return predict
