"""Command-line interface: convert, train, eval, predict, viz.

Every failure raised by the toolkit exits with code 1 and a single
machine-parseable stderr line:

    error category=<category> message=<text>

The cache root can come from --data/--out flags or the GRASPGEN_CACHE
environment variable.
"""

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from .config import CACHE_ENV, load_run_config
from .core.maps import decode_grasps, encode_target_maps
from .core.metric import MetricThresholds
from .dataset import (
    SplitSpec,
    apply_transform,
    identity_transform,
    load_scene,
    make_splits,
    read_cache_index,
    write_cache,
)
from .errors import GraspGenError, InvalidConfigError, InvalidInputError
from .learn import TrainConfig, evaluate_model, maps_from_heads, train
from .models import load_checkpoint
from .viz import save_prediction_viz

PREDICT_SCHEMA = "graspgen-predict@1"


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GraspGenError as exc:
            click.echo(f"error category={exc.category} message={exc}", err=True)
            sys.exit(1)

    return wrapper


def _cache_dir(config):
    cache = config.resolved()["cache"]
    if not cache:
        raise InvalidConfigError(
            f"no cache directory: pass --data or set {CACHE_ENV}"
        )
    return cache


def _echo_config(config):
    click.echo("config " + json.dumps(config.resolved(), sort_keys=True))


@click.group()
def main():
    """Grasp detection toolkit: dataset conversion, training, evaluation,
    prediction, and visualization."""


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True),
              help="Raw Cornell-layout dataset directory.")
@click.option("--out", envvar=CACHE_ENV, required=True, type=click.Path(),
              help=f"Cache directory to write (or ${CACHE_ENV}).")
@click.option("--shape", default="480x640", show_default=True,
              help="Depth image size as HxW.")
@guarded
def convert(data, out, shape):
    """Convert a raw dataset tree into the preprocessed cache."""
    try:
        h, w = (int(v) for v in shape.lower().split("x"))
    except ValueError:
        raise InvalidConfigError(f"--shape must look like 480x640, got {shape!r}")
    summary = write_cache(data, out, shape=(h, w))
    if summary["missing"]:
        for path in summary["missing"]:
            click.echo(f"missing {path}", err=True)
        click.echo(
            f"error category=parse-error message={len(summary['missing'])} "
            "missing files", err=True)
        sys.exit(1)
    if summary["scenes"] == 0:
        click.echo("error category=invalid-input message=no scenes found", err=True)
        sys.exit(1)
    click.echo(
        f"{summary['scenes']} scenes, {summary['positives']} positive, "
        f"{summary['negatives']} negative"
    )
    if summary["skipped_groups"]:
        click.echo(f"skipped {summary['skipped_groups']} NaN rectangle groups")


def _common_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True),
                     help="YAML run configuration."),
        click.option("--seed", type=int, default=None, help="Random seed."),
        click.option("--data", "cache", type=click.Path(), default=None,
                     help=f"Preprocessed cache directory (or ${CACHE_ENV})."),
        click.option("--model", type=click.Choice(["ginnet", "rginnet"]),
                     default=None, help="Model kind."),
        click.option("--label-fraction", type=float, default=None,
                     help="Fraction of train scenes with labels used."),
        click.option("--test-fraction", type=float, default=None,
                     help="Fraction of scenes held out for test."),
        click.option("--iou-min", type=float, default=None,
                     help="Rectangle metric IOU threshold."),
        click.option("--angle-max", type=float, default=None,
                     help="Rectangle metric angle threshold, degrees."),
        click.option("--out", type=click.Path(), default=None,
                     help="Output directory or file."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _thresholds(config):
    return MetricThresholds(iou_min=config.iou_min, angle_max_deg=config.angle_max)


def _split_spec(config):
    return SplitSpec(
        test_fraction=config.test_fraction,
        label_fraction=config.label_fraction,
        seed=config.seed,
    )


@main.command(name="train")
@_common_options
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--vqvae-checkpoint", type=click.Path(exists=True), default=None)
@click.option("--multiplicity", type=int, default=None)
@click.option("--scene-fraction", type=float, default=None)
@click.option("--out-size", type=int, default=None)
@guarded
def cmd_train(config_path, cache, seed, model, label_fraction, test_fraction,
              iou_min, angle_max, out, epochs, batch_size, vqvae_checkpoint,
              multiplicity, scene_fraction, out_size):
    """Train a model on the preprocessed cache."""
    config = load_run_config(
        config_path, cache=cache, seed=seed, model=model,
        label_fraction=label_fraction, test_fraction=test_fraction,
        iou_min=iou_min, angle_max=angle_max,
        out=out, epochs=epochs, batch_size=batch_size,
        vqvae_checkpoint=vqvae_checkpoint, multiplicity=multiplicity,
        scene_fraction=scene_fraction, out_size=out_size,
    )
    _echo_config(config)
    if not config.out:
        raise InvalidConfigError("--out run directory is required for train")
    train_config = TrainConfig(
        model=config.model,
        epochs=config.epochs,
        batch_size=config.batch_size,
        lr=config.lr,
        seed=config.seed,
        split=_split_spec(config),
        multiplicity=config.multiplicity,
        thresholds=_thresholds(config),
        out_size=config.out_size,
        workers=config.workers,
        scene_fraction=config.scene_fraction,
        vqvae_checkpoint=config.vqvae_checkpoint,
        vqvae_epochs=config.vqvae_epochs,
    )
    result = train(train_config, _cache_dir(config), config.out)
    click.echo(
        f"best val accuracy {result.best_accuracy:.4f}; "
        f"checkpoints in {config.out}"
    )


@main.command(name="eval")
@_common_options
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--out-size", type=int, default=None)
@guarded
def cmd_eval(config_path, cache, seed, model, label_fraction, test_fraction,
             iou_min, angle_max, out, checkpoint, out_size):
    """Evaluate a checkpoint on the test split of the cache."""
    config = load_run_config(
        config_path, cache=cache, seed=seed, model=model,
        label_fraction=label_fraction, test_fraction=test_fraction,
        iou_min=iou_min, angle_max=angle_max,
        out=out, checkpoint=checkpoint, out_size=out_size,
    )
    _echo_config(config)
    model_obj, payload = load_checkpoint(config.checkpoint)
    cache_dir = _cache_dir(config)
    ids = sorted(rec["id"] for rec in read_cache_index(cache_dir))
    _, _, test_ids = make_splits(ids, _split_spec(config))
    mode = "rgbd" if payload["kind"] == "ginnet" else "rgb"
    report = evaluate_model(
        model_obj, mode, cache_dir, test_ids, _thresholds(config),
        model_id=f"{payload['kind']}:{Path(config.checkpoint).name}",
        out_size=config.out_size,
    )
    click.echo(f"accuracy {report.accuracy:.4f} over {len(report.results)} scenes")
    if config.out:
        path = report.to_jsonl(config.out)
        click.echo(f"report written to {path}")


def _load_predict_scene(image_path, depth_path, mode):
    from PIL import Image

    from .dataset.cornell import SceneRecord

    rgb = np.asarray(Image.open(image_path).convert("RGB"))
    if depth_path:
        depth = np.load(depth_path)
    elif mode == "rgbd":
        raise InvalidInputError("ginnet checkpoints need --depth <file.npy>")
    else:
        depth = np.ones(rgb.shape[:2], dtype=np.float32)
    return SceneRecord(id=Path(image_path).stem, rgb=rgb, depth=depth)


@main.command(name="predict")
@click.argument("image", type=click.Path(exists=True))
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--depth", "depth_path", type=click.Path(exists=True), default=None,
              help="Depth array (.npy) matching the image, meters.")
@click.option("--k", type=int, default=1, show_default=True,
              help="Number of grasps to report.")
@click.option("--out-size", type=int, default=224, show_default=True)
@guarded
def cmd_predict(image, checkpoint, depth_path, k, out_size):
    """Predict top-k grasps for one image; prints one JSON line per grasp."""
    import torch

    from .dataset import normalize_input

    model, payload = load_checkpoint(checkpoint)
    mode = "rgbd" if payload["kind"] == "ginnet" else "rgb"
    scene = _load_predict_scene(image, depth_path, mode)
    transform = identity_transform(scene, out_size)
    warped = apply_transform(scene, transform, out_size)
    tensor = normalize_input(warped, mode, transform, out_size)
    with torch.no_grad():
        heads = model(torch.from_numpy(tensor.data[None]))
    maps = maps_from_heads(heads, 0)
    grasps = decode_grasps(maps, k=k)
    click.echo(json.dumps(
        {"schema": PREDICT_SCHEMA, "checkpoint": str(checkpoint),
         "image": str(image), "kind": payload["kind"]},
        sort_keys=True))
    for grasp in grasps:
        row, col = transform.source_point(grasp.center)
        click.echo(json.dumps(
            {
                "center_row": round(row, 2),
                "center_col": round(col, 2),
                "angle_deg": round(math.degrees(grasp.angle), 2),
                "width_px": round(grasp.width / transform.zoom, 2),
                "quality": round(grasp.quality, 4),
            },
            sort_keys=True))


@main.command(name="viz")
@click.option("--data", "cache", envvar=CACHE_ENV, required=True,
              type=click.Path(exists=True),
              help=f"Preprocessed cache directory (or ${CACHE_ENV}).")
@click.option("--scene", "scene_id", required=True, help="Scene id, e.g. pcd0100.")
@click.option("--checkpoint", type=click.Path(exists=True), default=None,
              help="Render this checkpoint's prediction instead of ground truth.")
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--out-size", type=int, default=224, show_default=True)
@guarded
def cmd_viz(cache, scene_id, checkpoint, k, out, out_size):
    """Write overlay + quality/angle/width heatmaps for a scene."""
    records = {rec["id"]: rec for rec in read_cache_index(cache)}
    if scene_id not in records:
        raise InvalidInputError(f"scene {scene_id!r} not in cache {cache}")
    scene = load_scene(cache, records[scene_id])
    warped = apply_transform(scene, identity_transform(scene, out_size), out_size)
    if checkpoint:
        import torch

        from .dataset import normalize_input

        model, payload = load_checkpoint(checkpoint)
        mode = "rgbd" if payload["kind"] == "ginnet" else "rgb"
        tensor = normalize_input(warped, mode, out_size=out_size)
        with torch.no_grad():
            heads = model(torch.from_numpy(tensor.data[None]))
        maps = maps_from_heads(heads, 0)
        stem = f"{scene_id}_{payload['kind']}"
    else:
        maps = encode_target_maps(warped.positives, (out_size, out_size))
        stem = f"{scene_id}_truth"
    grasps = decode_grasps(maps, k=k)
    paths = save_prediction_viz(warped.rgb, maps, grasps, out, stem=stem)
    for path in paths:
        click.echo(str(path))


if __name__ == "__main__":
    main()
