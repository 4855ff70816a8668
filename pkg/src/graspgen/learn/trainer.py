"""Training loops for GI-NNet and RGI-NNet.

Adam at lr 0.001, batch size 8 by default. Each epoch logs mean train loss
and validation accuracy (rectangle metric on a carve-out of the labelled
train split) to a line-delimited metrics file; the best-by-validation and
final checkpoints are kept. Deterministic given config + seed with the
default single-process loader.
"""

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader

from .data import GraspSamples
from .evaluate import evaluate_model
from .loss import huber_loss
from ..core.metric import MetricThresholds
from ..dataset import DEFAULT_MULTIPLICITY, SplitSpec, make_splits, read_cache_index
from ..errors import InvalidConfigError, TrainingDivergedError
from ..models import (
    GINNetSpec,
    VQVAESpec,
    assemble_rginnet,
    build_ginnet,
    load_checkpoint,
    save_checkpoint,
    train_vqvae,
)

METRICS_SCHEMA = "graspgen-metrics@1"
MODEL_KINDS = ("ginnet", "rginnet")


@dataclass(frozen=True)
class TrainConfig:
    model: str = "ginnet"
    epochs: int = 50
    batch_size: int = 8
    lr: float = 0.001
    seed: int = 0
    split: SplitSpec = field(default_factory=SplitSpec)
    multiplicity: int = DEFAULT_MULTIPLICITY
    val_fraction: float = 0.1
    thresholds: MetricThresholds = field(default_factory=MetricThresholds)
    out_size: int = 224
    workers: int = 0
    scene_fraction: float = 1.0
    vqvae_checkpoint: str = None
    vqvae_epochs: int = 100
    vqvae_multiplicity: int = 2

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise InvalidConfigError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.batch_size < 1:
            raise InvalidConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr <= 0:
            raise InvalidConfigError(f"lr must be > 0, got {self.lr}")
        if not 0 < self.scene_fraction <= 1:
            raise InvalidConfigError(f"scene_fraction must be in (0, 1], got {self.scene_fraction}")

    @property
    def mode(self):
        return "rgbd" if self.model == "ginnet" else "rgb"


@dataclass
class TrainResult:
    history: dict
    best_path: Path
    last_path: Path
    best_accuracy: float
    splits: tuple


def select_ids(cache_dir, config):
    """All cache ids, optionally a seeded deterministic fraction of them."""
    ids = sorted(rec["id"] for rec in read_cache_index(cache_dir))
    if config.scene_fraction < 1.0:
        rng = np.random.default_rng(config.seed)
        keep = max(2, int(len(ids) * config.scene_fraction))
        ids = sorted(np.array(ids)[rng.permutation(len(ids))[:keep]].tolist())
    return ids


def carve_validation(labelled, val_fraction):
    """Split the labelled ids into (train, val); val floors at one scene."""
    if len(labelled) < 2:
        return list(labelled), list(labelled)
    n_val = max(1, int(len(labelled) * val_fraction))
    return list(labelled[:-n_val]), list(labelled[-n_val:])


def _vqvae_images(cache_dir, ids, config):
    from ..dataset import augment, derive_seed, load_scene, normalize_input

    records = {rec["id"]: rec for rec in read_cache_index(cache_dir)}
    images = []
    for sid in sorted(ids):
        scene = load_scene(cache_dir, records[sid])
        for draw in range(config.vqvae_multiplicity):
            out, transform = augment(
                scene, derive_seed(config.seed, sid, "vqvae", draw), config.out_size
            )
            images.append(normalize_input(out, "rgb", transform, config.out_size).data)
    return images


def ensure_vqvae(cache_dir, unlabelled_ids, config, out_dir):
    """Load the configured VQVAE checkpoint or pretrain one on the pool."""
    if config.vqvae_checkpoint:
        model, payload = load_checkpoint(config.vqvae_checkpoint)
        if payload["kind"] != "vqvae":
            raise InvalidConfigError(
                f"{config.vqvae_checkpoint}: kind {payload['kind']!r}, expected 'vqvae'"
            )
        return model
    if not unlabelled_ids:
        raise InvalidConfigError("rginnet training needs a vqvae checkpoint or an unlabelled pool")
    images = _vqvae_images(cache_dir, unlabelled_ids, config)
    model, history = train_vqvae(
        images,
        VQVAESpec(),
        seed=config.seed,
        epochs=config.vqvae_epochs,
        batch_size=config.batch_size,
        lr=config.lr,
    )
    save_checkpoint(
        Path(out_dir) / "vqvae.pt", "vqvae", model.spec.to_dict(), model,
        config.seed, {"loss": history["loss"], "collapsed": history["collapsed"]},
    )
    return model


def build_model(config, cache_dir, unlabelled_ids, out_dir):
    if config.model == "ginnet":
        spec = GINNetSpec(in_channels=4)
        return build_ginnet(spec, seed=config.seed), spec.to_dict()
    vqvae = ensure_vqvae(cache_dir, unlabelled_ids, config, out_dir)
    model = assemble_rginnet(vqvae, GINNetSpec(in_channels=3), seed=config.seed)
    spec = {"vqvae": vqvae.spec.to_dict(), "ginnet": model.ginnet.spec.to_dict()}
    return model, spec


def train(config, cache_dir, out_dir):
    """Run the full training loop; returns a TrainResult."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(config.seed)
    ids = select_ids(cache_dir, config)
    labelled, unlabelled, test = make_splits(ids, config.split)
    train_ids, val_ids = carve_validation(labelled, config.val_fraction)
    if not train_ids:
        raise InvalidConfigError("no labelled training scenes after the split")

    model, spec_dict = build_model(config, cache_dir, unlabelled, out_dir)
    dataset = GraspSamples(
        cache_dir, train_ids, config.mode, config.seed,
        train=True, multiplicity=config.multiplicity, out_size=config.out_size,
    )
    loader = DataLoader(
        dataset,
        batch_size=config.batch_size,
        shuffle=True,
        num_workers=config.workers,
        generator=torch.Generator().manual_seed(config.seed),
    )
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(trainable, lr=config.lr)

    history = {"train_loss": [], "val_accuracy": []}
    best_accuracy = -1.0
    best_path = out_dir / "best.pt"
    last_path = out_dir / "last.pt"
    metrics_path = out_dir / "metrics.jsonl"
    with open(metrics_path, "w") as metrics:
        metrics.write(json.dumps(
            {"schema": METRICS_SCHEMA, "model": config.model, "seed": config.seed,
             "epochs": config.epochs, "batch_size": config.batch_size, "lr": config.lr},
            sort_keys=True) + "\n")
        for epoch in range(config.epochs):
            start = time.monotonic()
            model.train()
            losses = []
            for x, y, batch_ids in loader:
                heads = model(x)
                loss = huber_loss(y, torch.cat(list(heads), dim=1))
                loss_value = float(loss.detach())
                if not math.isfinite(loss_value):
                    raise TrainingDivergedError(
                        f"non-finite loss at epoch {epoch}, "
                        f"batch ids {list(batch_ids)}, lr {config.lr}"
                    )
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                losses.append(loss_value)
            train_loss = float(np.mean(losses))
            report = evaluate_model(
                model, config.mode, cache_dir, val_ids,
                config.thresholds, model_id=config.model, out_size=config.out_size,
            )
            history["train_loss"].append(train_loss)
            history["val_accuracy"].append(report.accuracy)
            metrics.write(json.dumps(
                {"epoch": epoch, "train_loss": train_loss,
                 "val_accuracy": report.accuracy,
                 "wall_time": round(time.monotonic() - start, 3)},
                sort_keys=True) + "\n")
            metrics.flush()
            if report.accuracy > best_accuracy:
                best_accuracy = report.accuracy
                save_checkpoint(best_path, config.model, spec_dict, model,
                                config.seed, {"epoch": epoch, "val_accuracy": report.accuracy})
    save_checkpoint(last_path, config.model, spec_dict, model, config.seed,
                    {"epoch": config.epochs - 1})
    return TrainResult(history, best_path, last_path, best_accuracy,
                       (labelled, unlabelled, test))


def overfit_one_batch(model, x, y, steps=200, lr=0.001, seed=0):
    """Drive one fixed batch; returns the per-step loss curve."""
    torch.manual_seed(seed)
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(trainable, lr=lr)
    model.train()
    losses = []
    for _ in range(steps):
        heads = model(x)
        loss = huber_loss(y, torch.cat(list(heads), dim=1))
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))
    return losses
