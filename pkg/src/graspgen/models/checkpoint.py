"""Checkpoint serialization with an explicit format version tag.

A checkpoint is a torch file holding: version tag, model kind, spec dict,
state dict, seed, and free-form extra metadata. Loading verifies the tag
and rebuilds the model from its spec before restoring weights.
"""

from pathlib import Path

import torch

from .ginnet import GINNetSpec, build_ginnet
from .rginnet import assemble_rginnet
from .vqvae import VQVAE, VQVAESpec
from ..errors import VersionError

CKPT_VERSION = "graspgen-ckpt@1"
KINDS = ("ginnet", "rginnet", "vqvae")


def save_checkpoint(path, kind, spec_dict, model, seed, extra=None):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    payload = {
        "version": CKPT_VERSION,
        "kind": kind,
        "spec": spec_dict,
        "state": model.state_dict(),
        "seed": int(seed),
        "extra": dict(extra or {}),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)
    return path


def load_payload(path):
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise VersionError(f"{path}: unreadable checkpoint ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("version") != CKPT_VERSION:
        found = payload.get("version") if isinstance(payload, dict) else None
        raise VersionError(f"{path}: version {found!r}, expected {CKPT_VERSION!r}")
    return payload


def build_from_payload(payload):
    kind = payload["kind"]
    spec = payload["spec"]
    seed = payload.get("seed", 0)
    if kind == "ginnet":
        model = build_ginnet(GINNetSpec.from_dict(spec), seed=seed)
    elif kind == "vqvae":
        model = VQVAE(VQVAESpec.from_dict(spec), seed=seed)
    elif kind == "rginnet":
        vq = VQVAE(VQVAESpec.from_dict(spec["vqvae"]), seed=seed)
        model = assemble_rginnet(vq, GINNetSpec.from_dict(spec["ginnet"]), seed=seed)
    else:
        raise VersionError(f"unknown model kind {kind!r}")
    model.load_state_dict(payload["state"])
    model.eval()
    return model


def load_checkpoint(path):
    """Load (model, payload) from a checkpoint file."""
    payload = load_payload(path)
    return build_from_payload(payload), payload
