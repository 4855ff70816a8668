"""Network architectures: GI-NNet, VQVAE, and the RGI-NNet assembly."""

from .checkpoint import (
    CKPT_VERSION,
    build_from_payload,
    load_checkpoint,
    load_payload,
    save_checkpoint,
)
from .ginnet import (
    GINNET_SPEC_VERSION,
    GINNet,
    GINNetSpec,
    HeadMaps,
    InceptionBlock,
    InceptionBlockSpec,
    build_ginnet,
    count_params,
    he_fan_in,
    init_he,
)
from .rginnet import RGINNet, assemble_rginnet
from .vqvae import (
    VQVAE,
    VQVAEOutput,
    VQVAESpec,
    VectorQuantizer,
    codebook_usage,
    quantize,
    train_vqvae,
    vqvae_loss,
)

__all__ = [
    "CKPT_VERSION",
    "GINNET_SPEC_VERSION",
    "GINNet",
    "GINNetSpec",
    "HeadMaps",
    "InceptionBlock",
    "InceptionBlockSpec",
    "RGINNet",
    "VQVAE",
    "VQVAEOutput",
    "VQVAESpec",
    "VectorQuantizer",
    "assemble_rginnet",
    "build_from_payload",
    "build_ginnet",
    "codebook_usage",
    "count_params",
    "he_fan_in",
    "init_he",
    "load_checkpoint",
    "load_payload",
    "quantize",
    "save_checkpoint",
    "train_vqvae",
    "vqvae_loss",
]
