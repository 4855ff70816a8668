"""VQVAE: convolutional encoder, vector quantizer, convolutional decoder.

The quantizer snaps each spatial latent to its nearest codebook row
(Euclidean, ties to the smallest index) and passes gradients straight
through to the encoder. Training uses the standard three-term objective:
reconstruction + codebook + beta * commitment, with stop-gradients placing
the codebook term on the embeddings and the commitment term on the encoder.
"""

import logging
from collections import namedtuple
from dataclasses import asdict, dataclass

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..errors import InvalidConfigError

log = logging.getLogger(__name__)

VQVAEOutput = namedtuple("VQVAEOutput", ["recon", "z_e", "z_q_st", "z_q", "indices"])


@dataclass(frozen=True)
class VQVAESpec:
    in_channels: int = 3
    hidden: tuple = (64, 128)
    num_embeddings: int = 512  # N
    embedding_dim: int = 64    # D
    beta: float = 0.25

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["hidden"] = tuple(d.get("hidden", (64, 128)))
        return cls(**d)


def quantize(z_e, codebook):
    """Snap latents to their nearest codebook rows.

    z_e: (B, D, H, W); codebook: (N, D). Returns (z_q, indices) where z_q
    copies codebook rows exactly and indices is (B, H, W). Ties resolve to
    the smallest index.
    """
    if codebook.numel() == 0:
        raise InvalidConfigError("empty codebook")
    b, d, h, w = z_e.shape
    if codebook.shape[1] != d:
        raise InvalidConfigError(
            f"codebook dimension {codebook.shape[1]} != latent dimension {d}"
        )
    flat = z_e.permute(0, 2, 3, 1).reshape(-1, d)
    dist = (
        flat.pow(2).sum(1, keepdim=True)
        - 2.0 * flat @ codebook.t()
        + codebook.pow(2).sum(1)[None, :]
    )
    indices = dist.argmin(dim=1)
    z_q = codebook[indices].reshape(b, h, w, d).permute(0, 3, 1, 2).contiguous()
    return z_q, indices.reshape(b, h, w)


def vqvae_loss(x, recon, z_e, z_q, beta):
    """Reconstruction + codebook + beta * commitment (all mean-squared)."""
    recon_term = F.mse_loss(recon, x)
    codebook_term = F.mse_loss(z_q, z_e.detach())
    commit_term = F.mse_loss(z_e, z_q.detach())
    return recon_term + codebook_term + beta * commit_term


class VectorQuantizer(nn.Module):
    def __init__(self, num_embeddings, embedding_dim, seed=0):
        super().__init__()
        self.embedding = nn.Embedding(num_embeddings, embedding_dim)
        bound = 1.0 / num_embeddings
        generator = torch.Generator().manual_seed(int(seed))
        with torch.no_grad():
            self.embedding.weight.uniform_(-bound, bound, generator=generator)

    @property
    def codebook(self):
        return self.embedding.weight

    def forward(self, z_e):
        z_q, indices = quantize(z_e, self.embedding.weight)
        z_q_st = z_e + (z_q - z_e).detach()  # straight-through gradient path
        return z_q_st, z_q, indices


class VQVAE(nn.Module):
    def __init__(self, spec=None, seed=0):
        super().__init__()
        self.spec = spec or VQVAESpec()
        s = self.spec
        h1, h2 = s.hidden
        self.encoder = nn.Sequential(
            nn.Conv2d(s.in_channels, h1, 4, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(h1, h2, 4, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(h2, s.embedding_dim, 1),
        )
        self.quantizer = VectorQuantizer(s.num_embeddings, s.embedding_dim, seed)
        self.decoder = self.make_decoder()
        generator = torch.Generator().manual_seed(int(seed))
        from .ginnet import init_he

        init_he(self.encoder, generator)
        init_he(self.decoder, generator)

    def make_decoder(self):
        s = self.spec
        h1, h2 = s.hidden
        return nn.Sequential(
            nn.Conv2d(s.embedding_dim, h2, 1),
            nn.ReLU(inplace=True),
            nn.ConvTranspose2d(h2, h1, 4, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.ConvTranspose2d(h1, s.in_channels, 4, stride=2, padding=1),
        )

    def encode(self, x):
        if x.shape[1] != self.spec.in_channels:
            raise InvalidConfigError(
                f"input has {x.shape[1]} channels, spec wants {self.spec.in_channels}"
            )
        return self.encoder(x)

    def forward(self, x):
        z_e = self.encode(x)
        z_q_st, z_q, indices = self.quantizer(z_e)
        recon = self.decoder(z_q_st)
        return VQVAEOutput(recon, z_e, z_q_st, z_q, indices)


def codebook_usage(indices, num_embeddings):
    """Histogram of codebook hits plus a collapse flag.

    Collapse: at least 90% of sites land on fewer than 5% of the codes.
    """
    counts = np.bincount(
        np.asarray(indices, dtype=np.int64).ravel(), minlength=num_embeddings
    )
    total = counts.sum()
    top = max(1, int(np.ceil(0.05 * num_embeddings)))
    top_share = float(np.sort(counts)[::-1][:top].sum()) / max(1, total)
    return counts, top_share >= 0.90


def train_vqvae(images, spec=None, seed=0, epochs=10, batch_size=8, lr=1e-3):
    """Train a VQVAE on a list/array of (C, H, W) images.

    Returns (model, history) where history has per-epoch mean losses, the
    final codebook usage histogram, and a collapse flag (warned, not fatal).
    """
    spec = spec or VQVAESpec()
    if len(images) == 0:
        raise InvalidConfigError("empty unlabelled pool")
    torch.manual_seed(int(seed))
    model = VQVAE(spec, seed=seed)
    data = torch.as_tensor(np.stack([np.asarray(im, dtype=np.float32) for im in images]))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    order_rng = np.random.default_rng(seed)
    losses = []
    model.train()
    for _ in range(epochs):
        order = order_rng.permutation(len(data))
        epoch_losses = []
        for start in range(0, len(data), batch_size):
            batch = data[order[start : start + batch_size]]
            out = model(batch)
            loss = vqvae_loss(batch, out.recon, out.z_e, out.z_q, spec.beta)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_losses.append(float(loss.detach()))
        losses.append(float(np.mean(epoch_losses)))
    model.eval()
    with torch.no_grad():
        indices = model(data[: min(len(data), 64)]).indices
    usage, collapsed = codebook_usage(indices.numpy(), spec.num_embeddings)
    if collapsed:
        log.warning(
            "codebook collapse: >=90%% of sites map to <5%% of %d codes",
            spec.num_embeddings,
        )
    history = {"loss": losses, "usage": usage.tolist(), "collapsed": bool(collapsed)}
    return model, history
