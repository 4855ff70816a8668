"""RGI-NNet: a pretrained VQVAE front end feeding GI-NNet on RGB input.

The encoder and codebook come frozen from a VQVAE checkpoint; the decoder
keeps the architecture but is freshly initialized and trains together with
the downstream GI-NNet. Input is 3-channel RGB; output is the usual four
grasp maps at input resolution.
"""

import torch
from torch import nn

from .ginnet import GINNet, GINNetSpec, init_he
from ..errors import InvalidAssemblyError


class RGINNet(nn.Module):
    def __init__(self, vqvae, ginnet):
        super().__init__()
        if vqvae.spec.in_channels != ginnet.spec.in_channels:
            raise InvalidAssemblyError(
                f"decoder reconstructs {vqvae.spec.in_channels} channels but "
                f"GI-NNet expects {ginnet.spec.in_channels}"
            )
        self.vqvae_spec = vqvae.spec
        self.encoder = vqvae.encoder
        self.quantizer = vqvae.quantizer
        self.decoder = vqvae.decoder
        self.ginnet = ginnet
        for p in self.encoder.parameters():
            p.requires_grad_(False)
        for p in self.quantizer.parameters():
            p.requires_grad_(False)

    def forward(self, x):
        with torch.no_grad():
            z_e = self.encoder(x)
            _, z_q, _ = self.quantizer(z_e)
        features = self.decoder(z_q)
        if features.shape[2:] != x.shape[2:]:
            raise InvalidAssemblyError(
                f"decoder output {tuple(features.shape[2:])} != input "
                f"{tuple(x.shape[2:])}"
            )
        return self.ginnet(features)


def assemble_rginnet(vqvae, ginnet_spec=None, seed=0):
    """Assemble RGI-NNet from a trained VQVAE.

    The VQVAE's decoder weights are re-initialized (seeded); encoder and
    quantizer are frozen. ``ginnet_spec`` defaults to the standard spec with
    a 3-channel input path.
    """
    if ginnet_spec is None:
        ginnet_spec = GINNetSpec(in_channels=vqvae.spec.in_channels)
    generator = torch.Generator().manual_seed(int(seed))
    vqvae.decoder = init_he(vqvae.make_decoder(), generator)
    ginnet = GINNet(ginnet_spec)
    init_he(ginnet, generator)
    return RGINNet(vqvae, ginnet)
