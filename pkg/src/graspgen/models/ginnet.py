"""GI-NNet: stem convolutions, five residual inception blocks, transpose
convolutions, and four per-pixel heads (quality, sin2, cos2, width).

The stem downsamples by 4 (two stride-2 convolutions) and the two transpose
convolutions bring the maps back to the input resolution, so outputs always
match the input h x w. Channel widths live in GINNetSpec and are chosen to
land the default model near 600k trainable parameters.
"""

import math
from collections import namedtuple
from dataclasses import asdict, dataclass

import torch
import yaml
from torch import nn

from ..errors import InvalidSpecError

GINNET_SPEC_VERSION = "graspgen-ginnet-spec@1"

HeadMaps = namedtuple("HeadMaps", ["quality", "sin2", "cos2", "width"])


@dataclass(frozen=True)
class InceptionBlockSpec:
    """Branch widths; the four outputs concatenate back to the input width."""

    b1: int = 32
    b3_reduce: int = 56
    b3: int = 64
    b5_reduce: int = 12
    b5: int = 16
    pool_proj: int = 16
    residual: bool = True

    @property
    def out_channels(self):
        return self.b1 + self.b3 + self.b5 + self.pool_proj


@dataclass(frozen=True)
class GINNetSpec:
    in_channels: int = 4
    stem: tuple = ((32, 9, 1, 4), (64, 4, 2, 1), (128, 4, 2, 1))  # (out, k, s, p)
    blocks: tuple = tuple(InceptionBlockSpec() for _ in range(5))
    upsample: tuple = ((64, 4, 2, 1), (32, 4, 2, 1))
    head_kernel: int = 3
    dropout: float = 0.1

    def validate(self):
        if self.in_channels < 1:
            raise InvalidSpecError(f"in_channels must be >= 1, got {self.in_channels}")
        if not self.stem or not self.upsample:
            raise InvalidSpecError("stem and upsample must be non-empty")
        width = self.stem[-1][0]
        for i, block in enumerate(self.blocks):
            if block.out_channels != width:
                raise InvalidSpecError(
                    f"block {i}: branch sum {block.out_channels} != input width "
                    f"{width} (residual addition needs equal shapes)"
                )
        return self

    def to_dict(self):
        d = asdict(self)
        d["version"] = GINNET_SPEC_VERSION
        d["blocks"] = [asdict(b) for b in self.blocks]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        version = d.pop("version", GINNET_SPEC_VERSION)
        if version != GINNET_SPEC_VERSION:
            raise InvalidSpecError(f"unknown spec version {version!r}")
        d["blocks"] = tuple(InceptionBlockSpec(**b) for b in d.get("blocks", ()))
        d["stem"] = tuple(tuple(layer) for layer in d["stem"])
        d["upsample"] = tuple(tuple(layer) for layer in d["upsample"])
        return cls(**d)

    def save_yaml(self, path):
        with open(path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True)

    @classmethod
    def load_yaml(cls, path):
        with open(path) as f:
            return cls.from_dict(yaml.safe_load(f))


class InceptionBlock(nn.Module):
    """1x1 / 3x3 / 5x5 / pooled-projection branches, concatenated, added to
    the input, then batch-normalized: y = BN(concat(branches) + x)."""

    def __init__(self, in_channels, spec):
        super().__init__()
        if spec.out_channels != in_channels:
            raise InvalidSpecError(
                f"branch sum {spec.out_channels} != in_channels {in_channels}"
            )
        self.branch1 = nn.Sequential(
            nn.Conv2d(in_channels, spec.b1, 1), nn.ReLU(inplace=True)
        )
        self.branch3 = nn.Sequential(
            nn.Conv2d(in_channels, spec.b3_reduce, 1),
            nn.ReLU(inplace=True),
            nn.Conv2d(spec.b3_reduce, spec.b3, 3, padding=1),
            nn.ReLU(inplace=True),
        )
        self.branch5 = nn.Sequential(
            nn.Conv2d(in_channels, spec.b5_reduce, 1),
            nn.ReLU(inplace=True),
            nn.Conv2d(spec.b5_reduce, spec.b5, 5, padding=2),
            nn.ReLU(inplace=True),
        )
        self.branch_pool = nn.Sequential(
            nn.MaxPool2d(3, stride=1, padding=1),
            nn.Conv2d(in_channels, spec.pool_proj, 1),
            nn.ReLU(inplace=True),
        )
        self.residual = spec.residual
        self.bn = nn.BatchNorm2d(in_channels)

    def forward(self, x):
        y = torch.cat(
            [self.branch1(x), self.branch3(x), self.branch5(x), self.branch_pool(x)],
            dim=1,
        )
        if self.residual:
            y = y + x
        return self.bn(y)


class GINNet(nn.Module):
    def __init__(self, spec=None):
        super().__init__()
        self.spec = (spec or GINNetSpec()).validate()
        s = self.spec
        stem = []
        ch = s.in_channels
        for out, k, stride, pad in s.stem:
            stem += [nn.Conv2d(ch, out, k, stride=stride, padding=pad),
                     nn.ReLU(inplace=True)]
            ch = out
        self.stem = nn.Sequential(*stem)
        self.drop_in = nn.Dropout2d(s.dropout)
        self.blocks = nn.ModuleList(InceptionBlock(ch, b) for b in s.blocks)
        self.drop_mid = nn.Dropout2d(s.dropout)
        self.mid_index = len(s.blocks) // 2
        self.drop_out = nn.Dropout2d(s.dropout)
        up = []
        for out, k, stride, pad in s.upsample:
            up += [nn.ConvTranspose2d(ch, out, k, stride=stride, padding=pad),
                   nn.ReLU(inplace=True)]
            ch = out
        self.upsample = nn.Sequential(*up)
        kh = s.head_kernel
        self.head_quality = nn.Conv2d(ch, 1, kh, padding=kh // 2)
        self.head_sin = nn.Conv2d(ch, 1, kh, padding=kh // 2)
        self.head_cos = nn.Conv2d(ch, 1, kh, padding=kh // 2)
        self.head_width = nn.Conv2d(ch, 1, kh, padding=kh // 2)

    def forward(self, x):
        if x.shape[1] != self.spec.in_channels:
            raise InvalidSpecError(
                f"input has {x.shape[1]} channels, spec wants {self.spec.in_channels}"
            )
        h = self.drop_in(self.stem(x))
        for i, block in enumerate(self.blocks):
            h = block(h)
            if i == self.mid_index:
                h = self.drop_mid(h)
        h = self.upsample(self.drop_out(h))
        return HeadMaps(
            quality=torch.sigmoid(self.head_quality(h)),
            sin2=torch.tanh(self.head_sin(h)),
            cos2=torch.tanh(self.head_cos(h)),
            width=self.head_width(h),  # linear; clipped at decode time
        )


def he_fan_in(weight, transposed=False):
    """Fan-in as used by the initializer: input channels x kernel area."""
    k = weight.shape[2] * weight.shape[3] if weight.dim() == 4 else 1
    in_ch = weight.shape[0] if transposed else weight.shape[1]
    return in_ch * k


def init_he(module, generator):
    """He-normal init, std sqrt(2 / fan_in), zero biases, identity BN."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            fan_in = he_fan_in(m.weight, isinstance(m, nn.ConvTranspose2d))
            std = math.sqrt(2.0 / fan_in)
            with torch.no_grad():
                m.weight.normal_(0.0, std, generator=generator)
                if m.bias is not None:
                    m.bias.zero_()
        elif isinstance(m, nn.BatchNorm2d):
            with torch.no_grad():
                m.weight.fill_(1.0)
                m.bias.zero_()
    return module


def build_ginnet(spec=None, seed=0):
    """Construct and He-initialize a GINNet; deterministic in (spec, seed)."""
    model = GINNet(spec)
    generator = torch.Generator().manual_seed(int(seed))
    return init_he(model, generator)


def count_params(model):
    """Number of trainable scalars."""
    return sum(p.numel() for p in model.parameters() if p.requires_grad)
