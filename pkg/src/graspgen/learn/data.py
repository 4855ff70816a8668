"""Torch dataset over the preprocessed cache.

Training items are seeded augmentation draws: item i covers scene
ids[i // multiplicity], draw i % multiplicity, with the augmentation seed
derived from (seed, scene id, draw) so any worker layout sees the same
stream. Evaluation items use the plain centered crop.
"""

import numpy as np
import torch
from torch.utils.data import Dataset

from ..core.maps import encode_target_maps
from ..dataset import (
    augment,
    apply_transform,
    derive_seed,
    identity_transform,
    load_scene,
    normalize_input,
    read_cache_index,
)


class GraspSamples(Dataset):
    def __init__(self, cache_dir, ids, mode="rgbd", seed=0, train=True,
                 multiplicity=1, out_size=224):
        self.cache_dir = cache_dir
        self.mode = mode
        self.seed = seed
        self.train = train
        self.multiplicity = multiplicity if train else 1
        self.out_size = out_size
        wanted = set(ids)
        self.records = {
            rec["id"]: rec
            for rec in read_cache_index(cache_dir)
            if rec["id"] in wanted
        }
        missing = wanted - set(self.records)
        if missing:
            raise KeyError(f"ids not in cache: {sorted(missing)[:5]}")
        self.ids = sorted(wanted)

    def __len__(self):
        return len(self.ids) * self.multiplicity

    def scene_for(self, index):
        sid = self.ids[index // self.multiplicity]
        scene = load_scene(self.cache_dir, self.records[sid])
        if self.train:
            draw = index % self.multiplicity
            out, transform = augment(
                scene, derive_seed(self.seed, sid, draw), self.out_size
            )
        else:
            transform = identity_transform(scene, self.out_size)
            out = apply_transform(scene, transform, self.out_size)
        return out, transform

    def __getitem__(self, index):
        scene, transform = self.scene_for(index)
        tensor = normalize_input(scene, self.mode, transform, self.out_size)
        target = encode_target_maps(
            scene.positives, (self.out_size, self.out_size)
        ).stacked()
        return (
            torch.from_numpy(np.ascontiguousarray(tensor.data)),
            torch.from_numpy(np.ascontiguousarray(target)),
            scene.id,
        )
