"""Image-wise train/test splits and label-fraction selection.

Splits are deterministic in the SplitSpec alone: ids are sorted before the
seeded shuffle, so the caller's ordering never matters. Counts use floor
rounding (test first, then the labelled portion of train), with the
remainder going to the larger side.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidConfigError


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.1
    label_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise InvalidConfigError(
                f"test_fraction must be in (0, 1), got {self.test_fraction}"
            )
        if not 0.0 < self.label_fraction <= 1.0:
            raise InvalidConfigError(
                f"label_fraction must be in (0, 1], got {self.label_fraction}"
            )


def make_splits(ids, spec):
    """Partition scene ids into (train_labelled, train_unlabelled, test).

    test gets floor(test_fraction * n) ids; the labelled subset gets
    floor(label_fraction * n_train) of the remaining train ids; whatever is
    left of train is the unlabelled pool for representation pretraining.
    """
    ids = sorted(ids)
    if not ids:
        raise InvalidConfigError("make_splits needs at least one id")
    rng = np.random.default_rng(spec.seed)
    order = list(rng.permutation(len(ids)))
    shuffled = [ids[i] for i in order]
    n_test = int(len(ids) * spec.test_fraction)
    test = shuffled[:n_test]
    train = shuffled[n_test:]
    n_labelled = int(len(train) * spec.label_fraction)
    return train[:n_labelled], train[n_labelled:], test


def derive_seed(global_seed, *parts):
    """Stable per-item seed from a global seed plus string/int parts.

    Used for per-scene augmentation and per-worker loaders so parallel and
    serial runs draw identical streams.
    """
    mixed = np.random.SeedSequence(
        [int(global_seed) & 0xFFFFFFFF]
        + [_part_to_int(p) for p in parts]
    )
    return int(mixed.generate_state(1, dtype=np.uint32)[0])


def _part_to_int(part):
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    acc = 2166136261
    for byte in str(part).encode():
        acc = ((acc ^ byte) * 16777619) & 0xFFFFFFFF
    return acc
