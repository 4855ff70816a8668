"""Grasp map loss: smooth L1 (Huber) per head, summed over the four heads.

Per element, with d = target - prediction:
    z = 0.5 * d^2        if |d| < 1
    z = |d| - 0.5        otherwise
Each head contributes the mean of z over its elements; the total is the
unweighted sum of the four head means.
"""

import torch
import torch.nn.functional as F

HEAD_ORDER = ("quality", "sin2", "cos2", "width")


def huber(target, pred):
    """Elementwise smooth L1 between two tensors, reduced to the mean."""
    if target.shape != pred.shape:
        raise ValueError(f"shape mismatch: {tuple(target.shape)} vs {tuple(pred.shape)}")
    return F.smooth_l1_loss(pred, target, beta=1.0, reduction="mean")


def huber_loss(target, pred):
    """Total loss over the four grasp maps.

    ``target`` and ``pred`` are either HeadMaps-style namedtuples of
    (B, 1, H, W) tensors or stacked (B, 4, H, W) tensors in HEAD_ORDER.
    """
    target_heads = _heads(target)
    pred_heads = _heads(pred)
    total = None
    for t, p in zip(target_heads, pred_heads):
        term = huber(t, p)
        total = term if total is None else total + term
    return total


def _heads(maps):
    if isinstance(maps, torch.Tensor):
        if maps.dim() != 4 or maps.shape[1] != len(HEAD_ORDER):
            raise ValueError(f"stacked maps must be (B, 4, H, W), got {tuple(maps.shape)}")
        return [maps[:, i : i + 1] for i in range(len(HEAD_ORDER))]
    return list(maps)
