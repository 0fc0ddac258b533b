"""Fixed average-pool codec standing in for a learned video VAE.

Encode is an 8x8 per-channel area average, decode a bilinear upsample.
Both are unit-preserving: a constant image encodes to the same constant.
"""

from __future__ import annotations

import numpy as np

from .imageops import resize_bilinear, resize_nearest

LATENT_FACTOR = 8


def _check_divisible(h: int, w: int) -> None:
    if h % LATENT_FACTOR or w % LATENT_FACTOR:
        raise ValueError(f"frame size {(h, w)} not divisible by {LATENT_FACTOR}")


def encode_latent(clip: np.ndarray) -> np.ndarray:
    """(T, H, W, C) frames -> (T, C, H/8, W/8) float64 area averages."""
    clip = np.asarray(clip)
    T, H, W, C = clip.shape
    _check_divisible(H, W)
    f = LATENT_FACTOR
    x = clip.astype(np.float64).reshape(T, H // f, f, W // f, f, C)
    return x.mean(axis=(2, 4)).transpose(0, 3, 1, 2)


def decode_latent(latent: np.ndarray) -> np.ndarray:
    """(T, C, h, w) -> (T, 8h, 8w, C) float64 bilinear reconstruction."""
    latent = np.asarray(latent, dtype=np.float64)
    T, C, h, w = latent.shape
    f = LATENT_FACTOR
    out = np.empty((T, h * f, w * f, C), dtype=np.float64)
    for t in range(T):
        out[t] = resize_bilinear(latent[t].transpose(1, 2, 0), (h * f, w * f))
    return out


def encode_mask_latent(mask: np.ndarray) -> np.ndarray:
    """(T, H, W) binary mask -> (T, 1, H/8, W/8), still binary (nearest)."""
    mask = np.asarray(mask)
    T, H, W = mask.shape
    _check_divisible(H, W)
    f = LATENT_FACTOR
    out = np.empty((T, 1, H // f, W // f), dtype=np.float64)
    for t in range(T):
        out[t, 0] = resize_nearest(mask[t], (H // f, W // f)).astype(np.float64)
    return out
