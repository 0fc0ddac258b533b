"""Tests for the fixed 8x downsampling codec."""

import numpy as np
import pytest

from mvpedit.latent import (LATENT_FACTOR, decode_latent, encode_latent,
                            encode_mask_latent)


def test_factor_and_shapes():
    assert LATENT_FACTOR == 8
    clip = np.zeros((2, 64, 48, 3), dtype=np.uint8)
    lat = encode_latent(clip)
    assert lat.shape == (2, 3, 8, 6)
    assert lat.dtype == np.float64
    back = decode_latent(lat)
    assert back.shape == (2, 64, 48, 3)


def test_rejects_nondivisible():
    with pytest.raises(ValueError):
        encode_latent(np.zeros((1, 60, 48, 3)))
    with pytest.raises(ValueError):
        encode_mask_latent(np.zeros((1, 64, 42)))


def test_encode_matches_block_mean_oracle():
    rng = np.random.default_rng(20)
    clip = rng.integers(0, 256, (3, 32, 24, 3), dtype=np.uint8)
    lat = encode_latent(clip)
    for t in range(3):
        for c in range(3):
            for i in range(4):
                for j in range(3):
                    block = clip[t, i * 8:(i + 1) * 8, j * 8:(j + 1) * 8, c]
                    assert np.isclose(lat[t, c, i, j], block.astype(float).mean())


def test_constant_round_trip_exact():
    clip = np.full((2, 48, 32, 3), 137.0)
    lat = encode_latent(clip)
    assert np.allclose(lat, 137.0)
    back = decode_latent(lat)
    assert np.allclose(back, 137.0)


def test_encode_preserves_mean():
    rng = np.random.default_rng(21)
    clip = rng.uniform(0, 255, (2, 64, 64, 3))
    lat = encode_latent(clip)
    assert np.isclose(lat.mean(), clip.mean())


def test_decode_preserves_mean_of_interior():
    # Bilinear upsampling replicates at edges but a constant stays constant
    # and the global mean of a smooth field is nearly preserved.
    rng = np.random.default_rng(22)
    lat = np.tile(rng.uniform(0, 1, (1, 1, 6, 4)), (1, 3, 1, 1))
    back = decode_latent(lat)
    assert abs(back.mean() - lat.mean()) < 0.05


def test_checkerboard_encodes_to_half():
    # An 8x8-pixel checkerboard of 0/255 averages to 127.5 in every cell
    # when each latent cell sees an equal split.
    tile = np.indices((16, 16)).sum(axis=0) % 2
    clip = (np.tile(tile, (2, 2))[None, :, :, None] * 255).astype(np.uint8)
    clip = np.repeat(clip, 3, axis=3)
    lat = encode_latent(clip)
    assert np.allclose(lat, 127.5)


def test_mask_latent_binary_and_aligned():
    rng = np.random.default_rng(23)
    mask = np.zeros((2, 64, 48), dtype=np.uint8)
    mask[0, 8:40, 8:32] = 1
    mask[1, 16:64, 0:24] = 1
    lat = encode_mask_latent(mask)
    assert lat.shape == (2, 1, 8, 6)
    assert set(np.unique(lat)) <= {0.0, 1.0}
    # Nearest sampling picks each block's center pixel.
    for t in range(2):
        for i in range(8):
            for j in range(6):
                assert lat[t, 0, i, j] == mask[t, i * 8 + 4, j * 8 + 4]


def test_decode_is_linear():
    rng = np.random.default_rng(24)
    a = rng.uniform(-1, 1, (1, 2, 6, 4))
    b = rng.uniform(-1, 1, (1, 2, 6, 4))
    lhs = decode_latent(a + 2.0 * b)
    rhs = decode_latent(a) + 2.0 * decode_latent(b)
    assert np.allclose(lhs, rhs, atol=1e-9)
