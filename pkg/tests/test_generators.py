"""Tests for the generation backends and their shared contract."""

import numpy as np
import pytest

from mvpedit.attributes import AttributeToken, DEFAULT_PALETTE
from mvpedit.canvas import CanvasClip, CanvasLayout
from mvpedit.diffusion import DenoiserConfig, DenoiserModel, DiffusionSchedule
from mvpedit.fixtures import make_sprite_dataset
from mvpedit.generators import (ConditioningBundle, conditioning_latents,
                                ddpm_generate, generate, identity_generate,
                                make_bundle, sprite_generate, target_latents)

SMALL_LAYOUT = CanvasLayout(rows=1, cols=1, tile_size=(48, 24),
                            view_order=("FRONT",))


def random_bundle(rng, T=2):
    frames = rng.integers(0, 256, (T, 48, 24, 3), dtype=np.uint8)
    canvas = CanvasClip(layout=SMALL_LAYOUT, frames=frames,
                        transforms={"FRONT": [None] * T})
    mask = np.zeros((T, 48, 24), dtype=np.uint8)
    for t in range(T):
        y0, x0 = int(rng.integers(0, 24)), int(rng.integers(0, 12))
        mask[t, y0:y0 + int(rng.integers(4, 24)),
             x0:x0 + int(rng.integers(4, 12))] = 1
    pose = rng.integers(0, 256, (T, 48, 24, 3), dtype=np.uint8)
    names = list(DEFAULT_PALETTE)
    attrs = AttributeToken(names[int(rng.integers(len(names)))],
                           names[int(rng.integers(len(names)))])
    return make_bundle(canvas, mask, pose, attrs, seed=int(rng.integers(100)))


def tiny_ddpm():
    cfg = DenoiserConfig(in_channels=16, out_channels=3, width=8, blocks=1,
                         emb_dim=8)
    return (DenoiserModel.init_random(cfg, seed=0),
            DiffusionSchedule(t_steps=8))


def test_all_backends_preserve_unmasked_pixels():
    rng = np.random.default_rng(40)
    model, schedule = tiny_ddpm()
    for _ in range(50):
        bundle = random_bundle(rng)
        keep = ~bundle.mask.astype(bool)
        src = bundle.masked_canvas.frames
        for run in (lambda: identity_generate(bundle),
                    lambda: sprite_generate(bundle),
                    lambda: ddpm_generate(bundle, model, schedule)):
            out = run()
            assert out.frames.shape == src.shape
            assert out.frames.dtype == np.uint8
            assert np.array_equal(out.frames[keep], src[keep])


def test_backends_are_deterministic():
    rng = np.random.default_rng(41)
    bundle = random_bundle(rng)
    model, schedule = tiny_ddpm()
    assert np.array_equal(identity_generate(bundle).frames,
                          identity_generate(bundle).frames)
    assert np.array_equal(sprite_generate(bundle).frames,
                          sprite_generate(bundle).frames)
    assert np.array_equal(ddpm_generate(bundle, model, schedule).frames,
                          ddpm_generate(bundle, model, schedule).frames)


def test_zero_mask_means_identity_everywhere():
    rng = np.random.default_rng(42)
    frames = rng.integers(0, 256, (2, 48, 24, 3), dtype=np.uint8)
    canvas = CanvasClip(layout=SMALL_LAYOUT, frames=frames,
                        transforms={"FRONT": [None, None]})
    mask = np.zeros((2, 48, 24), dtype=np.uint8)
    pose = np.zeros((2, 48, 24, 3), dtype=np.uint8)
    bundle = make_bundle(canvas, mask, pose, AttributeToken("red", "blue"))
    model, schedule = tiny_ddpm()
    for out in (identity_generate(bundle), sprite_generate(bundle),
                ddpm_generate(bundle, model, schedule)):
        assert np.array_equal(out.frames, frames)


def test_make_bundle_zeroes_editable_region():
    rng = np.random.default_rng(43)
    bundle = random_bundle(rng)
    assert not bundle.masked_canvas.frames[bundle.mask.astype(bool)].any()
    assert set(np.unique(bundle.mask)) <= {0, 1}


def test_bundle_validation_rejects_malformed_input():
    rng = np.random.default_rng(44)
    bundle = random_bundle(rng)
    frames = bundle.masked_canvas.frames
    bad_mask = ConditioningBundle(bundle.masked_canvas,
                                  bundle.mask[:, :24], bundle.pose,
                                  bundle.attributes)
    with pytest.raises(ValueError):
        bad_mask.validate()
    wrong_vals = ConditioningBundle(bundle.masked_canvas,
                                    bundle.mask * 2, bundle.pose,
                                    bundle.attributes)
    with pytest.raises(ValueError):
        wrong_vals.validate()
    bad_pose = ConditioningBundle(bundle.masked_canvas, bundle.mask,
                                  bundle.pose[..., :1], bundle.attributes)
    with pytest.raises(ValueError):
        bad_pose.validate()
    leaky = ConditioningBundle(
        CanvasClip(layout=SMALL_LAYOUT, frames=np.full_like(frames, 9),
                   transforms={}),
        bundle.mask, bundle.pose, bundle.attributes)
    with pytest.raises(ValueError):
        leaky.validate()


def test_sprite_backend_draws_requested_colors():
    bundle, target = make_sprite_dataset(n=1)[0]
    out = sprite_generate(bundle)
    sel = bundle.mask.astype(bool)
    colors = {tuple(c) for c in out.frames[sel].reshape(-1, 3)}
    assert bundle.attributes.top_rgb in colors
    assert bundle.attributes.pants_rgb in colors
    # Against the reference render: only a thin rim may disagree.
    diff = np.abs(out.frames.astype(int) - target.astype(int)).max(axis=-1)
    assert (diff > 2).mean() < 0.05
    assert not diff[~sel].any()


def test_sprite_backend_fills_background_on_removal():
    bundle, target = make_sprite_dataset(n=1)[0]
    removal = ConditioningBundle(bundle.masked_canvas, bundle.mask,
                                 np.zeros_like(bundle.pose),
                                 bundle.attributes, bundle.seed)
    out = sprite_generate(removal)
    # The dataset background is linear per column, so the column
    # interpolation reconstructs it to rounding error.
    sel = bundle.mask.astype(bool)
    colors = {tuple(c) for c in out.frames[sel].reshape(-1, 3)}
    assert bundle.attributes.top_rgb not in colors
    bg = target.copy()    # target minus sprite = the gradient background
    ped = np.any(np.abs(target.astype(int)
                        - out.frames.astype(int)).max(-1) > 1, axis=-1)
    assert out.frames.shape == target.shape
    diff = np.abs(out.frames[sel].astype(int) - bg[sel].astype(int))
    # Everywhere except where the sprite stood, the fill matches closely.
    assert np.median(diff) <= 1


def test_conditioning_latents_channel_layout():
    rng = np.random.default_rng(45)
    bundle = random_bundle(rng)
    cond = conditioning_latents(bundle)
    T = bundle.mask.shape[0]
    assert cond.shape == (T, 13, 6, 3)
    dropped = conditioning_latents(bundle, drop_mask_channel=True)
    assert dropped.shape == (T, 12, 6, 3)
    # Mask channel is binary and sits at index 3.
    assert set(np.unique(cond[:, 3])) <= {0.0, 1.0}
    assert np.array_equal(np.concatenate([cond[:, :3], cond[:, 4:]], axis=1),
                          dropped)
    # Attribute planes are constant at the normalized colors.
    top = bundle.attributes.top_rgb
    pants = bundle.attributes.pants_rgb
    for i in range(3):
        assert np.allclose(cond[:, 7 + i], top[i] / 255.0 * 2 - 1)
        assert np.allclose(cond[:, 10 + i], pants[i] / 255.0 * 2 - 1)
    # All channels stay in model range.
    assert cond.min() >= -1.0 - 1e-9 and cond.max() <= 1.0 + 1e-9


def test_target_latents_range():
    white = np.full((1, 48, 24, 3), 255, dtype=np.uint8)
    assert np.allclose(target_latents(white), 1.0)
    black = np.zeros((1, 48, 24, 3), dtype=np.uint8)
    assert np.allclose(target_latents(black), -1.0)


def test_ddpm_seed_changes_masked_content():
    rng = np.random.default_rng(46)
    bundle = random_bundle(rng)
    model, schedule = tiny_ddpm()
    a = ddpm_generate(bundle, model, schedule)
    other = ConditioningBundle(bundle.masked_canvas, bundle.mask, bundle.pose,
                               bundle.attributes, seed=bundle.seed + 1)
    b = ddpm_generate(other, model, schedule)
    sel = bundle.mask.astype(bool)
    assert not np.array_equal(a.frames[sel], b.frames[sel])
    assert np.array_equal(a.frames[~sel], b.frames[~sel])


def test_generate_dispatch():
    rng = np.random.default_rng(47)
    bundle = random_bundle(rng)
    model, schedule = tiny_ddpm()
    assert np.array_equal(generate(bundle, "identity").frames,
                          identity_generate(bundle).frames)
    assert np.array_equal(generate(bundle, "sprite").frames,
                          sprite_generate(bundle).frames)
    assert np.array_equal(
        generate(bundle, "ddpm", model=model, schedule=schedule).frames,
        ddpm_generate(bundle, model, schedule).frames)
    with pytest.raises(ValueError):
        generate(bundle, "gan")


def test_sprite_backend_is_pose_sensitive():
    bundle, _ = make_sprite_dataset(n=2)[0]
    other_pose = make_sprite_dataset(n=2)[1][0].pose
    shifted = ConditioningBundle(bundle.masked_canvas, bundle.mask,
                                 other_pose, bundle.attributes, bundle.seed)
    a = sprite_generate(bundle).frames.astype(np.float64)
    b = sprite_generate(shifted).frames.astype(np.float64)
    assert float(np.sqrt(((a - b) ** 2).sum())) > 0.0
