"""Generation backends filling the masked canvas regions.

All backends honor one contract: pixels where mask=0 are returned exactly
as they appear in the masked canvas; only mask=1 pixels may change.
Three implementations: `identity` (returns the masked canvas), `sprite`
(procedural pedestrian render over a reconstructed background), and
`ddpm` (the toy conditioned diffusion demonstrator).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .attributes import AttributeToken
from .canvas import CanvasClip
from .diffusion import DenoiserModel, DiffusionSchedule, sample_latent
from .latent import decode_latent, encode_latent, encode_mask_latent
from .sprites import decode_pose_raster, draw_pedestrian_sprite


@dataclass
class ConditioningBundle:
    """Everything a generator sees: context, mask, pose, attributes, seed."""

    masked_canvas: CanvasClip
    mask: np.ndarray       # (T, H, W) uint8 in {0, 1}
    pose: np.ndarray       # (T, H, W, 3) uint8
    attributes: AttributeToken
    seed: int = 0

    def validate(self) -> None:
        f = self.masked_canvas.frames
        if f.ndim != 4 or f.shape[3] != 3:
            raise ValueError(f"masked canvas must be (T, H, W, 3), got {f.shape}")
        if self.mask.shape != f.shape[:3]:
            raise ValueError(f"mask shape {self.mask.shape} vs frames {f.shape[:3]}")
        if self.pose.shape != f.shape:
            raise ValueError(f"pose shape {self.pose.shape} vs frames {f.shape}")
        vals = np.unique(self.mask)
        if not np.all(np.isin(vals, (0, 1))):
            raise ValueError("mask values must be exactly {0, 1}")
        if f[self.mask.astype(bool)].any():
            raise ValueError("masked canvas must be zero where mask=1")


def make_bundle(canvas: CanvasClip, mask: np.ndarray, pose: np.ndarray,
                attributes: AttributeToken, seed: int = 0) -> ConditioningBundle:
    """Zero the editable region of `canvas` and assemble a bundle."""
    frames = canvas.frames.copy()
    frames[mask.astype(bool)] = 0
    masked = CanvasClip(layout=canvas.layout, frames=frames,
                        transforms=dict(canvas.transforms))
    bundle = ConditioningBundle(masked_canvas=masked, mask=mask.astype(np.uint8),
                                pose=pose, attributes=attributes, seed=seed)
    bundle.validate()
    return bundle


def _out_clip(bundle: ConditioningBundle, frames: np.ndarray) -> CanvasClip:
    src = bundle.masked_canvas
    return CanvasClip(layout=src.layout, frames=frames,
                      transforms=dict(src.transforms))


def identity_generate(bundle: ConditioningBundle) -> CanvasClip:
    """Contract floor: return the masked canvas unchanged."""
    return _out_clip(bundle, bundle.masked_canvas.frames.copy())


def _column_interp(frame: np.ndarray, hole: np.ndarray) -> np.ndarray:
    """Fill hole pixels per column by linear interpolation along rows."""
    out = frame.astype(np.float64)
    H = frame.shape[0]
    rows = np.arange(H)
    for x in range(frame.shape[1]):
        col_hole = hole[:, x]
        if not col_hole.any():
            continue
        known = ~col_hole
        if not known.any():
            continue
        for c in range(frame.shape[2]):
            out[col_hole, x, c] = np.interp(rows[col_hole], rows[known],
                                            out[known, x, c])
    return out


def _background_fill(tiles: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Estimate background under the mask for one tile's time series.

    Per-pixel temporal median over frames where the pixel is unmasked;
    pixels masked in every frame fall back to per-frame column
    interpolation from the visible band. Returns float64 (T, h, w, 3).
    """
    vals = tiles.astype(np.float64)
    hidden = masks.astype(bool)
    stack = np.where(hidden[..., None], np.nan, vals)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        med = np.nanmedian(stack, axis=0)
    never_seen = hidden.all(axis=0)
    bg = np.empty_like(vals)
    for t in range(tiles.shape[0]):
        bg[t] = np.where(never_seen[..., None], vals[t], med)
        hole = hidden[t] & never_seen
        if hole.any():
            bg[t] = _column_interp(
                np.where((hidden[t] & ~hole)[..., None], med, vals[t]), hole)
    return bg


def sprite_generate(bundle: ConditioningBundle) -> CanvasClip:
    """Procedural backend: background fill plus a stylized pedestrian.

    Tile by tile: reconstruct the background under the mask, decode the
    skeleton from the pose raster, and draw the sprite in the requested
    clothing colors. A tile whose pose signal is absent (removal) keeps
    the plain background fill.
    """
    bundle.validate()
    layout = bundle.masked_canvas.layout
    out = bundle.masked_canvas.frames.copy()
    top = bundle.attributes.top_rgb
    pants = bundle.attributes.pants_rgb
    for view_id in layout.view_order:
        rs, cs = layout.slot(view_id)
        masks = bundle.mask[:, rs, cs]
        if not masks.any():
            continue
        tiles = bundle.masked_canvas.frames[:, rs, cs]
        poses = bundle.pose[:, rs, cs]
        bg = _background_fill(tiles, masks)
        for t in range(tiles.shape[0]):
            if not masks[t].any():
                continue
            content = bg[t].copy()
            uv, valid = decode_pose_raster(poses[t])
            draw_pedestrian_sprite(content, uv, valid, top, pants)
            sel = masks[t].astype(bool)
            out[t, rs, cs][sel] = np.clip(np.rint(content[sel]), 0, 255
                                          ).astype(np.uint8)
    return _out_clip(bundle, out)


def conditioning_latents(bundle: ConditioningBundle,
                         drop_mask_channel: bool = False) -> np.ndarray:
    """Stack conditioning channels in latent space: (T, C_cond, h, w).

    Channels: masked-canvas latent (3), binary mask latent (1, optional),
    pose latent (3), and two constant color planes (3 + 3), all in model
    range [-1, 1] except the mask which stays {0, 1}.
    """
    frames = bundle.masked_canvas.frames.astype(np.float64) / 255.0
    pose = bundle.pose.astype(np.float64) / 255.0
    masked_lat = encode_latent(frames) * 2.0 - 1.0
    pose_lat = encode_latent(pose) * 2.0 - 1.0
    T, _, h, w = masked_lat.shape
    parts = [masked_lat]
    if not drop_mask_channel:
        parts.append(encode_mask_latent(bundle.mask))
    parts.append(pose_lat)
    attr = np.empty((T, 6, h, w), dtype=np.float64)
    for i, v in enumerate(bundle.attributes.top_rgb):
        attr[:, i] = v / 255.0 * 2.0 - 1.0
    for i, v in enumerate(bundle.attributes.pants_rgb):
        attr[:, 3 + i] = v / 255.0 * 2.0 - 1.0
    parts.append(attr)
    return np.concatenate(parts, axis=1)


def target_latents(target_frames: np.ndarray) -> np.ndarray:
    """Encode uint8 target frames into model-range x0 latents."""
    return encode_latent(target_frames.astype(np.float64) / 255.0) * 2.0 - 1.0


def training_samples_from_pairs(pairs, drop_mask_channel: bool = False):
    """Turn (bundle, target frames) pairs into (x0, cond) latent pairs."""
    samples = []
    for bundle, target in pairs:
        samples.append((target_latents(target),
                        conditioning_latents(bundle, drop_mask_channel)))
    return samples


def ddpm_generate(bundle: ConditioningBundle, model: DenoiserModel,
                  schedule: DiffusionSchedule | None = None,
                  drop_mask_channel: bool = False) -> CanvasClip:
    """Toy diffusion backend: sample latents, decode, paste into the mask."""
    bundle.validate()
    if schedule is None:
        schedule = DiffusionSchedule()
    cond = conditioning_latents(bundle, drop_mask_channel)
    sel = bundle.mask.astype(bool)
    out = bundle.masked_canvas.frames.copy()
    if not sel.any():
        return _out_clip(bundle, out)
    for t in range(cond.shape[0]):
        if not sel[t].any():
            continue
        x0 = sample_latent(model, cond[t], schedule, bundle.seed + t)
        dec = decode_latent(x0[None])[0]
        px = np.clip(np.rint((dec + 1.0) / 2.0 * 255.0), 0, 255).astype(np.uint8)
        out[t][sel[t]] = px[sel[t]]
    return _out_clip(bundle, out)


GENERATORS = {
    "identity": identity_generate,
    "sprite": sprite_generate,
    "ddpm": ddpm_generate,
}


def generate(bundle: ConditioningBundle, backend: str = "identity",
             **kwargs) -> CanvasClip:
    """Dispatch to a named backend; all backends preserve mask=0 pixels."""
    bundle.validate()
    try:
        fn = GENERATORS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; "
                         f"have {sorted(GENERATORS)}") from None
    return fn(bundle, **kwargs)
