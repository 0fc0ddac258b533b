"""Paste generated tile content back into the source frames.

Inverse of the crop/stitch pass: per frame per view, the tile is resized
back onto its source rect and alpha-composited over the original frame.
Alpha is 1 deep inside the mask and ramps linearly to 0 over blend_band
source pixels toward the mask boundary, so seams fade across the visible
buffer. Pixels the alpha field never touches keep their original bytes.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .canvas import CanvasClip
from .cropping import CropTransform
from .imageops import resize_bilinear, resize_nearest
from .scene import Scene

DEFAULT_BLEND_BAND = 8


def mask_alpha(mask_src: np.ndarray, blend_band: int) -> np.ndarray:
    """Blend weights over a binary source-space mask footprint.

    Chessboard distance to the unmasked region, clamped at blend_band and
    normalized; blend_band=0 degenerates to a binary paste. Alpha is
    strictly zero outside the footprint and adjacent pixels never differ
    by more than 1/blend_band.
    """
    m = mask_src.astype(bool)
    if blend_band <= 0:
        return m.astype(np.float64)
    d = ndimage.distance_transform_cdt(m, metric="chessboard").astype(np.float64)
    return np.minimum(d, float(blend_band)) / float(blend_band)


def _tile_to_source(tile: np.ndarray, ct: CropTransform, binary: bool) -> np.ndarray:
    """Resize a tile back to the virtual crop and strip the pad region."""
    x0, y0, x1, y1 = ct.source_rect
    left, top = ct.pad[0], ct.pad[1]
    vh, vw = ct.virtual_size
    if binary:
        virt = resize_nearest(tile, (vh, vw))
    else:
        virt = resize_bilinear(tile.astype(np.float64), (vh, vw))
    return virt[top:top + (y1 - y0), left:left + (x1 - x0)]


def reintegrate_frames(frames: dict[str, np.ndarray], generated: CanvasClip,
                       mask: np.ndarray,
                       blend_band: int = DEFAULT_BLEND_BAND) -> dict[str, np.ndarray]:
    """Composite a generated canvas clip into per-view frame arrays.

    frames: view id -> (T, H, W, 3) uint8 originals (left untouched).
    Returns a new dict with edited copies. Views or frames without a crop
    transform are passed through bit-exact.
    """
    layout = generated.layout
    T = generated.frame_count
    if mask.shape != generated.frames.shape[:3]:
        raise ValueError(f"mask {mask.shape} vs canvas {generated.frames.shape[:3]}")
    out = {v: arr.copy() for v, arr in frames.items()}
    for view_id, tfs in generated.transforms.items():
        if view_id not in out:
            raise ValueError(f"no frames for view {view_id!r}")
        if len(tfs) != T:
            raise ValueError(f"view {view_id!r} has {len(tfs)} transforms "
                             f"for {T} frames")
        rs, cs = layout.slot(view_id)
        for t in range(T):
            ct = tfs[t]
            if ct is None:
                continue
            tile_mask = mask[t, rs, cs]
            if not tile_mask.any():
                continue
            x0, y0, x1, y1 = ct.source_rect
            mask_src = _tile_to_source(tile_mask, ct, binary=True)
            if not mask_src.any():
                continue
            alpha = mask_alpha(mask_src, blend_band)
            content = _tile_to_source(generated.frames[t, rs, cs], ct, binary=False)
            region = out[view_id][t, y0:y1, x0:x1]
            sel = alpha > 0
            a = alpha[sel][:, None]
            blended = a * content[sel] + (1.0 - a) * region[sel].astype(np.float64)
            region[sel] = np.clip(np.rint(blended), 0, 255).astype(np.uint8)
    return out


def reintegrate(scene: Scene, generated: CanvasClip, mask: np.ndarray,
                blend_band: int = DEFAULT_BLEND_BAND) -> dict[str, np.ndarray]:
    """Reintegrate against a scene's own frames (convenience wrapper)."""
    return reintegrate_frames({v: scene.frames[v] for v in scene.views},
                              generated, mask, blend_band)
