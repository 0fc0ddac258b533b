"""Dynamic pedestrian-region cropping with uniform rescale.

Per frame: project the 3D box, expand the 2D rect by a fixed factor
(default 1.6), grow to the tile aspect ratio (2:1 H:W), crop with
zero-filled padding where the virtual rect leaves the frame, then resize
to the tile resolution. Every crop is recorded as an invertible
CropTransform so generated tiles can be mapped back to source pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import imageops
from .geometry import project_box3d
from .rects import Rect
from .scene import PedestrianTrack, Scene

DEFAULT_TILE_SIZE = (480, 240)   # (height, width): portrait tiles
DEFAULT_EXPAND_FACTOR = 1.6

CROP_MODES = ("per_frame", "static", "smoothed")


def expand_rect(rect: Rect, factor: float) -> Rect:
    """Scale width and height by `factor` about the rect center."""
    if factor < 1.0:
        raise ValueError(f"expand factor must be >= 1, got {factor}")
    if rect.is_degenerate():
        raise ValueError(f"degenerate rect {rect}")
    return rect.from_center(rect.width * factor, rect.height * factor)


def fit_aspect(rect: Rect, target_aspect: float,
               frame_hw: tuple[int, int]) -> tuple[Rect, tuple[float, float, float, float]]:
    """Grow `rect` symmetrically to aspect H:W = target_aspect, keep it in frame.

    Returns (rect, pad) where pad = (left, top, right, bottom). The rect is
    translated inward when it fits; a dimension larger than the frame is
    clamped to the frame and the overhang recorded as pad.
    """
    if target_aspect <= 0:
        raise ValueError("target_aspect must be positive")
    h_frame, w_frame = float(frame_hw[0]), float(frame_hw[1])
    w, h = rect.width, rect.height
    if h < w * target_aspect:
        h = w * target_aspect
    else:
        w = h / target_aspect
    r = rect.from_center(w, h)

    pad = [0.0, 0.0, 0.0, 0.0]   # left, top, right, bottom
    x0, x1 = r.x0, r.x1
    if w <= w_frame:
        if x0 < 0:
            x0, x1 = 0.0, w
        elif x1 > w_frame:
            x0, x1 = w_frame - w, w_frame
    else:
        pad[0] = -x0 if x0 < 0 else 0.0
        pad[2] = x1 - w_frame if x1 > w_frame else 0.0
        x0, x1 = max(x0, 0.0), min(x1, w_frame)
    y0, y1 = r.y0, r.y1
    if h <= h_frame:
        if y0 < 0:
            y0, y1 = 0.0, h
        elif y1 > h_frame:
            y0, y1 = h_frame - h, h_frame
    else:
        pad[1] = -y0 if y0 < 0 else 0.0
        pad[3] = y1 - h_frame if y1 > h_frame else 0.0
        y0, y1 = max(y0, 0.0), min(y1, h_frame)
    return Rect(x0, y0, x1, y1), tuple(pad)


@dataclass(frozen=True)
class CropTransform:
    """Invertible affine linking a source-frame rect to its tile.

    The virtual crop = source_rect grown by per-edge zero padding; the tile
    is the virtual crop resized to tile_size. Coordinates use pixel centers.
    """

    view_id: str
    source_rect: tuple[int, int, int, int]     # x0, y0, x1, y1 (half-open)
    pad: tuple[int, int, int, int]             # left, top, right, bottom
    tile_size: tuple[int, int]                 # (H, W)

    @property
    def virtual_size(self) -> tuple[int, int]:
        x0, y0, x1, y1 = self.source_rect
        left, top, right, bottom = self.pad
        return (y1 - y0 + top + bottom, x1 - x0 + left + right)

    @property
    def scale(self) -> tuple[float, float]:
        vh, vw = self.virtual_size
        return (self.tile_size[0] / vh, self.tile_size[1] / vw)

    def apply(self, xy):
        """Source pixel coordinates (x, y) -> tile coordinates."""
        xy = np.asarray(xy, dtype=np.float64)
        sy, sx = self.scale
        x0, y0 = self.source_rect[0], self.source_rect[1]
        left, top = self.pad[0], self.pad[1]
        out = np.empty_like(xy)
        out[..., 0] = (xy[..., 0] - x0 + left + 0.5) * sx - 0.5
        out[..., 1] = (xy[..., 1] - y0 + top + 0.5) * sy - 0.5
        return out

    def invert(self, xy_tile):
        """Tile coordinates -> source pixel coordinates (x, y)."""
        xy_tile = np.asarray(xy_tile, dtype=np.float64)
        sy, sx = self.scale
        x0, y0 = self.source_rect[0], self.source_rect[1]
        left, top = self.pad[0], self.pad[1]
        out = np.empty_like(xy_tile)
        out[..., 0] = (xy_tile[..., 0] + 0.5) / sx - 0.5 - left + x0
        out[..., 1] = (xy_tile[..., 1] + 0.5) / sy - 0.5 - top + y0
        return out


def _integerize(rect: Rect, pad: tuple[float, float, float, float],
                frame_hw: tuple[int, int]) -> tuple[tuple[int, int, int, int],
                                                    tuple[int, int, int, int]]:
    """Round the fitted rect to pixels, keeping width/height rounding symmetric."""
    h_frame, w_frame = frame_hw
    w = max(int(round(rect.width)), 1)
    h = max(int(round(rect.height)), 1)
    x0 = int(round(rect.x0))
    y0 = int(round(rect.y0))
    x0 = min(max(x0, 0), max(w_frame - w, 0))
    y0 = min(max(y0, 0), max(h_frame - h, 0))
    w = min(w, w_frame)
    h = min(h, h_frame)
    ipad = tuple(int(round(p)) for p in pad)
    return (x0, y0, x0 + w, y0 + h), ipad


def crop_window(box_rect: Rect, view_id: str, frame_hw: tuple[int, int],
                expand_factor: float = DEFAULT_EXPAND_FACTOR,
                tile_size: tuple[int, int] = DEFAULT_TILE_SIZE) -> CropTransform:
    """Expand, fit to tile aspect, and integerize one 2D box into a transform."""
    aspect = tile_size[0] / tile_size[1]
    grown = expand_rect(box_rect, expand_factor)
    fitted, pad = fit_aspect(grown, aspect, frame_hw)
    source_rect, ipad = _integerize(fitted, pad, frame_hw)
    return CropTransform(view_id=view_id, source_rect=source_rect,
                         pad=ipad, tile_size=tile_size)


def extract_tile(frame: np.ndarray, ct: CropTransform) -> np.ndarray:
    """Cut the transform's source rect, zero-pad, and resize to the tile."""
    x0, y0, x1, y1 = ct.source_rect
    left, top, right, bottom = ct.pad
    crop = frame[y0:y1, x0:x1]
    if any(ct.pad):
        vh, vw = ct.virtual_size
        padded = np.zeros((vh, vw) + frame.shape[2:], dtype=frame.dtype)
        padded[top:top + (y1 - y0), left:left + (x1 - x0)] = crop
        crop = padded
    return imageops.resize_bilinear(crop, ct.tile_size)


def _smooth_rects(rects: list[Rect | None], alpha: float) -> list[Rect | None]:
    """Exponential smoothing of rect coordinates over frames with a box."""
    state = None
    out: list[Rect | None] = []
    for r in rects:
        if r is None:
            out.append(None)
            continue
        cur = np.array([r.x0, r.y0, r.x1, r.y1])
        state = cur if state is None else alpha * cur + (1 - alpha) * state
        out.append(Rect(*state))
    return out


def crop_track(scene: Scene, track: PedestrianTrack, view_id: str, *,
               tile_size: tuple[int, int] = DEFAULT_TILE_SIZE,
               expand_factor: float = DEFAULT_EXPAND_FACTOR,
               mode: str = "per_frame",
               smooth_alpha: float = 0.5) -> tuple[np.ndarray, list[CropTransform | None]]:
    """Crop one track from one view into a (T, H_tile, W_tile, 3) tile video.

    Modes:
      per_frame  - one window per frame; out-of-view frames give zero tiles
                   and a missing transform.
      smoothed   - per-frame windows with exponential smoothing (alpha) of
                   the fitted rect coordinates.
      static     - a single window covering the union of all per-frame
                   expanded rects, applied to every frame (also to frames
                   where the box is out of view, so background stays
                   observable: this is what background reconstruction for
                   removal relies on).

    Raises ValueError when the track is never visible in this view or is
    forced to the placeholder path via its placeholder_views override.
    """
    if mode not in CROP_MODES:
        raise ValueError(f"unknown crop mode {mode!r}; expected one of {CROP_MODES}")
    view = scene.views[view_id]
    if view_id in track.placeholder_views:
        raise ValueError(f"track {track.track_id!r} is forced to placeholder "
                         f"in view {view_id}")
    frame_hw = (view.height, view.width)

    rects: list[Rect | None] = []
    for t in range(scene.frame_count):
        tf = track.frame_at(t)
        if tf is None:
            rects.append(None)
            continue
        box2d = project_box3d(view, tf.box3d)
        rects.append(box2d.rect if box2d.in_frustum else None)
    if not any(r is not None for r in rects):
        raise ValueError(f"track {track.track_id!r} never visible in view {view_id}")

    T = scene.frame_count
    tiles = np.zeros((T,) + tuple(tile_size) + (3,), dtype=np.uint8)
    transforms: list[CropTransform | None] = [None] * T
    frames = scene.frames[view_id]

    if mode == "static":
        union = None
        for r in rects:
            if r is not None:
                grown = expand_rect(r, expand_factor)
                union = grown if union is None else union.union(grown)
        fitted, pad = fit_aspect(union, tile_size[0] / tile_size[1], frame_hw)
        source_rect, ipad = _integerize(fitted, pad, frame_hw)
        ct = CropTransform(view_id=view_id, source_rect=source_rect,
                           pad=ipad, tile_size=tile_size)
        for t in range(T):
            tiles[t] = extract_tile(frames[t], ct)
            transforms[t] = ct
        return tiles, transforms

    if mode == "smoothed":
        rects = _smooth_rects(rects, smooth_alpha)
    for t, r in enumerate(rects):
        if r is None:
            continue
        ct = crop_window(r, view_id, frame_hw, expand_factor, tile_size)
        tiles[t] = extract_tile(frames[t], ct)
        transforms[t] = ct
    return tiles, transforms
