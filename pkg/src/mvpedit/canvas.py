"""Multi-view canvas stitching.

Per-view tiles for one pedestrian are packed into a fixed 2x3 grid so a
generator sees all viewpoints of the same person in a single image. Views
missing a crop get an all-zero placeholder tile. Composition and
decomposition are exact inverses at the byte level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cropping import CropTransform, DEFAULT_TILE_SIZE
from .scene import CANONICAL_VIEWS


@dataclass(frozen=True)
class CanvasLayout:
    """Grid geometry: `rows x cols` tiles of `tile_size` in `view_order`."""

    rows: int = 2
    cols: int = 3
    tile_size: tuple[int, int] = DEFAULT_TILE_SIZE
    view_order: tuple[str, ...] = CANONICAL_VIEWS

    def __post_init__(self):
        if len(self.view_order) != self.rows * self.cols:
            raise ValueError(f"view_order has {len(self.view_order)} entries "
                             f"for a {self.rows}x{self.cols} grid")
        if len(set(self.view_order)) != len(self.view_order):
            raise ValueError("view_order contains duplicates")

    @property
    def canvas_size(self) -> tuple[int, int]:
        return (self.rows * self.tile_size[0], self.cols * self.tile_size[1])

    def slot(self, view_id: str) -> tuple[slice, slice]:
        """Row/column pixel slices of a view's tile inside the canvas."""
        idx = self.view_order.index(view_id)
        r, c = divmod(idx, self.cols)
        th, tw = self.tile_size
        return (slice(r * th, (r + 1) * th), slice(c * tw, (c + 1) * tw))


DEFAULT_LAYOUT = CanvasLayout()


@dataclass
class CanvasClip:
    """A stitched clip plus the bookkeeping needed to reverse the stitch.

    frames: (T, H_canvas, W_canvas, C) array.
    transforms: per view, per frame CropTransform or None (placeholder).
    """

    layout: CanvasLayout
    frames: np.ndarray
    transforms: dict[str, list[CropTransform | None]] = field(default_factory=dict)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def has_content(self, view_id: str, t: int) -> bool:
        tfs = self.transforms.get(view_id)
        return tfs is not None and tfs[t] is not None


def compose_canvas(tile_videos: dict[str, np.ndarray],
                   layout: CanvasLayout = DEFAULT_LAYOUT,
                   transforms: dict[str, list[CropTransform | None]] | None = None,
                   ) -> CanvasClip:
    """Stack per-view tile videos into canvas frames.

    Views absent from `tile_videos` become all-zero placeholder tiles.
    All present videos must agree on frame count, tile size, and dtype.
    """
    if not tile_videos:
        raise ValueError("no tile videos given")
    shapes = {v.shape for v in tile_videos.values()}
    counts = {v.shape[0] for v in tile_videos.values()}
    if len(counts) != 1:
        raise ValueError(f"tile videos disagree on frame count: {sorted(counts)}")
    T = counts.pop()
    sample = next(iter(tile_videos.values()))
    th, tw = layout.tile_size
    for view_id, vid in tile_videos.items():
        if view_id not in layout.view_order:
            raise ValueError(f"view {view_id!r} not in layout")
        if vid.shape[1:3] != (th, tw):
            raise ValueError(f"view {view_id!r} tiles are {vid.shape[1:3]}, "
                             f"layout wants {(th, tw)}")
    if len(shapes) != 1:
        raise ValueError("tile videos disagree on shape")

    ch, cw = layout.canvas_size
    frames = np.zeros((T, ch, cw) + sample.shape[3:], dtype=sample.dtype)
    for view_id, vid in tile_videos.items():
        rs, cs = layout.slot(view_id)
        frames[:, rs, cs] = vid
    return CanvasClip(layout=layout, frames=frames,
                      transforms=dict(transforms or {}))


def decompose_canvas(clip: CanvasClip) -> dict[str, np.ndarray]:
    """Split canvas frames back into per-view tile videos (copies)."""
    out = {}
    for view_id in clip.layout.view_order:
        rs, cs = clip.layout.slot(view_id)
        out[view_id] = clip.frames[:, rs, cs].copy()
    return out
