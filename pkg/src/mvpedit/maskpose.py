"""Inpainting masks and pose-control rasters in canvas space.

Masks mark the editable region of each tile: the projected pedestrian box
expanded by mask_factor (default 1.2), mapped through that tile's crop
transform. The band between the mask and the 1.6x crop border stays
visible to generators and is later used for seam blending.

Pose rasters draw the 17-keypoint skeleton per tile in the usual
OpenPose colors: limbs at 0.6 intensity, joint discs at full intensity.
"""

from __future__ import annotations

import numpy as np

from .attributes import AttributeToken, DEFAULT_PALETTE, PROMPT_TEMPLATE  # noqa: F401
from .canvas import CanvasLayout, DEFAULT_LAYOUT
from .cropping import CropTransform
from .geometry import project_box3d, project_skeleton
from .imageops import dilate, draw_capsule, draw_disc
from .rects import Rect
from .scene import PedestrianTrack, Scene

DEFAULT_MASK_FACTOR = 1.2
DEFAULT_JOINT_RADIUS = 4
DEFAULT_LIMB_WIDTH = 4
DEFAULT_DILATE_RADIUS = 1
DEFAULT_DILATE_ITERATIONS = 2

COCO_JOINT_NAMES = (
    "nose", "left_eye", "right_eye", "left_ear", "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip",
    "left_knee", "right_knee", "left_ankle", "right_ankle",
)

# Standard 17-keypoint body skeleton, zero-indexed joint pairs.
COCO_SKELETON = (
    (15, 13), (13, 11), (16, 14), (14, 12), (11, 12),
    (5, 11), (6, 12), (5, 6), (5, 7), (6, 8),
    (7, 9), (8, 10), (1, 2), (0, 1), (0, 2),
    (1, 3), (2, 4), (3, 5), (4, 6),
)

POSE_PALETTE = (
    (255, 0, 0), (255, 85, 0), (255, 170, 0), (255, 255, 0), (170, 255, 0),
    (85, 255, 0), (0, 255, 0), (0, 255, 85), (0, 255, 170), (0, 255, 255),
    (0, 170, 255), (0, 85, 255), (0, 0, 255), (85, 0, 255), (170, 0, 255),
    (255, 0, 255), (255, 0, 170), (255, 0, 85),
)


def joint_color(j: int, palette=POSE_PALETTE) -> tuple[int, int, int]:
    """Full-intensity palette color of joint j."""
    return tuple(palette[j % len(palette)])


def limb_color(i: int, palette=POSE_PALETTE) -> tuple[int, int, int]:
    """Limb i is drawn at 0.6 of its palette color."""
    c = palette[i % len(palette)]
    return tuple(int(float(v) * 0.6) for v in c)


def rasterize_pose(uv: np.ndarray, valid: np.ndarray, size: tuple[int, int],
                   joint_radius: int = DEFAULT_JOINT_RADIUS,
                   limb_width: int = DEFAULT_LIMB_WIDTH,
                   skeleton=COCO_SKELETON, palette=POSE_PALETTE) -> np.ndarray:
    """Draw one skeleton onto a black (H, W, 3) uint8 tile.

    uv: (J, 2) tile-local pixel coordinates; valid: (J,) bool. Limbs with
    an invalid endpoint are skipped, as are invalid joints.
    """
    uv = np.asarray(uv, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    img = np.zeros(tuple(size) + (3,), dtype=np.uint8)
    for i, (a, b) in enumerate(skeleton):
        if a >= len(uv) or b >= len(uv) or not (valid[a] and valid[b]):
            continue
        draw_capsule(img, uv[a], uv[b], limb_width / 2.0,
                     limb_color(i, palette))
    for j in range(len(uv)):
        if not valid[j]:
            continue
        draw_disc(img, uv[j], joint_radius, joint_color(j, palette))
    return img


def pose_raster_clip(scene: Scene, track: PedestrianTrack,
                     transforms: dict[str, list[CropTransform | None]],
                     layout: CanvasLayout = DEFAULT_LAYOUT,
                     joint_radius: int = DEFAULT_JOINT_RADIUS,
                     limb_width: int = DEFAULT_LIMB_WIDTH,
                     dilate_radius: int = DEFAULT_DILATE_RADIUS,
                     dilate_iterations: int = DEFAULT_DILATE_ITERATIONS,
                     palette=POSE_PALETTE) -> np.ndarray:
    """Rasterize one track's skeletons into (T, H_canvas, W_canvas, 3).

    Per frame per view with a crop transform: project the 3D skeleton,
    map the keypoints into tile coordinates, draw into the view's slot.
    The whole clip is then dilated channel-wise (radius 0 disables).
    """
    T = scene.frame_count
    ch, cw = layout.canvas_size
    th, tw = layout.tile_size
    raster = np.zeros((T, ch, cw, 3), dtype=np.uint8)
    for view_id, tfs in transforms.items():
        view = scene.views[view_id]
        rs, cs = layout.slot(view_id)
        for t in range(T):
            ct = tfs[t]
            tf = track.frame_at(t)
            if ct is None or tf is None or tf.skeleton3d is None:
                continue
            kp = project_skeleton(view, tf.skeleton3d)
            uv_tile = ct.apply(kp.uv)
            inside = ((uv_tile[:, 0] >= 0) & (uv_tile[:, 0] <= tw - 1)
                      & (uv_tile[:, 1] >= 0) & (uv_tile[:, 1] <= th - 1))
            tile = rasterize_pose(uv_tile, kp.valid & inside, (th, tw),
                                  joint_radius, limb_width, palette=palette)
            raster[t, rs, cs] = tile
    if dilate_radius > 0 and dilate_iterations > 0:
        raster = dilate(raster, dilate_radius, dilate_iterations)
    return raster


def _fill_rect(mask2d: np.ndarray, rect_tile: tuple[float, float, float, float],
               bounds: tuple[int, int, int, int]) -> None:
    """Set pixels whose centers fall inside a continuous rect, clipped."""
    x0, y0, x1, y1 = rect_tile
    bx0, by0, bx1, by1 = bounds
    i0 = max(int(np.ceil(x0)), bx0)
    i1 = min(int(np.floor(x1)), bx1 - 1)
    j0 = max(int(np.ceil(y0)), by0)
    j1 = min(int(np.floor(y1)), by1 - 1)
    if i0 <= i1 and j0 <= j1:
        mask2d[j0:j1 + 1, i0:i1 + 1] = 1


def build_mask(scene: Scene, track: PedestrianTrack,
               transforms: dict[str, list[CropTransform | None]],
               layout: CanvasLayout = DEFAULT_LAYOUT,
               mask_factor: float = DEFAULT_MASK_FACTOR) -> np.ndarray:
    """Editable-region volume (T, H_canvas, W_canvas) uint8 in {0, 1}.

    Per frame per view with a crop transform: the projected box rect is
    expanded by mask_factor, clipped to the source frame, mapped through
    the crop transform, and filled inside the view's tile slot. Frames
    where the box is out of view contribute nothing.
    """
    T = scene.frame_count
    ch, cw = layout.canvas_size
    th, tw = layout.tile_size
    mask = np.zeros((T, ch, cw), dtype=np.uint8)
    for view_id, tfs in transforms.items():
        view = scene.views[view_id]
        rs, cs = layout.slot(view_id)
        frame_rect = Rect(0.0, 0.0, float(view.width), float(view.height))
        for t in range(T):
            ct = tfs[t]
            tf = track.frame_at(t)
            if ct is None or tf is None:
                continue
            box2d = project_box3d(view, tf.box3d)
            if not box2d.in_frustum:
                continue
            grown = box2d.rect.from_center(box2d.rect.width * mask_factor,
                                           box2d.rect.height * mask_factor)
            grown = grown.intersect(frame_rect)
            if grown is None:
                continue
            p = ct.apply(np.array([[grown.x0, grown.y0], [grown.x1, grown.y1]]))
            _fill_rect(mask[t, rs, cs], (p[0, 0], p[0, 1], p[1, 0], p[1, 1]),
                       (0, 0, tw, th))
    return mask


def zero_pose_for_removal(raster: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Zero the pose signal wherever the mask marks the removed track.

    The mask itself is left as is: the region stays editable so the
    generator repaints background there.
    """
    if raster.shape[:3] != mask.shape:
        raise ValueError(f"raster {raster.shape} vs mask {mask.shape}")
    out = raster.copy()
    out[mask.astype(bool)] = 0
    return out
