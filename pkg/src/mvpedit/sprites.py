"""Stylized pedestrian rendering from 17-keypoint skeletons.

One renderer serves two places: the synthetic fixture scenes (drawing into
full camera frames from projected skeletons) and the sprite generator
(drawing into canvas tiles from keypoints decoded out of a pose raster).
"""

from __future__ import annotations

import numpy as np

from .attributes import SKIN_TONE
from .imageops import draw_capsule, draw_disc, fill_convex_polygon
from .maskpose import joint_color

L_SHOULDER, R_SHOULDER = 5, 6
L_ELBOW, R_ELBOW = 7, 8
L_WRIST, R_WRIST = 9, 10
L_HIP, R_HIP = 11, 12
L_KNEE, R_KNEE = 13, 14
L_ANKLE, R_ANKLE = 15, 16

_CORE = (L_SHOULDER, R_SHOULDER, L_HIP, R_HIP)


def draw_pedestrian_sprite(img: np.ndarray, uv: np.ndarray, valid: np.ndarray,
                           top_rgb, pants_rgb, skin_rgb=SKIN_TONE) -> bool:
    """Draw a flat pedestrian over `img` in place.

    Legs in pants color, then arms, torso quad, and head disc, so the
    torso covers limb roots. Part thickness scales with torso length.
    Returns False without drawing when the four torso joints are not all
    valid; other missing joints only skip their own part.
    """
    uv = np.asarray(uv, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    if not all(valid[j] for j in _CORE):
        return False
    mid_shoulder = (uv[L_SHOULDER] + uv[R_SHOULDER]) / 2.0
    mid_hip = (uv[L_HIP] + uv[R_HIP]) / 2.0
    unit = float(np.linalg.norm(mid_shoulder - mid_hip))
    if unit < 2.0:
        unit = 2.0
    leg_r, arm_r = 0.14 * unit, 0.11 * unit

    for hip, knee, ankle in ((L_HIP, L_KNEE, L_ANKLE), (R_HIP, R_KNEE, R_ANKLE)):
        if valid[knee]:
            draw_capsule(img, uv[hip], uv[knee], leg_r, pants_rgb)
            if valid[ankle]:
                draw_capsule(img, uv[knee], uv[ankle], leg_r, pants_rgb)
    for sh, el, wr in ((L_SHOULDER, L_ELBOW, L_WRIST), (R_SHOULDER, R_ELBOW, R_WRIST)):
        if valid[el]:
            draw_capsule(img, uv[sh], uv[el], arm_r, top_rgb)
            if valid[wr]:
                draw_capsule(img, uv[el], uv[wr], arm_r, top_rgb)

    # Torso quad, shoulders and hips pushed outward a little from the spine.
    quad = []
    for j, mid in ((L_SHOULDER, mid_shoulder), (R_SHOULDER, mid_shoulder),
                   (R_HIP, mid_hip), (L_HIP, mid_hip)):
        quad.append(mid + (uv[j] - mid) * 1.2)
    fill_convex_polygon(img, np.array(quad), top_rgb)

    head = [uv[j] for j in range(5) if j < len(valid) and valid[j]]
    if head:
        center = np.mean(head, axis=0)
        radius = max(0.26 * unit, 2.0)
        neck = mid_shoulder + (center - mid_shoulder) * 0.5
        draw_capsule(img, neck, center, 0.5 * radius, skin_rgb)
        draw_disc(img, center, radius, skin_rgb)
    return True


def sprite_extent(uv: np.ndarray, valid: np.ndarray) -> tuple[float, float, float, float] | None:
    """Loose (x0, y0, x1, y1) bound of everything the sprite may touch."""
    uv = np.asarray(uv, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    if not all(valid[j] for j in _CORE):
        return None
    unit = float(np.linalg.norm((uv[L_SHOULDER] + uv[R_SHOULDER]) / 2.0
                                - (uv[L_HIP] + uv[R_HIP]) / 2.0))
    pad = max(0.5 * unit, 2.0)
    pts = uv[valid]
    return (pts[:, 0].min() - pad, pts[:, 1].min() - pad,
            pts[:, 0].max() + pad, pts[:, 1].max() + pad)


def decode_pose_raster(tile: np.ndarray, joint_count: int = 17) -> tuple[np.ndarray, np.ndarray]:
    """Recover keypoints from a rendered pose tile.

    Joint discs are the only full-intensity pixels of their palette color
    (limbs are drawn at 0.6 intensity, and channel-wise dilation cannot
    fabricate a full-intensity color where none was drawn nearby), so the
    centroid of the exact color match locates each joint.
    """
    uv = np.zeros((joint_count, 2), dtype=np.float64)
    valid = np.zeros(joint_count, dtype=bool)
    for j in range(joint_count):
        color = np.array(joint_color(j), dtype=np.uint8)
        hit = np.all(tile == color, axis=-1)
        ys, xs = np.nonzero(hit)
        if len(xs) == 0:
            continue
        uv[j] = (xs.mean(), ys.mean())
        valid[j] = True
    return uv, valid
