"""Pinhole projection of 3D boxes and skeletons with frustum visibility.

World frame is z-up; camera frame is the usual x-right / y-down / z-forward.
A point is valid for projection when its camera-frame depth exceeds
EPS_DEPTH; everything at or behind the image plane is flagged invalid
instead of producing a projective blow-up.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .rects import Rect
from .scene import Box3D, CameraView

EPS_DEPTH = 1e-6


class Visibility(enum.Enum):
    VISIBLE = "visible"
    TRUNCATED = "truncated"
    OUT_OF_VIEW = "out_of_view"


@dataclass(frozen=True)
class ViewBox2D:
    view_id: str
    rect: Rect | None
    visibility: Visibility

    @property
    def in_frustum(self) -> bool:
        return self.visibility is not Visibility.OUT_OF_VIEW


@dataclass(frozen=True)
class Keypoints2D:
    view_id: str
    uv: np.ndarray       # (J, 2) pixel coordinates
    valid: np.ndarray    # (J,) bool, False iff depth <= EPS_DEPTH


def world_to_camera(view: CameraView, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    return pts @ view.R.T + view.t


def camera_to_world(view: CameraView, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    return (pts - view.t) @ view.R


def project_camera_points(view: CameraView, pts_cam: np.ndarray):
    """Project camera-frame points; returns (uv, depth, valid)."""
    pts_cam = np.atleast_2d(np.asarray(pts_cam, dtype=np.float64))
    depth = pts_cam[:, 2]
    valid = depth > EPS_DEPTH
    safe = np.where(valid, depth, 1.0)
    u = view.K[0, 0] * pts_cam[:, 0] / safe + view.K[0, 1] * pts_cam[:, 1] / safe + view.K[0, 2]
    v = view.K[1, 1] * pts_cam[:, 1] / safe + view.K[1, 2]
    return np.stack([u, v], axis=1), depth, valid


def project_points(view: CameraView, pts_world: np.ndarray):
    """Project world points; returns (uv (N,2), depth (N,), valid (N,))."""
    return project_camera_points(view, world_to_camera(view, pts_world))


def project_point(view: CameraView, p: np.ndarray) -> tuple[float, float, float] | None:
    """Project one world point; None when it lies at or behind the camera."""
    uv, depth, valid = project_points(view, np.asarray(p, dtype=np.float64)[None, :])
    if not valid[0]:
        return None
    return (float(uv[0, 0]), float(uv[0, 1]), float(depth[0]))


def unproject_point(view: CameraView, uv: tuple[float, float], depth: float) -> np.ndarray:
    """Invert project_point: pixel + camera depth back to a world point."""
    ray = np.linalg.solve(view.K, np.array([uv[0], uv[1], 1.0], dtype=np.float64))
    p_cam = ray * depth
    return camera_to_world(view, p_cam[None, :])[0]


def box_corners(box: Box3D) -> np.ndarray:
    """The 8 world-space corners of an upright yawed box, (8, 3)."""
    w, l, h = box.size
    sx = np.array([-1, -1, -1, -1, 1, 1, 1, 1], dtype=np.float64) * (w / 2)
    sy = np.array([-1, -1, 1, 1, -1, -1, 1, 1], dtype=np.float64) * (l / 2)
    sz = np.array([-1, 1, -1, 1, -1, 1, -1, 1], dtype=np.float64) * (h / 2)
    c, s = np.cos(box.yaw), np.sin(box.yaw)
    x = c * sx - s * sy + box.center[0]
    y = s * sx + c * sy + box.center[1]
    z = sz + box.center[2]
    return np.stack([x, y, z], axis=1)


def project_box3d(view: CameraView, box: Box3D) -> ViewBox2D:
    """Axis-aligned hull of the projected positive-depth corners, clipped.

    OutOfView when no corner is in front of the camera or the hull misses
    the image; Truncated when the unclipped hull exceeds the image bounds.
    """
    uv, _, valid = project_points(view, box_corners(box))
    if not valid.any():
        return ViewBox2D(view.id, None, Visibility.OUT_OF_VIEW)
    pts = uv[valid]
    hull = Rect(pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max())
    image = Rect(0.0, 0.0, float(view.width), float(view.height))
    clipped = hull.intersect(image)
    if clipped.width <= 0.0 or clipped.height <= 0.0:
        return ViewBox2D(view.id, None, Visibility.OUT_OF_VIEW)
    if (hull.x0 < image.x0 or hull.y0 < image.y0
            or hull.x1 > image.x1 or hull.y1 > image.y1):
        return ViewBox2D(view.id, clipped, Visibility.TRUNCATED)
    return ViewBox2D(view.id, clipped, Visibility.VISIBLE)


def project_skeleton(view: CameraView, skeleton3d: np.ndarray) -> Keypoints2D:
    """Project each joint independently; validity is positive depth only."""
    uv, _, valid = project_points(view, skeleton3d)
    return Keypoints2D(view_id=view.id, uv=uv, valid=valid)


def bev_center(box: Box3D) -> tuple[float, float]:
    """Ground-plane (bird's-eye) center: drop the vertical coordinate."""
    return (box.center[0], box.center[1])


def bev_distance(a: Box3D, b: Box3D) -> float:
    ax, ay = bev_center(a)
    bx, by = bev_center(b)
    return float(np.hypot(ax - bx, ay - by))
