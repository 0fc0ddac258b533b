"""Procedural synthetic scenes with exact ground truth.

A ring of six inward-looking cameras watches pedestrians walking
straight parametric paths with articulated 17-joint skeletons. Boxes and
skeletons are exact by construction, backgrounds are per-view vertical
gradients (linear fields survive bilinear resampling, which keeps
removal oracles tight), and every fixture ships an empty-scene twin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .attributes import AttributeToken
from .geometry import project_box3d
from .scene import (Box3D, CameraView, CANONICAL_VIEWS, PedestrianTrack, Scene,
                    TrackFrame)
from .sprites import draw_pedestrian_sprite

# Ring placement: world yaw of each camera position, degrees.
VIEW_ANGLES = {
    "FRONT": 0.0, "FRONT_LEFT": 60.0, "FRONT_RIGHT": 300.0,
    "BACK_LEFT": 120.0, "BACK": 180.0, "BACK_RIGHT": 240.0,
}

FIXTURE_BOX_SIZE = (0.9, 0.8, 1.9)   # along-heading, lateral, height (m)
FIXTURE_BOX_CENTER_Z = 0.91


@dataclass(frozen=True)
class PedestrianSpec:
    """A straight constant-speed walk with a fixed clothing choice."""

    start: tuple[float, float]
    heading: float                  # radians, direction of travel
    speed: float                    # meters per frame
    top: str = "red"
    pants: str = "blue"
    stride: float = 0.9             # meters per full gait cycle
    phase0: float = 0.0


@dataclass(frozen=True)
class FixtureConfig:
    frame_count: int = 16
    width: int = 640
    height: int = 480
    focal: float = 480.0
    ring_radius: float = 8.0
    cam_height: float = 1.6
    pedestrians: tuple[PedestrianSpec, ...] = ()
    seed: int = 0


def walk_skeleton(pos_xy, heading: float, phase: float) -> np.ndarray:
    """One 17-joint pose of the walker at a world position and gait phase."""
    f = np.array([math.cos(heading), math.sin(heading), 0.0])
    l = np.array([-math.sin(heading), math.cos(heading), 0.0])
    up = np.array([0.0, 0.0, 1.0])
    base = np.array([pos_xy[0], pos_xy[1], 0.0])

    def p(fwd, lat, z):
        return base + f * fwd + l * lat + up * z

    arm = 0.25 * math.sin(phase)
    leg = 0.30 * math.sin(phase)
    return np.array([
        p(0.10, 0.0, 1.55),            # nose
        p(0.05, 0.045, 1.72),          # eyes
        p(0.05, -0.045, 1.72),
        p(0.0, 0.09, 1.66),            # ears
        p(0.0, -0.09, 1.66),
        p(0.0, 0.18, 1.45),            # shoulders
        p(0.0, -0.18, 1.45),
        p(arm * 0.5, 0.21, 1.18),      # elbows (left swings with right leg)
        p(-arm * 0.5, -0.21, 1.18),
        p(arm, 0.22, 0.93),            # wrists
        p(-arm, -0.22, 0.93),
        p(0.0, 0.12, 0.95),            # hips
        p(0.0, -0.12, 0.95),
        p(leg * 0.5, 0.13, 0.52),      # knees
        p(-leg * 0.5, -0.13, 0.52),
        p(leg, 0.14, 0.10),            # ankles
        p(-leg, -0.14, 0.10),
    ])


def straight_motion(spec: PedestrianSpec, frame_count: int) -> np.ndarray:
    """(T, 17, 3) skeleton sequence for a straight-walk spec."""
    out = np.zeros((frame_count, 17, 3))
    for t in range(frame_count):
        dist = spec.speed * t
        pos = (spec.start[0] + dist * math.cos(spec.heading),
               spec.start[1] + dist * math.sin(spec.heading))
        phase = spec.phase0 + 2.0 * math.pi * dist / spec.stride
        out[t] = walk_skeleton(pos, spec.heading, phase)
    return out


def ring_camera(view_id: str, config: FixtureConfig) -> CameraView:
    """Inward-looking pinhole camera on the ring at the view's angle."""
    ang = math.radians(VIEW_ANGLES[view_id])
    c = np.array([config.ring_radius * math.cos(ang),
                  config.ring_radius * math.sin(ang), config.cam_height])
    forward = np.array([-math.cos(ang), -math.sin(ang), 0.0])
    down = np.array([0.0, 0.0, -1.0])
    x_cam = np.cross(down, forward)
    x_cam /= np.linalg.norm(x_cam)
    y_cam = np.cross(forward, x_cam)
    rot = np.stack([x_cam, y_cam, forward])
    k = np.array([[config.focal, 0.0, config.width / 2.0],
                  [0.0, config.focal, config.height / 2.0],
                  [0.0, 0.0, 1.0]])
    return CameraView(id=view_id, K=k, R=rot, t=-rot @ c,
                      width=config.width, height=config.height)


def _backgrounds(config: FixtureConfig) -> dict[str, np.ndarray]:
    """Per-view vertical gradient frames, constant along rows and time."""
    rng = np.random.default_rng(config.seed)
    out = {}
    ys = np.arange(config.height, dtype=np.float64)[:, None]
    for view_id in CANONICAL_VIEWS:
        base = rng.uniform(40.0, 110.0, size=3)
        slope = rng.uniform(0.12, 0.24, size=3)
        col = np.clip(np.rint(base[None, :] + ys * slope[None, :]), 0, 255)
        img = np.repeat(col[:, None, :], config.width, axis=1).astype(np.uint8)
        out[view_id] = img
    return out


def _build_track(spec: PedestrianSpec, idx: int, config: FixtureConfig,
                 views: dict[str, CameraView]) -> PedestrianTrack:
    motion = straight_motion(spec, config.frame_count)
    frames = []
    for t in range(config.frame_count):
        dist = spec.speed * t
        cx = spec.start[0] + dist * math.cos(spec.heading)
        cy = spec.start[1] + dist * math.sin(spec.heading)
        box = Box3D(center=(cx, cy, FIXTURE_BOX_CENTER_Z),
                    size=FIXTURE_BOX_SIZE, yaw=spec.heading)
        frames.append(TrackFrame(index=t, box3d=box, skeleton3d=motion[t]))
    counts = {}
    for view_id, view in views.items():
        counts[view_id] = sum(
            1 for tf in frames if project_box3d(view, tf.box3d).in_frustum)
    if not any(counts.values()):
        warnings.warn(f"pedestrian {idx} is outside every camera frustum "
                      "for the whole clip", stacklevel=2)
    dominant = max(CANONICAL_VIEWS, key=lambda v: counts[v])
    return PedestrianTrack(track_id=f"ped_{idx}", frames=frames,
                           dominant_view=dominant,
                           attributes=AttributeToken(spec.top, spec.pants))


def make_fixture(config: FixtureConfig = FixtureConfig()) -> tuple[Scene, Scene]:
    """Render (scene, empty-scene twin) from a fixture config."""
    views = {v: ring_camera(v, config) for v in CANONICAL_VIEWS}
    bgs = _backgrounds(config)
    tracks = [_build_track(s, i, config, views)
              for i, s in enumerate(config.pedestrians)]

    T = config.frame_count
    twin_frames = {v: np.repeat(bgs[v][None], T, axis=0).copy()
                   for v in CANONICAL_VIEWS}
    frames = {v: arr.copy() for v, arr in twin_frames.items()}
    for view_id, view in views.items():
        cam_pos = -view.R.T @ view.t
        for t in range(T):
            # Painter's order: far pedestrians first.
            order = sorted(tracks, key=lambda tr: -np.linalg.norm(
                np.asarray(tr.frames[t].box3d.center) - cam_pos))
            for tr in order:
                sk = tr.frames[t].skeleton3d
                cam = (view.R @ sk.T).T + view.t
                valid = cam[:, 2] > 1e-6
                uv = np.zeros((len(sk), 2))
                z = np.where(valid, cam[:, 2], 1.0)
                uv[:, 0] = (view.K[0, 0] * cam[:, 0] + view.K[0, 1] * cam[:, 1]
                            ) / z + view.K[0, 2]
                uv[:, 1] = view.K[1, 1] * cam[:, 1] / z + view.K[1, 2]
                draw_pedestrian_sprite(frames[view_id][t], uv, valid,
                                       tr.attributes.top_rgb,
                                       tr.attributes.pants_rgb)

    scene = Scene(views=views, tracks=tracks, frame_count=T, frames=frames)
    twin = Scene(views=dict(views), tracks=[], frame_count=T, frames=twin_frames)
    scene.validate()
    twin.validate()
    return scene, twin


DEFAULT_WALKS = (
    PedestrianSpec(start=(-1.2, 0.35), heading=-0.3, speed=0.16,
                   top="red", pants="blue"),
    PedestrianSpec(start=(0.8, -0.9), heading=2.2, speed=0.13,
                   top="green", pants="black", phase0=1.3),
    PedestrianSpec(start=(-0.4, 1.1), heading=-1.2, speed=0.10,
                   top="yellow", pants="gray", phase0=2.6),
)


def default_fixture(n_pedestrians: int = 1, frame_count: int = 16,
                    seed: int = 0) -> tuple[Scene, Scene]:
    """Standard test fixture with up to three preset walkers."""
    if not 0 <= n_pedestrians <= len(DEFAULT_WALKS):
        raise ValueError(f"n_pedestrians must be 0..{len(DEFAULT_WALKS)}")
    cfg = FixtureConfig(frame_count=frame_count, seed=seed,
                        pedestrians=DEFAULT_WALKS[:n_pedestrians])
    return make_fixture(cfg)


SPRITE_DATASET_OUTFITS = (("red", "blue"), ("green", "black"),
                          ("white", "gray"), ("yellow", "purple"))


def make_sprite_dataset(n: int = 4, seed: int = 0,
                        tile_size: tuple[int, int] = (480, 240)) -> list:
    """Single-tile training pairs: (ConditioningBundle, target frames).

    Each sample is one walker pose drawn orthographically into a tile
    over a gradient background; the target is the finished sprite render,
    the bundle carries the masked tile, mask, pose raster, and outfit.
    """
    from .canvas import CanvasClip, CanvasLayout
    from .generators import make_bundle
    from .imageops import dilate
    from .maskpose import rasterize_pose

    th, tw = tile_size
    layout = CanvasLayout(rows=1, cols=1, tile_size=tile_size,
                          view_order=("FRONT",))
    rng = np.random.default_rng(seed)
    scale = 0.40 * th / 1.9
    pairs = []
    for i in range(n):
        phase = 0.4 + i * 2.0 * math.pi / max(n, 1)
        sk = walk_skeleton((0.0, 0.0), 0.0, phase)
        # Oblique view: mixing the lateral axis in keeps the left and
        # right joints from landing on the same pixel column.
        ca, sa = math.cos(0.6), math.sin(0.6)
        uv = np.stack([tw / 2.0 + scale * (ca * sk[:, 0] + sa * sk[:, 1]),
                       th / 2.0 + scale * (FIXTURE_BOX_CENTER_Z - sk[:, 2])],
                      axis=1)
        valid = np.ones(len(sk), dtype=bool)

        base = rng.uniform(40.0, 110.0, size=3)
        slope = rng.uniform(0.12, 0.24, size=3)
        ys = np.arange(th, dtype=np.float64)[:, None]
        col = np.clip(np.rint(base[None, :] + ys * slope[None, :]), 0, 255)
        bg = np.repeat(col[:, None, :], tw, axis=1).astype(np.uint8)

        mask = np.zeros((1, th, tw), dtype=np.uint8)
        mask[0, int(th * 0.1):int(th * 0.9), int(tw * 0.1):int(tw * 0.9)] = 1
        pose = dilate(rasterize_pose(uv, valid, tile_size), 1, 2)[None]
        top, pants = SPRITE_DATASET_OUTFITS[i % len(SPRITE_DATASET_OUTFITS)]
        attrs = AttributeToken(top, pants)

        target = bg.copy()
        draw_pedestrian_sprite(target, uv, valid,
                               attrs.top_rgb, attrs.pants_rgb)
        canvas = CanvasClip(layout=layout, frames=bg[None].copy(),
                            transforms={"FRONT": [None]})
        pairs.append((make_bundle(canvas, mask, pose, attrs, seed=i),
                      target[None]))
    return pairs
