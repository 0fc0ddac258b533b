"""High-level edit orchestration: replace, insert, remove.

One edit = project the target track, crop every view it appears in,
stitch the multi-view canvas, build mask and pose conditioning, run a
generation backend, and reintegrate the result into fresh frame copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canvas import CanvasClip, CanvasLayout, DEFAULT_LAYOUT, compose_canvas
from .cropping import CropTransform, DEFAULT_EXPAND_FACTOR, crop_track
from .attributes import AttributeToken
from .generators import ConditioningBundle, generate, make_bundle
from .geometry import project_box3d
from .maskpose import (DEFAULT_DILATE_ITERATIONS, DEFAULT_DILATE_RADIUS,
                       DEFAULT_MASK_FACTOR, POSE_PALETTE, build_mask,
                       pose_raster_clip, zero_pose_for_removal)
from .reintegrate import DEFAULT_BLEND_BAND, reintegrate
from .scene import Box3D, PedestrianTrack, Scene, TrackFrame

EDIT_OPS = ("replace", "insert", "remove")
INSERT_BOX_INFLATE = 1.15
# Mid-stride skeleton AABBs collapse along the walk direction; the floor
# keeps the editable region at least body-wide.
INSERT_BOX_FLOOR = (0.7, 0.7, 0.2)


@dataclass(frozen=True)
class EditRequest:
    """One edit operation against a scene.

    op: replace | insert | remove.
    track_id: target track (replace/remove); insert names the new track.
    motion: (T, J, 3) world-space skeletons (insert; optional replace).
    attributes: clothing colors (insert/replace; replace defaults to the
    track's own).
    """

    op: str
    track_id: str | None = None
    motion: np.ndarray | None = None
    attributes: AttributeToken | None = None
    backend: str = "sprite"
    seed: int = 0
    crop_mode: str | None = None
    blend_band: int = DEFAULT_BLEND_BAND

    def __post_init__(self):
        if self.op not in EDIT_OPS:
            raise ValueError(f"unknown op {self.op!r}; expected one of {EDIT_OPS}")


@dataclass
class EditResult:
    """Edited scene plus every intermediate the pipeline produced."""

    scene: Scene
    track: PedestrianTrack
    canvas: CanvasClip
    bundle: ConditioningBundle
    generated: CanvasClip
    mask: np.ndarray
    transforms: dict[str, list[CropTransform | None]] = field(default_factory=dict)


def track_from_motion(motion: np.ndarray, track_id: str,
                      attributes: AttributeToken,
                      dominant_view: str = "FRONT") -> PedestrianTrack:
    """Synthesize a track whose boxes are skeleton AABBs inflated 15%."""
    motion = np.asarray(motion, dtype=np.float64)
    if motion.ndim != 3 or motion.shape[2] != 3:
        raise ValueError(f"motion must be (T, J, 3), got {motion.shape}")
    frames = []
    for i, sk in enumerate(motion):
        lo, hi = sk.min(axis=0), sk.max(axis=0)
        center = (lo + hi) / 2.0
        size = np.maximum((hi - lo) * INSERT_BOX_INFLATE, INSERT_BOX_FLOOR)
        frames.append(TrackFrame(index=i,
                                 box3d=Box3D(center=tuple(center),
                                             size=tuple(size), yaw=0.0),
                                 skeleton3d=sk))
    return PedestrianTrack(track_id=track_id, frames=frames,
                           dominant_view=dominant_view, attributes=attributes)


def visible_views(scene: Scene, track: PedestrianTrack) -> list[str]:
    """Views where the track's box enters the frustum at least once."""
    out = []
    for view_id, view in scene.views.items():
        if view_id in track.placeholder_views:
            continue
        for t in range(scene.frame_count):
            tf = track.frame_at(t)
            if tf is not None and project_box3d(view, tf.box3d).in_frustum:
                out.append(view_id)
                break
    return out


def compute_dominant_view(scene: Scene, track: PedestrianTrack) -> str:
    """The view with the most in-frustum frames (canonical order on ties)."""
    best, best_n = None, -1
    for view_id, view in scene.views.items():
        if view_id in track.placeholder_views:
            continue
        n = sum(1 for t in range(scene.frame_count)
                if (tf := track.frame_at(t)) is not None
                and project_box3d(view, tf.box3d).in_frustum)
        if n > best_n:
            best, best_n = view_id, n
    if best is None or best_n == 0:
        raise ValueError(f"track {track.track_id!r} is never visible")
    return best


def _resolve_track(scene: Scene, request: EditRequest) -> PedestrianTrack:
    if request.op == "insert":
        if request.motion is None:
            raise ValueError("insert requires a motion")
        if request.attributes is None:
            raise ValueError("insert requires attributes")
        motion = np.asarray(request.motion, dtype=np.float64)
        if motion.shape[0] < scene.frame_count:
            raise ValueError(f"motion has {motion.shape[0]} frames, "
                             f"clip needs {scene.frame_count}")
        track_id = request.track_id or "inserted"
        if any(tr.track_id == track_id for tr in scene.tracks):
            raise ValueError(f"track id {track_id!r} already exists")
        track = track_from_motion(motion[:scene.frame_count], track_id,
                                  request.attributes)
        return PedestrianTrack(track_id=track.track_id, frames=track.frames,
                               dominant_view=compute_dominant_view(scene, track),
                               attributes=track.attributes)
    if request.track_id is None:
        raise ValueError(f"{request.op} requires a track_id")
    track = scene.track(request.track_id)
    if request.op == "replace":
        attrs = request.attributes or track.attributes
        if request.motion is not None:
            motion = np.asarray(request.motion, dtype=np.float64)
            if motion.shape[0] < scene.frame_count:
                raise ValueError(f"motion has {motion.shape[0]} frames, "
                                 f"clip needs {scene.frame_count}")
            moved = track_from_motion(motion[:scene.frame_count],
                                      track.track_id, attrs)
            return PedestrianTrack(track_id=track.track_id, frames=moved.frames,
                                   dominant_view=track.dominant_view,
                                   attributes=attrs,
                                   placeholder_views=track.placeholder_views)
        return PedestrianTrack(track_id=track.track_id, frames=track.frames,
                               dominant_view=track.dominant_view,
                               attributes=attrs,
                               placeholder_views=track.placeholder_views)
    return track


def _edited_tracks(scene: Scene, request: EditRequest,
                   track: PedestrianTrack) -> list[PedestrianTrack]:
    if request.op == "insert":
        return list(scene.tracks) + [track]
    if request.op == "remove":
        return [tr for tr in scene.tracks if tr.track_id != track.track_id]
    return [track if tr.track_id == track.track_id else tr
            for tr in scene.tracks]


def edit_pipeline(scene: Scene, request: EditRequest,
                  layout: CanvasLayout = DEFAULT_LAYOUT, *,
                  expand_factor: float = DEFAULT_EXPAND_FACTOR,
                  mask_factor: float = DEFAULT_MASK_FACTOR,
                  dilate_radius: int = DEFAULT_DILATE_RADIUS,
                  dilate_iterations: int = DEFAULT_DILATE_ITERATIONS,
                  palette=POSE_PALETTE,
                  **backend_kwargs) -> EditResult:
    """Run one edit end to end and return the edited scene + intermediates.

    Remove defaults to a static union crop window so the background stays
    observable over time; other ops crop per frame.
    """
    track = _resolve_track(scene, request)
    crop_mode = request.crop_mode or ("static" if request.op == "remove"
                                      else "per_frame")
    views = visible_views(scene, track)
    if not views:
        raise ValueError(f"track {track.track_id!r} not visible in any view")

    tile_videos: dict[str, np.ndarray] = {}
    transforms: dict[str, list[CropTransform | None]] = {}
    for view_id in views:
        tiles, tfs = crop_track(scene, track, view_id,
                                tile_size=layout.tile_size,
                                expand_factor=expand_factor, mode=crop_mode)
        tile_videos[view_id] = tiles
        transforms[view_id] = tfs

    canvas = compose_canvas(tile_videos, layout, transforms)
    mask = build_mask(scene, track, transforms, layout, mask_factor)
    pose = pose_raster_clip(scene, track, transforms, layout,
                            dilate_radius=dilate_radius,
                            dilate_iterations=dilate_iterations,
                            palette=palette)
    if request.op == "remove":
        pose = zero_pose_for_removal(pose, mask)
    attrs = request.attributes or track.attributes
    bundle = make_bundle(canvas, mask, pose, attrs, request.seed)
    generated = generate(bundle, request.backend, **backend_kwargs)
    edited = reintegrate(scene, generated, mask, request.blend_band)

    edited_scene = Scene(views=dict(scene.views),
                         tracks=_edited_tracks(scene, request, track),
                         frame_count=scene.frame_count, frames=edited,
                         joint_count=scene.joint_count)
    return EditResult(scene=edited_scene, track=track, canvas=canvas,
                      bundle=bundle, generated=generated, mask=mask,
                      transforms=transforms)
