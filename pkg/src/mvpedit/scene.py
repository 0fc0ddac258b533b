"""Scene data model: calibrated six-camera rig, pedestrian tracks, frames.

A scene lives on disk as a directory with a JSON descriptor (`scene.json`)
and lossless PNG frames under `frames/<VIEW>/<index>.png`. Loading validates
every invariant and reports the offending field path on failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .attributes import AttributeToken

CANONICAL_VIEWS = ("FRONT_LEFT", "FRONT", "FRONT_RIGHT",
                   "BACK_LEFT", "BACK", "BACK_RIGHT")

DEFAULT_JOINT_COUNT = 17

SCENE_FORMAT = "mvpedit-scene-v1"

ROTATION_TOL = 1e-9


class SceneValidationError(ValueError):
    """Raised when a scene violates a model invariant; names the field."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class CameraView:
    """Pinhole camera: intrinsics K, world-to-camera extrinsics (R, t)."""

    id: str
    K: np.ndarray          # (3, 3)
    R: np.ndarray          # (3, 3), world -> camera
    t: np.ndarray          # (3,), meters
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "K", np.asarray(self.K, dtype=np.float64))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=np.float64))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.float64))

    def validate(self, path: str = "view") -> None:
        if self.K.shape != (3, 3):
            raise SceneValidationError(f"{path}.K", f"expected 3x3, got {self.K.shape}")
        if self.R.shape != (3, 3):
            raise SceneValidationError(f"{path}.R", f"expected 3x3, got {self.R.shape}")
        if self.t.shape != (3,):
            raise SceneValidationError(f"{path}.t", f"expected 3-vector, got {self.t.shape}")
        K = self.K
        if K[1, 0] != 0 or K[2, 0] != 0 or K[2, 1] != 0:
            raise SceneValidationError(f"{path}.K", "not upper-triangular")
        if K[2, 2] != 1.0:
            raise SceneValidationError(f"{path}.K", f"K[2][2] must be 1, got {K[2, 2]}")
        if K[0, 0] <= 0 or K[1, 1] <= 0:
            raise SceneValidationError(f"{path}.K", "focal lengths must be positive")
        err = np.abs(self.R.T @ self.R - np.eye(3)).max()
        if err > ROTATION_TOL:
            raise SceneValidationError(
                f"{path}.R", f"not orthonormal (max |R'R - I| = {err:.3e})")
        if np.linalg.det(self.R) < 0:
            raise SceneValidationError(
                f"{path}.R", "determinant is -1 (reflection, not a rotation)")
        if self.width <= 0 or self.height <= 0:
            raise SceneValidationError(
                f"{path}.width/height", "image dimensions must be positive")

    def __eq__(self, other):
        if not isinstance(other, CameraView):
            return NotImplemented
        return (self.id == other.id and self.width == other.width
                and self.height == other.height
                and np.array_equal(self.K, other.K)
                and np.array_equal(self.R, other.R)
                and np.array_equal(self.t, other.t))


@dataclass(frozen=True)
class Box3D:
    """Upright 3D box: center (x, y, z), size (w, l, h), yaw about world z."""

    center: tuple[float, float, float]
    size: tuple[float, float, float]
    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "size", tuple(float(v) for v in self.size))
        object.__setattr__(self, "yaw", float(self.yaw))


@dataclass(frozen=True)
class TrackFrame:
    index: int
    box3d: Box3D
    skeleton3d: np.ndarray | None = None   # (J, 3) world meters

    def __post_init__(self):
        if self.skeleton3d is not None:
            object.__setattr__(
                self, "skeleton3d", np.asarray(self.skeleton3d, dtype=np.float64))

    def __eq__(self, other):
        if not isinstance(other, TrackFrame):
            return NotImplemented
        if self.index != other.index or self.box3d != other.box3d:
            return False
        if (self.skeleton3d is None) != (other.skeleton3d is None):
            return False
        return self.skeleton3d is None or np.array_equal(self.skeleton3d, other.skeleton3d)


@dataclass(frozen=True)
class PedestrianTrack:
    track_id: str
    frames: tuple[TrackFrame, ...]
    dominant_view: str
    attributes: AttributeToken
    placeholder_views: tuple[str, ...] = ()   # manual per-view placeholder override

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "placeholder_views", tuple(self.placeholder_views))

    def frame_at(self, index: int) -> TrackFrame | None:
        first = self.frames[0].index if self.frames else 0
        k = index - first
        if 0 <= k < len(self.frames):
            return self.frames[k]
        return None

    def validate(self, path: str, frame_count: int, joint_count: int) -> None:
        if not self.frames:
            raise SceneValidationError(f"{path}.frames", "track has no frames")
        for k, tf in enumerate(self.frames):
            if any(s <= 0 for s in tf.box3d.size):
                raise SceneValidationError(
                    f"{path}.frames[{k}].box3d.size",
                    f"sizes must be strictly positive, got {tf.box3d.size}")
            if tf.skeleton3d is not None and tf.skeleton3d.shape != (joint_count, 3):
                raise SceneValidationError(
                    f"{path}.frames[{k}].skeleton3d",
                    f"expected ({joint_count}, 3), got {tf.skeleton3d.shape}")
        indices = [tf.index for tf in self.frames]
        if indices != list(range(indices[0], indices[0] + len(indices))):
            raise SceneValidationError(f"{path}.frames", "frame indices not contiguous")
        if indices[0] < 0 or indices[-1] >= frame_count:
            raise SceneValidationError(
                f"{path}.frames", f"indices [{indices[0]}, {indices[-1]}] outside clip "
                f"of {frame_count} frames")
        if self.dominant_view not in CANONICAL_VIEWS:
            raise SceneValidationError(
                f"{path}.dominant_view", f"unknown view {self.dominant_view!r}")
        for v in self.placeholder_views:
            if v not in CANONICAL_VIEWS:
                raise SceneValidationError(
                    f"{path}.placeholder_views", f"unknown view {v!r}")


@dataclass
class Scene:
    """Immutable-by-convention container; frame arrays are write-protected."""

    views: dict[str, CameraView]
    tracks: list[PedestrianTrack]
    frame_count: int
    frames: dict[str, np.ndarray]          # view id -> (T, H, W, 3) uint8
    joint_count: int = DEFAULT_JOINT_COUNT
    frame_paths: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        for arr in self.frames.values():
            arr.setflags(write=False)

    def track(self, track_id: str) -> PedestrianTrack:
        for tr in self.tracks:
            if tr.track_id == track_id:
                return tr
        raise KeyError(f"unknown track_id {track_id!r}")

    def validate(self) -> None:
        if sorted(self.views) != sorted(CANONICAL_VIEWS):
            raise SceneValidationError(
                "views", f"expected the canonical rig {CANONICAL_VIEWS}, "
                f"got {sorted(self.views)}")
        for vid, view in self.views.items():
            if view.id != vid:
                raise SceneValidationError(f"views[{vid}].id", f"mismatched id {view.id!r}")
            view.validate(path=f"views[{vid}]")
        if self.frame_count < 1:
            raise SceneValidationError("frame_count", "must be >= 1")
        if self.joint_count < 1:
            raise SceneValidationError("joint_count", "must be >= 1")
        for vid, view in self.views.items():
            arr = self.frames.get(vid)
            if arr is None:
                raise SceneValidationError(f"frames[{vid}]", "missing frame stack")
            expected = (self.frame_count, view.height, view.width, 3)
            if arr.shape != expected or arr.dtype != np.uint8:
                raise SceneValidationError(
                    f"frames[{vid}]",
                    f"expected uint8 {expected}, got {arr.dtype} {arr.shape}")
        seen = set()
        for i, tr in enumerate(self.tracks):
            if tr.track_id in seen:
                raise SceneValidationError(
                    f"tracks[{i}].track_id", f"duplicate id {tr.track_id!r}")
            seen.add(tr.track_id)
            tr.validate(f"tracks[{i}]", self.frame_count, self.joint_count)

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return (self.views == other.views
                and self.tracks == other.tracks
                and self.frame_count == other.frame_count
                and self.joint_count == other.joint_count
                and sorted(self.frames) == sorted(other.frames)
                and all(np.array_equal(self.frames[k], other.frames[k])
                        for k in self.frames))


def _mat(rows) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(rows)]


def _track_to_json(tr: PedestrianTrack) -> dict:
    return {
        "track_id": tr.track_id,
        "dominant_view": tr.dominant_view,
        "attributes": {"top_color": tr.attributes.top_color,
                       "pants_color": tr.attributes.pants_color},
        "placeholder_views": list(tr.placeholder_views),
        "frames": [
            {
                "index": tf.index,
                "box3d": {"center": list(tf.box3d.center),
                          "size": list(tf.box3d.size),
                          "yaw": tf.box3d.yaw},
                "skeleton3d": None if tf.skeleton3d is None
                else [[float(v) for v in j] for j in tf.skeleton3d],
            }
            for tf in tr.frames
        ],
    }


def _track_from_json(obj: dict, path: str) -> PedestrianTrack:
    try:
        frames = tuple(
            TrackFrame(
                index=int(f["index"]),
                box3d=Box3D(center=tuple(f["box3d"]["center"]),
                            size=tuple(f["box3d"]["size"]),
                            yaw=f["box3d"]["yaw"]),
                skeleton3d=None if f.get("skeleton3d") is None
                else np.asarray(f["skeleton3d"], dtype=np.float64),
            )
            for f in obj["frames"]
        )
        return PedestrianTrack(
            track_id=obj["track_id"],
            frames=frames,
            dominant_view=obj["dominant_view"],
            attributes=AttributeToken(**obj["attributes"]),
            placeholder_views=tuple(obj.get("placeholder_views", ())),
        )
    except (KeyError, TypeError) as exc:
        raise SceneValidationError(path, f"malformed track record ({exc})") from exc


def save_scene(scene: Scene, path: str | Path) -> None:
    """Write `scene.json` plus one PNG per view per frame under `path`."""
    scene.validate()
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    views_json = []
    for vid in CANONICAL_VIEWS:
        view = scene.views[vid]
        frame_dir = root / "frames" / vid
        frame_dir.mkdir(parents=True, exist_ok=True)
        rel_paths = []
        for i in range(scene.frame_count):
            rel = f"frames/{vid}/{i:05d}.png"
            Image.fromarray(scene.frames[vid][i]).save(root / rel)
            rel_paths.append(rel)
        views_json.append({
            "id": vid,
            "width": view.width,
            "height": view.height,
            "K": _mat(view.K),
            "R": _mat(view.R),
            "t": [float(v) for v in view.t],
            "frames": rel_paths,
        })
    descriptor = {
        "format": SCENE_FORMAT,
        "frame_count": scene.frame_count,
        "joint_count": scene.joint_count,
        "views": views_json,
        "tracks": [_track_to_json(tr) for tr in scene.tracks],
    }
    with open(root / "scene.json", "w") as f:
        json.dump(descriptor, f, indent=1)


def load_scene(path: str | Path) -> Scene:
    """Load and validate a scene directory (or a direct scene.json path)."""
    p = Path(path)
    descriptor_path = p / "scene.json" if p.is_dir() else p
    if not descriptor_path.exists():
        raise FileNotFoundError(f"no scene descriptor at {descriptor_path}")
    root = descriptor_path.parent
    with open(descriptor_path) as f:
        data = json.load(f)
    if data.get("format") != SCENE_FORMAT:
        raise SceneValidationError("format", f"unsupported format {data.get('format')!r}")

    frame_count = int(data["frame_count"])
    joint_count = int(data.get("joint_count", DEFAULT_JOINT_COUNT))
    views: dict[str, CameraView] = {}
    frames: dict[str, np.ndarray] = {}
    frame_paths: dict[str, list[str]] = {}
    for i, vj in enumerate(data["views"]):
        vid = vj.get("id", f"<views[{i}]>")
        view = CameraView(id=vid, K=vj["K"], R=vj["R"], t=vj["t"],
                          width=int(vj["width"]), height=int(vj["height"]))
        view.validate(path=f"views[{vid}]")
        rel_paths = vj["frames"]
        if len(rel_paths) != frame_count:
            raise SceneValidationError(
                f"views[{vid}].frames",
                f"expected {frame_count} frame paths, got {len(rel_paths)}")
        stack = []
        for rel in rel_paths:
            fp = root / rel
            if not fp.exists():
                raise SceneValidationError(f"views[{vid}].frames", f"missing file {rel}")
            img = np.asarray(Image.open(fp).convert("RGB"))
            if img.shape != (view.height, view.width, 3):
                raise SceneValidationError(
                    f"views[{vid}].frames",
                    f"{rel}: dimensions {img.shape[:2]} do not match view "
                    f"({view.height}, {view.width})")
            stack.append(img)
        views[vid] = view
        frames[vid] = np.stack(stack).astype(np.uint8)
        frame_paths[vid] = list(rel_paths)

    tracks = [_track_from_json(tj, f"tracks[{i}]")
              for i, tj in enumerate(data.get("tracks", []))]
    scene = Scene(views=views, tracks=tracks, frame_count=frame_count,
                  frames=frames, joint_count=joint_count, frame_paths=frame_paths)
    scene.validate()
    return scene
