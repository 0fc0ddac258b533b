"""End-to-end pipeline runs with a reproducibility manifest.

A run executes project -> crop -> compose -> mask/pose -> generate ->
reintegrate for one edit request, writes every intermediate under a run
directory, and records a manifest holding the verbatim config, the
request, the seed, and a content checksum per stage. Re-running from the
manifest must reproduce every checksum bit for bit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .attributes import AttributeToken
from .canvas import decompose_canvas
from .editing import EditRequest, EditResult, edit_pipeline
from .geometry import project_box3d
from .imageops import checksum
from .scene import Scene, load_scene

MANIFEST_NAME = "manifest.json"
STAGE_ORDER = ("project", "crop", "compose", "mask", "pose",
               "generate", "reintegrate")


class PipelineError(RuntimeError):
    """A stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r}: {message}")
        self.stage = stage


@dataclass
class RunResult:
    run_dir: str
    manifest: dict
    result: EditResult


def _write_png(path: str, arr: np.ndarray) -> None:
    Image.fromarray(arr).save(path)


def _dump_frames(dirpath: str, frames: np.ndarray, prefix: str = "") -> None:
    os.makedirs(dirpath, exist_ok=True)
    for t in range(frames.shape[0]):
        _write_png(os.path.join(dirpath, f"{prefix}{t:05d}.png"), frames[t])


def project_stage(scene: Scene, track) -> dict:
    """Per-view, per-frame projected box rects + visibility for one track."""
    out: dict = {"track_id": track.track_id, "views": {}}
    for view_id, view in scene.views.items():
        rows = []
        for t in range(scene.frame_count):
            tf = track.frame_at(t)
            if tf is None:
                rows.append(None)
                continue
            box = project_box3d(view, tf.box3d)
            rows.append(None if box.rect is None else
                        [box.rect.x0, box.rect.y0, box.rect.x1, box.rect.y1,
                         box.visibility.value])
        out["views"][view_id] = rows
    return out


def _transforms_json(result: EditResult) -> dict:
    out = {}
    for view_id, tfs in result.transforms.items():
        out[view_id] = [None if ct is None else
                        {"source_rect": list(ct.source_rect),
                         "pad": list(ct.pad), "tile_size": list(ct.tile_size)}
                        for ct in tfs]
    return out


def request_to_json(request: EditRequest) -> dict:
    return {
        "op": request.op,
        "track_id": request.track_id,
        "motion": None if request.motion is None
        else np.asarray(request.motion).tolist(),
        "attributes": None if request.attributes is None
        else {"top": request.attributes.top_color,
              "pants": request.attributes.pants_color},
        "backend": request.backend,
        "seed": request.seed,
        "crop_mode": request.crop_mode,
        "blend_band": request.blend_band,
    }


def request_from_json(data: dict) -> EditRequest:
    attrs = data.get("attributes")
    motion = data.get("motion")
    return EditRequest(
        op=data["op"], track_id=data.get("track_id"),
        motion=None if motion is None else np.asarray(motion, dtype=np.float64),
        attributes=None if attrs is None
        else AttributeToken(attrs["top"], attrs["pants"]),
        backend=data.get("backend", "sprite"), seed=data.get("seed", 0),
        crop_mode=data.get("crop_mode"), blend_band=data.get("blend_band", 8))


def verify_contracts(result: EditResult, scene: Scene) -> None:
    """Assert cross-stage invariants on live run data."""
    bundle = result.bundle
    bundle.validate()
    mask = result.mask
    if not np.array_equal(mask, mask * mask):
        raise PipelineError("mask", "mask is not binary")
    keep = ~mask.astype(bool)
    if not np.array_equal(result.generated.frames[keep],
                          bundle.masked_canvas.frames[keep]):
        raise PipelineError("generate", "background preservation violated")
    tiles = decompose_canvas(result.canvas)
    for view_id, vid in tiles.items():
        rs, cs = result.canvas.layout.slot(view_id)
        if not np.array_equal(vid, result.canvas.frames[:, rs, cs]):
            raise PipelineError("compose", f"tile round trip broke in {view_id}")
    for view_id, frames in result.scene.frames.items():
        if view_id not in result.transforms:
            if not np.array_equal(frames, scene.frames[view_id]):
                raise PipelineError("reintegrate",
                                    f"untouched view {view_id} changed")


def run_pipeline(scene: Scene, request: EditRequest, run_dir: str,
                 config_text: str = "{}", scene_path: str | None = None,
                 write_intermediates: bool = True, verify: bool = False,
                 **backend_kwargs) -> RunResult:
    """Execute one edit, write artifacts + manifest, return everything."""
    os.makedirs(run_dir, exist_ok=True)
    try:
        result = edit_pipeline(scene, request, **backend_kwargs)
    except (ValueError, KeyError) as exc:
        raise PipelineError("edit", str(exc)) from exc

    checksums: dict[str, str] = {}
    project_data = project_stage(scene, result.track)
    project_bytes = json.dumps(project_data, sort_keys=True).encode()
    checksums["project"] = checksum(project_bytes)

    tiles = decompose_canvas(result.canvas)
    crop_arrays = [tiles[v] for v in sorted(result.transforms)]
    checksums["crop"] = checksum(*crop_arrays)
    checksums["compose"] = checksum(result.canvas.frames)
    checksums["mask"] = checksum(result.mask)
    checksums["pose"] = checksum(result.bundle.pose)
    checksums["generate"] = checksum(result.generated.frames)
    edited = result.scene.frames
    checksums["reintegrate"] = checksum(*[edited[v] for v in sorted(edited)])

    if write_intermediates:
        with open(os.path.join(run_dir, "project.json"), "w") as fh:
            json.dump(project_data, fh, indent=1, sort_keys=True)
        with open(os.path.join(run_dir, "transforms.json"), "w") as fh:
            json.dump(_transforms_json(result), fh, indent=1, sort_keys=True)
        for view_id in sorted(result.transforms):
            _dump_frames(os.path.join(run_dir, "tiles", view_id), tiles[view_id])
        _dump_frames(os.path.join(run_dir, "canvas"), result.canvas.frames)
        _dump_frames(os.path.join(run_dir, "mask"), result.mask * 255)
        _dump_frames(os.path.join(run_dir, "pose"), result.bundle.pose)
        _dump_frames(os.path.join(run_dir, "generated"), result.generated.frames)
        for view_id in sorted(edited):
            _dump_frames(os.path.join(run_dir, "edited", view_id), edited[view_id])

    if verify:
        verify_contracts(result, scene)

    manifest = {
        "format": "mvpedit-run-v1",
        "config": config_text,
        "scene_path": scene_path,
        "request": request_to_json(request),
        "stages": checksums,
    }
    with open(os.path.join(run_dir, MANIFEST_NAME), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return RunResult(run_dir=run_dir, manifest=manifest, result=result)


def rerun_from_manifest(run_dir: str, out_dir: str,
                        scene: Scene | None = None) -> RunResult:
    """Replay a recorded run; the scene may be passed or read from disk."""
    with open(os.path.join(run_dir, MANIFEST_NAME)) as fh:
        manifest = json.load(fh)
    if scene is None:
        path = manifest.get("scene_path")
        if not path:
            raise PipelineError("verify", "manifest records no scene path")
        scene = load_scene(path)
    request = request_from_json(manifest["request"])
    return run_pipeline(scene, request, out_dir,
                        config_text=manifest.get("config", "{}"),
                        scene_path=manifest.get("scene_path"),
                        write_intermediates=False)


def verify_run(run_dir: str, scene: Scene | None = None) -> dict[str, bool]:
    """Re-execute a run and compare every stage checksum."""
    with open(os.path.join(run_dir, MANIFEST_NAME)) as fh:
        manifest = json.load(fh)
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        redo = rerun_from_manifest(run_dir, tmp, scene=scene)
    return {name: redo.manifest["stages"].get(name) == digest
            for name, digest in manifest["stages"].items()}
