"""Command-line entry point wiring every pipeline stage to a subcommand.

Subcommands: fixture, project, crop, compose, decompose, mask,
pose-raster, train, sample, generate, edit, eval, verify. A JSON config
file (via --config or $MVPEDIT_CONFIG) supplies defaults for flags the
command line leaves unset. Exit codes: 0 success, 2 validation error,
3 stage failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import json
import os
import sys

import numpy as np
from PIL import Image

from .attributes import AttributeToken
from .canvas import CanvasClip, CanvasLayout, DEFAULT_LAYOUT, compose_canvas, decompose_canvas
from .cropping import (CROP_MODES, DEFAULT_EXPAND_FACTOR, DEFAULT_TILE_SIZE,
                       crop_track)
from .diffusion import (DiffusionSchedule, TrainConfig, load_checkpoint,
                        save_checkpoint, train_denoiser)
from .editing import EditRequest, visible_views
from .evalbev import evaluate, format_report, load_detections, load_ground_truth
from .fixtures import (DEFAULT_WALKS, FixtureConfig, make_fixture,
                       make_sprite_dataset)
from .generators import (GENERATORS, ddpm_generate, generate, make_bundle,
                         training_samples_from_pairs)
from .maskpose import (DEFAULT_DILATE_ITERATIONS, DEFAULT_DILATE_RADIUS,
                       DEFAULT_JOINT_RADIUS, DEFAULT_LIMB_WIDTH,
                       DEFAULT_MASK_FACTOR, POSE_PALETTE, build_mask,
                       pose_raster_clip, zero_pose_for_removal)
from .pipeline import PipelineError, project_stage, run_pipeline, verify_run
from .scene import load_scene, save_scene

CONFIG_ENV_VAR = "MVPEDIT_CONFIG"


def _load_config(path: str | None) -> tuple[dict, str]:
    """Read the JSON config named by --config or $MVPEDIT_CONFIG."""
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}, "{}"
    with open(path) as fh:
        text = fh.read()
    data = json.loads(text) if text.strip() else {}
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data, text


def _opt(flag_value, cfg: dict, key: str, default):
    """Command line beats config beats built-in default."""
    if flag_value is not None:
        return flag_value
    return cfg.get(key, default)


def _parse_hw(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"expected HxW, got {text!r}")
    return int(parts[0]), int(parts[1])


def _layout_from(cfg: dict, layout_flag: str | None,
                 tile_flag: str | None) -> CanvasLayout:
    tile = (_parse_hw(tile_flag) if tile_flag
            else tuple(cfg.get("tile_size", DEFAULT_TILE_SIZE)))
    grid = (_parse_hw(layout_flag) if layout_flag
            else tuple(cfg.get("layout", (DEFAULT_LAYOUT.rows,
                                          DEFAULT_LAYOUT.cols))))
    rows, cols = grid
    if rows * cols != len(DEFAULT_LAYOUT.view_order):
        raise ValueError(f"layout {rows}x{cols} cannot hold "
                         f"{len(DEFAULT_LAYOUT.view_order)} views")
    return CanvasLayout(rows=rows, cols=cols, tile_size=tile)


def _palette_from(cfg: dict):
    pal = cfg.get("palette")
    if pal is None:
        return POSE_PALETTE
    return tuple(tuple(int(v) for v in color) for color in pal)


def _save_frames(dirpath: str, frames: np.ndarray) -> None:
    os.makedirs(dirpath, exist_ok=True)
    for t in range(frames.shape[0]):
        Image.fromarray(frames[t]).save(os.path.join(dirpath, f"{t:05d}.png"))


def _load_frames(dirpath: str) -> np.ndarray:
    paths = sorted(glob.glob(os.path.join(dirpath, "*.png")))
    if not paths:
        raise ValueError(f"no PNG frames under {dirpath}")
    return np.stack([np.asarray(Image.open(p).convert("RGB")) for p in paths])


def _load_motion(path: str) -> np.ndarray:
    """Motion file: JSON nested lists shaped (T, J, 3), world meters."""
    with open(path) as fh:
        data = json.load(fh)
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"motion file must be (T, J, 3), got {arr.shape}")
    return arr


def _attributes_from(args) -> AttributeToken | None:
    top = getattr(args, "top", None)
    pants = getattr(args, "pants", None)
    if top is None and pants is None:
        return None
    if top is None or pants is None:
        raise ValueError("--top and --pants must be given together")
    return AttributeToken(top, pants)


def _conditioning(scene, track, layout, *, expand_factor, crop_mode):
    """Crop every visible view and stitch the canvas; returns transforms too."""
    views = visible_views(scene, track)
    if not views:
        raise ValueError(f"track {track.track_id!r} is never visible")
    tiles, transforms = {}, {}
    for view_id in views:
        tv, tfs = crop_track(scene, track, view_id,
                             tile_size=layout.tile_size,
                             expand_factor=expand_factor, mode=crop_mode)
        tiles[view_id] = tv
        transforms[view_id] = tfs
    return compose_canvas(tiles, layout, transforms), transforms


def _transforms_to_json(transforms) -> dict:
    out = {}
    for view_id, tfs in transforms.items():
        out[view_id] = [None if ct is None else
                        {"source_rect": list(ct.source_rect),
                         "pad": list(ct.pad),
                         "tile_size": list(ct.tile_size)} for ct in tfs]
    return out


def cmd_fixture(args, cfg, cfg_text) -> int:
    n = args.pedestrians
    if not 0 <= n <= len(DEFAULT_WALKS):
        raise ValueError(f"--pedestrians must be 0..{len(DEFAULT_WALKS)}")
    fixture_cfg = FixtureConfig(
        frame_count=args.frames, width=args.width, height=args.height,
        focal=args.focal, ring_radius=args.ring_radius,
        cam_height=args.cam_height, seed=args.seed,
        pedestrians=DEFAULT_WALKS[:n])
    scene, twin = make_fixture(fixture_cfg)
    save_scene(scene, args.out)
    print(f"scene: {os.path.join(args.out, 'scene.json')}")
    if not args.no_twin:
        twin_dir = args.twin_out or os.path.join(args.out, "twin")
        save_scene(twin, twin_dir)
        print(f"twin:  {os.path.join(twin_dir, 'scene.json')}")
    return 0


def cmd_project(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    data = project_stage(scene, scene.track(args.track))
    text = json.dumps(data, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_crop(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    track = scene.track(args.track)
    layout = _layout_from(cfg, None, args.tile_size)
    expand = _opt(args.expand_factor, cfg, "expand_factor", DEFAULT_EXPAND_FACTOR)
    mode = _opt(args.mode, cfg, "crop_mode", "per_frame")
    views = [args.view] if args.view else visible_views(scene, track)
    if not views:
        raise ValueError(f"track {track.track_id!r} is never visible")
    transforms = {}
    for view_id in views:
        tiles, tfs = crop_track(scene, track, view_id,
                                tile_size=layout.tile_size,
                                expand_factor=expand, mode=mode)
        _save_frames(os.path.join(args.out, view_id), tiles)
        transforms[view_id] = tfs
    with open(os.path.join(args.out, "transforms.json"), "w") as fh:
        json.dump(_transforms_to_json(transforms), fh, indent=1)
    print(f"wrote tiles for {len(views)} view(s) under {args.out}")
    return 0


def cmd_compose(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    track = scene.track(args.track)
    layout = _layout_from(cfg, args.layout, args.tile_size)
    expand = _opt(args.expand_factor, cfg, "expand_factor", DEFAULT_EXPAND_FACTOR)
    mode = _opt(args.mode, cfg, "crop_mode", "per_frame")
    canvas, transforms = _conditioning(scene, track, layout,
                                       expand_factor=expand, crop_mode=mode)
    _save_frames(os.path.join(args.out, "canvas"), canvas.frames)
    with open(os.path.join(args.out, "transforms.json"), "w") as fh:
        json.dump(_transforms_to_json(transforms), fh, indent=1)
    print(f"wrote {canvas.frame_count} canvas frames under {args.out}")
    return 0


def cmd_decompose(args, cfg, cfg_text) -> int:
    layout = _layout_from(cfg, args.layout, args.tile_size)
    frames = _load_frames(args.frames)
    clip = CanvasClip(layout=layout, frames=frames, transforms={})
    for view_id, tiles in decompose_canvas(clip).items():
        _save_frames(os.path.join(args.out, view_id), tiles)
    print(f"wrote {len(layout.view_order)} tile stacks under {args.out}")
    return 0


def cmd_mask(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    track = scene.track(args.track)
    layout = _layout_from(cfg, None, args.tile_size)
    expand = _opt(args.expand_factor, cfg, "expand_factor", DEFAULT_EXPAND_FACTOR)
    factor = _opt(args.mask_factor, cfg, "mask_factor", DEFAULT_MASK_FACTOR)
    _, transforms = _conditioning(scene, track, layout,
                                  expand_factor=expand, crop_mode="per_frame")
    mask = build_mask(scene, track, transforms, layout, factor)
    _save_frames(args.out, mask * np.uint8(255))
    print(f"wrote {mask.shape[0]} mask frames under {args.out}")
    return 0


def cmd_pose_raster(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    track = scene.track(args.track)
    layout = _layout_from(cfg, None, args.tile_size)
    expand = _opt(args.expand_factor, cfg, "expand_factor", DEFAULT_EXPAND_FACTOR)
    radius = _opt(args.dilate_radius, cfg, "dilate_radius", DEFAULT_DILATE_RADIUS)
    iters = _opt(args.dilate_iterations, cfg, "dilate_iterations",
                 DEFAULT_DILATE_ITERATIONS)
    _, transforms = _conditioning(scene, track, layout,
                                  expand_factor=expand, crop_mode="per_frame")
    raster = pose_raster_clip(scene, track, transforms, layout,
                              joint_radius=args.joint_radius,
                              limb_width=args.limb_width,
                              dilate_radius=radius, dilate_iterations=iters,
                              palette=_palette_from(cfg))
    if args.zero_masked:
        mask = build_mask(scene, track, transforms, layout)
        raster = zero_pose_for_removal(raster, mask)
    _save_frames(args.out, raster)
    print(f"wrote {raster.shape[0]} pose frames under {args.out}")
    return 0


def cmd_train(args, cfg, cfg_text) -> int:
    pairs = make_sprite_dataset(args.samples, args.data_seed)
    samples = training_samples_from_pairs(pairs, args.drop_mask_channel)
    train_cfg = TrainConfig(steps=args.steps, lr=args.lr, seed=args.seed,
                            width=args.width, blocks=args.blocks)
    model, losses = train_denoiser(samples, train_cfg)
    save_checkpoint(args.out, model)
    head = float(np.mean(losses[:20]))
    tail = float(np.mean(losses[-20:]))
    print(f"trained {args.steps} steps on {len(samples)} clips; "
          f"loss {head:.4f} -> {tail:.4f}")
    print(f"checkpoint: {args.out}")
    return 0


def cmd_sample(args, cfg, cfg_text) -> int:
    model = load_checkpoint(args.checkpoint)
    pairs = make_sprite_dataset(max(args.index + 1, 1), args.data_seed)
    bundle, target = pairs[args.index]
    bundle = dataclasses.replace(bundle, seed=args.seed)
    drop = model.config.in_channels == model.config.out_channels + 12
    clip = ddpm_generate(bundle, model, DiffusionSchedule(),
                         drop_mask_channel=drop)
    _save_frames(os.path.join(args.out, "sampled"), clip.frames)
    _save_frames(os.path.join(args.out, "conditioned"),
                 bundle.masked_canvas.frames)
    _save_frames(os.path.join(args.out, "target"), target)
    print(f"wrote sample under {args.out}")
    return 0


def cmd_generate(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    track = scene.track(args.track)
    backend = _opt(args.backend, cfg, "backend", "sprite")
    if backend not in GENERATORS:
        raise ValueError(f"unknown backend {backend!r}; "
                         f"choose from {sorted(GENERATORS)}")
    layout = _layout_from(cfg, None, args.tile_size)
    expand = _opt(args.expand_factor, cfg, "expand_factor", DEFAULT_EXPAND_FACTOR)
    factor = _opt(args.mask_factor, cfg, "mask_factor", DEFAULT_MASK_FACTOR)
    canvas, transforms = _conditioning(scene, track, layout,
                                       expand_factor=expand,
                                       crop_mode="per_frame")
    mask = build_mask(scene, track, transforms, layout, factor)
    pose = pose_raster_clip(scene, track, transforms, layout,
                            palette=_palette_from(cfg))
    attrs = _attributes_from(args) or track.attributes
    bundle = make_bundle(canvas, mask, pose, attrs, args.seed)
    kwargs = {}
    if backend == "ddpm":
        if not args.checkpoint:
            raise ValueError("backend 'ddpm' needs --checkpoint")
        kwargs["model"] = load_checkpoint(args.checkpoint)
    clip = generate(bundle, backend, **kwargs)
    _save_frames(os.path.join(args.out, "generated"), clip.frames)
    _save_frames(os.path.join(args.out, "masked"), bundle.masked_canvas.frames)
    _save_frames(os.path.join(args.out, "mask"), mask * np.uint8(255))
    _save_frames(os.path.join(args.out, "pose"), pose)
    print(f"generated {clip.frame_count} canvas frames under {args.out}")
    return 0


def cmd_edit(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene)
    backend = _opt(args.backend, cfg, "backend", "sprite")
    request = EditRequest(
        op=args.op, track_id=args.track,
        motion=_load_motion(args.motion) if args.motion else None,
        attributes=_attributes_from(args), backend=backend, seed=args.seed,
        crop_mode=args.crop_mode,
        blend_band=_opt(args.blend_band, cfg, "blend_band", 8))
    kwargs = {
        "expand_factor": _opt(args.expand_factor, cfg, "expand_factor",
                              DEFAULT_EXPAND_FACTOR),
        "mask_factor": _opt(args.mask_factor, cfg, "mask_factor",
                            DEFAULT_MASK_FACTOR),
        "dilate_radius": _opt(None, cfg, "dilate_radius", DEFAULT_DILATE_RADIUS),
        "dilate_iterations": _opt(None, cfg, "dilate_iterations",
                                  DEFAULT_DILATE_ITERATIONS),
        "palette": _palette_from(cfg),
    }
    if backend == "ddpm":
        if not args.checkpoint:
            raise ValueError("backend 'ddpm' needs --checkpoint")
        kwargs["model"] = load_checkpoint(args.checkpoint)
    run = run_pipeline(scene, request, args.out, config_text=cfg_text,
                       scene_path=args.scene,
                       write_intermediates=not args.no_intermediates,
                       verify=args.verify, **kwargs)
    for stage, digest in run.manifest["stages"].items():
        print(f"{stage:12s} {digest[:16]}")
    print(f"run: {run.run_dir}")
    return 0


def cmd_eval(args, cfg, cfg_text) -> int:
    dets = load_detections(args.dets)
    gts = load_ground_truth(args.gt)
    result = evaluate(dets, gts, convention=args.convention)
    print(format_report(result))
    return 0


def cmd_verify(args, cfg, cfg_text) -> int:
    scene = load_scene(args.scene) if args.scene else None
    statuses = verify_run(args.run, scene=scene)
    failed = [s for s, ok in statuses.items() if not ok]
    for stage, ok in statuses.items():
        print(f"{stage:12s} {'ok' if ok else 'MISMATCH'}")
    if failed:
        print(f"verification failed: {', '.join(failed)}")
        return 3
    print("verification passed")
    return 0


def _add_scene_track(p) -> None:
    p.add_argument("--scene", required=True, help="scene directory or scene.json")
    p.add_argument("--track", required=True, help="track id")


def _add_crop_flags(p, with_mode: bool = True) -> None:
    p.add_argument("--tile-size", help="tile HxW, default 480x240")
    p.add_argument("--expand-factor", type=float, help="crop box growth, default 1.6")
    if with_mode:
        p.add_argument("--mode", choices=CROP_MODES, help="crop window mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvpedit",
        description="Multi-view pedestrian editing pipeline")
    parser.add_argument("--config",
                        help=f"JSON config path (default ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="render a synthetic camera-ring scene")
    p.add_argument("--out", required=True)
    p.add_argument("--pedestrians", type=int, default=1)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--focal", type=float, default=480.0)
    p.add_argument("--ring-radius", type=float, default=8.0)
    p.add_argument("--cam-height", type=float, default=1.6)
    p.add_argument("--twin-out", help="where to save the empty twin")
    p.add_argument("--no-twin", action="store_true")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("project", help="project a track's 3D boxes per view")
    _add_scene_track(p)
    p.add_argument("--out", help="output JSON (default stdout)")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("crop", help="cut dynamic crops into tile videos")
    _add_scene_track(p)
    p.add_argument("--out", required=True)
    p.add_argument("--view", help="restrict to one view")
    _add_crop_flags(p)
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("compose", help="stitch per-view tiles into canvases")
    _add_scene_track(p)
    p.add_argument("--out", required=True)
    p.add_argument("--layout", help="grid RxC, default 2x3")
    _add_crop_flags(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("decompose", help="split canvas frames back into tiles")
    p.add_argument("--frames", required=True, help="directory of canvas PNGs")
    p.add_argument("--out", required=True)
    p.add_argument("--layout", help="grid RxC, default 2x3")
    p.add_argument("--tile-size", help="tile HxW, default 480x240")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("mask", help="write the editable-region mask volume")
    _add_scene_track(p)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-factor", type=float, help="box growth, default 1.2")
    _add_crop_flags(p, with_mode=False)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("pose-raster", help="write skeleton control rasters")
    _add_scene_track(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dilate-radius", type=int, help="default 1")
    p.add_argument("--dilate-iterations", type=int, help="default 2")
    p.add_argument("--joint-radius", type=int, default=DEFAULT_JOINT_RADIUS)
    p.add_argument("--limb-width", type=int, default=DEFAULT_LIMB_WIDTH)
    p.add_argument("--zero-masked", action="store_true",
                   help="zero the raster inside the mask (removal input)")
    _add_crop_flags(p, with_mode=False)
    p.set_defaults(func=cmd_pose_raster)

    p = sub.add_parser("train", help="train the toy latent denoiser")
    p.add_argument("--out", required=True, help="checkpoint .npz path")
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=4)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--blocks", type=int, default=3)
    p.add_argument("--drop-mask-channel", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="draw one conditioned diffusion sample")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0,
                   help="which built-in conditioning sample")
    p.add_argument("--data-seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("generate", help="run a generation backend on a track")
    _add_scene_track(p)
    p.add_argument("--out", required=True)
    p.add_argument("--backend", choices=sorted(GENERATORS))
    p.add_argument("--checkpoint", help="denoiser checkpoint (ddpm backend)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top", help="top color")
    p.add_argument("--pants", help="pants color")
    p.add_argument("--mask-factor", type=float)
    _add_crop_flags(p, with_mode=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("edit", help="run one full edit and record artifacts")
    p.add_argument("--scene", required=True)
    p.add_argument("--op", required=True, choices=("replace", "insert", "remove"))
    p.add_argument("--track", help="target track id")
    p.add_argument("--motion", help="JSON motion file (T, J, 3)")
    p.add_argument("--top", help="top color")
    p.add_argument("--pants", help="pants color")
    p.add_argument("--backend", choices=sorted(GENERATORS))
    p.add_argument("--checkpoint", help="denoiser checkpoint (ddpm backend)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crop-mode", choices=CROP_MODES)
    p.add_argument("--blend-band", type=int)
    p.add_argument("--mask-factor", type=float)
    p.add_argument("--expand-factor", type=float)
    p.add_argument("--out", required=True, help="run directory")
    p.add_argument("--verify", action="store_true",
                   help="assert stage contracts on live data")
    p.add_argument("--no-intermediates", action="store_true")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("eval", help="BEV distance-threshold AP report")
    p.add_argument("--dets", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--convention", choices=("nuscenes", "voc101"),
                   default="nuscenes")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="re-run a manifest and compare checksums")
    p.add_argument("--run", required=True, help="run directory")
    p.add_argument("--scene", help="scene override (else manifest path)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, cfg_text = _load_config(args.config)
        return args.func(args, cfg, cfg_text)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
