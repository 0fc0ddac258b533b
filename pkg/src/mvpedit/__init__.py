"""Multi-view pedestrian video editing with exact desk-scale evaluation."""

from .attributes import (AttributeToken, DEFAULT_PALETTE, PROMPT_TEMPLATE,
                         SKIN_TONE)
from .canvas import (CanvasClip, CanvasLayout, DEFAULT_LAYOUT, compose_canvas,
                     decompose_canvas)
from .cropping import (CROP_MODES, CropTransform, DEFAULT_EXPAND_FACTOR,
                       DEFAULT_TILE_SIZE, crop_track, crop_window,
                       expand_rect, extract_tile, fit_aspect)
from .diffusion import (DenoiserConfig, DenoiserModel, DiffusionSchedule,
                        TrainConfig, ddpm_forward, load_checkpoint,
                        sample_latent, save_checkpoint, timestep_embedding,
                        train_denoiser)
from .editing import (EDIT_OPS, EditRequest, EditResult, compute_dominant_view,
                      edit_pipeline, track_from_motion, visible_views)
from .evalbev import (ApResult, DISTANCE_THRESHOLDS, Detection, GroundTruth,
                      average_precision, evaluate, format_report,
                      load_detections, load_ground_truth, map_score,
                      match_detections)
from .fixtures import (DEFAULT_WALKS, FixtureConfig, PedestrianSpec,
                       default_fixture, make_fixture, make_sprite_dataset,
                       ring_camera, straight_motion, walk_skeleton)
from .generators import (ConditioningBundle, GENERATORS, conditioning_latents,
                         ddpm_generate, generate, identity_generate,
                         make_bundle, sprite_generate, target_latents,
                         training_samples_from_pairs)
from .geometry import (EPS_DEPTH, Keypoints2D, ViewBox2D, Visibility,
                       bev_center, bev_distance, box_corners, camera_to_world,
                       project_box3d, project_point, project_points,
                       project_skeleton, unproject_point, world_to_camera)
from .latent import (LATENT_FACTOR, decode_latent, encode_latent,
                     encode_mask_latent)
from .maskpose import (COCO_JOINT_NAMES, COCO_SKELETON, POSE_PALETTE,
                       build_mask, joint_color, limb_color, pose_raster_clip,
                       rasterize_pose, zero_pose_for_removal)
from .pipeline import (PipelineError, RunResult, rerun_from_manifest,
                       run_pipeline, verify_run)
from .rects import Rect
from .reintegrate import DEFAULT_BLEND_BAND, mask_alpha, reintegrate
from .scene import (Box3D, CANONICAL_VIEWS, CameraView, PedestrianTrack,
                    Scene, SceneValidationError, TrackFrame, load_scene,
                    save_scene)
from .sprites import decode_pose_raster, draw_pedestrian_sprite, sprite_extent

__version__ = "0.1.0"

__all__ = [
    "AttributeToken", "DEFAULT_PALETTE", "PROMPT_TEMPLATE", "SKIN_TONE",
    "CanvasClip", "CanvasLayout", "DEFAULT_LAYOUT", "compose_canvas",
    "decompose_canvas",
    "CROP_MODES", "CropTransform", "DEFAULT_EXPAND_FACTOR",
    "DEFAULT_TILE_SIZE", "crop_track", "crop_window", "expand_rect",
    "extract_tile", "fit_aspect",
    "DenoiserConfig", "DenoiserModel", "DiffusionSchedule", "TrainConfig",
    "ddpm_forward", "load_checkpoint", "sample_latent", "save_checkpoint",
    "timestep_embedding", "train_denoiser",
    "EDIT_OPS", "EditRequest", "EditResult", "compute_dominant_view",
    "edit_pipeline", "track_from_motion", "visible_views",
    "ApResult", "DISTANCE_THRESHOLDS", "Detection", "GroundTruth",
    "average_precision", "evaluate", "format_report", "load_detections",
    "load_ground_truth", "map_score", "match_detections",
    "DEFAULT_WALKS", "FixtureConfig", "PedestrianSpec", "default_fixture",
    "make_fixture", "make_sprite_dataset", "ring_camera", "straight_motion",
    "walk_skeleton",
    "ConditioningBundle", "GENERATORS", "conditioning_latents",
    "ddpm_generate", "generate", "identity_generate", "make_bundle",
    "sprite_generate", "target_latents", "training_samples_from_pairs",
    "EPS_DEPTH", "Keypoints2D", "ViewBox2D", "Visibility", "bev_center",
    "bev_distance", "box_corners", "camera_to_world", "project_box3d",
    "project_point", "project_points", "project_skeleton", "unproject_point",
    "world_to_camera",
    "LATENT_FACTOR", "decode_latent", "encode_latent", "encode_mask_latent",
    "COCO_JOINT_NAMES", "COCO_SKELETON", "POSE_PALETTE", "build_mask",
    "joint_color", "limb_color", "pose_raster_clip", "rasterize_pose",
    "zero_pose_for_removal",
    "PipelineError", "RunResult", "rerun_from_manifest", "run_pipeline",
    "verify_run",
    "Rect",
    "DEFAULT_BLEND_BAND", "mask_alpha", "reintegrate",
    "Box3D", "CANONICAL_VIEWS", "CameraView", "PedestrianTrack", "Scene",
    "SceneValidationError", "TrackFrame", "load_scene", "save_scene",
    "decode_pose_raster", "draw_pedestrian_sprite", "sprite_extent",
    "__version__",
]
