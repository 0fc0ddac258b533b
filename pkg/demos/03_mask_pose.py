"""
Mask and pose-raster conditioning
=================================

Builds the binary edit-region mask and the skeleton raster on the canvas,
then saves a side-by-side conditioning sheet.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from mvpedit.canvas import CanvasLayout, compose_canvas
from mvpedit.cropping import crop_track
from mvpedit.editing import visible_views
from mvpedit.fixtures import default_fixture
from mvpedit.maskpose import build_mask, pose_raster_clip

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

scene, _ = default_fixture(n_pedestrians=1, frame_count=4, seed=0)
track = scene.tracks[0]

tiles, transforms = {}, {}
for view_id in visible_views(scene, track):
    tiles[view_id], transforms[view_id] = crop_track(scene, track, view_id)
clip = compose_canvas(tiles, CanvasLayout(), transforms)

# %% The mask marks the (slightly inflated) pedestrian box in every tile
# that has content; it is strictly binary.
mask = build_mask(scene, track, transforms)
print(f"mask shape {mask.shape}, values {sorted(np.unique(mask))}, "
      f"coverage {mask.mean():.1%}")

# %% The pose raster draws the projected 17-joint skeleton with the same
# transforms, so the limbs land inside the mask.
pose = pose_raster_clip(scene, track, transforms)
inside = mask[pose.any(axis=-1)].mean()
print(f"pose raster shape {pose.shape}, "
      f"{inside:.1%} of drawn pose pixels fall inside the mask")

# %% Save frame 0 as [canvas | mask | pose] for a quick look.
sheet = np.concatenate([clip.frames[0],
                        np.repeat(mask[0, :, :, None] * 255, 3, axis=2),
                        pose[0]], axis=1)
Image.fromarray(sheet).save(OUT / "conditioning_frame0.png")
print(f"wrote {OUT / 'conditioning_frame0.png'}")
