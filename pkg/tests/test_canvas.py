"""Tests for canvas stitching and unstitching."""

import numpy as np
import pytest

from mvpedit.canvas import (CanvasLayout, DEFAULT_LAYOUT, compose_canvas,
                            decompose_canvas)
from mvpedit.scene import CANONICAL_VIEWS


def random_tiles(rng, views, T=3, tile=(480, 240), channels=3):
    return {v: rng.integers(0, 256, (T,) + tile + (channels,), dtype=np.uint8)
            for v in views}


def test_default_layout_geometry():
    assert DEFAULT_LAYOUT.canvas_size == (960, 720)
    assert DEFAULT_LAYOUT.view_order == CANONICAL_VIEWS
    seen = np.zeros((960, 720), dtype=np.int32)
    for view in CANONICAL_VIEWS:
        rs, cs = DEFAULT_LAYOUT.slot(view)
        seen[rs, cs] += 1
    assert np.all(seen == 1)    # slots tile the canvas exactly once


def test_slot_positions_follow_view_order():
    th, tw = DEFAULT_LAYOUT.tile_size
    for idx, view in enumerate(CANONICAL_VIEWS):
        rs, cs = DEFAULT_LAYOUT.slot(view)
        r, c = divmod(idx, 3)
        assert (rs.start, rs.stop) == (r * th, (r + 1) * th)
        assert (cs.start, cs.stop) == (c * tw, (c + 1) * tw)


def test_compose_decompose_bit_exact():
    rng = np.random.default_rng(11)
    for trial in range(100):
        n_views = int(rng.integers(1, 7))
        views = list(rng.choice(CANONICAL_VIEWS, size=n_views, replace=False))
        tiles = random_tiles(rng, views, T=int(rng.integers(1, 5)))
        clip = compose_canvas(tiles)
        back = decompose_canvas(clip)
        for view in views:
            assert np.array_equal(back[view], tiles[view])
        for view in set(CANONICAL_VIEWS) - set(views):
            assert not back[view].any()    # placeholder tiles stay zero


def test_compose_places_each_view_in_its_slot():
    rng = np.random.default_rng(12)
    tiles = random_tiles(rng, CANONICAL_VIEWS, T=2)
    clip = compose_canvas(tiles)
    assert clip.frames.shape == (2, 960, 720, 3)
    for view in CANONICAL_VIEWS:
        rs, cs = DEFAULT_LAYOUT.slot(view)
        assert np.array_equal(clip.frames[:, rs, cs], tiles[view])


def test_compose_validates_inputs():
    rng = np.random.default_rng(13)
    with pytest.raises(ValueError):
        compose_canvas({})
    tiles = random_tiles(rng, ["FRONT", "BACK"], T=2)
    bad = dict(tiles)
    bad["BACK"] = bad["BACK"][:1]
    with pytest.raises(ValueError):
        compose_canvas(bad)
    with pytest.raises(ValueError):
        compose_canvas({"SIDE": tiles["FRONT"]})
    with pytest.raises(ValueError):
        compose_canvas({"FRONT": tiles["FRONT"][:, :100]})


def test_custom_layout_round_trip():
    layout = CanvasLayout(rows=1, cols=2, tile_size=(32, 16),
                          view_order=("FRONT", "BACK"))
    rng = np.random.default_rng(14)
    tiles = random_tiles(rng, ["FRONT", "BACK"], T=4, tile=(32, 16))
    clip = compose_canvas(tiles, layout)
    assert clip.frames.shape == (4, 32, 32, 3)
    back = decompose_canvas(clip)
    for view in tiles:
        assert np.array_equal(back[view], tiles[view])


def test_layout_validation():
    with pytest.raises(ValueError):
        CanvasLayout(rows=2, cols=3, view_order=("FRONT", "BACK"))
    with pytest.raises(ValueError):
        CanvasLayout(rows=1, cols=2, view_order=("FRONT", "FRONT"))


def test_has_content_tracks_transforms():
    rng = np.random.default_rng(15)
    tiles = random_tiles(rng, ["FRONT"], T=2)
    clip = compose_canvas(tiles, transforms={"FRONT": [None, "ct"]})
    assert not clip.has_content("FRONT", 0)
    assert clip.has_content("FRONT", 1)
    assert not clip.has_content("BACK", 0)


def test_decompose_returns_copies():
    rng = np.random.default_rng(16)
    tiles = random_tiles(rng, ["FRONT"], T=1)
    clip = compose_canvas(tiles)
    back = decompose_canvas(clip)
    back["FRONT"][:] = 0
    assert clip.frames.any()    # mutating the output leaves the canvas alone
