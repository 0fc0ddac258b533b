"""Shared fixtures: synthetic scenes and random camera builders."""

from __future__ import annotations

import numpy as np
import pytest

from mvpedit import CameraView, default_fixture


def random_camera(rng: np.random.Generator, cam_id: str = "FRONT",
                  width: int = 640, height: int = 480) -> CameraView:
    """A look-at pinhole camera with randomized pose and intrinsics."""
    while True:
        pos = rng.uniform(-10.0, 10.0, 3)
        pos[2] = rng.uniform(0.5, 5.0)
        target = rng.uniform(-3.0, 3.0, 3)
        target[2] = rng.uniform(0.0, 2.0)
        fwd = target - pos
        n = np.linalg.norm(fwd)
        if n < 1.0:
            continue
        fwd = fwd / n
        x = np.cross([0.0, 0.0, -1.0], fwd)
        nx = np.linalg.norm(x)
        if nx > 1e-3:
            break
    x = x / nx
    y = np.cross(fwd, x)
    R = np.stack([x, y, fwd])
    t = -R @ pos
    fx = rng.uniform(200.0, 800.0)
    fy = rng.uniform(200.0, 800.0)
    K = np.array([[fx, 0.0, width / 2 + rng.uniform(-20, 20)],
                  [0.0, fy, height / 2 + rng.uniform(-20, 20)],
                  [0.0, 0.0, 1.0]])
    return CameraView(id=cam_id, K=K, R=R, t=t, width=width, height=height)


@pytest.fixture(scope="session")
def ring_pair_small():
    """(scene, empty twin) with one walker over 4 frames."""
    return default_fixture(n_pedestrians=1, frame_count=4, seed=0)


@pytest.fixture(scope="session")
def ring_scene_small(ring_pair_small):
    """One walker, 4 frames: cheap scene for unit tests."""
    return ring_pair_small[0]


@pytest.fixture(scope="session")
def ring_pair():
    """(scene, empty twin) with one walker over 8 frames."""
    return default_fixture(n_pedestrians=1, frame_count=8, seed=0)


@pytest.fixture(scope="session")
def ring_scene(ring_pair):
    """One walker, 8 frames: mid-size scene for stage tests."""
    return ring_pair[0]
