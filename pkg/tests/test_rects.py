"""Rect arithmetic against brute-force point sampling."""

import numpy as np
import pytest

from mvpedit import Rect


def random_rect(rng):
    x0, y0 = rng.uniform(-50, 50, 2)
    return Rect(x0, y0, x0 + rng.uniform(0.1, 40), y0 + rng.uniform(0.1, 40))


def test_basic_properties():
    r = Rect(2.0, 3.0, 10.0, 7.0)
    assert r.width == 8.0
    assert r.height == 4.0
    assert r.center == (6.0, 5.0)
    assert r.area == 32.0
    assert not r.is_degenerate()


def test_degenerate():
    assert Rect(5.0, 5.0, 5.0, 9.0).is_degenerate()
    assert Rect(5.0, 5.0, 9.0, 5.0).is_degenerate()
    assert Rect(5.0, 5.0, 4.0, 9.0).is_degenerate()


def test_from_center_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(100):
        r = random_rect(rng)
        s = r.from_center(r.width, r.height)
        assert np.allclose([s.x0, s.y0, s.x1, s.y1], [r.x0, r.y0, r.x1, r.y1])


def test_intersect_union_vs_sampling():
    rng = np.random.default_rng(12)
    for _ in range(200):
        a, b = random_rect(rng), random_rect(rng)
        inter = a.intersect(b)
        union = a.union(b)
        pts = rng.uniform(-60, 60, size=(64, 2))
        in_a = (pts[:, 0] >= a.x0) & (pts[:, 0] <= a.x1) & \
               (pts[:, 1] >= a.y0) & (pts[:, 1] <= a.y1)
        in_b = (pts[:, 0] >= b.x0) & (pts[:, 0] <= b.x1) & \
               (pts[:, 1] >= b.y0) & (pts[:, 1] <= b.y1)
        both = in_a & in_b
        if not inter.is_degenerate():
            in_i = (pts[:, 0] >= inter.x0) & (pts[:, 0] <= inter.x1) & \
                   (pts[:, 1] >= inter.y0) & (pts[:, 1] <= inter.y1)
            assert np.array_equal(in_i, both)
        else:
            assert not both.any() or a.overlaps(b) == both.any()
        # Union contains every point of either rect.
        assert union.x0 <= min(a.x0, b.x0) + 1e-12
        assert union.y1 >= max(a.y1, b.y1) - 1e-12


def test_overlaps_matches_intersection():
    rng = np.random.default_rng(13)
    for _ in range(200):
        a, b = random_rect(rng), random_rect(rng)
        inter = a.intersect(b)
        assert a.overlaps(b) == (inter.width > 0 and inter.height > 0)


def test_translated():
    r = Rect(1.0, 2.0, 3.0, 4.0).translated(5.0, -1.0)
    assert (r.x0, r.y0, r.x1, r.y1) == (6.0, 1.0, 8.0, 3.0)


@pytest.mark.parametrize("w,h", [(4.0, 6.0), (0.5, 0.5), (100.0, 1.0)])
def test_from_center_dimensions(w, h):
    r = Rect(0.0, 0.0, 10.0, 10.0).from_center(w, h)
    assert r.width == pytest.approx(w)
    assert r.height == pytest.approx(h)
    assert r.center == pytest.approx((5.0, 5.0))
