"""Resize, dilation and rasterization primitives vs direct oracles."""

import numpy as np

from mvpedit.imageops import (checksum, dilate, draw_capsule, draw_disc,
                              fill_convex_polygon, resize_bilinear,
                              resize_nearest)


def test_resize_same_size_is_identity():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(37, 23, 3), dtype=np.uint8)
    out = resize_bilinear(img, (37, 23))
    assert np.array_equal(out, img)
    assert resize_nearest(img, (37, 23)).tobytes() == img.tobytes()


def test_resize_constant_image_stays_constant():
    img = np.full((16, 16, 3), 77, dtype=np.uint8)
    for hw in [(7, 31), (32, 32), (3, 3)]:
        out = resize_bilinear(img, hw)
        assert out.shape == hw + (3,)
        assert (out == 77).all()


def test_resize_linear_field_is_fixed_point():
    # Bilinear interpolation reproduces affine intensity fields exactly.
    ys, xs = np.mgrid[0:24, 0:48].astype(np.float64)
    img = 3.0 * xs + 2.0 * ys + 5.0
    out = resize_bilinear(img, (12, 24))
    sy = 24 / 12
    sx = 48 / 24
    oy = (np.arange(12) + 0.5) * sy - 0.5
    ox = (np.arange(24) + 0.5) * sx - 0.5
    expect = 3.0 * ox[None, :] + 2.0 * oy[:, None] + 5.0
    assert np.allclose(out, expect, atol=1e-9)


def test_resize_bilinear_matches_direct_interpolation():
    rng = np.random.default_rng(1)
    img = rng.uniform(0, 255, size=(9, 14)).astype(np.float64)
    h_out, w_out = 21, 6
    out = resize_bilinear(img, (h_out, w_out))
    for i in range(h_out):
        for j in range(w_out):
            sy = (i + 0.5) * 9 / h_out - 0.5
            sx = (j + 0.5) * 14 / w_out - 0.5
            y0 = int(np.clip(np.floor(sy), 0, 8))
            x0 = int(np.clip(np.floor(sx), 0, 13))
            y1, x1 = min(y0 + 1, 8), min(x0 + 1, 13)
            fy = np.clip(sy, 0, 8) - y0
            fx = np.clip(sx, 0, 13) - x0
            v = (img[y0, x0] * (1 - fy) * (1 - fx) + img[y0, x1] * (1 - fy) * fx
                 + img[y1, x0] * fy * (1 - fx) + img[y1, x1] * fy * fx)
            assert abs(out[i, j] - v) < 1e-9


def brute_dilate(img, radius):
    h, w = img.shape
    out = np.zeros_like(img)
    for i in range(h):
        for j in range(w):
            i0, i1 = max(i - radius, 0), min(i + radius + 1, h)
            j0, j1 = max(j - radius, 0), min(j + radius + 1, w)
            out[i, j] = img[i0:i1, j0:j1].max()
    return out


def test_dilate_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(20):
        img = (rng.random((32, 32)) < 0.1).astype(np.uint8)
        for radius in (1, 2):
            assert np.array_equal(dilate(img, radius), brute_dilate(img, radius))


def test_dilate_iteration_composition():
    # n iterations of radius r equal one pass of radius n*r.
    rng = np.random.default_rng(3)
    for _ in range(10):
        img = (rng.random((32, 32)) < 0.05).astype(np.uint8)
        assert np.array_equal(dilate(img, 1, 2), dilate(img, 2, 1))
        assert np.array_equal(dilate(img, 1, 3), dilate(img, 3, 1))


def test_dilate_identity_and_shapes():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 256, size=(3, 10, 12, 3), dtype=np.uint8)
    assert np.array_equal(dilate(img, 0, 2), img)
    assert np.array_equal(dilate(img, 1, 0), img)
    out = dilate(img, 1, 1)
    assert out.shape == img.shape
    # Frames dilate independently.
    per_frame = np.stack([dilate(img[t], 1, 1) for t in range(3)])
    assert np.array_equal(out, per_frame)


def test_dilate_channelwise():
    img = np.zeros((7, 7, 3), dtype=np.uint8)
    img[3, 3] = (10, 0, 200)
    out = dilate(img, 1, 1)
    assert (out[2:5, 2:5, 0] == 10).all()
    assert (out[:, :, 1] == 0).all()
    assert (out[2:5, 2:5, 2] == 200).all()


def test_draw_disc_matches_distance_test():
    img = np.zeros((20, 20, 3), dtype=np.uint8)
    draw_disc(img, (9.3, 7.8), 4.0, (255, 10, 0))
    ys, xs = np.mgrid[0:20, 0:20]
    inside = (xs - 9.3) ** 2 + (ys - 7.8) ** 2 <= 4.0 ** 2
    assert np.array_equal(img[:, :, 0] == 255, inside)
    assert np.array_equal(img[:, :, 1] == 10, inside)


def test_draw_capsule_matches_segment_distance():
    img = np.zeros((30, 30), dtype=np.uint8)
    p0, p1, r = (5.0, 6.0), (22.0, 19.0), 2.5
    draw_capsule(img, p0, p1, r, 255)
    d = np.array(p1) - np.array(p0)
    L2 = d @ d
    ys, xs = np.mgrid[0:30, 0:30]
    t = np.clip(((xs - p0[0]) * d[0] + (ys - p0[1]) * d[1]) / L2, 0, 1)
    dist2 = (xs - p0[0] - t * d[0]) ** 2 + (ys - p0[1] - t * d[1]) ** 2
    assert np.array_equal(img == 255, dist2 <= r * r)


def test_fill_convex_polygon_matches_half_planes():
    img = np.zeros((25, 25), dtype=np.uint8)
    pts = [(4.0, 3.0), (20.0, 6.0), (18.0, 21.0), (6.0, 18.0)]
    fill_convex_polygon(img, pts, 255)
    ys, xs = np.mgrid[0:25, 0:25]
    inside = np.ones((25, 25), dtype=bool)
    n = len(pts)
    # CCW-in-image winding: interior keeps a consistent cross-product sign.
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        cross = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
        inside &= cross >= 0
    assert np.array_equal(img == 255, inside)
    # Vertex order must not matter.
    img2 = np.zeros((25, 25), dtype=np.uint8)
    fill_convex_polygon(img2, pts[::-1], 255)
    assert np.array_equal(img, img2)


def test_checksum_sensitivity():
    a = np.arange(12, dtype=np.uint8).reshape(3, 4)
    assert checksum(a) == checksum(a.copy())
    assert checksum(a) != checksum(a.reshape(4, 3))
    assert checksum(a) != checksum(a.astype(np.uint16))
    b = a.copy()
    b[0, 0] += 1
    assert checksum(a) != checksum(b)
    assert checksum(a, b) != checksum(b, a)
    assert checksum(b"xy") != checksum(b"x", b"y")
