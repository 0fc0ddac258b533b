"""Low-level raster utilities: resizing, dilation, and shape drawing.

All images are numpy arrays, (H, W) or (H, W, C), with pixel (i, j) centered
at continuous coordinates (x=j, y=i). Resizing uses the half-pixel-center
convention so that same-size resizes are bit-exact identities.
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy import ndimage


def _source_coords(n_out: int, n_in: int) -> np.ndarray:
    """Continuous source coordinates for each output pixel center."""
    scale = n_in / n_out
    return (np.arange(n_out, dtype=np.float64) + 0.5) * scale - 0.5


def resize_bilinear(img: np.ndarray, out_hw: tuple[int, int]) -> np.ndarray:
    """Bilinear resize with half-pixel centers and edge clamping.

    Preserves dtype: uint8 inputs are rounded back to uint8, float inputs
    stay float64. A same-size call returns a bit-exact copy.
    """
    h_out, w_out = int(out_hw[0]), int(out_hw[1])
    h_in, w_in = img.shape[:2]
    if h_out <= 0 or w_out <= 0:
        raise ValueError(f"invalid output size {out_hw}")

    ys = np.clip(_source_coords(h_out, h_in), 0.0, h_in - 1.0)
    xs = np.clip(_source_coords(w_out, w_in), 0.0, w_in - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h_in - 1)
    x1 = np.minimum(x0 + 1, w_in - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    src = img.astype(np.float64, copy=False)
    if src.ndim == 3:
        fy = fy[:, :, None]
        fx = fx[:, :, None]
    top = src[y0][:, x0] * (1.0 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1.0 - fx) + src[y1][:, x1] * fx
    out = top * (1.0 - fy) + bot * fy

    if img.dtype == np.uint8:
        return np.clip(np.rint(out), 0, 255).astype(np.uint8)
    return out


def resize_nearest(img: np.ndarray, out_hw: tuple[int, int]) -> np.ndarray:
    """Nearest-neighbor resize (half-pixel centers); keeps values exact."""
    h_out, w_out = int(out_hw[0]), int(out_hw[1])
    h_in, w_in = img.shape[:2]
    ys = np.clip(np.floor(_source_coords(h_out, h_in) + 0.5), 0, h_in - 1).astype(np.intp)
    xs = np.clip(np.floor(_source_coords(w_out, w_in) + 0.5), 0, w_in - 1).astype(np.intp)
    return img[ys][:, xs].copy()


def dilate(img: np.ndarray, radius: int, iterations: int = 1) -> np.ndarray:
    """Channel-wise max dilation with a square (2*radius+1) structuring element.

    Zero-padded at the borders. radius=0 or iterations=0 is the identity.
    Works on (H, W), (H, W, C), (T, H, W) and (T, H, W, C) stacks; the
    spatial axes are always the two after any leading time axis.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0 or iterations <= 0:
        return img.copy()
    k = 2 * radius + 1
    size = [1] * img.ndim
    if img.ndim == 2:
        size = [k, k]
    elif img.ndim == 3 and img.shape[-1] in (1, 3, 4):
        size = [k, k, 1]
    elif img.ndim == 3:
        size = [1, k, k]
    elif img.ndim == 4:
        size = [1, k, k, 1]
    else:
        raise ValueError(f"unsupported ndim {img.ndim}")
    out = img
    for _ in range(iterations):
        out = ndimage.maximum_filter(out, size=size, mode="constant", cval=0)
    return out


def _window(h: int, w: int, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
    """Integer pixel window covering [lo, hi] in each axis, clipped to the image."""
    j0 = max(int(np.floor(x_lo)), 0)
    j1 = min(int(np.ceil(x_hi)) + 1, w)
    i0 = max(int(np.floor(y_lo)), 0)
    i1 = min(int(np.ceil(y_hi)) + 1, h)
    if j0 >= j1 or i0 >= i1:
        return None
    return i0, i1, j0, j1


def draw_disc(img: np.ndarray, center: tuple[float, float], radius: float,
              color) -> None:
    """Fill pixels whose centers lie within `radius` of `center` (x, y)."""
    h, w = img.shape[:2]
    cx, cy = float(center[0]), float(center[1])
    win = _window(h, w, cx - radius, cx + radius, cy - radius, cy + radius)
    if win is None:
        return
    i0, i1, j0, j1 = win
    yy, xx = np.mgrid[i0:i1, j0:j1]
    hit = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    img[i0:i1, j0:j1][hit] = color


def draw_capsule(img: np.ndarray, p0: tuple[float, float], p1: tuple[float, float],
                 radius: float, color) -> None:
    """Fill pixels within `radius` of the segment p0-p1 (a stadium shape)."""
    h, w = img.shape[:2]
    x0, y0 = float(p0[0]), float(p0[1])
    x1, y1 = float(p1[0]), float(p1[1])
    win = _window(h, w, min(x0, x1) - radius, max(x0, x1) + radius,
                  min(y0, y1) - radius, max(y0, y1) + radius)
    if win is None:
        return
    i0, i1, j0, j1 = win
    yy, xx = np.mgrid[i0:i1, j0:j1]
    dx, dy = x1 - x0, y1 - y0
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        t = np.zeros_like(xx, dtype=np.float64)
    else:
        t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / seg_len2, 0.0, 1.0)
    ex = x0 + t * dx - xx
    ey = y0 + t * dy - yy
    hit = ex * ex + ey * ey <= radius * radius
    img[i0:i1, j0:j1][hit] = color


def fill_convex_polygon(img: np.ndarray, pts, color) -> None:
    """Fill a convex polygon given as a sequence of (x, y) vertices."""
    pts = np.asarray(pts, dtype=np.float64)
    if len(pts) < 3:
        return
    h, w = img.shape[:2]
    win = _window(h, w, pts[:, 0].min(), pts[:, 0].max(),
                  pts[:, 1].min(), pts[:, 1].max())
    if win is None:
        return
    i0, i1, j0, j1 = win
    yy, xx = np.mgrid[i0:i1, j0:j1]
    # Signed area fixes the winding so one inequality works for both orders.
    area = 0.0
    n = len(pts)
    for k in range(n):
        x_a, y_a = pts[k]
        x_b, y_b = pts[(k + 1) % n]
        area += x_a * y_b - x_b * y_a
    sign = 1.0 if area >= 0 else -1.0
    inside = np.ones(xx.shape, dtype=bool)
    for k in range(n):
        x_a, y_a = pts[k]
        x_b, y_b = pts[(k + 1) % n]
        cross = (x_b - x_a) * (yy - y_a) - (y_b - y_a) * (xx - x_a)
        inside &= sign * cross >= 0.0
    img[i0:i1, j0:j1][inside] = color


def checksum(*items) -> str:
    """SHA-256 over dtype, shape and raw bytes; the pipeline's artifact hash.

    Accepts any mix of arrays and raw bytes, hashed in argument order.
    """
    m = hashlib.sha256()
    for it in items:
        if isinstance(it, (bytes, bytearray)):
            m.update(b"bytes")
            m.update(it)
        else:
            a = np.ascontiguousarray(it)
            m.update(str(a.dtype).encode())
            m.update(str(a.shape).encode())
            m.update(a.tobytes())
    return m.hexdigest()
