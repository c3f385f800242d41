"""Deterministic rasterization of point clouds on the sphere.

Images are 8-bit RGB arrays written as binary PPM or PNG with Pillow.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import sphere
from .config import RenderSpec

# one color per letter, cycled for larger alphabets
PALETTE = np.array([
    [255, 255, 255], [255, 96, 64], [64, 160, 255], [96, 224, 96],
    [240, 200, 48], [200, 96, 240], [64, 224, 224], [255, 128, 192],
], dtype=float)


@dataclass
class Raster:
    image: np.ndarray        # (H, W, 3) uint8
    inside: int              # points that landed in the view
    lit: int                 # pixels with nonzero intensity
    warning: str | None = None


def project(z: np.ndarray, spec: RenderSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pixel column, row and an in-view mask for normalized pairs ``z``."""
    W, H = spec.width, spec.height
    if spec.view == "sphere":
        a, b = z[:, 0], z[:, 1]
        # equirectangular: longitude arg z, latitude from the height on S^2
        lon = np.angle(a * np.conj(b))
        lat = np.arcsin(np.clip(np.abs(a) ** 2 - np.abs(b) ** 2, -1.0, 1.0))
        x = (lon + np.pi) / (2 * np.pi) * W
        y = (np.pi / 2 - lat) / np.pi * H
        col = np.minimum(np.floor(x), W - 1).astype(np.int64)
        row = np.minimum(np.floor(y), H - 1).astype(np.int64)
        return col, row, np.ones(z.shape[0], dtype=bool)
    zc = sphere.pairs_to_complex(z)
    x0, x1, y0, y1 = spec.window
    finite = np.isfinite(zc)
    re = np.where(finite, zc.real, np.inf)
    im = np.where(finite, zc.imag, np.inf)
    x = (re - x0) / (x1 - x0) * W
    y = (y1 - im) / (y1 - y0) * H
    ok = finite & (x >= 0) & (x <= W) & (y >= 0) & (y <= H)
    col = np.zeros(z.shape[0], dtype=np.int64)
    row = np.zeros(z.shape[0], dtype=np.int64)
    col[ok] = np.minimum(np.floor(x[ok]), W - 1)
    row[ok] = np.minimum(np.floor(y[ok]), H - 1)
    return col, row, ok


def rasterize(z: np.ndarray, spec: RenderSpec, weights: np.ndarray | None = None,
              letters: np.ndarray | None = None) -> Raster:
    """Splat each point with its weight; brightness is ``sqrt`` of the
    accumulated weight relative to the brightest pixel, so every lit pixel has
    intensity at least 1."""
    W, H = spec.width, spec.height
    M = z.shape[0]
    w = np.ones(M) if weights is None else np.asarray(weights, dtype=float)
    col, row, ok = project(z, spec)
    img = np.zeros((H, W, 3), dtype=np.uint8)
    if not ok.any():
        msg = "no points fall inside the view; writing a blank image"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return Raster(img, 0, 0, msg)
    r = spec.radius
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    disk = dx ** 2 + dy ** 2 <= r * r
    dx, dy = dx[disk], dy[disk]
    pc = (col[ok][:, None] + dx[None, :]).ravel()
    pr = (row[ok][:, None] + dy[None, :]).ravel()
    pw = np.repeat(w[ok], dx.size)
    keep = (pc >= 0) & (pc < W) & (pr >= 0) & (pr < H)
    flat = pr[keep] * W + pc[keep]
    acc = np.bincount(flat, weights=pw[keep], minlength=W * H)
    top = acc.max()
    level = np.zeros(W * H)
    if top > 0:
        level = np.where(acc > 0, np.ceil(255 * np.sqrt(acc / top)), 0.0)
    if spec.color_by_letter and letters is not None:
        lt = np.repeat(np.asarray(letters)[ok], dx.size)[keep]
        rgb = np.zeros((W * H, 3))
        for v in np.unique(lt):
            share = np.bincount(flat[lt == v], weights=pw[keep][lt == v], minlength=W * H)
            rgb += share[:, None] * PALETTE[(int(v) - 1) % len(PALETTE)][None, :]
        with np.errstate(invalid="ignore", divide="ignore"):
            rgb = np.where(acc[:, None] > 0, rgb / acc[:, None], 0.0)
        out = np.ceil(rgb / 255.0 * level[:, None])
    else:
        out = np.repeat(level[:, None], 3, axis=1)
    img = np.clip(out, 0, 255).astype(np.uint8).reshape(H, W, 3)
    return Raster(img, int(ok.sum()), int(np.count_nonzero(level)))


def _encode(img: np.ndarray, fmt: str) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8)).save(buf, format=fmt)
    return buf.getvalue()


def _decode(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("RGB"))


def encode_ppm(img: np.ndarray) -> bytes:
    """Binary (P6) PPM."""
    return _encode(img, "PPM")


def encode_png(img: np.ndarray) -> bytes:
    """8-bit RGB PNG."""
    return _encode(img, "PNG")


decode_ppm = decode_png = _decode
