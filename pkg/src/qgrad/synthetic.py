"""Deterministic synthetic test images."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .image import GrayImage, load_grayscale


def square(side: int = 64, lo: int = 16, hi: int = 48, fg: int = 255, bg: int = 0) -> GrayImage:
    """Axis-aligned filled square covering rows/cols ``[lo, hi)``."""
    px = np.full((side, side), bg, dtype=np.int64)
    px[lo:hi, lo:hi] = fg
    return GrayImage(px)


def square_vertices(lo: int = 16, hi: int = 48) -> list[tuple[int, int]]:
    """(x, y) of the square's corner pixels."""
    return [(lo, lo), (hi - 1, lo), (lo, hi - 1), (hi - 1, hi - 1)]


def rectangle(h: int, w: int, top: int, left: int, bottom: int, right: int,
              fg: int = 255, bg: int = 0) -> GrayImage:
    px = np.full((h, w), bg, dtype=np.int64)
    px[top:bottom, left:right] = fg
    return GrayImage(px)


def vertical_step(h: int = 16, w: int = 16, at: int | None = None,
                  left: int = 0, right: int = 255) -> GrayImage:
    at = w // 2 if at is None else at
    px = np.full((h, w), left, dtype=np.int64)
    px[:, at:] = right
    return GrayImage(px)


def noise(side: int, seed: int, lo: int = 0, hi: int = 255) -> GrayImage:
    rng = np.random.default_rng(seed)
    return GrayImage(rng.integers(lo, hi + 1, size=(side, side)))


def textured(side: int = 64, seed: int = 0, sigma: float = 12.0) -> GrayImage:
    """Square (190 on 60) plus Gaussian texture of std ``sigma``.

    The default keeps the texture well below the edge contrast, so the square
    still dominates the gradient maximum.
    """
    rng = np.random.default_rng(seed)
    base = square(side, side // 4, 3 * side // 4, fg=190, bg=60).pixels.astype(float)
    px = np.clip(np.rint(base + rng.normal(0.0, sigma, base.shape)), 0, 255)
    return GrayImage(px.astype(np.int64))


def test_image_64() -> GrayImage:
    """The bundled 64x64 grayscale reference image."""
    ref = resources.files("qgrad") / "data" / "test64.pgm"
    with resources.as_file(ref) as p:
        return load_grayscale(p)
