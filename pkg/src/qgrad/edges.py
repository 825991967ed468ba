"""Sobel gradients from lag-2 difference maps, thresholding, and lag-2 QHED."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

from .exceptions import DegenerateInputError, ShapeError
from .image import GrayImage
from .kernel import DiffMap, lag2_both_axes

# Sobel kernels, applied by true convolution (kernel flipped), so that
# I_x = left - right and I_y = top - bottom, matching lag-2 differences.
G_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
G_Y = G_X.T.copy()


@dataclass(frozen=True)
class GradientField:
    ix: np.ndarray
    iy: np.ndarray
    valid_mask: np.ndarray

    @property
    def height(self) -> int:
        return self.ix.shape[0]

    @property
    def width(self) -> int:
        return self.ix.shape[1]

    def scaled(self, s: float) -> "GradientField":
        return GradientField(self.ix * s, self.iy * s, self.valid_mask)


@dataclass(frozen=True)
class EdgeMap:
    bits: np.ndarray
    threshold_used: float


@dataclass(frozen=True)
class EdgeConfig:
    """How the edge threshold tau is chosen.

    ``tau_mode`` is ``"fraction"`` (tau = fraction * max magnitude),
    ``"fixed"`` (tau given directly) or ``"otsu"``.
    """

    tau_mode: str = "fraction"
    fraction: float = 0.2
    tau: float | None = None

    def __post_init__(self):
        if self.tau_mode not in ("fraction", "fixed", "otsu"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")
        if self.tau_mode == "fraction" and not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        if self.tau_mode == "fixed" and (self.tau is None or self.tau < 0):
            raise ValueError("fixed mode needs tau >= 0")


def _shift(a: np.ndarray, di: int, dj: int) -> np.ndarray:
    """``out[i, j] = a[i + di, j + dj]``, zero outside the grid."""
    h, w = a.shape
    out = np.zeros_like(a)
    src = a[max(di, 0): h + min(di, 0), max(dj, 0): w + min(dj, 0)]
    out[max(-di, 0): h + min(-di, 0), max(-dj, 0): w + min(-dj, 0)] = src
    return out


def sobel_from_lag2(dx: DiffMap, dy: DiffMap) -> GradientField:
    """Assemble Sobel gradients with 1-2-1 weights across the lag-2 direction.

    ``I_x[i, j] = dx[i-1, j-1] + 2 dx[i, j-1] + dx[i+1, j-1]``
    ``I_y[i, j] = dy[i-1, j-1] + 2 dy[i-1, j] + dy[i-1, j+1]``
    """
    if dx.values.shape != dy.values.shape:
        raise ShapeError("dx and dy must share dimensions")
    ix = np.zeros_like(dx.values)
    iy = np.zeros_like(dy.values)
    vx = np.ones(dx.values.shape, dtype=bool)
    vy = np.ones(dy.values.shape, dtype=bool)
    mx = dx.valid_mask.astype(np.float64)
    my = dy.valid_mask.astype(np.float64)
    for d, wgt in ((-1, 1.0), (0, 2.0), (1, 1.0)):
        ix += wgt * _shift(dx.values, d, -1)
        vx &= _shift(mx, d, -1) > 0
        iy += wgt * _shift(dy.values, -1, d)
        vy &= _shift(my, -1, d) > 0
    valid = vx & vy
    return GradientField(np.where(valid, ix, 0.0), np.where(valid, iy, 0.0), valid)


def _interior(shape) -> np.ndarray:
    m = np.zeros(shape, dtype=bool)
    m[1:-1, 1:-1] = True
    return m


def sobel_direct(img: GrayImage) -> GradientField:
    px = img.pixels.astype(np.float64)
    ix = ndimage.convolve(px, G_X, mode="constant")
    iy = ndimage.convolve(px, G_Y, mode="constant")
    valid = _interior(px.shape)
    return GradientField(np.where(valid, ix, 0.0), np.where(valid, iy, 0.0), valid)


def gradient_magnitude(g: GradientField) -> np.ndarray:
    return np.where(g.valid_mask, np.hypot(g.ix, g.iy), 0.0)


def gradient_direction(g: GradientField) -> np.ndarray:
    """Full-quadrant angle in (-pi, pi]; 0 where the gradient vanishes."""
    # + 0.0 turns -0.0 into +0.0 so atan2 never returns -pi
    theta = np.arctan2(g.iy + 0.0, g.ix + 0.0)
    return np.where(g.valid_mask, theta, 0.0)


def resolve_tau(mag: np.ndarray, cfg: EdgeConfig) -> float:
    if cfg.tau_mode == "fixed":
        return float(cfg.tau)
    if cfg.tau_mode == "fraction":
        return float(cfg.fraction * mag.max()) if mag.size else 0.0
    if mag.size == 0 or np.ptp(mag) == 0:
        raise DegenerateInputError("Otsu threshold undefined for a constant magnitude map")
    return float(threshold_otsu(mag))


def threshold_edges(mag: np.ndarray, cfg: EdgeConfig = EdgeConfig()) -> EdgeMap:
    """Binary edge map: ``mag >= tau``; zero magnitude never counts as an edge."""
    mag = np.asarray(mag, dtype=np.float64)
    tau = resolve_tau(mag, cfg)
    return EdgeMap((mag >= tau) & (mag > 0), tau)


def qhed_responses(img: GrayImage, encoding: str = "qpie") -> tuple[np.ndarray, np.ndarray]:
    """Absolute lag-2 x and y responses, no Sobel smoothing."""
    dx, dy = lag2_both_axes(img, encoding)
    return np.abs(dx.values), np.abs(dy.values)


def qhed_edge_map(img: GrayImage, encoding: str = "qpie",
                  cfg: EdgeConfig = EdgeConfig()) -> EdgeMap:
    """Lag-2 QHED: threshold the per-pixel max of |x| and |y| differences."""
    ax, ay = qhed_responses(img, encoding)
    return threshold_edges(np.maximum(ax, ay), cfg)
