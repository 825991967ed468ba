"""Harris-style corner extraction over classical or quantum-derived gradients."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .edges import (
    EdgeConfig,
    EdgeMap,
    GradientField,
    gradient_magnitude,
    qhed_responses,
    sobel_direct,
    sobel_from_lag2,
    threshold_edges,
)
from .image import GrayImage
from .kernel import lag2_both_axes


@dataclass(frozen=True)
class HarrisConfig:
    kappa: float = 0.05
    window: str = "gaussian"  # or "rectangular"
    window_size: int = 3
    sigma: float = 1.0
    response_threshold_fraction: float = 0.01
    nms_radius: int = 2
    filter_radius: int = 2

    def __post_init__(self):
        if not 0.0 < self.kappa < 0.25:
            raise ValueError("kappa must lie in (0, 0.25)")
        if self.window not in ("gaussian", "rectangular"):
            raise ValueError(f"unknown window {self.window!r}")
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError("window_size must be a positive odd integer")
        if self.nms_radius < 1:
            raise ValueError("nms_radius must be >= 1")
        if not 0.0 < self.response_threshold_fraction <= 1.0:
            raise ValueError("response_threshold_fraction must lie in (0, 1]")

    def window_weights(self) -> np.ndarray:
        k = self.window_size // 2
        if self.window == "rectangular":
            return np.ones((self.window_size, self.window_size))
        y, x = np.mgrid[-k:k + 1, -k:k + 1]
        return np.exp(-(x * x + y * y) / (2.0 * self.sigma**2))


@dataclass(frozen=True)
class StructureTensorField:
    a: np.ndarray  # sum w Ix^2
    b: np.ndarray  # sum w Ix Iy
    c: np.ndarray  # sum w Iy^2
    valid_mask: np.ndarray


@dataclass(frozen=True)
class Corner:
    x: int
    y: int
    score: float


@dataclass(frozen=True)
class CornerSet:
    corners: tuple[Corner, ...]
    source: str = "qhcd-sobel"

    def __len__(self):
        return len(self.corners)

    def __iter__(self):
        return iter(self.corners)

    def coords(self) -> list[tuple[int, int]]:
        return [(c.x, c.y) for c in self.corners]

    def with_source(self, source: str) -> "CornerSet":
        return CornerSet(self.corners, source)


def structure_tensor(g: GradientField, cfg: HarrisConfig = HarrisConfig()) -> StructureTensorField:
    w = cfg.window_weights()
    ix = np.where(g.valid_mask, g.ix, 0.0)
    iy = np.where(g.valid_mask, g.iy, 0.0)

    def wsum(p):
        return ndimage.correlate(p, w, mode="constant")

    valid = ndimage.binary_erosion(g.valid_mask, structure=np.ones_like(w, dtype=bool),
                                   border_value=0)
    a, b, c = wsum(ix * ix), wsum(ix * iy), wsum(iy * iy)
    z = lambda t: np.where(valid, t, 0.0)  # noqa: E731
    return StructureTensorField(z(a), z(b), z(c), valid)


def harris_response(t: StructureTensorField, kappa: float = 0.05) -> np.ndarray:
    """``det(M) - kappa * trace(M)^2`` per pixel."""
    tr = t.a + t.c
    return t.a * t.c - t.b * t.b - kappa * tr * tr


def classify_region(score: float, flat_band: float) -> str:
    if flat_band < 0:
        raise ValueError("flat_band must be >= 0")
    if abs(score) <= flat_band:
        return "flat"
    return "corner" if score > 0 else "edge"


def default_flat_band(resp: np.ndarray) -> float:
    return 1e-6 * float(np.abs(resp).max()) if resp.size else 0.0


def nms_and_threshold(resp: np.ndarray, cfg: HarrisConfig = HarrisConfig(),
                      source: str = "qhcd-sobel") -> CornerSet:
    """Local maxima within Chebyshev radius ``nms_radius`` above a fraction of the peak.

    Equal-valued maxima inside one window are resolved in favour of the first
    in row-major order.
    """
    resp = np.asarray(resp, dtype=np.float64)
    peak = resp.max() if resp.size else 0.0
    if peak <= 0:
        return CornerSet((), source)
    rad = cfg.nms_radius
    size = 2 * rad + 1
    local_max = ndimage.maximum_filter(resp, size=size, mode="constant", cval=-np.inf)
    cand = (resp == local_max) & (resp > cfg.response_threshold_fraction * peak)
    h, w = resp.shape
    kept = []
    taken = np.zeros_like(cand)
    for i, j in zip(*np.nonzero(cand)):  # row-major order
        i0, i1 = max(i - rad, 0), min(i + rad + 1, h)
        j0, j1 = max(j - rad, 0), min(j + rad + 1, w)
        if taken[i0:i1, j0:j1].any():
            continue
        taken[i, j] = True
        kept.append(Corner(x=int(j), y=int(i), score=float(resp[i, j])))
    return CornerSet(tuple(kept), source)


def ring_offsets(radius: int = 2) -> list[tuple[int, int]]:
    """Eight perimeter points of the radius-``radius`` verification circle.

    Ordered counter-clockwise from +x; the point diametrically opposite
    entry ``k`` is entry ``k + 4``.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    dirs = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)]
    return [(radius * dx, radius * dy) for dx, dy in dirs]


def fast_like_filter(cands: CornerSet, edges: EdgeMap, radius: int = 2) -> CornerSet:
    """Drop candidates that sit on a straight edge.

    A candidate is discarded when some perimeter point of its verification
    circle and the point opposite it are both edge pixels.
    """
    ring = ring_offsets(radius)
    bits = edges.bits
    h, w = bits.shape

    def on(x, y):
        return 0 <= x < w and 0 <= y < h and bool(bits[y, x])

    kept = []
    for c in cands:
        hits = [on(c.x + dx, c.y + dy) for dx, dy in ring]
        if not any(hits[k] and hits[k + 4] for k in range(4)):
            kept.append(c)
    return CornerSet(tuple(kept), cands.source)


def harris_from_gradients(g: GradientField, cfg: HarrisConfig = HarrisConfig(),
                          source: str = "qhcd-sobel",
                          edge_cfg: EdgeConfig = EdgeConfig()) -> CornerSet:
    resp = harris_response(structure_tensor(g, cfg), cfg.kappa)
    cands = nms_and_threshold(resp, cfg, source)
    edges = threshold_edges(gradient_magnitude(g), edge_cfg)
    return fast_like_filter(cands, edges, cfg.filter_radius)


def qhcd(img: GrayImage, encoding: str = "qpie", cfg: HarrisConfig = HarrisConfig(), *,
         edge_cfg: EdgeConfig = EdgeConfig(), use_gates: bool = False) -> CornerSet:
    """Quantum Harris corner detection driven by lag-2 kernel gradients."""
    dx, dy = lag2_both_axes(img, encoding, use_gates=use_gates)
    return harris_from_gradients(sobel_from_lag2(dx, dy), cfg, "qhcd-sobel", edge_cfg)


def classical_harris(img: GrayImage, cfg: HarrisConfig = HarrisConfig(), *,
                     edge_cfg: EdgeConfig = EdgeConfig()) -> CornerSet:
    return harris_from_gradients(sobel_direct(img), cfg, "classical-harris", edge_cfg)


def qhed_corner_heuristic(img: GrayImage, encoding: str = "qpie",
                          cfg: HarrisConfig = HarrisConfig(), *,
                          edge_cfg: EdgeConfig = EdgeConfig()) -> CornerSet:
    """Corner candidates where x- and y-QHED responses meet.

    A pixel qualifies when both passes fire within its 3x3 neighbourhood.
    Its score is the product of the 3x3 sums of ``|dx|`` and ``|dy|``, which
    peaks where the two passes overlap most; candidates are thinned by NMS
    and verified with the edge-line filter against the QHED edge map.
    """
    ax, ay = qhed_responses(img, encoding)
    edges = threshold_edges(np.maximum(ax, ay), edge_cfg)
    tau = edges.threshold_used
    fire_x = (ax >= tau) & (ax > 0)
    fire_y = (ay >= tau) & (ay > 0)
    box = np.ones((3, 3), dtype=bool)
    both = ndimage.binary_dilation(fire_x, box) & ndimage.binary_dilation(fire_y, box)
    sx = ndimage.correlate(ax, np.ones((3, 3)), mode="constant")
    sy = ndimage.correlate(ay, np.ones((3, 3)), mode="constant")
    resp = np.where(both, sx * sy, 0.0)
    cands = nms_and_threshold(resp, cfg, "qhed-heuristic")
    return fast_like_filter(cands, edges, cfg.filter_radius)


def write_corners_csv(cs: CornerSet, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "score", "source"])
        for c in cs:
            wr.writerow([c.x, c.y, repr(c.score), cs.source])


def read_points_csv(path) -> list[tuple[int, int]]:
    """Read ``x,y`` rows (header optional; extra columns ignored)."""
    pts = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "x":
                continue
            pts.append((int(float(row[0])), int(float(row[1]))))
    return pts


def overlay(img: GrayImage, cs: CornerSet) -> np.ndarray:
    """RGB rendering with each corner marked by a red 3x3 cross."""
    base = img.pixels.astype(np.uint8)
    rgb = np.stack([base] * 3, axis=-1)
    h, w = base.shape
    for c in cs:
        for dx, dy in ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)):
            x, y = c.x + dx, c.y + dy
            if 0 <= x < w and 0 <= y < h:
                rgb[y, x] = (255, 0, 0)
    return rgb
