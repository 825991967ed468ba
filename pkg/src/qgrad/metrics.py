"""Edge-map quality, corner matching and reconstruction-fidelity metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage
from skimage.morphology import skeletonize

from .corners import CornerSet
from .edges import EdgeMap
from .image import GrayImage, ImageVector

EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class EdgeMetrics:
    ed: float
    et: float
    ef: int
    ee: float


@dataclass(frozen=True)
class CornerMetrics:
    tp: int
    fp: int
    cda: float
    fpr: float
    match_radius: float = 2.0


def _bits(m) -> np.ndarray:
    return np.asarray(m.bits if isinstance(m, EdgeMap) else m, dtype=bool)


def edge_density(m) -> float:
    b = _bits(m)
    if b.size == 0:
        raise ValueError("edge map is empty")
    return float(b.sum()) / b.size


def edge_fragments(m) -> int:
    """Number of 8-connected edge components."""
    _, n = ndimage.label(_bits(m), structure=EIGHT)
    return int(n)


def ef_reduction(qhed_ef: int, sobel_ef: int) -> float:
    """Percent fewer fragments for Sobel relative to QHED."""
    if qhed_ef < 1:
        raise ValueError("QHED fragment count must be >= 1")
    return (qhed_ef - sobel_ef) / qhed_ef * 100.0


def edge_thickness(m) -> float:
    """Mean over 8-connected components of area / skeleton length.

    Skeletons come from Lee's thinning, which keeps a straight bar's full
    length so a ``w``-pixel-wide bar scores ``w``.
    """
    b = _bits(m)
    labels, n = ndimage.label(b, structure=EIGHT)
    if n == 0:
        return 0.0
    widths = []
    for sl, k in zip(ndimage.find_objects(labels), range(1, n + 1)):
        comp = np.pad(labels[sl] == k, 1)
        area = comp.sum()
        skel = max(int(skeletonize(comp, method="lee").astype(bool).sum()), 1)
        widths.append(area / skel)
    return float(np.mean(widths))


def edge_entropy(m) -> float:
    """Entropy in bits of the two-level edge map (binary entropy of ED)."""
    p = edge_density(m)
    return float(-sum(q * np.log2(q) for q in (p, 1.0 - p) if q > 0))


def edge_metrics(m) -> EdgeMetrics:
    return EdgeMetrics(edge_density(m), edge_thickness(m), edge_fragments(m), edge_entropy(m))


def corner_match(detected, truth, radius: float = 2.0) -> CornerMetrics:
    """Greedy nearest-first one-to-one matching within Euclidean ``radius``.

    ``detected`` is a :class:`CornerSet` or a sequence of ``(x, y)``.
    Percentages are returned in ``[0, 100]``.
    """
    if radius <= 0:
        raise ValueError("radius must be > 0")
    det = detected.coords() if isinstance(detected, CornerSet) else [tuple(p) for p in detected]
    truth = [tuple(p) for p in truth]
    if not truth:
        if det:
            raise ValueError("CDA undefined: no ground-truth corners but detections present")
        return CornerMetrics(0, 0, 0.0, 0.0, radius)

    pairs = []
    for i, (dx_, dy_) in enumerate(det):
        for j, (tx, ty) in enumerate(truth):
            d = np.hypot(dx_ - tx, dy_ - ty)
            if d <= radius:
                pairs.append((d, i, j))
    pairs.sort()
    used_d, used_t = set(), set()
    for _, i, j in pairs:
        if i not in used_d and j not in used_t:
            used_d.add(i)
            used_t.add(j)
    tp = len(used_d)
    fp = len(det) - tp
    cda = 100.0 * tp / len(truth)
    fpr = 100.0 * fp / len(det) if det else 0.0
    return CornerMetrics(tp, fp, cda, fpr, radius)


def _as_float(img) -> tuple[np.ndarray, int]:
    if isinstance(img, GrayImage):
        return img.pixels.astype(np.float64), img.max_value
    if isinstance(img, ImageVector):
        return img.values.reshape(img.height, img.width), (1 << img.bit_depth) - 1
    return np.asarray(img, dtype=np.float64), 255


def ssim(a, b, *, win: int = 8) -> float:
    """Mean SSIM over all ``win x win`` windows (uniform weights).

    Stabilisers are ``C1 = (0.01 L)^2`` and ``C2 = (0.03 L)^2`` with
    ``L = 2^b - 1``.
    """
    x, lx = _as_float(a)
    y, _ = _as_float(b)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    if min(x.shape) < win:
        raise ValueError(f"images must be at least {win}x{win}")
    c1 = (0.01 * lx) ** 2
    c2 = (0.03 * lx) ** 2
    wx = sliding_window_view(x, (win, win))
    wy = sliding_window_view(y, (win, win))
    mx = wx.mean(axis=(-2, -1))
    my = wy.mean(axis=(-2, -1))
    dx = wx - mx[..., None, None]
    dy = wy - my[..., None, None]
    vx = (dx * dx).mean(axis=(-2, -1))
    vy = (dy * dy).mean(axis=(-2, -1))
    cxy = (dx * dy).mean(axis=(-2, -1))
    s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2))
    return float(s.mean())


def relative_difference(a, b) -> float:
    """``||a - b|| / ||a||`` over the flattened images."""
    x, _ = _as_float(a)
    y, _ = _as_float(b)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    ref = np.linalg.norm(x)
    if ref == 0:
        raise ValueError("reference image has zero norm")
    return float(np.linalg.norm(x - y) / ref)
