"""End-to-end pipelines shared by the CLI, benchmarks and acceptance tests."""

from __future__ import annotations

from .corners import CornerSet, HarrisConfig, classical_harris, qhcd, qhed_corner_heuristic
from .edges import (
    EdgeConfig,
    EdgeMap,
    gradient_magnitude,
    qhed_edge_map,
    sobel_from_lag2,
    threshold_edges,
)
from .frqi import frqi_decode_counts, frqi_encode
from .image import GrayImage, ImageVector, vectorize
from .kernel import lag2_both_axes
from .qpie import qpie_decode_counts, qpie_decode_exact, qpie_encode
from .statevector import sample_measurements

RECON_ENCODINGS = ("qpie", "frqi-linear", "frqi-arcsin")
EDGE_METHODS = ("sobel", "qhed")
CORNER_METHODS = ("qhcd", "qhed-corner", "classical-harris")


def reconstruct(img: GrayImage, encoding: str, shots: int | None, seed: int = 0) -> ImageVector:
    """Encode, measure ``shots`` times (``None`` = exact amplitudes) and decode."""
    if encoding == "qpie":
        q = qpie_encode(vectorize(img))
        if shots is None:
            return qpie_decode_exact(q)
        counts = sample_measurements(q.state, shots, seed)
        return qpie_decode_counts(counts, q.l2_norm, img.width, img.height, img.bit_depth)
    if encoding in ("frqi-linear", "frqi-arcsin"):
        mode = encoding.split("-", 1)[1]
        f = frqi_encode(img, mode)
        if shots is None:
            from .frqi import angle_to_pixel

            vals = angle_to_pixel(f.angles, img.bit_depth, mode)
            return ImageVector(vals, img.width, img.height, bit_depth=img.bit_depth)
        counts = sample_measurements(f.state, shots, seed)
        return frqi_decode_counts(counts, img.bit_depth, f.r, shots,
                                  width=img.width, height=img.height, mode=mode)
    raise ValueError(f"encoding must be one of {RECON_ENCODINGS}, got {encoding!r}")


def kernel_encoding(encoding: str) -> str:
    """Detection pipelines accept ``frqi-linear`` only; arcsin is reconstruction-only."""
    if encoding not in ("qpie", "frqi-linear"):
        raise ValueError(f"detection supports qpie and frqi-linear, got {encoding!r}")
    return encoding


def edge_map(img: GrayImage, encoding: str, method: str,
             cfg: EdgeConfig = EdgeConfig()) -> EdgeMap:
    encoding = kernel_encoding(encoding)
    if method == "sobel":
        dx, dy = lag2_both_axes(img, encoding)
        return threshold_edges(gradient_magnitude(sobel_from_lag2(dx, dy)), cfg)
    if method == "qhed":
        return qhed_edge_map(img, encoding, cfg)
    raise ValueError(f"edge method must be one of {EDGE_METHODS}, got {method!r}")


def corners(img: GrayImage, encoding: str, method: str,
            cfg: HarrisConfig = HarrisConfig(), edge_cfg: EdgeConfig = EdgeConfig()) -> CornerSet:
    if method == "classical-harris":
        return classical_harris(img, cfg, edge_cfg=edge_cfg)
    encoding = kernel_encoding(encoding)
    if method == "qhcd":
        return qhcd(img, encoding, cfg, edge_cfg=edge_cfg)
    if method == "qhed-corner":
        return qhed_corner_heuristic(img, encoding, cfg, edge_cfg=edge_cfg)
    raise ValueError(f"corner method must be one of {CORNER_METHODS}, got {method!r}")
