"""Lag-2 quantum gradient kernels on QPIE/FRQI images, simulated exactly.

Typical use::

    from qgrad import load_grayscale, resize_pow2, qhcd
    img = resize_pow2(load_grayscale("scene.png"), 512)
    corners = qhcd(img, "qpie")
"""

from .corners import (
    CornerSet,
    HarrisConfig,
    classical_harris,
    fast_like_filter,
    harris_response,
    nms_and_threshold,
    qhcd,
    qhed_corner_heuristic,
    structure_tensor,
)
from .edges import (
    EdgeConfig,
    EdgeMap,
    GradientField,
    gradient_direction,
    gradient_magnitude,
    qhed_edge_map,
    sobel_direct,
    sobel_from_lag2,
    threshold_edges,
)
from .exceptions import DegenerateInputError, QGradError
from .frqi import FrqiState, frqi_angle, frqi_conditional, frqi_decode_counts, frqi_encode
from .image import GrayImage, ImageVector, devectorize, load_grayscale, resize_pow2, transpose, vectorize
from .kernel import DiffMap, Lag2Result, lag2_both_axes, lag2_frqi, lag2_oracle, lag2_qpie, rescale_to_intensity
from .qpie import QpieState, qpie_decode_counts, qpie_decode_exact, qpie_encode
from .statevector import StateVector, from_amplitudes

__version__ = "0.1.0"
