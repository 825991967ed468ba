"""Flexible representation of quantum images (FRQI).

Each pixel becomes an angle ``theta_i`` in ``[0, pi/2]`` carried by one
intensity qubit entangled with the ``r``-qubit position register::

    |I> = 2^(-r/2) * sum_i (cos theta_i |0> + sin theta_i |1>) |i>

The intensity qubit is stored as the least-significant index bit, so the
amplitude vector reads ``[cos t0, sin t0, cos t1, sin t1, ...] / sqrt(2^r)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError, ShapeError
from .image import GrayImage, ImageVector, vectorize
from .statevector import CountsMap, StateVector, post_select_ancilla

MODES = ("linear", "arcsin")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def frqi_angle(pixel, b: int = 8, mode: str = "linear"):
    """Map intensities in ``[0, 2^b - 1]`` to rotation angles in ``[0, pi/2]``.

    Accepts scalars or arrays.
    """
    _check_mode(mode)
    p = np.asarray(pixel, dtype=np.float64)
    hi = (1 << b) - 1
    if np.any(p < 0) or np.any(p > hi):
        raise ValueError(f"pixel out of range [0, {hi}]")
    x = p / hi
    theta = x * (np.pi / 2) if mode == "linear" else np.arcsin(x)
    return float(theta) if theta.ndim == 0 else theta


def angle_to_pixel(theta, b: int = 8, mode: str = "linear"):
    _check_mode(mode)
    hi = (1 << b) - 1
    t = np.asarray(theta, dtype=np.float64)
    return t * (2 * hi / np.pi) if mode == "linear" else np.sin(t) * hi


@dataclass(frozen=True)
class FrqiState:
    state: StateVector
    width: int
    height: int
    angles: np.ndarray
    bit_depth: int = 8
    mode: str = "linear"

    @property
    def r(self) -> int:
        return self.state.qubit_count - 1


@dataclass(frozen=True)
class ConditionalImageState:
    """Position-register state left after measuring the intensity qubit.

    ``values`` holds the raw branch amplitudes (``sin theta_i`` for outcome 1,
    ``cos theta_i`` for outcome 0); ``normalizer`` is their L2 norm.
    """

    values: np.ndarray
    branch: int
    normalizer: float
    probability: float

    @property
    def amplitudes(self) -> np.ndarray:
        return self.values / self.normalizer


def frqi_encode(img: GrayImage, mode: str = "linear") -> FrqiState:
    _check_mode(mode)
    n = img.width * img.height
    if n < 2 or n & (n - 1):
        raise ShapeError(f"FRQI needs a power-of-two pixel count, got {n}")
    theta = frqi_angle(vectorize(img).values, img.bit_depth, mode)
    theta = np.atleast_1d(theta)
    amps = np.empty(2 * n)
    amps[0::2] = np.cos(theta)
    amps[1::2] = np.sin(theta)
    amps /= np.sqrt(n)
    theta = theta.copy()
    theta.setflags(write=False)
    return FrqiState(StateVector(amps), img.width, img.height, theta, img.bit_depth, mode)


def frqi_decode_counts(counts: CountsMap, b: int, r: int, shots: int | None = None, *,
                       width: int, height: int, mode: str = "arcsin") -> ImageVector:
    """Estimate pixels from the intensity-qubit-1 counts ``N_1i``.

    ``sin theta_i`` is estimated as ``sqrt(2^r N_1i / N)``; arcsin mode scales
    it by ``2^b - 1`` directly, linear mode inverts the linear angle map.
    """
    _check_mode(mode)
    shots = counts.shots if shots is None else shots
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = 1 << r
    n1 = np.zeros(n)
    for k, c in counts.counts.items():
        if k & 1:
            n1[k >> 1] = c
    sin_est = np.clip(np.sqrt((n / shots) * n1), 0.0, 1.0)
    hi = (1 << b) - 1
    if mode == "arcsin":
        vals = hi * sin_est
    else:
        vals = np.arcsin(sin_est) * (2 * hi / np.pi)
    vals = np.clip(vals, 0, hi)[: width * height]
    return ImageVector(vals, width, height, bit_depth=b)


def frqi_conditional(f: FrqiState, outcome: int = 1) -> ConditionalImageState:
    """Measure the intensity qubit and keep the ``outcome`` branch."""
    projected, prob = post_select_ancilla(f.state, outcome)
    if prob <= 0.0:
        raise DegenerateInputError(f"FRQI branch {outcome} has zero probability")
    values = projected * np.sqrt(projected.size)
    return ConditionalImageState(values, outcome, float(np.linalg.norm(values)), prob)


def rgb_angle(r: int, g: int, b: int, bit_depth: int = 8) -> float:
    """Pack an RGB triple into one angle via a base-``(2^b - 1)`` expansion."""
    base = (1 << bit_depth) - 1
    for ch in (r, g, b):
        if not 0 <= ch <= base:
            raise ValueError(f"channel value {ch} out of range [0, {base}]")
    # evaluated as one integer numerator so exact overflow detection is possible
    num = r * base * base + g * base + b
    den = base**3
    if num > den:
        raise ValueError("RGB triple overflows the arcsin domain (argument > 1)")
    return float(np.arcsin(num / den))


def rgb_decode(angle: float, bit_depth: int = 8) -> tuple[int, int, int]:
    base = (1 << bit_depth) - 1
    if not -1e-12 <= angle <= np.pi / 2 + 1e-12:
        raise ValueError("angle must lie in [0, pi/2]")
    n = int(round(base**3 * np.sin(angle)))
    r, rem = divmod(n, base * base)
    g, b = divmod(rem, base)
    return int(r), int(g), int(b)
