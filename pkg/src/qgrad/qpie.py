"""Quantum probability image encoding (QPIE).

Pixels are stored as the normalised amplitudes of an ``r``-qubit state,
``r = ceil(log2(width * height))``. The L2 norm of the flattened image is
kept as classical side information so decoded values and gradient outputs
can be returned to intensity units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError
from .image import ImageVector
from .statevector import CountsMap, StateVector


def qubits_for(pixel_count: int) -> int:
    return max(1, int(np.ceil(np.log2(pixel_count))))


@dataclass(frozen=True)
class QpieState:
    state: StateVector
    width: int
    height: int
    l2_norm: float
    bit_depth: int = 8

    @property
    def r(self) -> int:
        return self.state.qubit_count

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


def qpie_encode(v: ImageVector) -> QpieState:
    if v.l2_norm <= 0.0:
        raise DegenerateInputError("cannot QPIE-encode an all-zero image")
    r = qubits_for(v.values.size)
    amps = np.zeros(1 << r)
    amps[: v.values.size] = v.values / v.l2_norm
    return QpieState(StateVector(amps), v.width, v.height, float(v.l2_norm), v.bit_depth)


def qpie_decode_exact(q: QpieState) -> ImageVector:
    vals = q.state.amplitudes[: q.pixel_count] * q.l2_norm
    return ImageVector(vals, q.width, q.height, l2_norm=q.l2_norm, bit_depth=q.bit_depth)


def qpie_decode_counts(counts: CountsMap, norm: float, width: int, height: int,
                       bit_depth: int = 8) -> ImageVector:
    """Estimate pixels as ``sqrt(N_i / N) * norm``; unseen positions decode to 0."""
    if counts.shots < 1:
        raise ValueError("counts must contain at least one shot")
    n = width * height
    freq = np.zeros(n)
    for k, c in counts.counts.items():
        if k < n:
            freq[k] = c
    vals = np.sqrt(freq / counts.shots) * norm
    return ImageVector(vals, width, height, bit_depth=bit_depth)
