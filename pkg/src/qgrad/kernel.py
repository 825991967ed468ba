"""Quantum gradient kernel: lag-2 differences by amplitude interference.

The circuit acting on an ``r``-qubit image state ``[c_0, ..., c_{N-1}]``:

1. append an ancilla in |+>          -> [c0, c0, c1, c1, ...] / sqrt2
2. cyclic shift D                    -> [c0, c1, c1, c2, ..., c_{N-1}, c0] / sqrt2
3. X on the ancilla                  -> [c1, c0, c2, c1, ..., c0, c_{N-1}] / sqrt2
4. cyclic shift D                    -> [c0, c2, c1, c3, ...] / sqrt2
5. H on the ancilla                  -> pairs ((c_k + c_{k+2})/2, (c_k - c_{k+2})/2)
6. post-select ancilla = 1           -> (c_k - c_{k+2 mod N}) / 2

Multiplying by ``2 * ||I_vec||`` returns intensity differences (QPIE); for
FRQI the same circuit runs on the post-measurement sine (or cosine) state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DegenerateInputError
from .frqi import FrqiState, frqi_conditional, frqi_encode
from .image import GrayImage, transpose, vectorize
from .qpie import QpieState, qpie_encode
from .statevector import (
    StateVector,
    apply_gate_sequence,
    build_shift_circuit,
    cyclic_shift,
    from_amplitudes,
    h_on_ancilla,
    post_select_ancilla,
    tensor_with_plus_ancilla,
    x_on_ancilla,
)

ENCODINGS = ("qpie", "frqi-linear")


@dataclass(frozen=True)
class Lag2Result:
    raw: np.ndarray
    branch_probability: float
    scale: float
    domain: str  # "intensity", "sine" or "cosine"

    @property
    def degenerate(self) -> bool:
        return self.branch_probability == 0.0

    def scaled(self) -> np.ndarray:
        """``raw * scale``: differences in the units of ``domain``."""
        return self.raw * self.scale


@dataclass(frozen=True)
class DiffMap:
    values: np.ndarray
    valid_mask: np.ndarray
    axis: str
    domain: str = "intensity"

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def _gate_shift(s: StateVector) -> StateVector:
    return apply_gate_sequence(s, build_shift_circuit(s.qubit_count))


def lag2_circuit(s: StateVector, *, use_gates: bool = False) -> tuple[np.ndarray, float]:
    """Run the kernel on ``s``; returns the unnormalised ancilla-1 branch."""
    shift: Callable[[StateVector], StateVector] = _gate_shift if use_gates else cyclic_shift
    psi = tensor_with_plus_ancilla(s)
    psi = shift(psi)
    psi = x_on_ancilla(psi)
    psi = shift(psi)
    psi = h_on_ancilla(psi)
    return post_select_ancilla(psi, 1)


def lag2_qpie(q: QpieState, *, use_gates: bool = False) -> Lag2Result:
    raw, prob = lag2_circuit(q.state, use_gates=use_gates)
    # exact cancellation (constant image) leaves tiny round-off; call it zero
    if prob < 1e-30:
        prob = 0.0
    return Lag2Result(raw, prob, 2.0 * q.l2_norm, "intensity")


def lag2_frqi(f: FrqiState, outcome: int = 1, *, use_gates: bool = False) -> Lag2Result:
    cond = frqi_conditional(f, outcome)
    raw, prob = lag2_circuit(StateVector(cond.amplitudes), use_gates=use_gates)
    if prob < 1e-30:
        prob = 0.0
    return Lag2Result(raw, prob, 2.0 * cond.normalizer, "sine" if outcome == 1 else "cosine")


def lag2_oracle(values, k: int = 2) -> np.ndarray:
    """Brute-force cyclic lag-k difference ``v[i] - v[(i + k) mod N]``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.size
    out = np.empty(n)
    for i in range(n):
        out[i] = v[i] - v[(i + k) % n]
    return out


def rescale_to_intensity(lr: Lag2Result) -> np.ndarray:
    if lr.domain != "intensity":
        raise ValueError(f"no exact intensity inverse for the {lr.domain} domain")
    return lr.raw * lr.scale


def _row_diffs(img: GrayImage, encoding: str, use_gates: bool) -> tuple[np.ndarray, str]:
    """Lag-2 differences along rows of ``img``, reshaped to the image grid."""
    h, w = img.height, img.width
    if encoding == "qpie":
        v = vectorize(img)
        if v.l2_norm == 0.0:
            return np.zeros((h, w)), "intensity"
        lr = lag2_qpie(qpie_encode(v), use_gates=use_gates)
    elif encoding == "frqi-linear":
        f = frqi_encode(img, "linear")
        try:
            lr = lag2_frqi(f, 1, use_gates=use_gates)
        except DegenerateInputError:
            # all-black image: every sine is 0, so are its differences
            return np.zeros((h, w)), "sine"
    else:
        raise ValueError(f"encoding must be one of {ENCODINGS}, got {encoding!r}")
    return lr.scaled()[: h * w].reshape(h, w), lr.domain


def lag2_both_axes(img: GrayImage, encoding: str = "qpie", *,
                   use_gates: bool = False) -> tuple[DiffMap, DiffMap]:
    """Lag-2 difference maps along x (rows) and y (columns, via transposition).

    ``dx[i, j] = I[i, j] - I[i, j+2]`` and ``dy[i, j] = I[i, j] - I[i+2, j]``
    (sine-domain for FRQI). Entries whose partner wrapped around a row or
    the whole vector are marked invalid.
    """
    n = img.width * img.height
    if n & (n - 1):
        raise ValueError("image dimensions must multiply to a power of two")
    dx, dom = _row_diffs(img, encoding, use_gates)
    dyt, _ = _row_diffs(transpose(img), encoding, use_gates)
    dy = dyt.T

    h, w = img.height, img.width
    vx = np.zeros((h, w), dtype=bool)
    vx[:, : max(w - 2, 0)] = True
    vy = np.zeros((h, w), dtype=bool)
    vy[: max(h - 2, 0), :] = True
    return (
        DiffMap(np.where(vx, dx, 0.0), vx, "x", dom),
        DiffMap(np.where(vy, dy, 0.0), vy, "y", dom),
    )
