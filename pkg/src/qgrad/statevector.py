"""Real-amplitude statevector simulation.

Only the handful of operations the lag-2 gradient kernel needs are provided:
an ancilla prepared in |+>, the cyclic amplitude shift (as a direct
permutation and as a multi-controlled-X cascade), X and H on the ancilla,
multinomial shot sampling and ancilla post-selection.

Index convention: qubit 0 is the least-significant bit of the basis index.
The ancilla added by :func:`tensor_with_plus_ancilla` is qubit 0, so
|I> (x) |+> interleaves as ``[c0, c0, c1, c1, ...] / sqrt(2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12
_SQRT1_2 = 1.0 / np.sqrt(2.0)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    qubit_count: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.float64, copy=True).ravel()
        n = amps.size
        if n < 2 or not _is_pow2(n):
            raise ValueError(f"amplitude count must be a power of two >= 2, got {n}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) >= NORM_TOL:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_count", n.bit_length() - 1)

    def __len__(self):
        return self.amplitudes.size

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2


def from_amplitudes(values) -> StateVector:
    """L2-normalise ``values`` into a state.

    >>> from_amplitudes([3, 0, 0, 4]).amplitudes
    array([0.6, 0. , 0. , 0.8])
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2 or not _is_pow2(v.size):
        raise ValueError(f"length must be a power of two >= 2, got {v.size}")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot normalise the all-zero vector")
    return StateVector(v / norm)


def tensor_with_plus_ancilla(s: StateVector) -> StateVector:
    """Return ``s (x) |+>`` with the ancilla as the least-significant qubit."""
    return StateVector(np.repeat(s.amplitudes, 2) * _SQRT1_2)


def cyclic_shift(s: StateVector) -> StateVector:
    """Shift amplitudes down one position: ``out[j] = in[(j + 1) mod 2^q]``."""
    return StateVector(np.roll(s.amplitudes, -1))


def x_on_ancilla(s: StateVector) -> StateVector:
    """Pauli-X on qubit 0: swap each pair ``(2k, 2k+1)``."""
    a = s.amplitudes.reshape(-1, 2)
    return StateVector(a[:, ::-1].ravel())


def h_on_ancilla(s: StateVector) -> StateVector:
    """Hadamard on qubit 0: ``(a, b) -> ((a+b)/sqrt2, (a-b)/sqrt2)`` per pair."""
    a = s.amplitudes.reshape(-1, 2)
    out = np.empty_like(a)
    out[:, 0] = (a[:, 0] + a[:, 1]) * _SQRT1_2
    out[:, 1] = (a[:, 0] - a[:, 1]) * _SQRT1_2
    return StateVector(out.ravel())


# ---------------------------------------------------------------------------
# Gate-level shift operator


@dataclass(frozen=True)
class Gate:
    """X on ``target`` conditioned on every ``(qubit, value)`` in ``controls``.

    ``value`` is the control polarity: 1 fires on |1>, 0 fires on |0>.
    An empty ``controls`` tuple is a bare X.
    """

    target: int
    controls: tuple[tuple[int, int], ...] = ()

    @property
    def kind(self) -> str:
        return "X" if not self.controls else "MCX"


@dataclass(frozen=True)
class GateSequence:
    width: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for g in self.gates:
            qubits = [g.target] + [c for c, _ in g.controls]
            if any(not 0 <= qb < self.width for qb in qubits):
                raise ValueError(f"gate {g} addresses a qubit outside width {self.width}")
            if g.target in (c for c, _ in g.controls):
                raise ValueError(f"gate {g} uses its target as a control")

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


def build_shift_circuit(q: int) -> GateSequence:
    """Decrement cascade realising :func:`cyclic_shift` on ``q`` qubits.

    Mapping |x> -> |x - 1 mod 2^q> moves the amplitude of index ``j + 1`` to
    index ``j``. Bit ``t`` flips exactly when every lower bit is 0, so the
    cascade runs from the most-significant qubit down, each stage an X on
    qubit ``t`` with zero-polarity controls on qubits ``0..t-1``. One gate
    per qubit.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    gates = tuple(
        Gate(target=t, controls=tuple((c, 0) for c in range(t)))
        for t in range(q - 1, -1, -1)
    )
    return GateSequence(width=q, gates=gates)


def apply_gate(amps: np.ndarray, gate: Gate) -> np.ndarray:
    idx = np.arange(amps.size)
    tbit = 1 << gate.target
    sel = (idx & tbit) == 0
    for c, val in gate.controls:
        sel &= ((idx >> c) & 1) == val
    lo = idx[sel]
    hi = lo | tbit
    out = amps.copy()
    out[lo], out[hi] = amps[hi], amps[lo]
    return out


def apply_gate_sequence(s: StateVector, seq: GateSequence) -> StateVector:
    if seq.width != s.qubit_count:
        raise ValueError(f"sequence width {seq.width} != state width {s.qubit_count}")
    amps = s.amplitudes
    for g in seq:
        amps = apply_gate(amps, g)
    return StateVector(amps)


def gate_sequence_matrix(seq: GateSequence) -> np.ndarray:
    """Dense permutation matrix of ``seq`` (columns are images of basis states)."""
    n = 1 << seq.width
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        for g in seq:
            e = apply_gate(e, g)
        cols.append(e)
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# Measurement


@dataclass(frozen=True)
class CountsMap:
    shots: int
    counts: dict[int, int]

    def __post_init__(self):
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("counts must be non-negative")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def to_array(self, size: int) -> np.ndarray:
        arr = np.zeros(size, dtype=np.int64)
        for k, v in self.counts.items():
            arr[k] = v
        return arr


def sample_measurements(s: StateVector, shots: int, seed: int) -> CountsMap:
    """Multinomial draw of ``shots`` computational-basis outcomes.

    Uses numpy's PCG64 generator so results are reproducible across platforms.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p = s.probabilities
    p = p / p.sum()
    draw = rng.multinomial(shots, p)
    nz = np.flatnonzero(draw)
    return CountsMap(shots=int(shots), counts={int(k): int(draw[k]) for k in nz})


def post_select_ancilla(s: StateVector, outcome: int) -> tuple[np.ndarray, float]:
    """Project qubit 0 onto ``outcome`` without renormalising.

    Returns the ``2^(q-1)`` surviving amplitudes and the branch probability.
    """
    if s.qubit_count < 2:
        raise ValueError("post-selection needs at least two qubits")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    projected = s.amplitudes[outcome::2].copy()
    return projected, float(np.dot(projected, projected))
