"""Exact statevector simulation of small qubit registers.

Conventions shared by the whole package:

- Qubit 0 is the most significant bit of a basis index, so for three qubits
  the basis state |q0 q1 q2> = |110> has index 6.
- RY(theta) = exp(-i theta Y / 2) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
- Values are immutable: every operation returns a new StateVector and never
  mutates its inputs. Distinct states may be processed concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

MAX_QUBITS = 12

_NORM_TOL = 1e-10
_HERMITIAN_TOL = 1e-10
_PSD_TOL = 1e-10

_SQRT2_INV = 1.0 / np.sqrt(2.0)
_I2 = np.eye(2, dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

_GATE_ARITY = {"RY": 1, "H": 1, "X": 1, "CZ": 2, "CNOT": 2, "CSWAP": 3}


def _ry_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


class StateVector:
    """Pure state of ``n_qubits`` qubits stored as 2**n complex amplitudes.

    The amplitude array is validated (length and unit norm) and frozen on
    construction.
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes) -> None:
        n_qubits = int(n_qubits)
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        amp = np.array(amplitudes, dtype=complex)
        if amp.shape != (2**n_qubits,):
            raise ValueError(
                f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got shape {amp.shape}"
            )
        norm_sq = float(np.sum(np.abs(amp) ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm_sq!r}")
        amp.flags.writeable = False
        self.n_qubits = n_qubits
        self.amplitudes = amp

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True)
class GateOp:
    """A single gate application: kind, target qubit indices, optional angle."""

    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if len(qs) != _GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} expects {_GATE_ARITY[self.kind]} qubits, got {qs}")
        if len(set(qs)) != len(qs):
            raise ValueError(f"qubit indices must be distinct, got {qs}")
        if any(q < 0 for q in qs):
            raise ValueError(f"qubit indices must be non-negative, got {qs}")
        if self.kind == "RY":
            if self.theta is None:
                raise ValueError("RY requires an angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @classmethod
    def ry(cls, qubit: int, theta: float) -> "GateOp":
        return cls("RY", (qubit,), theta)

    @classmethod
    def h(cls, qubit: int) -> "GateOp":
        return cls("H", (qubit,))

    @classmethod
    def x(cls, qubit: int) -> "GateOp":
        return cls("X", (qubit,))

    @classmethod
    def cz(cls, a: int, b: int) -> "GateOp":
        return cls("CZ", (a, b))

    @classmethod
    def cnot(cls, control: int, target: int) -> "GateOp":
        return cls("CNOT", (control, target))

    @classmethod
    def cswap(cls, control: int, a: int, b: int) -> "GateOp":
        return cls("CSWAP", (control, a, b))


@dataclass(frozen=True)
class Circuit:
    """Ordered sequence of gates on a fixed-width register."""

    n_qubits: int
    ops: tuple[GateOp, ...] = ()

    def __post_init__(self) -> None:
        n = int(self.n_qubits)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if not isinstance(op, GateOp):
                raise ValueError(f"circuit ops must be GateOp, got {op!r}")
            if max(op.qubits) >= n:
                raise ValueError(f"gate {op} does not fit a {n}-qubit register")


@dataclass(frozen=True)
class ProbDist:
    """Measurement probabilities over the computational basis."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValueError("probabilities must be a 1-D sequence")
        if np.any(p < -1e-12):
            raise ValueError("probabilities must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator on a power-of-two dimensional space."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim & (dim - 1) or dim == 0:
            raise ValueError(f"dimension must be a power of two, got {dim}")
        if np.max(np.abs(m - m.conj().T)) > _HERMITIAN_TOL:
            raise ValueError("density matrix must be Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > _NORM_TOL:
            raise ValueError(f"density matrix trace must be 1, got {tr!r}")
        if float(np.min(np.linalg.eigvalsh(m))) < -_PSD_TOL:
            raise ValueError("density matrix must be positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class PauliTerm:
    """Weighted Pauli string, one letter from {I, X, Y, Z} per qubit."""

    weight: float
    string: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", float(self.weight))
        if not self.string or any(ch not in _PAULI for ch in self.string):
            raise ValueError(f"Pauli string must be non-empty over IXYZ, got {self.string!r}")


# --- gate kernels (operate on raw, already-validated amplitude arrays) ---


def _apply_1q(amp: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    t = amp.reshape([2] * n)
    t = np.tensordot(mat, t, axes=([1], [qubit]))
    return np.moveaxis(t, 0, qubit).reshape(-1)


def _fix(n: int, assignments: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * n
    for q, v in assignments.items():
        idx[q] = v
    return tuple(idx)


def _apply_cz(amp: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    out = amp.reshape([2] * n).copy()
    out[_fix(n, {a: 1, b: 1})] *= -1
    return out.reshape(-1)


def _apply_cnot(amp: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    src = amp.reshape([2] * n)
    out = src.copy()
    i0 = _fix(n, {control: 1, target: 0})
    i1 = _fix(n, {control: 1, target: 1})
    out[i0] = src[i1]
    out[i1] = src[i0]
    return out.reshape(-1)


def _apply_cswap(amp: np.ndarray, control: int, a: int, b: int, n: int) -> np.ndarray:
    src = amp.reshape([2] * n)
    out = src.copy()
    i01 = _fix(n, {control: 1, a: 0, b: 1})
    i10 = _fix(n, {control: 1, a: 1, b: 0})
    out[i01] = src[i10]
    out[i10] = src[i01]
    return out.reshape(-1)


def _apply_op(amp: np.ndarray, op: GateOp, n: int) -> np.ndarray:
    kind = op.kind
    if kind == "RY":
        return _apply_1q(amp, _ry_matrix(op.theta), op.qubits[0], n)
    if kind == "H":
        return _apply_1q(amp, _H, op.qubits[0], n)
    if kind == "X":
        return _apply_1q(amp, _X, op.qubits[0], n)
    if kind == "CZ":
        return _apply_cz(amp, op.qubits[0], op.qubits[1], n)
    if kind == "CNOT":
        return _apply_cnot(amp, op.qubits[0], op.qubits[1], n)
    if kind == "CSWAP":
        return _apply_cswap(amp, op.qubits[0], op.qubits[1], op.qubits[2], n)
    raise ValueError(f"unknown gate kind {kind!r}")  # unreachable after GateOp validation


# --- public operations ---


def new_basis_state(n_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> on an ``n_qubits`` register."""
    n_qubits = int(n_qubits)
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    index = int(index)
    if not 0 <= index < 2**n_qubits:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    amp = np.zeros(2**n_qubits, dtype=complex)
    amp[index] = 1.0
    return StateVector(n_qubits, amp)


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Apply one gate and return the resulting state."""
    if max(op.qubits) >= state.n_qubits:
        raise ValueError(f"gate {op} does not fit a {state.n_qubits}-qubit state")
    return StateVector(state.n_qubits, _apply_op(state.amplitudes, op, state.n_qubits))


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply all circuit ops in order."""
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits but state has {state.n_qubits}"
        )
    amp = state.amplitudes
    for op in circuit.ops:
        amp = _apply_op(amp, op, state.n_qubits)
    return StateVector(state.n_qubits, amp)


def probabilities(state: StateVector) -> ProbDist:
    """Measurement probabilities |amplitude|^2 over the basis."""
    return ProbDist(np.abs(state.amplitudes) ** 2)


def sample_counts(state: StateVector, shots: int, rng_seed: int) -> dict[int, int]:
    """Histogram of ``shots`` basis-state measurements.

    Sampling uses numpy's default PCG64 generator seeded with ``rng_seed`` and
    a single multinomial draw, so the seed-to-histogram mapping is stable for
    a given numpy release.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = np.abs(state.amplitudes) ** 2
    p = p / p.sum()
    counts = np.random.default_rng(rng_seed).multinomial(shots, p)
    return {int(i): int(c) for i, c in enumerate(counts) if c}


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> with the first argument conjugated."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product |a> (x) |b>, with |a> on the more significant qubits."""
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"combined register of {n} qubits exceeds {MAX_QUBITS}")
    return StateVector(n, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(state: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix over the ``keep`` qubits (ascending order)."""
    n = state.n_qubits
    kept = sorted(set(int(q) for q in keep))
    if not kept:
        raise ValueError("keep set must be non-empty")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep set {kept} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in kept]
    t = state.amplitudes.reshape([2] * n)
    mat = np.transpose(t, kept + traced).reshape(2 ** len(kept), -1)
    return DensityMatrix(mat @ mat.conj().T)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), in [1/dim, 1]; equals 1 iff rho is pure."""
    return float(np.sum(np.abs(rho.entries) ** 2))


def pauli_expectation(state: StateVector, term: PauliTerm) -> float:
    """weight * <state| P |state> for a Pauli string P."""
    n = state.n_qubits
    if len(term.string) != n:
        raise ValueError(f"Pauli string length {len(term.string)} != {n} qubits")
    amp = state.amplitudes
    for q, ch in enumerate(term.string):
        if ch != "I":
            amp = _apply_1q(amp, _PAULI[ch], q, n)
    value = complex(np.vdot(state.amplitudes, amp))
    return float(term.weight * value.real)


def hamiltonian_expectation(state: StateVector, terms) -> float:
    """Sum of weighted Pauli expectations; 0 for an empty term list."""
    return float(sum(pauli_expectation(state, t) for t in terms))
