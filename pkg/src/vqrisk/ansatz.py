"""Parameterized circuits whose output states represent class patterns.

Two layouts are provided. Variant A is the universal layered form: one RY
rotation per qubit, then per layer a CZ ladder followed by another full RY
round. Variant B is a shallower form tailored to data whose entanglement sits
mostly on neighboring qubits: one RY per qubit, then per layer a CNOT ladder
where only the ladder targets are re-rotated, which needs fewer rotation
gates per layer than A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qsim import Circuit, GateOp, StateVector, new_basis_state, run_circuit

VARIANTS = ("A", "B")

# Trainable angles for a circuit; plain float arrays, length param_count(spec).
ParameterVector = np.ndarray


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit family choice: variant, register width, and layer count."""

    variant: str
    n_qubits: int = 3
    layers: int = 1

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.n_qubits < 2:
            raise ValueError("ansatz needs at least 2 qubits for entangling gates")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")


def param_count(spec: AnsatzSpec) -> int:
    """Number of rotation angles the circuit consumes."""
    n = spec.n_qubits
    if spec.variant == "A":
        return n * (spec.layers + 1)
    return n + spec.layers * (n - 1)


def build_circuit(spec: AnsatzSpec, params) -> Circuit:
    """Construct the gate sequence for the given angles.

    Variant A: RY on every qubit, then per layer CZ(0,1)..CZ(n-2,n-1)
    followed by RY on every qubit. Variant B: RY on every qubit, then per
    layer CNOT(q,q+1) followed by RY(q+1) for each rung q of the ladder.
    """
    thetas = np.asarray(params, dtype=float)
    expected = param_count(spec)
    if thetas.shape != (expected,):
        raise ValueError(f"expected {expected} angles for {spec}, got shape {thetas.shape}")
    n = spec.n_qubits
    angles = iter(thetas)
    ops = [GateOp.ry(q, next(angles)) for q in range(n)]
    for _ in range(spec.layers):
        if spec.variant == "A":
            ops.extend(GateOp.cz(q, q + 1) for q in range(n - 1))
            ops.extend(GateOp.ry(q, next(angles)) for q in range(n))
        else:
            for q in range(n - 1):
                ops.append(GateOp.cnot(q, q + 1))
                ops.append(GateOp.ry(q + 1, next(angles)))
    return Circuit(n, tuple(ops))


def can_entangle(spec: AnsatzSpec) -> bool:
    """Whether the circuit contains at least one two-qubit gate."""
    circuit = build_circuit(spec, np.zeros(param_count(spec)))
    return any(len(op.qubits) >= 2 for op in circuit.ops)


def pattern_state(spec: AnsatzSpec, params) -> StateVector:
    """Run the circuit on the all-zeros basis state."""
    return run_circuit(new_basis_state(spec.n_qubits, 0), build_circuit(spec, params))
