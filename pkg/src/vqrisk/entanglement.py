"""Entanglement structure of 3-qubit states by partition division.

Each single-qubit bipartition of a pure state is tested via the purity of
its reduced density matrix: purity below 1 marks the cut as entangled. A
fully entangled register reports the triple (0, 1, 2); a single separable
qubit is factored out and the remaining pair reported when its internal cut
is entangled; a fully separable state reports nothing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qsim import DensityMatrix, StateVector, partial_trace, purity

# Encoded amplitudes come from finite-precision data, so an exact purity
# test would misfire; deficits below this are treated as separable.
PURITY_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class PartitionReport:
    """Entangled qubit groups of one sample, with the tested cut purities."""

    sample_index: int | None
    entangled_groups: tuple[tuple[int, ...], ...]
    purities: dict


def bipartition_entangled(state: StateVector, cut) -> bool:
    """Whether the state is entangled across the (subsetA, subsetB) cut."""
    subset_a, subset_b = (sorted(set(int(q) for q in side)) for side in cut)
    if not subset_a or not subset_b:
        raise ValueError("both sides of the cut must be non-empty")
    if sorted(subset_a + subset_b) != list(range(state.n_qubits)):
        raise ValueError(
            f"cut ({subset_a}, {subset_b}) is not a partition of {state.n_qubits} qubits"
        )
    return purity(partial_trace(state, subset_a)) < 1.0 - PURITY_TOL


def _dominant_eigenvector_state(rho: DensityMatrix) -> StateVector:
    values, vectors = np.linalg.eigh(rho.entries)
    vec = vectors[:, int(np.argmax(values))]
    vec = vec / np.linalg.norm(vec)
    return StateVector(rho.dim.bit_length() - 1, vec)


def detect_by_partition_division(
    state: StateVector, sample_index: int | None = None
) -> PartitionReport:
    """Entangled qubit groups of a 3-qubit pure state.

    All three single-qubit cuts are tested. Every cut entangled means the
    whole triple is one group. Exactly one separable qubit is factored out:
    the remaining pair's (pure) state is recovered as the dominant
    eigenvector of its reduced density matrix and reported as a group when
    its internal cut is entangled. With two or more separable cuts the state
    is a product of single-qubit states and no groups are reported.
    """
    if state.n_qubits != 3:
        raise ValueError(f"partition division is defined for 3 qubits, got {state.n_qubits}")
    cut_purity = {q: purity(partial_trace(state, [q])) for q in range(3)}
    purities = {"0|12": cut_purity[0], "1|02": cut_purity[1], "2|01": cut_purity[2]}
    separable = [q for q in range(3) if cut_purity[q] >= 1.0 - PURITY_TOL]
    if not separable:
        groups: tuple[tuple[int, ...], ...] = ((0, 1, 2),)
    elif len(separable) == 1:
        pair = tuple(q for q in range(3) if q != separable[0])
        pair_state = _dominant_eigenvector_state(partial_trace(state, pair))
        internal = purity(partial_trace(pair_state, [0]))
        purities[f"{pair[0]}|{pair[1]}"] = internal
        groups = (pair,) if internal < 1.0 - PURITY_TOL else ()
    else:
        groups = ()
    return PartitionReport(sample_index, groups, purities)


def analyze_dataset(samples) -> dict[int, dict[tuple[int, ...], int]]:
    """Count entangled groups per class over a set of encoded samples."""
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    summary: dict[int, dict[tuple[int, ...], int]] = {0: {}, 1: {}}
    for sample in samples:
        report = detect_by_partition_division(sample.state, sample.source_index)
        for group in report.entangled_groups:
            per_class = summary[sample.label]
            per_class[group] = per_class.get(group, 0) + 1
    return summary
