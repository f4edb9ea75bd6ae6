"""Classification of encoded samples against trained pattern states.

A trained model holds one parameter set per (class, cluster). A sample is
accepted by a cluster when its distance to the cluster's pattern state falls
strictly inside the cluster's acceptance range (delta, epsilon); accepted
pairs form the classified set C and the remaining (sample, class) pairs the
unrecognized set U, which is then filtered against C. Distances come either
from the absolute-error distribution distance or from explicitly simulated
SWAP-test circuits.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSpec, param_count, pattern_state
from .qsim import (
    MAX_QUBITS,
    Circuit,
    GateOp,
    StateVector,
    new_basis_state,
    run_circuit,
    tensor,
)
from .training import TrainedCluster, cost_f

DISTANCE_MODES = ("COST_F", "SWAP_GLOBAL", "SWAP_PER_QUBIT")

UNRECOGNIZED = "unrecognized"

MODEL_FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a model file cannot be read; messages name the bad field."""


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Ansatz choice, trained clusters, and the distance mode to compare with."""

    ansatz: AnsatzSpec
    clusters: tuple[TrainedCluster, ...]
    distance_mode: str = "COST_F"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if not self.clusters:
            raise ValueError("model must contain at least one cluster")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(
                f"distance_mode must be one of {DISTANCE_MODES}, got {self.distance_mode!r}"
            )
        expected = param_count(self.ansatz)
        for c in self.clusters:
            if len(c.thetas) != expected:
                raise ValueError(
                    f"cluster ({c.class_label},{c.cluster_index}) has {len(c.thetas)} angles, "
                    f"ansatz needs {expected}"
                )


@dataclass(frozen=True)
class ClassificationOutcome:
    """Per-sample result: accepting clusters, resolved class, distances."""

    sample_index: int
    assigned: tuple[tuple[int, int], ...]
    final_class: int | None
    distances: dict
    tie: bool = False


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    """Aggregate quality figures over a labeled sample set."""

    outcomes: tuple[ClassificationOutcome, ...]
    accuracy: float
    false_rate: float
    unrecognized_count: int
    tie_count: int


def swap_test_p0(psi: StateVector, phi: StateVector) -> float:
    """Ancilla-|0> probability of the SWAP test between two states.

    The circuit is simulated explicitly: registers |psi>|phi>|ancilla>, H on
    the ancilla, one controlled-SWAP per qubit pair, H again. The result
    equals 1/2 + |<psi|phi>|^2 / 2.
    """
    if psi.n_qubits != phi.n_qubits:
        raise ValueError(f"qubit counts differ: {psi.n_qubits} vs {phi.n_qubits}")
    n = psi.n_qubits
    total = 2 * n + 1
    if total > MAX_QUBITS:
        raise ValueError(f"SWAP test needs {total} qubits, limit is {MAX_QUBITS}")
    ancilla = 2 * n
    register = tensor(tensor(psi, phi), new_basis_state(1, 0))
    ops = [GateOp.h(ancilla)]
    ops += [GateOp.cswap(ancilla, i, n + i) for i in range(n)]
    ops.append(GateOp.h(ancilla))
    out = run_circuit(register, Circuit(total, tuple(ops)))
    # The ancilla is the last qubit, i.e. the least significant index bit.
    return float(np.sum(np.abs(out.amplitudes.reshape(-1, 2)[:, 0]) ** 2))


def per_qubit_swap_test(pattern: StateVector, sample: StateVector) -> tuple[float, ...]:
    """Qubit-wise SWAP tests on the joint register |pattern>|sample>|ancillas>.

    One ancilla per qubit pair; all tests run in a single simulated circuit
    (a 9-qubit register for 3-qubit states) and the returned values are the
    per-ancilla |0> marginals, each in [0.5, 1].
    """
    if pattern.n_qubits != sample.n_qubits:
        raise ValueError(f"qubit counts differ: {pattern.n_qubits} vs {sample.n_qubits}")
    n = pattern.n_qubits
    total = 3 * n
    if total > MAX_QUBITS:
        raise ValueError(f"per-qubit SWAP test needs {total} qubits, limit is {MAX_QUBITS}")
    register = tensor(tensor(pattern, sample), new_basis_state(n, 0))
    ops = []
    for i in range(n):
        ancilla = 2 * n + i
        ops += [GateOp.h(ancilla), GateOp.cswap(ancilla, i, n + i), GateOp.h(ancilla)]
    out = run_circuit(register, Circuit(total, tuple(ops)))
    probs = (np.abs(out.amplitudes) ** 2).reshape([2] * total)
    results = []
    for i in range(n):
        ancilla = 2 * n + i
        marginal = probs.sum(axis=tuple(ax for ax in range(total) if ax != ancilla))
        results.append(float(marginal[0]))
    return tuple(results)


def distance(model: TrainedModel, cluster: TrainedCluster, sample) -> float:
    """Distance in [0, 2] between a sample and one cluster's pattern state."""
    pattern = pattern_state(model.ansatz, cluster.thetas)
    state = sample.state if hasattr(sample, "state") else sample
    if model.distance_mode == "COST_F":
        return cost_f(np.abs(pattern.amplitudes) ** 2, np.abs(state.amplitudes) ** 2)
    if model.distance_mode == "SWAP_GLOBAL":
        return 2.0 * (1.0 - swap_test_p0(pattern, state))
    return 2.0 * (1.0 - min(per_qubit_swap_test(pattern, state)))


def distance_matrix(model: TrainedModel, samples, jobs: int = 1) -> np.ndarray:
    """Distances of every sample (columns) to every cluster (rows)."""
    samples = list(samples)
    patterns = [pattern_state(model.ansatz, c.thetas) for c in model.clusters]
    if model.distance_mode == "COST_F":
        pattern_probs = np.array([np.abs(p.amplitudes) ** 2 for p in patterns])
        sample_probs = np.array([np.abs(s.state.amplitudes) ** 2 for s in samples])
        return np.abs(pattern_probs[:, None, :] - sample_probs[None, :, :]).sum(axis=-1)

    if model.distance_mode == "SWAP_GLOBAL":

        def column(sample):
            return [2.0 * (1.0 - swap_test_p0(p, sample.state)) for p in patterns]

    else:

        def column(sample):
            return [
                2.0 * (1.0 - min(per_qubit_swap_test(p, sample.state))) for p in patterns
            ]

    if jobs > 1 and len(samples) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(column, samples))
    else:
        columns = [column(s) for s in samples]
    return np.array(columns).T


def _accepts(d: float, delta: float, epsilon: float) -> bool:
    # Strict range test; a perfect match (d == delta == 0) is accepted rather
    # than rejected on the boundary.
    if delta < d < epsilon:
        return True
    return d == delta == 0.0


def _resolve_outcomes(dist: np.ndarray, clusters, sample_indices) -> list[ClassificationOutcome]:
    """Apply acceptance ranges and the tie rule to a distance matrix."""
    outcomes = []
    for j, sample_index in enumerate(sample_indices):
        assigned = []
        distances = {}
        for ci, cluster in enumerate(clusters):
            d = float(dist[ci, j])
            key = (cluster.class_label, cluster.cluster_index)
            distances[key] = d
            if _accepts(d, cluster.delta, cluster.epsilon):
                assigned.append((key, d))
        tie = False
        if not assigned:
            final: int | None = None
        else:
            best_by_class: dict[int, float] = {}
            for (k, _), d in assigned:
                if k not in best_by_class or d < best_by_class[k]:
                    best_by_class[k] = d
            if len(best_by_class) == 1:
                final = next(iter(best_by_class))
            else:
                # Accepted by both classes: take the closer one; exact ties go
                # to class 1 (block the sale) and are flagged.
                if best_by_class[0] == best_by_class[1]:
                    final, tie = 1, True
                else:
                    final = min(best_by_class, key=best_by_class.get)
        outcomes.append(
            ClassificationOutcome(
                sample_index=int(sample_index),
                assigned=tuple(sorted(key for key, _ in assigned)),
                final_class=final,
                distances=distances,
                tie=tie,
            )
        )
    return outcomes


def classify_samples(model: TrainedModel, samples, jobs: int = 1) -> list[ClassificationOutcome]:
    """Classify every sample; deterministic and order-stable for any ``jobs``."""
    samples = list(samples)
    dist = distance_matrix(model, samples, jobs=jobs)
    return _resolve_outcomes(dist, model.clusters, [s.source_index for s in samples])


def mvqe_classify(model: TrainedModel, samples):
    """Run the acceptance loop over samples, classes, and clusters.

    Returns (C, U): C is the set of accepted (sample_index, class, cluster)
    triples; U is the set of (sample_index, class) pairs that no cluster of
    that class accepted, after filtering out samples that were correctly
    classified elsewhere.
    """
    samples = list(samples)
    outcomes = classify_samples(model, samples)
    classes = sorted({c.class_label for c in model.clusters})
    classified = {
        (o.sample_index, k, l) for o in outcomes for (k, l) in o.assigned
    }
    unrecognized = {
        (o.sample_index, k)
        for o in outcomes
        for k in classes
        if k not in {kk for kk, _ in o.assigned}
    }
    true_labels = {s.source_index: s.label for s in samples}
    return classified, filter_unrecognized(classified, unrecognized, true_labels)


def filter_unrecognized(classified, unrecognized, true_labels) -> set:
    """Drop (sample, class) rejections for samples correctly classified in C."""
    properly = {i for (i, k, _) in classified if true_labels[i] == k}
    return {(i, k) for (i, k) in unrecognized if i not in properly}


def evaluate(model: TrainedModel, samples, jobs: int = 1) -> ClassificationReport:
    """Classification quality of a model over labeled samples.

    Accuracy counts unrecognized samples as incorrect; the false rate is the
    fraction of samples accepted by at least one wrong-class cluster.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("cannot evaluate an empty sample set")
    outcomes = classify_samples(model, samples, jobs=jobs)
    labels = [s.label for s in samples]
    hits = sum(1 for o, y in zip(outcomes, labels) if o.final_class == y)
    false_hits = sum(
        1 for o, y in zip(outcomes, labels) if any(k != y for (k, _) in o.assigned)
    )
    return ClassificationReport(
        outcomes=tuple(outcomes),
        accuracy=hits / len(samples),
        false_rate=false_hits / len(samples),
        unrecognized_count=sum(1 for o in outcomes if o.final_class is None),
        tie_count=sum(1 for o in outcomes if o.tie),
    )


def save_model(model: TrainedModel, path) -> None:
    """Write a model as versioned JSON; theta values round-trip bit-exactly."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "ansatz": {
            "variant": model.ansatz.variant,
            "qubits": model.ansatz.n_qubits,
            "layers": model.ansatz.layers,
        },
        "distance_mode": model.distance_mode,
        "clusters": [
            {
                "class": c.class_label,
                "cluster": c.cluster_index,
                "theta": [float(t) for t in c.thetas],
                "epsilon": c.epsilon,
                "delta": c.delta,
                "final_cost": c.final_cost,
                "members": list(c.members),
            }
            for c in model.clusters
        ],
        "metadata": dict(model.metadata),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ModelFormatError(f"missing field {where}.{key}")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelFormatError(f"field {where}.{key} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise ModelFormatError(f"field {where}.{key} must be {kind.__name__}")
    return value


def load_model(path) -> TrainedModel:
    """Read a model written by :func:`save_model`."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: model file must hold a JSON object")
    version = _require(doc, "version", int, "$")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported model version {version}, expected {MODEL_FORMAT_VERSION}"
        )
    ansatz_doc = _require(doc, "ansatz", dict, "$")
    mode = _require(doc, "distance_mode", str, "$")
    if mode not in DISTANCE_MODES:
        raise ModelFormatError(
            f"{path}: distance_mode must be one of {DISTANCE_MODES}, got {mode!r}"
        )
    clusters_doc = _require(doc, "clusters", list, "$")
    try:
        spec = AnsatzSpec(
            variant=_require(ansatz_doc, "variant", str, "$.ansatz"),
            n_qubits=_require(ansatz_doc, "qubits", int, "$.ansatz"),
            layers=_require(ansatz_doc, "layers", int, "$.ansatz"),
        )
    except ValueError as exc:
        raise ModelFormatError(f"{path}: $.ansatz: {exc}") from exc
    clusters = []
    for i, entry in enumerate(clusters_doc):
        where = f"$.clusters[{i}]"
        theta = _require(entry, "theta", list, where)
        members = entry.get("members", [])
        try:
            clusters.append(
                TrainedCluster(
                    class_label=_require(entry, "class", int, where),
                    cluster_index=_require(entry, "cluster", int, where),
                    thetas=np.array(theta, dtype=float),
                    epsilon=_require(entry, "epsilon", float, where),
                    delta=_require(entry, "delta", float, where),
                    final_cost=_require(entry, "final_cost", float, where),
                    members=tuple(int(m) for m in members),
                )
            )
        except (ValueError, TypeError) as exc:
            raise ModelFormatError(f"{path}: {where}: {exc}") from exc
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ModelFormatError(f"{path}: $.metadata must be an object")
    try:
        return TrainedModel(spec, tuple(clusters), mode, metadata)
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
