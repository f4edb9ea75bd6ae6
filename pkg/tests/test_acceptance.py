"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the pass/fail lines.
The trained-model fixtures in conftest.py are shared across criteria and use
the default configuration (seed 42, 500 SPSA iterations, 3 restarts, 7
clusters per class).
"""
import functools
import time

import numpy as np

from vqrisk.classify import evaluate, load_model, swap_test_p0
from vqrisk.cli import main as cli_main
from vqrisk.encoding import amplitude_encode
from vqrisk.entanglement import detect_by_partition_division
from vqrisk.qsim import StateVector, inner_product, new_basis_state, run_circuit
from vqrisk.training import cost_f

from oracles import apply_circuit, random_circuit, random_state, schmidt_entangled

SQ2 = 1 / np.sqrt(2)


def criterion(number, title):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] criterion {number}: {title}")
                raise
            print(f"[PASS] criterion {number}: {title}")

        return wrapper

    return decorate


@criterion(1, "SWAP test matches the overlap formula within 1e-10")
def test_criterion_1_swap_test_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(12345)
    for _ in range(100):
        psi = StateVector(3, random_state(rng, 3))
        phi = StateVector(3, random_state(rng, 3))
        expected = 0.5 + 0.5 * abs(inner_product(psi, phi)) ** 2
        assert abs(swap_test_p0(psi, phi) - expected) < 1e-10
    identical = StateVector(3, random_state(rng, 3))
    assert abs(swap_test_p0(identical, identical) - 1.0) < 1e-12
    assert abs(swap_test_p0(new_basis_state(1, 0), new_basis_state(1, 1)) - 0.5) < 1e-12
    assert time.perf_counter() - start < 1.0


@criterion(2, "simulator matches the dense Kronecker oracle within 1e-9")
def test_criterion_2_simulator_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(777)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        depth = int(rng.integers(1, 21))
        circuit = random_circuit(rng, n, depth)
        initial = random_state(rng, n)
        expected = apply_circuit(circuit, initial)
        got = run_circuit(StateVector(n, initial), circuit).amplitudes
        assert np.max(np.abs(got - expected)) < 1e-9
    assert time.perf_counter() - start < 5.0


@criterion(3, "encoded samples are normalized with a zero pad amplitude")
def test_criterion_3_encoding_correctness(encoded_train):
    for sample in encoded_train:
        assert abs(np.sum(np.abs(sample.state.amplitudes) ** 2) - 1.0) < 1e-12
        assert sample.state.amplitudes[7] == 0.0
    uniform = amplitude_encode([1.0, 1.0, 1.0, 1.0])
    assert all(a == 0.5 for a in uniform.amplitudes.real)


@criterion(4, "entanglement detector matches known states and the rank oracle")
def test_criterion_4_entanglement_detector():
    start = time.perf_counter()
    ghz = StateVector(3, np.array([1, 0, 0, 0, 0, 0, 0, 1]) * SQ2)
    assert detect_by_partition_division(ghz).entangled_groups == ((0, 1, 2),)
    zero_bell = StateVector(3, np.array([1, 0, 0, 1, 0, 0, 0, 0]) * SQ2)
    assert detect_by_partition_division(zero_bell).entangled_groups == ((1, 2),)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        parts = [random_state(rng, 1) for _ in range(3)]
        product = StateVector(3, np.kron(np.kron(parts[0], parts[1]), parts[2]))
        assert detect_by_partition_division(product).entangled_groups == ()
    rng = np.random.default_rng(31415)
    for _ in range(200):
        state = StateVector(3, random_state(rng, 3))
        report = detect_by_partition_division(state)
        for q, key in ((0, "0|12"), (1, "1|02"), (2, "2|01")):
            assert (report.purities[key] < 1 - 1e-7) == schmidt_entangled(
                state.amplitudes, [q], 3
            )
    assert time.perf_counter() - start < 2.0


@criterion(5, "trained cluster costs stay below 0.25 with a small median")
def test_criterion_5_cost_bound(run_a2, run_b1):
    for run in (run_a2, run_b1):
        costs = np.array([c.final_cost for c in run.clusters])
        assert np.all(costs <= 0.25)
    default_costs = np.array([c.final_cost for c in run_a2.clusters])
    assert 0.0 <= float(np.median(default_costs)) <= 0.15


@criterion(6, "training accuracy targets hold before and after tuning")
def test_criterion_6_accuracy_reproduction(encoded_train, run_a2, run_b1):
    untuned = evaluate(run_a2.model, encoded_train)
    assert untuned.accuracy >= 0.90
    tuned_a2 = evaluate(run_a2.tuned_model(encoded_train), encoded_train)
    assert tuned_a2.accuracy >= 0.98
    assert tuned_a2.false_rate <= 0.02
    tuned_b1 = evaluate(run_b1.tuned_model(encoded_train), encoded_train)
    assert tuned_b1.accuracy >= 0.95


@criterion(7, "two layers never classify worse than one (variant A, untuned)")
def test_criterion_7_monotone_layer_benefit(encoded_train, run_a1, run_a2):
    one_layer = evaluate(run_a1.model, encoded_train).accuracy
    two_layers = evaluate(run_a2.model, encoded_train).accuracy
    assert one_layer >= 0.80  # floor for the untuned single-layer classifier
    assert two_layers >= one_layer


@criterion(8, "variant B single-layer training finishes within 60 s")
def test_criterion_8_training_runtime(run_b1):
    assert len(run_b1.clusters) == 14  # 7 clusters per class on the default data
    assert run_b1.elapsed < 60.0


@criterion(9, "generate/train/classify pipeline is byte-identical across runs")
def test_criterion_9_pipeline_determinism(tmp_path):
    def pipeline(workdir):
        workdir.mkdir()
        data = workdir / "data.csv"
        model = workdir / "model.json"
        report = workdir / "report.json"
        assert cli_main(["generate-data", "--seed", "42", "--count", "40",
                         "--out", str(data)]) == 0
        assert cli_main(["train", "--data", str(data), "--out", str(model),
                         "--tune-epsilon"]) == 0
        assert cli_main(["classify", "--model", str(model), "--data", str(data),
                         "--out", str(report)]) == 0
        load_model(model)  # the artifact must remain readable
        return data.read_bytes(), model.read_bytes(), report.read_bytes()

    assert pipeline(tmp_path / "run1") == pipeline(tmp_path / "run2")


@criterion(10, "distribution distance is a symmetric metric on 10k triples")
def test_criterion_10_cost_metric_properties():
    rng = np.random.default_rng(2)
    triples = rng.uniform(0.0, 1.0, size=(3, 10_000, 8))
    triples /= triples.sum(axis=2, keepdims=True)
    p, q, r = triples
    d_pq = np.abs(p - q).sum(axis=1)
    d_qp = np.abs(q - p).sum(axis=1)
    d_qr = np.abs(q - r).sum(axis=1)
    d_pr = np.abs(p - r).sum(axis=1)
    assert np.max(np.abs(d_pq - d_qp)) < 1e-12
    assert np.all(d_pr <= d_pq + d_qr + 1e-12)
    assert cost_f(p[0], p[0]) == 0.0
    # spot-check the vectorized arithmetic against the public function
    for i in range(0, 10_000, 997):
        assert cost_f(p[i], q[i]) == d_pq[i]
