import numpy as np
import pytest

from vqrisk.ansatz import AnsatzSpec, build_circuit, can_entangle, param_count, pattern_state
from vqrisk.qsim import new_basis_state, partial_trace, probabilities, purity, run_circuit

from oracles import apply_circuit


def count_rotations(circuit):
    return sum(1 for op in circuit.ops if op.kind == "RY")


class TestSpec:
    def test_bad_variant_rejected(self):
        with pytest.raises(ValueError):
            AnsatzSpec("C")

    def test_zero_layers_rejected(self):
        with pytest.raises(ValueError):
            AnsatzSpec("A", 3, 0)

    def test_single_qubit_rejected(self):
        with pytest.raises(ValueError):
            AnsatzSpec("A", 1, 1)


class TestParamCount:
    @pytest.mark.parametrize(
        "variant,layers,expected",
        [("A", 2, 9), ("B", 1, 5), ("A", 1, 6), ("B", 2, 7), ("A", 3, 12)],
    )
    def test_matches_rotation_count_in_built_circuit(self, variant, layers, expected):
        spec = AnsatzSpec(variant, 3, layers)
        assert param_count(spec) == expected
        circuit = build_circuit(spec, np.zeros(expected))
        assert count_rotations(circuit) == expected

    def test_four_qubit_counts(self):
        assert param_count(AnsatzSpec("A", 4, 2)) == 12
        assert param_count(AnsatzSpec("B", 4, 2)) == 10


class TestBuildCircuit:
    def test_variant_a_zero_angles_is_identity_on_zero_state(self):
        spec = AnsatzSpec("A", 3, 1)
        out = run_circuit(new_basis_state(3, 0), build_circuit(spec, np.zeros(6)))
        np.testing.assert_allclose(out.amplitudes, new_basis_state(3, 0).amplitudes, atol=1e-12)

    def test_variant_b_pi_on_first_qubit(self):
        # RY(pi) puts q0 to |1>, CNOT(0,1) flips q1, then CNOT(1,2) flips q2:
        # the dense oracle confirms the final state is |111>.
        spec = AnsatzSpec("B", 3, 1)
        circuit = build_circuit(spec, [np.pi, 0, 0, 0, 0])
        expected = apply_circuit(circuit, new_basis_state(3, 0).amplitudes)
        assert abs(expected[7]) == pytest.approx(1.0, abs=1e-12)
        out = run_circuit(new_basis_state(3, 0), circuit)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)

    def test_variant_a_layer_structure(self):
        spec = AnsatzSpec("A", 3, 2)
        kinds = [op.kind for op in build_circuit(spec, np.zeros(9)).ops]
        assert kinds == ["RY"] * 3 + (["CZ"] * 2 + ["RY"] * 3) * 2

    def test_variant_b_layer_structure(self):
        spec = AnsatzSpec("B", 3, 1)
        ops = build_circuit(spec, np.zeros(5)).ops
        kinds_qubits = [(op.kind, op.qubits) for op in ops]
        assert kinds_qubits == [
            ("RY", (0,)), ("RY", (1,)), ("RY", (2,)),
            ("CNOT", (0, 1)), ("RY", (1,)),
            ("CNOT", (1, 2)), ("RY", (2,)),
        ]

    def test_unitarity_for_random_angles(self):
        rng = np.random.default_rng(21)
        for variant in ("A", "B"):
            for layers in (1, 2, 3):
                spec = AnsatzSpec(variant, 3, layers)
                thetas = rng.uniform(0, 2 * np.pi, param_count(spec))
                out = pattern_state(spec, thetas)
                assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-10

    def test_deterministic_construction(self):
        spec = AnsatzSpec("B", 3, 2)
        thetas = np.linspace(0.1, 1.4, param_count(spec))
        assert build_circuit(spec, thetas) == build_circuit(spec, thetas)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            build_circuit(AnsatzSpec("A", 3, 1), np.zeros(5))


class TestCanEntangle:
    def test_both_variants(self):
        assert can_entangle(AnsatzSpec("A", 3, 1))
        assert can_entangle(AnsatzSpec("B", 3, 2))


class TestExpressivity:
    def test_variant_a_one_layer_creates_entanglement(self):
        # CZ ladder on |+++> leaves the first cut strongly mixed
        spec = AnsatzSpec("A", 3, 1)
        thetas = np.array([np.pi / 2, np.pi / 2, np.pi / 2, 0.0, 0.0, 0.0])
        state = pattern_state(spec, thetas)
        assert purity(partial_trace(state, [0])) < 0.99


class TestContinuity:
    def test_parameter_shift_matches_central_difference(self):
        # RY generators admit the exact shift rule
        # dp/dt = [p(t + pi/2) - p(t - pi/2)] / 2, which must agree with a
        # small central difference of the simulated probabilities.
        rng = np.random.default_rng(33)
        for spec in (AnsatzSpec("A", 3, 2), AnsatzSpec("B", 3, 1)):
            thetas = rng.uniform(0, 2 * np.pi, param_count(spec))

            def probs(t):
                return probabilities(pattern_state(spec, t)).probs

            step = 1e-5
            for i in range(len(thetas)):
                up, down = thetas.copy(), thetas.copy()
                up[i] += np.pi / 2
                down[i] -= np.pi / 2
                shift = (probs(up) - probs(down)) / 2
                up_h, down_h = thetas.copy(), thetas.copy()
                up_h[i] += step
                down_h[i] -= step
                finite = (probs(up_h) - probs(down_h)) / (2 * step)
                np.testing.assert_allclose(shift, finite, atol=1e-6)
