"""Statevector kernels against dense Kronecker-product oracles."""
import math

import numpy as np
import pytest

from vqelab import (
    CircuitSpec,
    ParameterVector,
    StateVector,
    apply_cz,
    apply_layer,
    apply_ry,
    euclidean_distance,
    haar_random_state,
    inner_product,
    phase_aligned_distance,
    prepare_circuit_state,
    real_sphere_state,
    zero_state,
)

from conftest import dense_layer, dense_on_qubit, dense_prepare, dense_ry


def random_theta(rng, n, L):
    return ParameterVector(n, L, rng.uniform(0, 2 * np.pi, n * L))


class TestZeroState:
    def test_one_qubit(self):
        assert np.array_equal(zero_state(1).amplitudes, [1, 0])

    def test_two_qubits(self):
        assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])

    def test_norm(self):
        assert zero_state(3).norm() == 1.0

    @pytest.mark.parametrize("n", [0, 15, -1])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            zero_state(n)


class TestApplyRy:
    def test_zero_angle_is_identity(self, rng):
        s = haar_random_state(3, 11)
        before = s.amplitudes.copy()
        apply_ry(s, 1, 0.0)
        assert np.allclose(s.amplitudes, before, atol=1e-15)

    def test_half_pi_on_zero(self):
        s = apply_ry(zero_state(1), 0, math.pi / 2)
        assert np.allclose(s.amplitudes, [2**-0.5, 2**-0.5], atol=1e-15)

    def test_pi_flips(self):
        s = apply_ry(zero_state(1), 0, math.pi)
        assert np.allclose(s.amplitudes, [0, 1], atol=1e-15)

    def test_index_error(self):
        with pytest.raises(IndexError):
            apply_ry(zero_state(2), 2, 0.3)

    def test_matches_dense_every_qubit(self, rng):
        for q in range(3):
            angle = rng.uniform(0, 2 * np.pi)
            s = haar_random_state(3, 5 + q)
            expected = dense_on_qubit(3, q, dense_ry(angle)) @ s.amplitudes
            apply_ry(s, q, angle)
            assert np.allclose(s.amplitudes, expected, atol=1e-12)


class TestApplyCz:
    def test_zero_state_unchanged(self):
        s = apply_cz(zero_state(2), 0, 1)
        assert np.array_equal(s.amplitudes, [1, 0, 0, 0])

    def test_flips_11(self):
        s = StateVector(2, np.array([0, 0, 0, 1.0]))
        apply_cz(s, 0, 1)
        assert np.array_equal(s.amplitudes, [0, 0, 0, -1.0])

    def test_involution(self):
        s = haar_random_state(3, 2)
        before = s.amplitudes.copy()
        apply_cz(apply_cz(s, 0, 2), 0, 2)
        assert np.array_equal(s.amplitudes, before)

    def test_equal_qubits_rejected(self):
        with pytest.raises(IndexError):
            apply_cz(zero_state(2), 1, 1)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            apply_cz(zero_state(2), 0, 2)


class TestApplyLayer:
    def test_zero_angles_on_zero_state(self):
        s = apply_layer(zero_state(3), np.zeros(3))
        assert np.allclose(s.amplitudes, zero_state(3).amplitudes, atol=1e-15)

    def test_pi_pi_example(self):
        # RY(pi) (x) RY(pi) sends |00> to |11>, then CZ flips the sign.
        s = apply_layer(zero_state(2), np.array([math.pi, math.pi]))
        assert np.allclose(s.amplitudes, [0, 0, 0, -1.0], atol=1e-15)

    def test_unit_norm(self, rng):
        s = apply_layer(haar_random_state(4, 3), rng.uniform(0, 7, 4))
        assert abs(s.norm() - 1.0) < 1e-12

    def test_wrong_angle_count(self):
        with pytest.raises(ValueError):
            apply_layer(zero_state(3), np.zeros(2))

    def test_exactly_equals_manual_gate_order(self, rng):
        n = 4
        angles = rng.uniform(0, 2 * np.pi, n)
        a = haar_random_state(n, 9)
        b = a.copy()
        apply_layer(a, angles)
        for q in range(n):
            apply_ry(b, q, angles[q])
        for x in range(n):
            for y in range(x + 1, n):
                apply_cz(b, x, y)
        # bitwise identical: the CZ sweep multiplies by +-1 either way
        assert np.array_equal(a.amplitudes, b.amplitudes)


class TestPrepareCircuitState:
    def test_identity_layers(self):
        spec = CircuitSpec(3, 2)
        theta = ParameterVector(3, 2, np.zeros(6))
        out = prepare_circuit_state(spec, theta)
        assert np.allclose(out.amplitudes, zero_state(3).amplitudes, atol=1e-15)

    def test_single_rotation_bit_order(self):
        # RY(pi/2) on qubit 0 of |00>: equal weight on basis indices 0
        # and 1 (qubit 0 is the least significant bit), nothing on the
        # qubit-1 side.
        spec = CircuitSpec(2, 1)
        theta = ParameterVector(2, 1, np.array([math.pi / 2, 0.0]))
        out = prepare_circuit_state(spec, theta)
        assert np.allclose(out.amplitudes, [2**-0.5, 2**-0.5, 0, 0], atol=1e-15)
        assert np.allclose(out.amplitudes, dense_prepare(2, 1, theta.angles), atol=1e-12)

    def test_norm_one(self, rng):
        spec = CircuitSpec(4, 3)
        out = prepare_circuit_state(spec, random_theta(rng, 4, 3))
        assert abs(out.norm() - 1.0) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            prepare_circuit_state(CircuitSpec(3, 2), ParameterVector(3, 1, np.zeros(3)))

    @pytest.mark.parametrize("n", [2, 3])
    def test_dense_equivalence_100_draws(self, n, rng):
        for i in range(100):
            L = int(rng.integers(1, 4))
            theta = random_theta(rng, n, L)
            got = prepare_circuit_state(CircuitSpec(n, L), theta).amplitudes
            want = dense_prepare(n, L, theta.angles)
            assert np.max(np.abs(got - want)) < 1e-10

    def test_state_periodicity_4pi(self, rng):
        spec = CircuitSpec(3, 2)
        theta = random_theta(rng, 3, 2)
        base = prepare_circuit_state(spec, theta).amplitudes
        for k in (0, 4, 5):
            shifted = theta.copy()
            shifted.angles[k] += 4 * math.pi
            again = prepare_circuit_state(spec, shifted).amplitudes
            assert np.max(np.abs(base - again)) < 1e-10


def test_gate_unitarity_thousand_draws(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        s = StateVector(n, (lambda g: (g[0] + 1j * g[1]) / np.linalg.norm(g[0] + 1j * g[1]))(
            rng.standard_normal((2, 1 << n))))
        if rng.random() < 0.5:
            apply_ry(s, int(rng.integers(0, n)), float(rng.uniform(0, 2 * np.pi)))
        else:
            a, b = sorted(rng.choice(n, size=2, replace=False))
            apply_cz(s, int(a), int(b))
        assert abs(s.norm() - 1.0) < 1e-12


class TestInnerProduct:
    def test_self_is_one(self):
        s = haar_random_state(3, 4)
        assert abs(inner_product(s, s) - 1.0) < 1e-12

    def test_orthogonal_basis_states(self):
        a = zero_state(2)
        b = StateVector(2, np.array([0, 0, 0, 1.0]))
        assert inner_product(a, b) == 0

    def test_conjugate_symmetry(self):
        a, b = haar_random_state(3, 1), haar_random_state(3, 2)
        assert abs(np.conj(inner_product(a, b)) - inner_product(b, a)) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(zero_state(2), zero_state(3))


class TestHaarRandomState:
    def test_unit_norm(self):
        assert abs(haar_random_state(4, 123).norm() - 1.0) < 1e-12

    def test_deterministic(self):
        a = haar_random_state(3, 77)
        b = haar_random_state(3, 77)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_first_component_moment(self):
        # E |<0|phi>|^2 = 2^-n for the Haar ensemble; check the sample
        # mean over 10^4 draws at n=2 against three standard errors.
        vals = np.array(
            [abs(haar_random_state(2, seed).amplitudes[0]) ** 2 for seed in range(10_000)]
        )
        se = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - 0.25) < 3 * se


class TestRealSphereState:
    def test_unit_norm_and_real(self):
        s = real_sphere_state(3, 5)
        assert abs(s.norm() - 1.0) < 1e-12
        assert np.all(s.amplitudes.imag == 0)

    def test_deterministic(self):
        assert np.array_equal(
            real_sphere_state(2, 9).amplitudes, real_sphere_state(2, 9).amplitudes
        )


class TestDistances:
    def test_self_distance_zero(self):
        s = haar_random_state(3, 8)
        assert euclidean_distance(s, s) == 0.0

    def test_orthogonal_units(self):
        a = zero_state(1)
        b = StateVector(1, np.array([0, 1.0]))
        assert abs(euclidean_distance(a, b) - math.sqrt(2)) < 1e-15

    def test_global_phase_sensitivity(self):
        s = haar_random_state(2, 3)
        minus = StateVector(2, -s.amplitudes)
        assert abs(euclidean_distance(s, minus) - 2.0) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            euclidean_distance(zero_state(1), zero_state(2))

    def test_phase_aligned_ignores_global_phase(self):
        s = haar_random_state(2, 3)
        rotated = StateVector(2, np.exp(0.7j) * s.amplitudes)
        assert phase_aligned_distance(s, rotated) < 1e-7
        assert euclidean_distance(s, rotated) > 0.1

    def test_phase_aligned_lower_bound(self):
        a, b = haar_random_state(3, 1), haar_random_state(3, 2)
        assert phase_aligned_distance(a, b) <= euclidean_distance(a, b) + 1e-12


class TestTypes:
    def test_state_vector_length_check(self):
        with pytest.raises(ValueError):
            StateVector(2, np.zeros(3))

    def test_parameter_vector_length_check(self):
        with pytest.raises(ValueError):
            ParameterVector(2, 3, np.zeros(5))

    def test_parameter_vector_indexing(self):
        pv = ParameterVector(3, 2, np.arange(6.0))
        assert pv.angle_index(1, 2) == 5
        assert pv.angles[pv.angle_index(1, 0)] == 3.0

    def test_circuit_spec_validation(self):
        with pytest.raises(ValueError):
            CircuitSpec(0, 1)
        with pytest.raises(ValueError):
            CircuitSpec(2, 0)
        assert CircuitSpec(1, 1).num_parameters == 1
