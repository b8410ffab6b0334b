import math

import numpy as np
import pytest

from conftest import haar_unitary, random_state
from qugame import qstate
from qugame.errors import DomainError, ResourceError
from qugame.qstate import StateVector, UnitaryMatrix
from qugame.rng import RandomSource

SQ2 = math.sqrt(2.0)


class TestBasisState:
    def test_five_qubit_register_index(self):
        sv = qstate.basis_state([2] * 5, "10011")
        assert sv.amps[19] == 1.0
        assert np.count_nonzero(sv.amps) == 1

    def test_single_qubit_up(self):
        assert np.allclose(qstate.basis_state([2], [0]).amps, [1, 0])

    def test_qutrit_pair_index(self):
        sv = qstate.basis_state([3, 3], [2, 1])
        assert sv.amps[7] == 1.0

    def test_digit_out_of_range(self):
        with pytest.raises(DomainError):
            qstate.basis_state([2, 2], [0, 2])

    def test_digit_count_mismatch(self):
        with pytest.raises(DomainError):
            qstate.basis_state([2, 2], [0])


class TestTensor:
    def test_u_tensor_d(self):
        u = qstate.basis_state([2], [0])
        d = qstate.basis_state([2], [1])
        assert np.allclose(qstate.tensor(u, d).amps, [0, 1, 0, 0])

    def test_identity_case(self):
        x = qstate.pauli_x()
        out = qstate.tensor(x, qstate.identity(1))
        assert np.allclose(out.entries, x.entries)

    def test_walsh_tensor_square(self):
        w4 = qstate.tensor(qstate.hadamard(), qstate.hadamard())
        assert np.allclose(w4.entries, qstate.walsh(2).entries, atol=1e-12)

    def test_dims_concatenate(self):
        a = random_state((2,), np.random.default_rng(0))
        b = random_state((3,), np.random.default_rng(1))
        assert qstate.tensor(a, b).dims == (2, 3)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(DomainError):
            qstate.tensor(qstate.basis_state([2], [0]), qstate.pauli_x())


class TestApply:
    def test_pauli_x_flips(self):
        u = qstate.basis_state([2], [0])
        assert np.allclose(qstate.apply(u, qstate.pauli_x()).amps, [0, 1])

    def test_hadamard_superposes(self):
        u = qstate.basis_state([2], [0])
        assert np.allclose(qstate.apply(u, qstate.hadamard()).amps, [1 / SQ2, 1 / SQ2])

    def test_double_hadamard_restores(self):
        u = qstate.basis_state([2], [0])
        h = qstate.hadamard()
        assert np.allclose(qstate.apply(qstate.apply(u, h), h).amps, [1, 0], atol=1e-12)

    def test_targets_subsystem(self, gen):
        state = random_state((2, 2, 2), gen)
        x = qstate.pauli_x()
        flipped = qstate.apply(state, x, [1])
        reference = qstate.apply(
            state, qstate.tensor(qstate.tensor(qstate.identity(2), x), qstate.identity(2))
        )
        assert np.allclose(flipped.amps, reference.amps, atol=1e-12)

    def test_two_qubit_gate_on_pair(self, gen):
        state = random_state((2, 2, 2), gen)
        u = haar_unitary(4, gen)
        out = qstate.apply(state, u, [2, 0])  # reversed order exercises the permutation
        full = qstate.apply(state, u, [0, 2])
        assert not np.allclose(out.amps, full.amps)  # order matters for non-symmetric u
        assert abs(out.norm() - 1.0) < 1e-10

    def test_disjoint_targets_commute(self, gen):
        state = random_state((2, 3, 2), gen)
        u1 = haar_unitary(2, gen)
        u2 = haar_unitary(2, gen)
        ab = qstate.apply(qstate.apply(state, u1, [0]), u2, [2])
        ba = qstate.apply(qstate.apply(state, u2, [2]), u1, [0])
        assert np.allclose(ab.amps, ba.amps, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            qstate.apply(qstate.basis_state([3], [0]), qstate.pauli_x())

    def test_norm_preserved(self, gen):
        for dims in ((2,), (2, 2), (2, 3)):
            state = random_state(dims, gen)
            u = haar_unitary(math.prod(dims), gen)
            assert abs(qstate.apply(state, u).norm() - 1.0) < 1e-10


class TestStandardGates:
    def test_pauli_y_matrix(self):
        assert np.array_equal(
            qstate.standard_gate("pauli_y").entries, [[0, -1j], [1j, 0]]
        )

    def test_phase_limits(self):
        assert np.allclose(qstate.standard_gate("phase", 0).entries, np.eye(2))
        assert np.allclose(
            qstate.standard_gate("phase", 1).entries, qstate.pauli_z().entries, atol=1e-12
        )

    def test_quarter_phase_squares_to_z(self):
        q = qstate.quarter_phase()
        one = qstate.basis_state([2], [1])
        twice = qstate.apply(qstate.apply(one, q), q)
        assert np.allclose(twice.amps, [0, -1])

    def test_unknown_gate(self):
        with pytest.raises(DomainError):
            qstate.standard_gate("toffoli")

    def test_cnot_truth_table(self):
        cx = qstate.cnot()
        for control, target, expected in ((0, 0, (0, 0)), (0, 1, (0, 1)), (1, 0, (1, 1)), (1, 1, (1, 0))):
            out = qstate.apply(qstate.basis_state([2, 2], [control, target]), cx)
            assert np.allclose(out.amps, qstate.basis_state([2, 2], expected).amps)

    def test_pauli_algebra(self):
        x, y, z = (g().entries for g in (qstate.pauli_x, qstate.pauli_y, qstate.pauli_z))
        eye = np.eye(2)
        for sigma in (x, y, z):
            assert np.abs(sigma @ sigma - eye).max() < 1e-12
        assert np.abs(x @ y - 1j * z).max() < 1e-12
        assert np.abs(y @ z - 1j * x).max() < 1e-12
        assert np.abs(z @ x - 1j * y).max() < 1e-12
        assert np.abs(x @ y + y @ x).max() < 1e-12

    def test_phase_kickback(self):
        # c-NOT on |x>(|0>-|1>)/sqrt2 imprints (-1)^x on the control
        minus = StateVector([2], [1 / SQ2, -1 / SQ2])
        cx = qstate.cnot()
        for x in (0, 1):
            joint = qstate.tensor(qstate.basis_state([2], [x]), minus)
            kicked = qstate.apply(joint, cx)
            expected = (-1.0) ** x * joint.amps
            assert np.allclose(kicked.amps, expected, atol=1e-12)


def bitdot(x: int, y: int) -> int:
    return bin(x & y).count("1") % 2


class TestWalsh:
    def test_uniform_superposition(self):
        uu = qstate.basis_state([2, 2], [0, 0])
        assert np.allclose(qstate.apply(uu, qstate.walsh(2)).amps, np.full(4, 0.5))

    def test_sign_pattern_on_110(self):
        out = qstate.apply(qstate.basis_state([2] * 3, "110"), qstate.walsh(3))
        signs = np.sign(out.amps.real)
        assert np.array_equal(signs, [1, 1, -1, -1, -1, -1, 1, 1])

    def test_self_inverse(self):
        for n in (1, 2, 3):
            w = qstate.walsh(n)
            assert np.abs((w @ w).entries - np.eye(1 << n)).max() < 1e-12

    @pytest.mark.parametrize("n", range(1, 7))
    def test_sign_oracle_exhaustive(self, n):
        # oracle: entry (x, y) must be (-1)^(x.y) / sqrt(2^n) bit by bit
        w = qstate.walsh(n).entries
        scale = 1.0 / math.sqrt(1 << n)
        for x in range(1 << n):
            for y in range(1 << n):
                expected = scale * (-1.0) ** bitdot(x, y)
                assert abs(w[x, y] - expected) < 1e-12

    def test_cap_enforced(self):
        with pytest.raises(ResourceError):
            qstate.walsh(15)


class TestQft:
    def test_single_qubit_is_hadamard(self):
        assert np.allclose(qstate.qft(1).entries, qstate.hadamard().entries, atol=1e-12)

    def test_inverse_pair(self):
        for n in (1, 2, 3):
            f = qstate.qft(n) @ qstate.qft(n, inverse=True)
            assert np.abs(f.entries - np.eye(1 << n)).max() < 1e-12

    def test_fourth_roots_table(self):
        # direct evaluation of e^{2 pi i x y / 4} / 2 for n = 2
        f = qstate.qft(2).entries
        for x in range(4):
            for y in range(4):
                assert abs(f[x, y] - (1j ** (x * y)) / 2.0) < 1e-12

    def test_unitarity(self):
        for n in (1, 2, 4):
            f = qstate.qft(n).entries
            assert np.abs(f.conj().T @ f - np.eye(1 << n)).max() < 1e-10

    def test_cap_enforced(self):
        with pytest.raises(ResourceError):
            qstate.qft(14)


class TestInner:
    def test_extracts_amplitude(self):
        a, b = 0.6, 0.8j
        psi = StateVector([2], [a, b])
        u = qstate.basis_state([2], [0])
        assert abs(qstate.inner(u, psi) - a) < 1e-12

    def test_basis_normalization(self):
        x = qstate.basis_state([2, 2], [1, 0])
        assert qstate.inner(x, x) == 1.0

    def test_bell_orthogonality(self):
        bell = qstate.bell_basis(2)
        for i in range(4):
            for j in range(4):
                value = qstate.inner(bell[i], bell[j])
                assert abs(value - (1.0 if i == j else 0.0)) < 1e-12

    def test_dims_mismatch(self):
        with pytest.raises(DomainError):
            qstate.inner(qstate.basis_state([2], [0]), qstate.basis_state([3], [0]))


class TestMeasure:
    def test_equal_superposition_probabilities(self):
        psi = StateVector([2], [1 / SQ2, 1 / SQ2])
        record = qstate.measure(psi, rng=RandomSource(0))
        assert abs(record.probability - 0.5) < 1e-12
        assert record.outcome_index in (0, 1)

    def test_bell_state_in_bell_basis(self):
        bell = qstate.bell_basis(2)
        record = qstate.measure(bell[0], basis=bell, rng=RandomSource(0))
        assert record.outcome_index == 0
        assert abs(record.probability - 1.0) < 1e-12
        assert np.allclose(record.post_state.amps, bell[0].amps)

    def test_uniform_register(self):
        n = 3
        sv = qstate.apply(qstate.basis_state([2] * n, [0] * n), qstate.walsh(n))
        record = qstate.measure(sv, rng=RandomSource(1))
        assert abs(record.probability - 1 / 2**n) < 1e-12

    def test_collapse_is_exact_basis_vector(self):
        psi = StateVector([2], [0.6, 0.8])
        record = qstate.measure(psi, rng=RandomSource(5))
        expected = np.zeros(2)
        expected[record.outcome_index] = 1.0
        assert np.array_equal(record.post_state.amps, expected)

    def test_forced_branch_probability(self):
        psi = StateVector([2], [0.6, 0.8])
        record = qstate.measure(psi, force=1)
        assert abs(record.probability - 0.64) < 1e-12

    def test_frequencies_match_born_rule(self):
        # 1e5 seeded trials against |amp|^2, three standard errors
        psi = StateVector([2, 2], [0.1, 0.7, 0.5, np.sqrt(1 - 0.01 - 0.49 - 0.25)])
        probs = psi.probabilities()
        rng = RandomSource(123)
        trials = 100_000
        counts = np.zeros(4)
        for _ in range(trials):
            counts[qstate.measure(psi, rng=rng).outcome_index] += 1
        for k in range(4):
            se = math.sqrt(probs[k] * (1 - probs[k]) / trials)
            assert abs(counts[k] / trials - probs[k]) <= 3 * se, f"outcome {k}"

    def test_non_orthonormal_basis_rejected(self):
        bad = [StateVector([2], [1, 0]), StateVector([2], [1 / SQ2, 1 / SQ2])]
        with pytest.raises(DomainError):
            qstate.measure(StateVector([2], [1, 0]), basis=bad, rng=RandomSource(0))

    def test_partial_measurement_residual(self):
        bell = qstate.bell_basis(2)
        psi = StateVector([2], [0.6, 0.8])
        state = qstate.tensor(psi, bell[3])
        record = qstate.measure(state, basis=bell, targets=(0, 1), force=2)
        assert abs(record.probability - 0.25) < 1e-12
        prob, residual = qstate.branch_residual(state, bell[2], targets=(0, 1))
        assert abs(prob - 0.25) < 1e-12
        # residual of b2 is sigma_x psi = (b, a)
        assert np.allclose(residual.amps, [0.8, 0.6], atol=1e-12)

    def test_reordered_targets_against_projector(self, gen):
        state = random_state((2, 2, 2), gen)
        bell = qstate.bell_basis(2)
        psi = state.amps.reshape(2, 2, 2)
        total = 0.0
        for k in range(4):
            record = qstate.measure(state, basis=bell, targets=(2, 0), force=k)
            bk = bell[k].amps.reshape(2, 2)  # axes ordered as the target list
            residual = np.einsum("ab,bia->i", bk.conj(), psi)
            manual = float(np.vdot(residual, residual).real)
            assert abs(record.probability - manual) < 1e-12
            total += record.probability
        assert abs(total - 1.0) < 1e-12

    def test_partial_collapse_matches_projector(self, gen):
        state = random_state((2, 2, 2), gen)
        record = qstate.measure(state, targets=(1,), force=1)
        projector = np.kron(np.kron(np.eye(2), np.diag([0.0, 1.0])), np.eye(2))
        projected = projector @ state.amps
        weight = float(np.vdot(projected, projected).real)
        assert abs(record.probability - weight) < 1e-12
        assert np.allclose(record.post_state.amps, projected / math.sqrt(weight), atol=1e-12)


class TestBellBasis:
    def test_b3_amplitudes(self):
        b3 = qstate.bell_basis(2)[3]
        assert np.allclose(b3.amps, [0, 1 / SQ2, -1 / SQ2, 0])

    def test_cnot_hadamard_makes_b0(self):
        state = qstate.basis_state([2, 2], [0, 0])
        state = qstate.apply(state, qstate.hadamard(), [0])
        state = qstate.apply(state, qstate.cnot(), [0, 1])
        assert np.allclose(state.amps, qstate.bell_basis(2)[0].amps, atol=1e-12)

    def test_three_qubit_pair(self):
        top, bottom = qstate.bell_basis(3)
        assert np.allclose(top.amps[[0, 7]], [1 / SQ2, 1 / SQ2])
        assert np.allclose(bottom.amps[[0, 7]], [1 / SQ2, -1 / SQ2])
        assert abs(qstate.inner(top, bottom)) < 1e-12

    def test_too_small(self):
        with pytest.raises(DomainError):
            qstate.bell_basis(1)


class TestInvariantsAndPlumbing:
    def test_unitary_certificate_rejects_non_unitary(self):
        with pytest.raises(DomainError):
            UnitaryMatrix([[1, 0], [1, 1]])

    def test_unnormalized_state_rejected(self):
        with pytest.raises(DomainError):
            StateVector([2], [1, 1])

    def test_state_cap(self):
        old = qstate.MAX_STATE_DIM
        qstate.MAX_STATE_DIM = 8
        try:
            with pytest.raises(ResourceError):
                qstate.basis_state([2] * 4, [0] * 4)
        finally:
            qstate.MAX_STATE_DIM = old

    def test_equal_up_to_phase(self):
        psi = StateVector([2], [0.6, 0.8])
        rotated = StateVector([2], np.exp(0.71j) * psi.amps)
        assert qstate.equal_up_to_phase(psi, rotated)
        assert not qstate.equal_up_to_phase(psi, StateVector([2], [0.8, 0.6]))

    def test_states_are_immutable(self):
        psi = qstate.basis_state([2], [0])
        with pytest.raises((AttributeError, ValueError)):
            psi.amps[0] = 5.0

    def test_json_round_trip(self):
        psi = StateVector([2, 3], np.ones(6) / math.sqrt(6))
        again = StateVector.from_json_dict(psi.to_json_dict())
        assert again.dims == psi.dims
        assert np.allclose(again.amps, psi.amps)

    def test_random_unitaries_preserve_norm(self, gen):
        for _ in range(25):
            state = random_state((2, 2), gen)
            u = haar_unitary(4, gen)
            assert abs(qstate.apply(state, u).norm() - 1.0) <= 1e-10
