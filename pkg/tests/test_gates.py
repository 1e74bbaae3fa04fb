import numpy as np
import pytest

from qeclie import (
    Operator,
    SupportOverlapError,
    code_spin25,
    code_spin_cat,
    codespace_projector,
    cz_gate,
    graded_span,
    identity,
    logical_pauli,
    m_support_sets,
    phase_gate,
    span_of,
    spin_error_set,
    spin_ops,
    sx_gate,
    synthesize_logical_single_qubit,
    transparency_check,
    verify_logical,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


@pytest.fixture(scope="module")
def spin25():
    return code_spin25()


@pytest.fixture(scope="module")
def e2_span():
    return graded_span(spin_error_set(12.5, 2))


def shift_support_oracle(m_values, max_shift, J):
    """Levels reachable from given m values by at most max_shift unit steps."""
    ks = set()
    for m in m_values:
        for dm in range(-max_shift, max_shift + 1):
            if -J <= m + dm <= J:
                ks.add(int(m + dm + J))
    return frozenset(ks)


class TestSupportSets:
    def test_grade2_supports(self, spin25, e2_span):
        m0, m1 = m_support_sets(spin25, e2_span)
        assert m0 == shift_support_oracle([-12.5, -2.5, 7.5], 2, 12.5)
        assert m1 == shift_support_oracle([12.5, 2.5, -7.5], 2, 12.5)
        assert not m0 & m1
        assert len(m0) == len(m1) == 13

    def test_identity_span_gives_exact_supports(self, spin25):
        m0, m1 = m_support_sets(spin25, span_of([identity(26)]))
        assert m0 == frozenset({0, 10, 20})
        assert m1 == frozenset({25, 15, 5})

    def test_spin_cat_shift_by_one(self):
        code = code_spin_cat(2.5)
        jx, _, _ = spin_ops(2.5)
        span = span_of([identity(6), jx])
        m0, m1 = m_support_sets(code, span)
        assert m0 == frozenset({4, 5})  # m in {+3/2, +5/2}
        assert m1 == frozenset({0, 1})  # m in {-5/2, -3/2}

    def test_overlap_raises(self, spin25):
        wide = graded_span(spin_error_set(12.5, 3))
        with pytest.raises(SupportOverlapError, match="overlap"):
            m_support_sets(spin25, wide)


class TestPhaseGate:
    def test_zero_angle_is_identity(self, spin25, e2_span):
        cert = phase_gate(spin25, e2_span, 0.0)
        assert np.abs(cert.gate.entries - np.eye(26)).max() <= 1e-15

    def test_quarter_turn_logical_action(self, spin25, e2_span):
        cert = phase_gate(spin25, e2_span, np.pi / 2)
        assert np.abs(cert.logical_action - np.diag([1, 1j])).max() <= 1e-10
        assert cert.logical_fidelity >= 1 - 1e-10
        assert not cert.phase_corrected

    def test_inverse_composition(self, spin25, e2_span):
        forward = phase_gate(spin25, e2_span, 0.7).gate.entries
        backward = phase_gate(spin25, e2_span, -0.7).gate.entries
        assert np.abs(forward @ backward - np.eye(26)).max() <= 1e-15

    def test_group_addition(self, spin25, e2_span):
        a = phase_gate(spin25, e2_span, 0.3).gate.entries
        b = phase_gate(spin25, e2_span, 0.4).gate.entries
        c = phase_gate(spin25, e2_span, 0.7).gate.entries
        assert np.abs(a @ b - c).max() <= 1e-15

    def test_transparent_for_grade2(self, spin25, e2_span):
        cert = phase_gate(spin25, e2_span, 1.1)
        assert max(cert.transparency_residuals) <= 1e-8


class TestSXGate:
    def test_stated_per_level_action(self, spin25):
        cert = sx_gate(spin25)
        assert cert.details["stated_action_residual"] <= 1e-8
        assert cert.details["fitted_flip_sign"] in (1, -1)

    def test_logical_fidelity(self, spin25):
        cert = sx_gate(spin25)
        assert cert.logical_fidelity >= 1 - 1e-8

    def test_square_is_logical_not(self, spin25):
        cert = sx_gate(spin25)
        square = Operator(cert.gate.entries @ cert.gate.entries)
        fidelity, _ = verify_logical(square, spin25, X)
        assert fidelity >= 1 - 1e-8

    def test_fourth_power_is_identity_up_to_phase(self, spin25):
        u = sx_gate(spin25).gate.entries
        fourth = Operator(np.linalg.matrix_power(u, 4))
        fidelity, _ = verify_logical(fourth, spin25, np.eye(2, dtype=complex))
        assert fidelity >= 1 - 1e-8

    def test_codespace_preserved(self, spin25):
        cert = sx_gate(spin25)
        p = codespace_projector(spin25).entries
        leak = np.linalg.norm((np.eye(26) - p) @ cert.gate.entries @ p)
        assert leak <= 1e-8


class TestCZGate:
    def test_jz_exponential_is_diagonal_phases(self):
        _, _, jz = spin_ops(2.5)
        from qeclie import expm_hermitian
        u = expm_hermitian(jz, np.pi).entries
        expected = np.diag(np.exp(-1j * np.pi * (np.arange(6) - 2.5)))
        assert np.abs(u - expected).max() <= 1e-12

    def test_logical_action_is_cz_after_corrections(self, spin25, e2_span):
        cert = cz_gate(spin25, e2_span)
        assert cert.logical_fidelity >= 1 - 1e-8
        assert cert.phase_corrected
        # raw action: diag(1, 1, i, -i)
        assert np.abs(cert.logical_action - np.diag([1, 1, 1j, -1j])).max() <= 1e-8

    def test_commutes_with_first_factor_jz(self, spin25, e2_span):
        cert = cz_gate(spin25, e2_span)
        _, _, jz = spin_ops(12.5)
        jz1 = np.kron(jz.entries, np.eye(26))
        comm = cert.gate.entries @ jz1 - jz1 @ cert.gate.entries
        assert np.abs(comm).max() <= 1e-12


class TestLogicalPauli:
    def test_z_is_diagonal(self):
        u = logical_pauli(12.5, "z").entries
        expected = np.diag(np.exp(-1j * np.pi * (np.arange(26) - 12.5)))
        assert np.abs(u - expected).max() <= 1e-12

    def test_x_swaps_codewords(self, spin25):
        gate = logical_pauli(12.5, "x")
        fidelity, _ = verify_logical(gate, spin25, X)
        assert fidelity >= 1 - 1e-8

    @pytest.mark.parametrize("J,expected_sign", [(0.5, -1), (1, 1), (12.5, -1)])
    def test_x_squared_is_global_phase(self, J, expected_sign):
        u = logical_pauli(J, "x").entries
        d = u.shape[0]
        assert np.abs(u @ u - expected_sign * np.eye(d)).max() <= 1e-10

    def test_bad_axis(self):
        with pytest.raises(ValueError, match="axis"):
            logical_pauli(1, "w")


class TestVerifyLogical:
    def test_identity(self, spin25):
        fidelity, corrected = verify_logical(identity(26), spin25,
                                             np.eye(2, dtype=complex))
        assert fidelity == pytest.approx(1.0)
        assert not corrected

    def test_phase_pi_is_logical_z(self, spin25, e2_span):
        cert = phase_gate(spin25, e2_span, np.pi)
        fidelity, _ = verify_logical(cert.gate, spin25, Z)
        assert fidelity >= 1 - 1e-10

    def test_random_unitary_rejected_or_low(self, spin25):
        rng = np.random.default_rng(31)
        q, _ = np.linalg.qr(rng.normal(size=(26, 26))
                            + 1j * rng.normal(size=(26, 26)))
        with pytest.raises(ValueError, match="leak"):
            verify_logical(Operator(q), spin25, Z)

    def test_codespace_preserving_but_wrong_gate(self, spin25):
        # block unitary acting as SX on the codespace, identity outside
        v = spin25.isometry
        p = v @ v.conj().T
        u = np.eye(26, dtype=complex) - p + v @ SX @ v.conj().T
        fidelity, _ = verify_logical(Operator(u), spin25, Z,
                                     allow_phase_correction=False)
        assert fidelity < 0.99


class TestTransparency:
    def test_identity_gate(self, spin25, e2_span):
        residuals = transparency_check(identity(26), spin25, e2_span)
        assert max(residuals) <= 1e-12

    def test_random_unitary_spreads(self, spin25, e2_span):
        rng = np.random.default_rng(7)
        q, _ = np.linalg.qr(rng.normal(size=(26, 26))
                            + 1j * rng.normal(size=(26, 26)))
        residuals = transparency_check(Operator(q), spin25, e2_span)
        assert max(residuals) > 1e-3


class TestUniversalityWitness:
    def test_haar_targets_reachable(self, spin25):
        rng = np.random.default_rng(42)
        sx_action = sx_gate(spin25).logical_action
        for _ in range(20):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            target, _ = np.linalg.qr(g)
            _, word, fidelity = synthesize_logical_single_qubit(target, sx_action)
            assert fidelity >= 0.99

    def test_word_depth(self, spin25):
        rng = np.random.default_rng(43)
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        target, _ = np.linalg.qr(g)
        angles, _, fidelity = synthesize_logical_single_qubit(
            target, sx_gate(spin25).logical_action)
        assert len(angles) == 3  # three phase gates + two SX = depth five
        assert fidelity >= 0.99
