import numpy as np
import pytest
import scipy.linalg

from qeclie import (
    Operator,
    OperatorSpan,
    SubsystemLayout,
    embed_local,
    expm_hermitian,
    extend_span,
    hs_inner,
    identity,
    span_intersection,
    span_of,
    spin_ops,
)
from qeclie.operators import hermitian_from_real_coords, hermitian_real_coords


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return Operator((a + a.conj().T) / 2, hermitian=True)


class TestOperator:
    def test_hermitian_flag_verified(self):
        with pytest.raises(ValueError, match="Hermitian"):
            Operator(np.array([[0, 1], [0, 0]]), hermitian=True)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            Operator(np.zeros((2, 3)))

    def test_entries_read_only(self):
        op = identity(2)
        with pytest.raises(ValueError):
            op.entries[0, 0] = 5.0

    def test_scalar_and_matmul(self):
        jx, jy, jz = spin_ops(0.5)
        prod = jx @ jy
        assert np.allclose(prod.entries, jx.entries @ jy.entries)
        assert (2.0 * jx).hermitian
        assert not (1j * jx).hermitian


class TestSpinOps:
    def test_jz_ordering_spin_half(self):
        _, _, jz = spin_ops(0.5)
        assert np.allclose(jz.entries, np.diag([-0.5, 0.5]))

    @pytest.mark.parametrize("J", [0.5, 1, 1.5, 2, 2.5, 3.5, 12.5])
    def test_su2_commutator(self, J):
        jx, jy, jz = spin_ops(J)
        comm = jx.entries @ jy.entries - jy.entries @ jx.entries
        assert np.abs(comm - 1j * jz.entries).max() <= 1e-12 * max(1, J * J)

    @pytest.mark.parametrize("J", [0.5, 1.5, 2.5, 12.5])
    def test_casimir(self, J):
        jx, jy, jz = spin_ops(J)
        total = sum(op.entries @ op.entries for op in (jx, jy, jz))
        assert np.abs(total - J * (J + 1) * np.eye(jx.dim)).max() <= 1e-12 * J * J

    def test_all_hermitian(self):
        assert all(op.hermitian for op in spin_ops(1.5))

    @pytest.mark.parametrize("J", [0.3, -0.5, 0, 1.25])
    def test_invalid_spin_rejected(self, J):
        with pytest.raises(ValueError, match="half-integer"):
            spin_ops(J)


class TestEmbedLocal:
    def test_site1_of_two_qubits(self):
        _, _, jz = spin_ops(0.5)
        layout = SubsystemLayout((2, 2))
        out = embed_local(jz, layout, 1)
        assert np.allclose(out.entries, np.diag([-0.5, -0.5, 0.5, 0.5]))

    def test_identity_embeds_to_identity(self):
        layout = SubsystemLayout((2, 3, 2))
        out = embed_local(identity(3), layout, 2)
        assert np.allclose(out.entries, np.eye(12))

    def test_site2_index_arithmetic(self):
        jx, _, _ = spin_ops(1)
        layout = SubsystemLayout((3, 3))
        out = embed_local(jx, layout, 2)
        # <k (x) k' | out | k (x) k''> = <k'|Jx|k''>, zero across the first factor
        for k in range(3):
            for kp in range(3):
                for kq in range(3):
                    assert out.entries[3 * k + kp, 3 * k + kq] == pytest.approx(
                        jx.entries[kp, kq])
        assert np.abs(out.entries[0:3, 3:6]).max() == 0

    def test_distinct_sites_commute(self):
        rng = np.random.default_rng(3)
        layout = SubsystemLayout((3, 2))
        a = embed_local(random_hermitian(rng, 3), layout, 1)
        b = embed_local(random_hermitian(rng, 2), layout, 2)
        comm = a.entries @ b.entries - b.entries @ a.entries
        assert np.abs(comm).max() <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dim"):
            embed_local(identity(3), SubsystemLayout((2, 2)), 1)

    def test_site_out_of_range(self):
        with pytest.raises(ValueError, match="site"):
            embed_local(identity(2), SubsystemLayout((2, 2)), 3)


class TestHSInner:
    def test_identity(self):
        assert hs_inner(identity(2), identity(2)) == pytest.approx(2)

    def test_orthogonal_paulis(self):
        jx, jy, _ = spin_ops(0.5)
        assert abs(hs_inner(jx, jy)) <= 1e-14

    def test_jz_spin1(self):
        _, _, jz = spin_ops(1)
        assert hs_inner(jz, jz) == pytest.approx(2)

    def test_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            hs_inner(identity(2), identity(3))


class TestExpmHermitian:
    def test_zero_time(self):
        _, _, jz = spin_ops(1.5)
        assert np.allclose(expm_hermitian(jz, 0.0).entries, np.eye(4))

    def test_spin_half_pi(self):
        _, _, jz = spin_ops(0.5)
        u = expm_hermitian(jz, np.pi)
        assert np.allclose(u.entries, np.diag([np.exp(0.5j * np.pi),
                                               np.exp(-0.5j * np.pi)]))

    def test_matches_scipy(self):
        rng = np.random.default_rng(11)
        h = random_hermitian(rng, 7)
        ours = expm_hermitian(h, 0.37).entries
        reference = scipy.linalg.expm(-0.37j * h.entries)
        assert np.abs(ours - reference).max() <= 1e-11

    def test_group_law(self):
        rng = np.random.default_rng(12)
        h = random_hermitian(rng, 5)
        left = expm_hermitian(h, 0.3).entries @ expm_hermitian(h, 0.9).entries
        assert np.abs(left - expm_hermitian(h, 1.2).entries).max() <= 1e-9

    def test_unitarity(self):
        jx, _, _ = spin_ops(12.5)
        h = Operator(jx.entries + jx.entries @ jx.entries, hermitian=True)
        u = expm_hermitian(h, np.pi / 2).entries
        assert np.abs(u.conj().T @ u - np.eye(26)).max() <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            expm_hermitian(Operator(np.array([[0, 1], [0, 0]])), 1.0)


class TestSpans:
    def test_extend_empty(self):
        jx, _, _ = spin_ops(1)
        span = OperatorSpan(3)
        new, residual = extend_span(span, jx)
        assert new.size == 1
        assert residual == pytest.approx(jx.hs_norm())

    def test_extend_contained(self):
        span = span_of([identity(2)])
        new, residual = extend_span(span, identity(2))
        assert new.size == 1 and new is span
        assert residual <= 1e-12

    def test_pauli_basis_dimension(self):
        jx, jy, jz = spin_ops(0.5)
        span = span_of([identity(2), jx, jy, jz])
        assert span.size == 4

    def test_idempotent(self):
        jx, jy, jz = spin_ops(1)
        span = span_of([identity(3), jx, jy, jz])
        for op in span.basis:
            again, residual = extend_span(span, op)
            assert again.size == span.size
            assert residual < span.tol

    def test_rejects_non_hermitian(self):
        span = OperatorSpan(2)
        with pytest.raises(ValueError, match="Hermitian"):
            extend_span(span, Operator(np.array([[0, 1], [0, 0]])))

    def test_orthonormality_enforced(self):
        jx, _, _ = spin_ops(0.5)
        with pytest.raises(ValueError, match="orthonormal"):
            OperatorSpan(2, (identity(2), identity(2)))

    def test_orthonormal_invariant(self):
        rng = np.random.default_rng(5)
        span = span_of([random_hermitian(rng, 4) for _ in range(9)])
        vecs = span.matrices.reshape(span.size, -1)
        gram = vecs.conj() @ vecs.T
        assert np.abs(gram - np.eye(span.size)).max() <= 1e-10

    def test_residual_of(self):
        jx, jy, jz = spin_ops(0.5)
        span = span_of([identity(2), jz])
        assert span.residual_of(jx) == pytest.approx(jx.hs_norm())
        assert span.residual_of(jz) <= 1e-12


class TestRealCoords:
    def test_isometry(self):
        rng = np.random.default_rng(21)
        a = random_hermitian(rng, 5).entries
        b = random_hermitian(rng, 5).entries
        va, vb = hermitian_real_coords(a), hermitian_real_coords(b)
        assert va @ vb == pytest.approx(np.trace(a.conj().T @ b).real)

    def test_round_trip(self):
        rng = np.random.default_rng(22)
        a = random_hermitian(rng, 6).entries
        back = hermitian_from_real_coords(hermitian_real_coords(a), 6)
        assert np.abs(back - a).max() <= 1e-14


class TestSpanIntersection:
    def test_shared_identity(self):
        jx, jy, jz = spin_ops(0.5)
        a = span_of([identity(2), jz])
        b = span_of([identity(2), jx])
        common = span_intersection(a, b)
        assert common.size == 1
        assert common.contains(identity(2))

    def test_identical_spans(self):
        jx, jy, jz = spin_ops(1)
        a = span_of([identity(3), jx, jy, jz])
        common = span_intersection(a, a)
        assert common.size == a.size

    def test_disjoint_up_to_nothing(self):
        jx, jy, _ = spin_ops(0.5)
        a = span_of([jx])
        b = span_of([jy])
        assert span_intersection(a, b).size == 0
