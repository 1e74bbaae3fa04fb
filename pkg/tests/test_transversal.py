import numpy as np
import pytest

from qeclie import (
    CapabilityError,
    Code,
    GradedErrorSet,
    Operator,
    SubsystemLayout,
    certify_transversal,
    code_422,
    code_multi_spin_cat,
    code_spin25,
    detection_check,
    embed_local,
    graded_span,
    identity,
    induced_logical_action,
    lie_closure,
    logical_algebra,
    single_site_pauli_set,
    span_of,
    spin_error_set,
    spin_ops,
    tensor_code,
    transversal_algebra,
)


def full_qubit_span():
    jx, jy, jz = spin_ops(0.5)
    return span_of([identity(2), 2 * jx, 2 * jy, 2 * jz])


class TestTransversalAlgebra:
    def test_two_qubits_full_local(self):
        layout = SubsystemLayout((2, 2))
        span = transversal_algebra(layout, [full_qubit_span()] * 2)
        assert span.size == 7  # 4 + 4 minus the shared identity

    def test_single_site_passthrough(self):
        layout = SubsystemLayout((3,))
        jx, jy, jz = spin_ops(1)
        local = span_of([identity(3), jx, jy, jz])
        span = transversal_algebra(layout, [local])
        assert span.size == local.size

    def test_two_qutrits_diagonal(self):
        layout = SubsystemLayout((3, 3))
        _, _, jz = spin_ops(1)
        local = span_of([identity(3), jz])
        span = transversal_algebra(layout, [local, local])
        assert span.size == 3

    def test_gram_oracle(self):
        layout = SubsystemLayout((2, 2))
        ops = []
        for site in (1, 2):
            ops.extend(embed_local(op, layout, site).entries
                       for op in full_qubit_span().basis)
        vecs = np.array([m.reshape(-1) for m in ops])
        gram = vecs.conj() @ vecs.T
        eigs = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        rank = int((eigs > 1e-10 * eigs.max()).sum())
        span = transversal_algebra(layout, [full_qubit_span()] * 2)
        assert span.size == rank

    def test_wrong_closure_count(self):
        with pytest.raises(ValueError, match="local closures"):
            transversal_algebra(SubsystemLayout((2, 2)), [full_qubit_span()])


class TestLogicalAlgebra:
    def test_trivial_code(self):
        code = Code(layout=SubsystemLayout((3,)), K=3,
                    isometry=np.eye(3, dtype=complex), name="trivial")
        assert logical_algebra(code).size == 9

    def test_single_codeword(self):
        code = Code(layout=SubsystemLayout((2,)), K=1,
                    isometry=np.array([[1.0], [0.0]], dtype=complex), name="k1")
        assert logical_algebra(code).size == 2

    def test_code422_block_commutant(self):
        span = logical_algebra(code_422())
        assert span.size == 4 ** 2 + 12 ** 2  # K^2 + (N-K)^2

    def test_block_basis_oracle(self):
        # independent construction: Hermitian blocks on range(P) and ker(P)
        code = code_spin25()
        span = logical_algebra(code)
        assert span.size == 2 ** 2 + 24 ** 2
        p = code.isometry @ code.isometry.conj().T
        for mat in span.matrices[:20]:
            assert np.abs(mat @ p - p @ mat).max() <= 1e-8

    def test_cap(self):
        code = Code(layout=SubsystemLayout((41,)), K=41,
                    isometry=np.eye(41, dtype=complex), name="big")
        with pytest.raises(CapabilityError, match="per-site"):
            logical_algebra(code)


class TestInducedLogicalAction:
    def test_identity_span(self):
        code = code_spin25()
        span = span_of([identity(26)])
        induced = induced_logical_action(code, span)
        assert induced.size == 1
        assert induced.contains(identity(2))

    def test_projector_pair_collapses(self):
        code = code_spin25()
        p = code.isometry @ code.isometry.conj().T
        span = span_of([Operator(p, hermitian=True),
                        Operator(np.eye(26) - p, hermitian=True)])
        assert induced_logical_action(code, span).size == 1

    def test_full_logical_algebra_gives_k_squared(self):
        for code in (code_422(), code_multi_spin_cat(2, 1)):
            induced = induced_logical_action(code, logical_algebra(code))
            assert induced.size == code.K ** 2

    def test_non_commuting_rejected(self):
        code = code_spin25()
        jx, _, _ = spin_ops(12.5)
        with pytest.raises(ValueError, match="commute"):
            induced_logical_action(code, span_of([jx]))


class TestCertify:
    def test_eastin_knill_control(self):
        code = code_422()
        sites = [single_site_pauli_set(code.layout, s) for s in range(1, 5)]
        report = certify_transversal(code, sites)
        assert report.verdict == "no-continuous-gates"
        assert all(s.closed for s in report.per_site)
        assert report.logical_component_dim <= 1

    def test_abelian_site_errors(self):
        code = code_multi_spin_cat(2, 1)
        _, _, jz = spin_ops(1)
        sites = [GradedErrorSet(generators=(identity(3), jz), grade=1,
                                layout=code.layout, site=s) for s in (1, 2)]
        report = certify_transversal(code, sites)
        assert report.verdict == "no-continuous-gates"

    def test_per_site_path_universal(self):
        # two spin-25/2 blocks; dense path is out of reach at N = 676
        block = code_spin25()
        code = tensor_code(block, block)
        sites = [GradedErrorSet(generators=spin_error_set(12.5, 2).generators,
                                grade=2, layout=code.layout, site=s)
                 for s in (1, 2)]
        report = certify_transversal(code, sites, site_codes=[block, block])
        assert report.verdict == "universal"
        assert report.logical_component_dim is None
        for site in report.per_site:
            assert site.universal and site.kl_correctable and not site.closed

    def test_per_site_path_undecided_without_site_codes(self):
        block = code_spin25()
        code = tensor_code(block, block)
        sites = [GradedErrorSet(generators=spin_error_set(12.5, 2).generators,
                                grade=2, layout=code.layout, site=s)
                 for s in (1, 2)]
        report = certify_transversal(code, sites)
        assert report.verdict == "undecided-large-N"

    def test_continuous_but_not_universal(self):
        # biased generators on one spin: continuity holds but the closure of
        # {1, Jx} alone is too small for universality on the codespace
        code = code_multi_spin_cat(2, 1)
        jx, _, jz = spin_ops(1)
        jx2 = Operator(jx.entries @ jx.entries, hermitian=True)
        sites = [GradedErrorSet(generators=(identity(3), jz, jx, jx2), grade=1,
                                layout=code.layout, site=s) for s in (1, 2)]
        report = certify_transversal(code, sites)
        assert not all(s.closed for s in report.per_site)
        assert report.verdict in ("universal", "continuous-but-not-universal")

    def test_detection_premise_for_closed_sites(self):
        # closed per-site errors + per-site detection implies a trivial
        # induced logical component
        code = code_422()
        sites = [single_site_pauli_set(code.layout, s) for s in range(1, 5)]
        for s in range(1, 5):
            span = span_of([embed_local(op, code.layout, s)
                            for op in graded_span(sites[s - 1]).basis])
            ok, _ = detection_check(code, span)
            assert ok
        report = certify_transversal(code, sites)
        assert report.logical_component_dim <= 1

    def test_intersection_invariant_under_local_conjugation(self):
        rng = np.random.default_rng(23)
        code = code_multi_spin_cat(2, 1)
        _, _, jz = spin_ops(1)
        sites = [GradedErrorSet(generators=(identity(3), jz), grade=1,
                                layout=code.layout, site=s) for s in (1, 2)]
        base = certify_transversal(code, sites)
        locals_u = []
        for _ in range(2):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
            locals_u.append(q)
        u_full = np.kron(locals_u[0], locals_u[1])
        rotated_code = Code(layout=code.layout, K=2,
                            isometry=u_full @ code.isometry, name="rotated")
        rotated_sites = [
            GradedErrorSet(
                generators=tuple(Operator(locals_u[s - 1] @ g.entries
                                          @ locals_u[s - 1].conj().T,
                                          hermitian=True)
                                 for g in sites[s - 1].generators),
                grade=1, layout=code.layout, site=s)
            for s in (1, 2)]
        rotated = certify_transversal(rotated_code, rotated_sites)
        assert rotated.logical_component_dim == base.logical_component_dim
        assert rotated.verdict == base.verdict

    def test_site_count_checked(self):
        code = code_422()
        with pytest.raises(ValueError, match="per site"):
            certify_transversal(code, [single_site_pauli_set(code.layout, 1)])
