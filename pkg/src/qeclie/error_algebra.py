"""Graded error sets, Lie closures, and the continuity/universality checks.

An error set is generated by a list of Hermitian operators containing the
identity. Grade-t errors are real-linear combinations of products of at most
t generators; products are split into Hermitian and anti-Hermitian parts so
every span stays inside the real algebra of Hermitian matrices.

The Lie closure is computed with the bracket stored as ``i[A, B]``, which is
again Hermitian, visiting every unordered basis pair exactly once in
insertion order (deterministic). Once the closure reaches the full ambient
dimension ``N^2`` it cannot grow further and the loop stops early.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import CapabilityError
from .operators import (
    DEFAULT_SPAN_TOL,
    Operator,
    OperatorSpan,
    SubsystemLayout,
    _SpanBuilder,
    identity,
    is_hermitian,
    spin_ops,
)

# Dense closure cap: basis can reach N^2 elements, each an N x N matrix.
CLOSURE_AMBIENT_CAP = 40


@dataclass(frozen=True)
class GradedErrorSet:
    """Generator list with a grade, describing errors of weight up to ``grade``.

    ``site=None`` means the generators act on the full space of ``layout``;
    ``site=i`` (1-based) means they act on subsystem i and the set describes
    local errors there.
    """

    generators: tuple[Operator, ...]
    grade: int
    layout: SubsystemLayout
    site: int | None = None

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("error set needs at least one generator")
        if self.grade < 0:
            raise ValueError(f"grade must be >= 0, got {self.grade}")
        expected = (self.layout.N if self.site is None
                    else self.layout.dims[self.site - 1] if 1 <= self.site <= self.layout.n_sites
                    else None)
        if expected is None:
            raise ValueError(f"site {self.site} out of range 1..{self.layout.n_sites}")
        for g in gens:
            if g.dim != expected:
                raise ValueError(f"generator dim {g.dim}, expected {expected}")
            if not (g.hermitian or is_hermitian(g.entries)):
                raise ValueError("error generators must be Hermitian")
        # identity must lie in the span of the generators
        builder = _SpanBuilder(expected)
        for g in gens:
            builder.extend(g.entries)
        if builder.residual_of(np.eye(expected)) > 1e-8 * np.sqrt(expected):
            raise ValueError("identity must be contained in the generator span")
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        """Ambient dimension the generators act on."""
        return self.generators[0].dim

    def with_grade(self, grade: int) -> "GradedErrorSet":
        return replace(self, grade=grade)


def spin_error_set(J: float, grade: int) -> GradedErrorSet:
    """Spin-rotation error set {1, Jx, Jy, Jz} on a single spin-J system."""
    jx, jy, jz = spin_ops(J)
    d = jx.dim
    return GradedErrorSet(
        generators=(identity(d), jx, jy, jz),
        grade=grade,
        layout=SubsystemLayout((d,)),
    )


def pauli_error_set(n_qubits: int) -> GradedErrorSet:
    """Weight-1 Pauli error set {1} U {X_i, Y_i, Z_i} on n qubits, grade 1."""
    from .operators import embed_local  # local import to keep module load light

    layout = SubsystemLayout((2,) * n_qubits)
    paulis = [
        Operator(np.array([[0, 1], [1, 0]], dtype=complex), hermitian=True),
        Operator(np.array([[0, -1j], [1j, 0]], dtype=complex), hermitian=True),
        Operator(np.array([[1, 0], [0, -1]], dtype=complex), hermitian=True),
    ]
    gens = [identity(layout.N)]
    for site in range(1, n_qubits + 1):
        gens.extend(embed_local(p, layout, site) for p in paulis)
    return GradedErrorSet(generators=tuple(gens), grade=1, layout=layout)


def single_site_pauli_set(layout: SubsystemLayout, site: int) -> GradedErrorSet:
    """Full single-qubit error set {1, X, Y, Z} local to one qubit site."""
    if layout.dims[site - 1] != 2:
        raise ValueError(f"site {site} is not a qubit (dim {layout.dims[site - 1]})")
    gens = (
        identity(2),
        Operator(np.array([[0, 1], [1, 0]], dtype=complex), hermitian=True),
        Operator(np.array([[0, -1j], [1j, 0]], dtype=complex), hermitian=True),
        Operator(np.array([[1, 0], [0, -1]], dtype=complex), hermitian=True),
    )
    return GradedErrorSet(generators=gens, grade=1, layout=layout, site=site)


def graded_span(errors: GradedErrorSet) -> OperatorSpan:
    """Orthonormal span of all products of at most ``grade`` generators.

    Each product M contributes its Hermitian part (M + M^dag)/2 and
    anti-Hermitian part (M - M^dag)/2i. Grade 0 is exactly span{1}.
    Products are visited in ascending length, lexicographic in generator
    index, so the resulting basis is deterministic.
    """
    d = errors.dim
    gens = [g.entries for g in errors.generators]
    builder = _SpanBuilder(d, DEFAULT_SPAN_TOL)
    builder.extend(np.eye(d, dtype=complex))
    for length in range(1, errors.grade + 1):
        if builder.size == d * d:
            break
        for combo in itertools.product(range(len(gens)), repeat=length):
            m = gens[combo[0]]
            for idx in combo[1:]:
                m = m @ gens[idx]
            builder.extend((m + m.conj().T) / 2)
            builder.extend((m - m.conj().T) / 2j)
    return builder.freeze()


@dataclass(frozen=True)
class ClosureReport:
    """Result of a Lie-closure computation."""

    input_dim: int
    closure_dim: int
    ambient: int
    closed: bool
    universal: bool
    closure_basis: OperatorSpan

    def __post_init__(self) -> None:
        if not (self.input_dim <= self.closure_dim <= self.ambient ** 2):
            raise ValueError("inconsistent closure dimensions")

    def summary(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "closure_dim": self.closure_dim,
            "ambient": self.ambient,
            "closed": self.closed,
            "universal": self.universal,
        }


def lie_closure(span: OperatorSpan) -> ClosureReport:
    """Close a Hermitian span under the bracket ``i[A, B]``.

    Every unordered pair of basis elements is visited exactly once: for each
    element with index i (in insertion order), the brackets with all earlier
    elements are computed in one batch and merged sequentially. New elements
    join the end of the queue. Stops early once the span saturates u(N).
    """
    if span.size == 0:
        raise ValueError("cannot close an empty span")
    n = span.dim
    if n > CLOSURE_AMBIENT_CAP:
        raise CapabilityError(
            f"ambient dimension {n} exceeds the dense closure cap "
            f"{CLOSURE_AMBIENT_CAP}")
    full = n * n
    builder = _SpanBuilder(n, span.tol)
    builder.extend_many(span.matrices)
    input_dim = builder.size
    i = 1
    while i < builder.size and builder.size < full:
        b_i = builder.matrix(i)
        earlier = builder._vecs[:i].reshape(i, n, n)
        brackets = 1j * (earlier @ b_i - b_i @ earlier)
        builder.extend_many(brackets)
        i += 1
    closure_dim = builder.size
    basis = builder.freeze(span.tol)
    has_identity = bool(
        basis.residual_of(np.eye(n, dtype=complex)) <= span.tol * np.sqrt(n))
    return ClosureReport(
        input_dim=input_dim,
        closure_dim=closure_dim,
        ambient=n,
        closed=closure_dim == input_dim,
        universal=bool(closure_dim >= full - 1 and has_identity),
        closure_basis=basis,
    )


def continuity_check(span: OperatorSpan) -> bool:
    """True iff the Lie closure strictly exceeds the span (errors not closed)."""
    report = lie_closure(span)
    return report.closure_dim > report.input_dim


def universality_check(report: ClosureReport) -> bool:
    """True iff the closure is all of u(N): dimension >= N^2 - 1 with identity.

    The global phase is physically irrelevant, so su(N) plus the identity is
    accepted as u(N).
    """
    has_identity = bool(report.closure_basis.residual_of(
        np.eye(report.ambient, dtype=complex))
        <= report.closure_basis.tol * np.sqrt(report.ambient))
    return bool(report.closure_dim >= report.ambient ** 2 - 1 and has_identity)
