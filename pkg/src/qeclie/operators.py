"""Dense complex operators, angular-momentum matrices, and Hilbert-Schmidt spans.

Conventions used everywhere in this package:

* Basis index ``k = m + J`` for a spin-J level, so ``k`` runs over
  ``{0, ..., 2J}`` with ascending magnetic quantum number ``m``.
* Subsystem sites are 1-based; site 1 is the slowest-varying Kronecker
  factor.
* Operator spans are real-linear spans of Hermitian matrices, orthonormal
  under the Hilbert-Schmidt inner product ``<A, B> = tr(A^dag B)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_ATOL = 1e-12
UNITARITY_ATOL = 1e-10
DEFAULT_SPAN_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable dense complex square matrix with an optional Hermiticity claim.

    The ``hermitian`` flag is verified at construction: claiming Hermiticity
    for a matrix with ``max|A - A^dag| > 1e-12 * max(1, max|A|)`` raises.
    """

    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
        object.__setattr__(self, "entries", _readonly(a))
        if self.hermitian:
            dev = np.abs(a - a.conj().T).max(initial=0.0)
            scale = max(1.0, np.abs(a).max(initial=0.0))
            if dev > HERMITICITY_ATOL * scale:
                raise ValueError(f"matrix claimed Hermitian but |A - A^dag| = {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.entries.conj().T, hermitian=self.hermitian)

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return Operator(self.entries @ other.entries)

    def __add__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return Operator(self.entries + other.entries,
                        hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return Operator(self.entries - other.entries,
                        hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar: complex) -> "Operator":
        s = complex(scalar)
        return Operator(self.entries * s,
                        hermitian=self.hermitian and s.imag == 0.0)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.entries, hermitian=self.hermitian)

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim}, hermitian={self.hermitian})"


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex), hermitian=True)


@dataclass(frozen=True)
class SubsystemLayout:
    """Tensor factorization of the physical space into subsystems."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"layout needs at least one positive dimension, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def N(self) -> int:
        return int(np.prod(self.dims))


def is_hermitian(matrix: np.ndarray, atol: float = HERMITICITY_ATOL) -> bool:
    dev = np.abs(matrix - matrix.conj().T).max(initial=0.0)
    return bool(dev <= atol * max(1.0, np.abs(matrix).max(initial=0.0)))


def _require_half_integer(J: float) -> float:
    twoJ = 2 * J
    if abs(twoJ - round(twoJ)) > 1e-12 or round(twoJ) < 1:
        raise ValueError(f"J must be a half-integer >= 1/2, got {J}")
    return round(twoJ) / 2


def spin_ops(J: float) -> tuple[Operator, Operator, Operator]:
    """Angular-momentum matrices (Jx, Jy, Jz) for a spin-J system.

    Matrices are written in the Jz eigenbasis with index ``k = m + J``
    (ascending m), e.g. for J=1/2 this gives ``Jz = diag(-1/2, +1/2)``.
    """
    J = _require_half_integer(J)
    d = int(round(2 * J + 1))
    m = np.arange(d) - J
    jz = np.diag(m.astype(complex))
    # J+ |m> = sqrt(J(J+1) - m(m+1)) |m+1>
    raise_amp = np.sqrt(J * (J + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.zeros((d, d), dtype=complex)
    jplus[np.arange(1, d), np.arange(d - 1)] = raise_amp
    jx = (jplus + jplus.conj().T) / 2
    jy = (jplus - jplus.conj().T) / 2j
    return (Operator(jx, hermitian=True),
            Operator(jy, hermitian=True),
            Operator(jz, hermitian=True))


def embed_local(op: Operator, layout: SubsystemLayout, site: int) -> Operator:
    """Embed a single-site operator as 1 x ... x op x ... x 1 at `site` (1-based)."""
    if not 1 <= site <= layout.n_sites:
        raise ValueError(f"site {site} out of range 1..{layout.n_sites}")
    if op.dim != layout.dims[site - 1]:
        raise ValueError(
            f"operator dim {op.dim} does not match site {site} dim {layout.dims[site - 1]}")
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(layout.dims, start=1):
        out = np.kron(out, op.entries if i == site else np.eye(d, dtype=complex))
    return Operator(out, hermitian=op.hermitian)


def hs_inner(a: Operator, b: Operator) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.entries, b.entries))


def expm_hermitian(h: Operator, t: float) -> Operator:
    """Unitary exp(-i t H) of a Hermitian generator, via eigendecomposition."""
    if not (h.hermitian or is_hermitian(h.entries)):
        raise ValueError("expm_hermitian requires a Hermitian generator")
    w, v = np.linalg.eigh(h.entries)
    u = (v * np.exp(-1j * t * w)) @ v.conj().T
    dev = np.abs(u.conj().T @ u - np.eye(h.dim)).max()
    if dev > UNITARITY_ATOL:
        raise ArithmeticError(f"exponential lost unitarity: residual {dev:.3e}")
    return Operator(u)


# ---------------------------------------------------------------------------
# Hermitian real coordinates: an isometry Herm(N) -> R^(N^2) used whenever a
# computation needs real-linear algebra (null spaces, intersections).

def hermitian_real_coords(mats: np.ndarray) -> np.ndarray:
    """Map a stack (k, N, N) of Hermitian matrices to real vectors (k, N^2)."""
    mats = np.asarray(mats, dtype=complex)
    single = mats.ndim == 2
    if single:
        mats = mats[None]
    n = mats.shape[1]
    iu, ju = np.triu_indices(n, 1)
    out = np.concatenate([
        np.diagonal(mats, axis1=1, axis2=2).real,
        np.sqrt(2.0) * mats[:, iu, ju].real,
        np.sqrt(2.0) * mats[:, iu, ju].imag,
    ], axis=1)
    return out[0] if single else out


def hermitian_from_real_coords(x: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`hermitian_real_coords` for a single vector."""
    x = np.asarray(x, dtype=float)
    h = np.zeros((dim, dim), dtype=complex)
    h[np.diag_indices(dim)] = x[:dim]
    iu, ju = np.triu_indices(dim, 1)
    k = dim * (dim - 1) // 2
    h[iu, ju] = (x[dim:dim + k] + 1j * x[dim + k:]) / np.sqrt(2.0)
    return h + np.triu(h, 1).conj().T


class _SpanBuilder:
    """Mutable accumulator behind OperatorSpan construction and Lie closures.

    Keeps the basis as flattened complex row vectors; Gram-Schmidt uses real
    projection coefficients so real-linear combinations of Hermitian inputs
    stay Hermitian.
    """

    def __init__(self, dim: int, tol: float = DEFAULT_SPAN_TOL):
        self.dim = dim
        self.tol = tol
        self.size = 0
        self._vecs = np.zeros((16, dim * dim), dtype=complex)

    def _grow(self, need: int) -> None:
        if need > self._vecs.shape[0]:
            cap = max(need, 2 * self._vecs.shape[0])
            new = np.zeros((cap, self.dim * self.dim), dtype=complex)
            new[: self.size] = self._vecs[: self.size]
            self._vecs = new

    def _project_out(self, v: np.ndarray) -> np.ndarray:
        # two passes of classical Gram-Schmidt for numerical stability
        for _ in range(2):
            if self.size:
                coeff = (self._vecs[: self.size].conj() @ v).real
                v = v - coeff @ self._vecs[: self.size]
        return v

    def _hermitize(self, v: np.ndarray) -> np.ndarray:
        # anti-Hermitian rounding noise survives real-coefficient projection
        # and would be amplified by normalizing a small residual
        m = v.reshape(self.dim, self.dim)
        return ((m + m.conj().T) / 2).reshape(-1)

    def extend(self, matrix: np.ndarray) -> tuple[float, bool]:
        v = np.asarray(matrix, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        r = self._project_out(v.copy())
        rnorm = float(np.linalg.norm(r))
        if rnorm > self.tol * max(1.0, norm):
            r = self._hermitize(r)
            rnorm = float(np.linalg.norm(r))
            self._grow(self.size + 1)
            self._vecs[self.size] = r / rnorm
            self.size += 1
            return rnorm, True
        return rnorm, False

    def extend_many(self, mats: np.ndarray) -> int:
        """Extend with a batch of matrices, in order. Returns count added.

        The whole batch is first projected against the current basis snapshot
        in one matrix product; each candidate is then finished sequentially
        against only the vectors added within the batch, so results match the
        one-at-a-time path while the bulk work runs as a BLAS-3 product.
        """
        if len(mats) == 0:
            return 0
        vs = np.asarray(mats, dtype=complex).reshape(len(mats), -1)
        norms = np.linalg.norm(vs, axis=1)
        snapshot = self.size
        if snapshot:
            for _ in range(2):
                coeff = (vs @ self._vecs[:snapshot].conj().T).real
                vs = vs - coeff @ self._vecs[:snapshot]
        added = 0
        for v, norm in zip(vs, norms):
            for _ in range(2):
                if self.size > snapshot:
                    fresh = self._vecs[snapshot: self.size]
                    v = v - (fresh.conj() @ v).real @ fresh
            rnorm = float(np.linalg.norm(v))
            if rnorm > self.tol * max(1.0, norm):
                # survivors get a full-basis cleanup before normalization:
                # normalizing a small residual would otherwise amplify the
                # leftover snapshot components
                r = self._hermitize(self._project_out(v))
                rnorm = float(np.linalg.norm(r))
                if rnorm > self.tol * max(1.0, norm):
                    self._grow(self.size + 1)
                    self._vecs[self.size] = r / rnorm
                    self.size += 1
                    added += 1
        return added

    def matrix(self, i: int) -> np.ndarray:
        return self._vecs[i].reshape(self.dim, self.dim)

    def stack(self) -> np.ndarray:
        return self._vecs[: self.size].reshape(self.size, self.dim, self.dim).copy()

    def residual_of(self, matrix: np.ndarray) -> float:
        v = np.asarray(matrix, dtype=complex).reshape(-1)
        return float(np.linalg.norm(self._project_out(v.copy())))

    def freeze(self, tol: float | None = None) -> "OperatorSpan":
        return OperatorSpan._from_stack(self.dim, self.stack(),
                                        self.tol if tol is None else tol)


class OperatorSpan:
    """Orthonormal real-linear basis of Hermitian operators on a fixed space.

    Basis elements have unit Hilbert-Schmidt norm and are pairwise orthogonal
    within 1e-10. ``tol`` is the rank-decision tolerance used when the span
    is extended.
    """

    __slots__ = ("dim", "tol", "_mats")

    def __init__(self, dim: int, operators: Iterable[Operator] = (),
                 tol: float = DEFAULT_SPAN_TOL):
        mats = [np.asarray(op.entries, dtype=complex) for op in operators]
        for m in mats:
            if m.shape != (dim, dim):
                raise ValueError(f"basis element shape {m.shape} does not match dim {dim}")
            if not is_hermitian(m):
                raise ValueError("span basis elements must be Hermitian")
        stack = (np.array(mats) if mats
                 else np.zeros((0, dim, dim), dtype=complex))
        self._init_from_stack(dim, stack, tol, validate=True)

    def _init_from_stack(self, dim: int, stack: np.ndarray, tol: float,
                         validate: bool) -> None:
        if validate and len(stack):
            vecs = stack.reshape(len(stack), -1)
            gram = vecs.conj() @ vecs.T
            dev = np.abs(gram - np.eye(len(stack))).max()
            if dev > 1e-10:
                raise ValueError(
                    f"basis is not orthonormal (max deviation {dev:.3e}); "
                    "use span_of() to orthonormalize")
        self.dim = dim
        self.tol = float(tol)
        self._mats = _readonly(np.asarray(stack, dtype=complex))

    @classmethod
    def _from_stack(cls, dim: int, stack: np.ndarray,
                    tol: float = DEFAULT_SPAN_TOL) -> "OperatorSpan":
        span = cls.__new__(cls)
        span._init_from_stack(dim, stack, tol, validate=False)
        return span

    @property
    def size(self) -> int:
        return self._mats.shape[0]

    @property
    def matrices(self) -> np.ndarray:
        """Read-only (size, dim, dim) stack of the basis matrices."""
        return self._mats

    @property
    def basis(self) -> tuple[Operator, ...]:
        return tuple(Operator(m, hermitian=True) for m in self._mats)

    def residual_of(self, op: Operator | np.ndarray) -> float:
        """Norm of the component of `op` orthogonal to the span."""
        m = op.entries if isinstance(op, Operator) else np.asarray(op, dtype=complex)
        v = m.reshape(-1).copy()
        for _ in range(2):
            if self.size:
                vecs = self._mats.reshape(self.size, -1)
                v = v - (vecs.conj() @ v).real @ vecs
        return float(np.linalg.norm(v))

    def contains(self, op: Operator | np.ndarray) -> bool:
        m = op.entries if isinstance(op, Operator) else np.asarray(op, dtype=complex)
        return self.residual_of(m) <= self.tol * max(1.0, np.linalg.norm(m))

    def real_coords(self) -> np.ndarray:
        """Basis as real row vectors, shape (size, dim^2)."""
        return hermitian_real_coords(self._mats) if self.size else \
            np.zeros((0, self.dim * self.dim))

    def __repr__(self) -> str:
        return f"OperatorSpan(dim={self.dim}, size={self.size})"


def span_of(operators: Sequence[Operator], dim: int | None = None,
            tol: float = DEFAULT_SPAN_TOL) -> OperatorSpan:
    """Orthonormal span of a sequence of Hermitian operators (insertion order)."""
    if dim is None:
        if not operators:
            raise ValueError("cannot infer dimension from an empty operator list")
        dim = operators[0].dim
    builder = _SpanBuilder(dim, tol)
    for op in operators:
        if op.dim != dim:
            raise ValueError(f"dimension mismatch: {op.dim} vs {dim}")
        if not (op.hermitian or is_hermitian(op.entries)):
            raise ValueError("span_of requires Hermitian operators")
        builder.extend(op.entries)
    return builder.freeze(tol)


def extend_span(span: OperatorSpan, op: Operator) -> tuple[OperatorSpan, float]:
    """Extend a span with one Hermitian operator.

    Projects `op` onto the orthogonal complement of the span; when the
    residual exceeds ``tol * max(1, |op|_HS)`` the normalized residual is
    appended. Returns the (possibly unchanged) span and the residual norm.
    """
    if op.dim != span.dim:
        raise ValueError(f"dimension mismatch: {op.dim} vs {span.dim}")
    if not (op.hermitian or is_hermitian(op.entries)):
        raise ValueError("extend_span requires a Hermitian operator")
    builder = _SpanBuilder(span.dim, span.tol)
    if span.size:
        builder._grow(span.size)
        builder._vecs[: span.size] = span.matrices.reshape(span.size, -1)
        builder.size = span.size
    residual, added = builder.extend(op.entries)
    if not added:
        return span, residual
    return builder.freeze(span.tol), residual


def span_intersection(a: OperatorSpan, b: OperatorSpan,
                      tol: float = 1e-8) -> OperatorSpan:
    """Intersection of two real-linear Hermitian spans on the same space.

    Solved as the null space of the stacked coefficient problem
    ``sum_i x_i A_i - sum_j y_j B_j = 0`` in real coordinates.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.size == 0 or b.size == 0:
        return OperatorSpan._from_stack(a.dim, np.zeros((0, a.dim, a.dim), complex),
                                        a.tol)
    stacked = np.hstack([a.real_coords().T, -b.real_coords().T])
    _, s, vt = np.linalg.svd(stacked, full_matrices=True)
    cutoff = tol * max(1.0, s[0] if len(s) else 1.0)
    null_rows = vt[len(s):].tolist() if vt.shape[0] > len(s) else []
    null_rows += [vt[i] for i in range(len(s)) if s[i] <= cutoff]
    members = []
    for row in null_rows:
        coords = np.asarray(row)[: a.size] @ a.real_coords()
        members.append(Operator(hermitian_from_real_coords(coords, a.dim),
                                hermitian=True))
    return span_of(members, dim=a.dim, tol=a.tol) if members else \
        OperatorSpan._from_stack(a.dim, np.zeros((0, a.dim, a.dim), complex), a.tol)
