"""Quantum codes as explicit isometries, built-in spin-code families, and the
Knill-Laflamme correctability and distance checks.

Codes are stored as N x K isometries whose columns are the codewords in the
``k = m + J`` level basis (site 1 slowest-varying for multi-site codes).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import CodeFileError
from .error_algebra import GradedErrorSet, graded_span
from .operators import Operator, OperatorSpan, SubsystemLayout

ISOMETRY_ATOL = 1e-10
KL_DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Code:
    """Isometric encoding of a K-dimensional logical space into N physical levels."""

    layout: SubsystemLayout
    K: int
    isometry: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        v = np.array(self.isometry, dtype=complex)
        if v.shape != (self.layout.N, self.K):
            raise ValueError(
                f"isometry shape {v.shape} does not match (N={self.layout.N}, K={self.K})")
        dev = np.abs(v.conj().T @ v - np.eye(self.K)).max()
        if dev > ISOMETRY_ATOL:
            raise ValueError(f"columns are not orthonormal: |V^dag V - 1| = {dev:.3e}")
        v.setflags(write=False)
        object.__setattr__(self, "isometry", v)

    @property
    def N(self) -> int:
        return self.layout.N

    def codeword(self, i: int) -> np.ndarray:
        return self.isometry[:, i]

    def __repr__(self) -> str:
        return f"Code(name={self.name!r}, N={self.N}, K={self.K})"


def codespace_projector(code: Code) -> Operator:
    """Projector P = V V^dag onto the codespace."""
    return Operator(code.isometry @ code.isometry.conj().T, hermitian=True)


def tensor_code(a: Code, b: Code, name: str = "") -> Code:
    """Tensor product of two codes (layout concatenated, K multiplies)."""
    layout = SubsystemLayout(a.layout.dims + b.layout.dims)
    return Code(layout=layout, K=a.K * b.K,
                isometry=np.kron(a.isometry, b.isometry),
                name=name or f"{a.name}*{b.name}")


# ---------------------------------------------------------------------------
# Built-in code families


def code_spin25() -> Code:
    """Distance-5 spin code on a single spin-25/2 system (N = 26).

    |0>_L has amplitudes sqrt(1/16), sqrt(10/16), sqrt(5/16) at
    m = -25/2, -5/2, +15/2; |1>_L is the m -> -m mirror image.
    """
    J = 12.5
    v = np.zeros((26, 2), dtype=complex)
    amps = [math.sqrt(1 / 16), math.sqrt(10 / 16), math.sqrt(5 / 16)]
    for a, m in zip(amps, (-12.5, -2.5, 7.5)):
        v[int(m + J), 0] = a
    for a, m in zip(amps, (12.5, 2.5, -7.5)):
        v[int(m + J), 1] = a
    return Code(layout=SubsystemLayout((26,)), K=2, isometry=v, name="spin25")


def code_spin_cat(J: float) -> Code:
    """Spin-cat code: codewords |m = +J> and |m = -J> of a spin-J system."""
    twoJ = round(2 * J)
    if abs(2 * J - twoJ) > 1e-12 or twoJ < 1:
        raise ValueError(f"J must be a half-integer >= 1/2, got {J}")
    d = twoJ + 1
    v = np.zeros((d, 2), dtype=complex)
    v[d - 1, 0] = 1.0  # |0>_L = |m=+J>
    v[0, 1] = 1.0      # |1>_L = |m=-J>
    return Code(layout=SubsystemLayout((d,)), K=2, isometry=v, name=f"spin_cat:{J}")


def _single_excitation_code(n: int, J: float, excitation: int, name: str) -> Code:
    if n < 2:
        raise ValueError(f"need at least 2 subsystems, got n={n}")
    if J != int(J) or J < 1:
        # the |m=0> filler level only exists for integer spin
        raise ValueError(f"J must be a positive integer for this family, got {J}")
    J = int(J)
    if excitation > J:
        raise ValueError(f"excitation level {excitation} exceeds J={J}")
    d = 2 * J + 1
    layout = SubsystemLayout((d,) * n)
    v = np.zeros((layout.N, 2), dtype=complex)
    k0 = J  # m = 0
    for col, exc in enumerate((excitation, -excitation)):
        for active in range(n):
            idx = 0
            for site in range(n):
                k = exc + J if site == active else k0
                idx = idx * d + k
            v[idx, col] += 1 / math.sqrt(n)
    return Code(layout=layout, K=2, isometry=v, name=name)


def code_multi_spin_cat(n: int, J: float) -> Code:
    """Shared single-excitation code with |+-J> excitations over n spin-J sites.

    |0/1>_L = (1/sqrt n) (|+-J,0,...,0> + ... + |0,...,0,+-J>).
    """
    return _single_excitation_code(n, J, int(J), name=f"multi_spin_cat:{n},{J}")


def code_w_state(n: int, J: float) -> Code:
    """W-state code: like the multi spin-cat code but with |+-1> excitations."""
    return _single_excitation_code(n, J, 1, name=f"w_state:{n},{J}")


def code_422() -> Code:
    """The [[4,2,2]] error-detecting code (K=4 on four qubits).

    Detects every weight-1 Pauli error but cannot correct that set; serves as
    the no-continuous-transversal-gates control case.
    """
    v = np.zeros((16, 4), dtype=complex)
    pairs = [(0b0000, 0b1111), (0b0011, 0b1100), (0b0101, 0b1010), (0b0110, 0b1001)]
    for col, (x, y) in enumerate(pairs):
        v[x, col] = v[y, col] = 1 / math.sqrt(2)
    return Code(layout=SubsystemLayout((2, 2, 2, 2)), K=4, isometry=v, name="code422")


# ---------------------------------------------------------------------------
# Code files

_SCHEMA_KEYS = {"name", "subsystems", "logical_dim", "codewords"}


def save_code(code: Code, path: str | os.PathLike) -> None:
    """Write a code to the JSON code-file format (atomically)."""
    codewords = []
    dims = code.layout.dims
    for col in range(code.K):
        entries = []
        for idx in np.nonzero(np.abs(code.isometry[:, col]) > 0)[0]:
            ks = []
            rem = int(idx)
            for d in reversed(dims):
                ks.append(rem % d)
                rem //= d
            amp = code.isometry[idx, col]
            entries.append({"k": list(reversed(ks)),
                            "re": float(amp.real), "im": float(amp.imag)})
        codewords.append(entries)
    doc = {
        "name": code.name,
        "subsystems": list(dims),
        "logical_dim": code.K,
        "codewords": codewords,
    }
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_code(path: str | os.PathLike) -> Code:
    """Load a code from a JSON code file.

    The file must contain normalized, orthonormal codewords; nothing is
    normalized on load and violations raise :class:`CodeFileError` naming the
    offending codeword.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CodeFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not _SCHEMA_KEYS.issubset(doc):
        missing = _SCHEMA_KEYS - set(doc) if isinstance(doc, dict) else _SCHEMA_KEYS
        raise CodeFileError(f"missing required keys: {sorted(missing)}")
    dims = doc["subsystems"]
    if (not isinstance(dims, list) or not dims
            or any(not isinstance(d, int) or d < 1 for d in dims)):
        raise CodeFileError(f"'subsystems' must be a list of positive integers, got {dims!r}")
    layout = SubsystemLayout(tuple(dims))
    K = doc["logical_dim"]
    if not isinstance(K, int) or K < 1:
        raise CodeFileError(f"'logical_dim' must be a positive integer, got {K!r}")
    codewords = doc["codewords"]
    if not isinstance(codewords, list) or len(codewords) != K:
        raise CodeFileError(f"expected {K} codewords, got "
                            f"{len(codewords) if isinstance(codewords, list) else type(codewords)}")
    v = np.zeros((layout.N, K), dtype=complex)
    for col, entries in enumerate(codewords):
        if not isinstance(entries, list) or not entries:
            raise CodeFileError(f"codeword {col}: must be a non-empty list of amplitudes")
        for ent in entries:
            if (not isinstance(ent, dict) or {"k", "re", "im"} - set(ent)
                    or not isinstance(ent["k"], list) or len(ent["k"]) != len(dims)):
                raise CodeFileError(f"codeword {col}: malformed amplitude entry {ent!r}")
            idx = 0
            for ki, d in zip(ent["k"], dims):
                if not isinstance(ki, int) or not 0 <= ki < d:
                    raise CodeFileError(
                        f"codeword {col}: level index {ki!r} out of range 0..{d - 1}")
                idx = idx * d + ki
            try:
                amp = complex(float(ent["re"]), float(ent["im"]))
            except (TypeError, ValueError):
                raise CodeFileError(
                    f"codeword {col}: non-numeric amplitude {ent!r}") from None
            v[idx, col] += amp
        norm = np.linalg.norm(v[:, col])
        if abs(norm - 1.0) > 1e-9:
            raise CodeFileError(f"codeword {col}: not normalized (|psi| = {norm:.12g})")
    try:
        return Code(layout=layout, K=K, isometry=v, name=str(doc["name"]))
    except ValueError as exc:
        raise CodeFileError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Knill-Laflamme checks and distance


@dataclass(frozen=True)
class KLReport:
    """Knill-Laflamme condition check result.

    ``c[a, b] = tr(P E_a^dag E_b P) / K`` over the given error basis, and
    ``max_residual`` is the largest HS deviation of P E_a^dag E_b P from
    c_ab P. The span is exactly correctable iff the residual vanishes.
    """

    c: np.ndarray
    max_residual: float
    correctable: bool
    tol: float

    def __post_init__(self) -> None:
        c = np.array(self.c, dtype=complex)
        if np.abs(c - c.conj().T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(c).max(initial=0.0)):
            raise ValueError("c matrix must be Hermitian")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def basis_size(self) -> int:
        return self.c.shape[0]

    def summary(self) -> dict:
        return {
            "basis_size": self.basis_size,
            "max_residual": self.max_residual,
            "correctable": self.correctable,
            "tol": self.tol,
        }


def _error_matrices(errors: OperatorSpan | Sequence[Operator], n: int) -> np.ndarray:
    if isinstance(errors, OperatorSpan):
        if errors.dim != n:
            raise ValueError(f"error span dim {errors.dim} does not match N={n}")
        return errors.matrices
    mats = np.array([e.entries for e in errors])
    if mats.ndim != 3 or mats.shape[1] != n:
        raise ValueError(f"error operators must be {n} x {n}")
    return mats


def kl_check(code: Code, errors: OperatorSpan | Sequence[Operator],
             tol: float = KL_DEFAULT_TOL) -> KLReport:
    """Check the Knill-Laflamme conditions P E_a^dag E_b P = c_ab P.

    Accepts either an orthonormal :class:`OperatorSpan` or a plain sequence
    of error operators used verbatim as the basis {E_a}. Residuals are
    absolute Hilbert-Schmidt norms; the default tolerance assumes O(1)
    codeword amplitudes.
    """
    mats = _error_matrices(errors, code.N)
    ev = mats @ code.isometry  # (a, N, K)
    # P E_a^dag E_b P has the same HS norm as the K x K matrix V^dag E_a^dag E_b V
    m = np.einsum("aki,bkj->abij", ev.conj(), ev)
    c = np.einsum("abii->ab", m) / code.K
    deviation = m - c[:, :, None, None] * np.eye(code.K)
    residuals = np.sqrt((np.abs(deviation) ** 2).sum(axis=(2, 3)))
    max_residual = float(residuals.max(initial=0.0))
    return KLReport(c=c, max_residual=max_residual,
                    correctable=max_residual <= tol, tol=tol)


def detection_check(code: Code, errors: OperatorSpan | Sequence[Operator],
                    tol: float = KL_DEFAULT_TOL) -> tuple[bool, float]:
    """Check the detection condition P E P = lambda_E P for each error.

    Returns (all detected, max HS deviation). Weaker than kl_check: it
    constrains single errors, not pairs.
    """
    mats = _error_matrices(errors, code.N)
    ev = code.isometry.conj().T @ (mats @ code.isometry)  # (a, K, K)
    lam = np.einsum("aii->a", ev) / code.K
    dev = ev - lam[:, None, None] * np.eye(code.K)
    worst = float(np.sqrt((np.abs(dev) ** 2).sum(axis=(1, 2))).max(initial=0.0))
    return worst <= tol, worst


def distance(code: Code, e1: GradedErrorSet, t_max: int,
             tol: float = KL_DEFAULT_TOL) -> int:
    """Largest certified odd distance D = 2 t* + 1 with t* <= t_max.

    t* is the largest grade t whose graded span passes kl_check; D = 1 when
    already grade 1 fails. The result is a lower-bound-style certificate
    capped by ``t_max``, not an exact distance claim.
    """
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    best = 0
    for t in range(1, t_max + 1):
        span = graded_span(e1.with_grade(t))
        if kl_check(code, span, tol=tol).correctable:
            best = t
        else:
            break
    return 2 * best + 1
