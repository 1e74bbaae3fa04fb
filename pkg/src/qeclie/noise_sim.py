"""Lindblad dephasing noise, Knill-Laflamme recovery, and fidelity sweeps.

The noise model is a Hermitian-jump Lindbladian with one Jx jump per site at
rate Gamma, so the generator is -1/2 sum_i Gamma_i ad_{L_i}^2: a Hermitian,
negative-semidefinite superoperator. Channels are represented as dense
N^2 x N^2 matrices acting on row-major vectorized density operators, i.e.
vec(A rho B) = (A kron B^T) vec(rho).

With Gamma fixed to 1, the product Gamma*T is the single dimensionless knob
swept in the code-family comparisons.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .codes import Code, code_multi_spin_cat, code_spin25, code_spin_cat, code_w_state, kl_check
from .error_algebra import spin_error_set, graded_span
from .exceptions import CapabilityError
from .operators import Operator, OperatorSpan, SubsystemLayout, embed_local, identity, span_of, spin_ops

LINDBLAD_DIM_CAP = 60
TP_TOL = 1e-8
CP_TOL = 1e-8
RECOVERY_GUARD = 0.1
PINV_CUTOFF = 1e-8

SWEEP_FAMILIES = ("w_state", "multi_spin_cat", "spin25", "spin_cat")


@dataclass(frozen=True)
class NoiseModel:
    """Per-site Hermitian jump operators with rates, over an evolution time T."""

    layout: SubsystemLayout
    jumps: tuple[tuple[int, Operator, float], ...]
    T: float

    def __post_init__(self) -> None:
        if self.T < 0:
            raise ValueError(f"evolution time must be >= 0, got {self.T}")
        for site, op, rate in self.jumps:
            if rate < 0:
                raise ValueError(f"jump rate must be >= 0, got {rate}")
            if not 1 <= site <= self.layout.n_sites:
                raise ValueError(f"jump site {site} out of range")
            if op.dim != self.layout.dims[site - 1]:
                raise ValueError(
                    f"jump at site {site} has dim {op.dim}, expected "
                    f"{self.layout.dims[site - 1]}")
        object.__setattr__(self, "jumps", tuple(self.jumps))


def jx_dephasing(layout: SubsystemLayout, gamma: float, T: float) -> NoiseModel:
    """Jx jump on every site at a common rate."""
    jumps = []
    for site, d in enumerate(layout.dims, start=1):
        jx, _, _ = spin_ops((d - 1) / 2)
        jumps.append((site, jx, gamma))
    return NoiseModel(layout=layout, jumps=tuple(jumps), T=T)


@dataclass(frozen=True, eq=False)
class Channel:
    """Quantum channel as a dense superoperator on vectorized density matrices.

    Trace preservation and complete positivity are expensive to verify, so
    they are checked by :func:`validate_channel` rather than at construction.
    """

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim ** 2, self.dim ** 2):
            raise ValueError(f"superoperator shape {m.shape}, expected "
                             f"{(self.dim ** 2, self.dim ** 2)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.matrix @ rho.reshape(-1)).reshape(self.dim, self.dim)

    def compose(self, inner: "Channel") -> "Channel":
        """Channel applying `inner` first, then this channel."""
        if inner.dim != self.dim:
            raise ValueError("dimension mismatch in channel composition")
        return Channel(self.dim, self.matrix @ inner.matrix)


def kraus_channel(kraus: Sequence[np.ndarray]) -> Channel:
    n = kraus[0].shape[0]
    total = np.zeros((n * n, n * n), dtype=complex)
    for a in kraus:
        total += np.kron(a, a.conj())
    return Channel(n, total)


def choi_matrix(channel: Channel) -> np.ndarray:
    """Unnormalized Choi matrix (trace N for a trace-preserving channel)."""
    n = channel.dim
    return (channel.matrix.reshape(n, n, n, n)
            .transpose(2, 0, 3, 1).reshape(n * n, n * n))


def validate_channel(channel: Channel) -> dict:
    """Trace-preservation residual and smallest Choi eigenvalue (per trace N)."""
    n = channel.dim
    rows = channel.matrix.reshape(n, n, n * n)
    trace_map = np.einsum("kkj->j", rows).reshape(n, n)
    tp_residual = float(np.abs(trace_map - np.eye(n)).max())
    choi = choi_matrix(channel) / n
    dev = np.abs(choi - choi.conj().T).max()
    min_eig = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2).min())
    return {
        "tp_residual": tp_residual,
        "min_choi_eigenvalue": min_eig,
        "choi_hermiticity": float(dev),
        "tp_ok": tp_residual <= TP_TOL,
        "cp_ok": min_eig >= -CP_TOL,
    }


def _lindblad_generator(noise: NoiseModel) -> np.ndarray:
    n = noise.layout.N
    if n > LINDBLAD_DIM_CAP:
        raise CapabilityError(f"N={n} exceeds the dense Lindblad cap {LINDBLAD_DIM_CAP}")
    eye = np.eye(n, dtype=complex)
    gen = np.zeros((n * n, n * n), dtype=complex)
    for site, op, rate in noise.jumps:
        L = embed_local(op, noise.layout, site).entries
        L2 = L @ L
        # L rho L - 1/2 {L^2, rho} with Hermitian L; L^T = conj(L)
        gen += rate * (np.kron(L, L.conj())
                       - 0.5 * (np.kron(L2, eye) + np.kron(eye, L2.conj())))
    return gen


def lindblad_channel(noise: NoiseModel) -> Channel:
    """exp(T * generator) via Hermitian eigendecomposition of the generator."""
    gen = _lindblad_generator(noise)
    w, vectors = np.linalg.eigh((gen + gen.conj().T) / 2)
    mat = (vectors * np.exp(noise.T * w)) @ vectors.conj().T
    return Channel(noise.layout.N, mat)


# ---------------------------------------------------------------------------
# Recovery


def _recovery_kraus(code: Code, errors: OperatorSpan | Sequence[Operator],
                    cutoff: float = PINV_CUTOFF,
                    guard: float = RECOVERY_GUARD) -> list[np.ndarray]:
    report = kl_check(code, errors)
    if report.max_residual > guard:
        warnings.warn(
            f"error span is far from correctable (KL residual "
            f"{report.max_residual:.3g} > {guard}); recovery uses a "
            f"pseudo-inverse and is only approximate", RuntimeWarning,
            stacklevel=3)
    mats = errors.matrices if isinstance(errors, OperatorSpan) else \
        np.array([e.entries for e in errors])
    n, k = code.N, code.K
    v = code.isometry
    eigvals, mix = np.linalg.eigh(report.c)
    order = np.argsort(-eigvals)
    eigvals, mix = eigvals[order], mix[:, order]
    kraus: list[np.ndarray] = []
    used = np.zeros((n, 0), dtype=complex)
    for idx in range(len(eigvals)):
        if eigvals[idx] <= cutoff:
            continue
        f_err = np.tensordot(mix[:, idx], mats, axes=(0, 0))
        block = f_err @ v / np.sqrt(eigvals[idx])
        if used.shape[1]:
            block = block - used @ (used.conj().T @ block)
        gram = block.conj().T @ block
        gw, gv = np.linalg.eigh(gram)
        keep = gw > 1e-12
        if not keep.any():
            continue
        block = block @ ((gv[:, keep] / np.sqrt(gw[keep])) @ gv[:, keep].conj().T)
        used = np.hstack([used, block])
        kraus.append(v @ block.conj().T)
    # complete to trace preserving: send the unaddressed remainder to |0>_L
    remainder = np.eye(n) - used @ used.conj().T
    rw, rv = np.linalg.eigh(remainder)
    for j in range(n):
        if rw[j] > 0.5:
            kraus.append(np.outer(v[:, 0], rv[:, j].conj()))
    completeness = sum(a.conj().T @ a for a in kraus) - np.eye(n)
    if np.abs(completeness).max() > 1e-8:
        raise ArithmeticError(
            f"recovery Kraus set is not trace preserving "
            f"(deviation {np.abs(completeness).max():.3e})")
    return kraus


def kl_recovery(code: Code, errors: OperatorSpan | Sequence[Operator],
                cutoff: float = PINV_CUTOFF,
                guard: float = RECOVERY_GUARD) -> Channel:
    """Recovery channel from diagonalizing the KL matrix.

    The error span is mixed into orthogonal subspace families, each mapped
    isometrically back to the codespace; the remainder of the space is
    projected to the first codeword to complete the channel. Exact on
    correctable spans; beyond the guard it degrades gracefully through the
    pseudo-inverse cutoff (with a warning).
    """
    return kraus_channel(_recovery_kraus(code, errors, cutoff, guard))


def projector_recovery(code: Code) -> Channel:
    """Baseline recovery: project to the codespace, remainder to |0>_L."""
    return kraus_channel(_projector_kraus(code))


def _projector_kraus(code: Code) -> list[np.ndarray]:
    n = code.N
    v = code.isometry
    p = v @ v.conj().T
    kraus = [p]
    rw, rv = np.linalg.eigh(np.eye(n) - p)
    for j in range(n):
        if rw[j] > 0.5:
            kraus.append(np.outer(v[:, 0], rv[:, j].conj()))
    return kraus


def entanglement_fidelity(code: Code, channel: Channel) -> float:
    """Overlap of the channel's Choi state with the ideal codespace pair state.

    F = (1/K^2) sum_ij <psi_i| M(|psi_i><psi_j|) |psi_j> for encoded basis
    states psi_i; equals 1 exactly when the channel acts as the identity on
    the codespace.
    """
    if channel.dim != code.N:
        raise ValueError(f"channel dim {channel.dim} does not match N={code.N}")
    k = code.K
    v = code.isometry
    total = 0.0
    for i in range(k):
        for j in range(k):
            rho = np.outer(v[:, i], v[:, j].conj())
            total += float(np.real(v[:, i].conj() @ channel.apply(rho) @ v[:, j]))
    return total / k ** 2


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepRow:
    family: str
    n: int
    J: float
    gamma: float
    T: float
    gamma_T: float
    fidelity: float
    infidelity: float

    def __post_init__(self) -> None:
        if not -1e-9 <= self.fidelity <= 1 + 1e-9:
            raise ValueError(f"fidelity {self.fidelity} outside [0, 1]")


CSV_HEADER = "family,n,J,gamma,T,gamma_T,fidelity,infidelity"


@dataclass(frozen=True)
class SimResult:
    rows: tuple[SweepRow, ...]

    def csv_lines(self) -> list[str]:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.family},{r.n},"
                f"{r.J:.17e},{r.gamma:.17e},{r.T:.17e},{r.gamma_T:.17e},"
                f"{r.fidelity:.17e},{r.infidelity:.17e}")
        return lines

    def write_csv(self, fh) -> None:
        fh.write("\n".join(self.csv_lines()) + "\n")


def _family_setup(family: str, n: int, J: float):
    """Code, jump sites, and the family's declared correctable span."""
    if family == "spin25":
        code = code_spin25()
        correctable = graded_span(spin_error_set(12.5, 2))
        return code, correctable
    if family == "spin_cat":
        code = code_spin_cat(J)
        jx, _, _ = spin_ops(J)
        powers = [identity(code.N)]
        acc = np.eye(code.N, dtype=complex)
        for _ in range(int(round(J - 0.5))):
            acc = acc @ jx.entries
            powers.append(Operator(acc.copy(), hermitian=True))
        return code, span_of(powers, dim=code.N)
    if family in ("w_state", "multi_spin_cat"):
        code = code_w_state(n, J) if family == "w_state" else code_multi_spin_cat(n, J)
        jx, _, _ = spin_ops(J)
        members = [identity(code.N)]
        members += [embed_local(jx, code.layout, site)
                    for site in range(1, n + 1)]
        return code, span_of(members, dim=code.N)
    raise ValueError(f"unknown family {family!r}; expected one of {SWEEP_FAMILIES}")


def _sweep_one(family: str, n: int, J: float, gamma_t_list: Sequence[float],
               check_baseline: bool) -> list[SweepRow]:
    code, correctable = _family_setup(family, n, J)
    noise = jx_dephasing(code.layout, gamma=1.0, T=0.0)
    gen = _lindblad_generator(noise)
    w, vectors = np.linalg.eigh((gen + gen.conj().T) / 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        kraus = _recovery_kraus(code, correctable)
        exactly_correctable = kl_check(code, correctable).correctable
    baseline_kraus = _projector_kraus(code) if check_baseline else None
    k, v, nn = code.K, code.isometry, code.N
    pair_vecs = np.array([
        np.outer(v[:, i], v[:, j].conj()).reshape(-1)
        for i in range(k) for j in range(k)])
    coords = pair_vecs @ vectors.conj()  # (K^2, N^2) in the eigenbasis
    rows = []
    for gt in gamma_t_list:
        evolved = (coords * np.exp(gt * w)) @ vectors.T
        total = 0.0
        baseline = 0.0
        for idx in range(k * k):
            i, j = divmod(idx, k)
            out = evolved[idx].reshape(nn, nn)
            rec = sum(a @ out @ a.conj().T for a in kraus)
            total += float(np.real(v[:, i].conj() @ rec @ v[:, j]))
            if baseline_kraus is not None and exactly_correctable and gt <= 0.01:
                base = sum(a @ out @ a.conj().T for a in baseline_kraus)
                baseline += float(np.real(v[:, i].conj() @ base @ v[:, j]))
        fidelity = total / k ** 2
        if (baseline_kraus is not None and exactly_correctable and gt <= 0.01
                and fidelity < baseline / k ** 2 - 1e-12):
            raise ArithmeticError(
                f"recovery fidelity {fidelity} fell below the projector "
                f"baseline {baseline / k ** 2} at gamma_T={gt}")
        rows.append(SweepRow(
            family=family, n=n, J=float(J), gamma=1.0, T=float(gt),
            gamma_T=float(gt), fidelity=fidelity, infidelity=1.0 - fidelity))
    return rows


def sweep(family: str, n: int, J_list: Sequence[float],
          gamma_t_list: Sequence[float], threads: int | None = None,
          check_baseline: bool = True) -> SimResult:
    """Entanglement-fidelity sweep of one code family over a Gamma*T grid.

    Each (J, Gamma*T) grid point evolves the codespace pair states under the
    Jx dephasing channel and applies the family's declared recovery. Rows
    come back in input grid order regardless of thread count.
    """
    if not J_list or len(list(gamma_t_list)) == 0:
        raise ValueError("J_list and gamma_t_list must be non-empty")
    configs = [(family, n, float(J), tuple(gamma_t_list), check_baseline)
               for J in J_list]
    if threads is not None and threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(configs) == 1:
        blocks = [_sweep_one(*cfg) for cfg in configs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(lambda cfg: _sweep_one(*cfg), configs))
    rows: list[SweepRow] = []
    for block in blocks:
        rows.extend(block)
    return SimResult(rows=tuple(rows))
