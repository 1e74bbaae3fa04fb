"""Transversal-gate certification.

Per-site error closures decide whether any continuous group of transversal
gates can exist; on small systems the induced logical action is computed
exactly by intersecting the transversal algebra (direct sum of per-site
closures) with the logical algebra (Hermitian commutant of the codespace
projector); on large systems certification falls back to per-site
universality plus a per-site code check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codes import Code, KL_DEFAULT_TOL, codespace_projector, kl_check
from .error_algebra import GradedErrorSet, graded_span, lie_closure
from .exceptions import CapabilityError
from .operators import (
    Operator,
    OperatorSpan,
    SubsystemLayout,
    embed_local,
    hermitian_from_real_coords,
    hermitian_real_coords,
    span_intersection,
    span_of,
)

# The dense intersection path scales like N^4 in memory; larger systems use
# the per-site certification path.
DENSE_PATH_CAP = 40

VERDICT_NO_CONTINUOUS = "no-continuous-gates"
VERDICT_NOT_UNIVERSAL = "continuous-but-not-universal"
VERDICT_UNIVERSAL = "universal"
VERDICT_UNDECIDED = "undecided-large-N"


@dataclass(frozen=True)
class SiteReport:
    site: int
    closure_dim: int
    closed: bool
    universal: bool
    kl_correctable: bool

    def summary(self) -> dict:
        return {
            "site": self.site,
            "closure_dim": self.closure_dim,
            "closed": self.closed,
            "universal": self.universal,
            "kl_correctable": self.kl_correctable,
        }


@dataclass(frozen=True)
class TransversalReport:
    per_site: tuple[SiteReport, ...]
    logical_component_dim: int | None
    verdict: str

    def summary(self) -> dict:
        return {
            "per_site": [s.summary() for s in self.per_site],
            "logical_component_dim": self.logical_component_dim,
            "verdict": self.verdict,
        }


def transversal_algebra(layout: SubsystemLayout,
                        local_closures: Sequence[OperatorSpan]) -> OperatorSpan:
    """Span of all per-site algebra elements embedded into the full space.

    The embedded identities of different sites coincide, so the dimension is
    the sum of local dimensions minus the shared identity overlaps.
    """
    if len(local_closures) != layout.n_sites:
        raise ValueError(f"expected {layout.n_sites} local closures, got {len(local_closures)}")
    members: list[Operator] = []
    for site, closure in enumerate(local_closures, start=1):
        if closure.dim != layout.dims[site - 1]:
            raise ValueError(
                f"closure at site {site} has dim {closure.dim}, expected "
                f"{layout.dims[site - 1]}")
        members.extend(embed_local(op, layout, site) for op in closure.basis)
    return span_of(members, dim=layout.N)


def logical_algebra(code: Code, tol: float = 1e-7) -> OperatorSpan:
    """Hermitian generators whose unitaries preserve the codespace.

    Computed as the null space of the real-linear map g -> i[g, P] on the
    N^2-dimensional Hermitian space. The nonzero singular values of that map
    sit at 1 (the projector spectrum is {0, 1}), so the rank cut is clean.
    """
    n = code.N
    if n > DENSE_PATH_CAP:
        raise CapabilityError(
            f"N={n} exceeds the dense null-space cap {DENSE_PATH_CAP}; "
            "use the per-site certification path")
    p = codespace_projector(code).entries
    n2 = n * n
    columns = np.empty((n2, n2))
    eye = np.eye(n2)
    for j in range(n2):
        h = hermitian_from_real_coords(eye[j], n)
        columns[:, j] = hermitian_real_coords(1j * (h @ p - p @ h))
    _, s, vt = np.linalg.svd(columns)
    null_dim = int((s <= tol * max(1.0, s[0])).sum())
    mats = [hermitian_from_real_coords(row, n) for row in vt[n2 - null_dim:]]
    return span_of([Operator(m, hermitian=True) for m in mats], dim=n)


def induced_logical_action(code: Code, span: OperatorSpan,
                           tol: float = 1e-8) -> OperatorSpan:
    """Project a codespace-preserving span to its logical action V^dag g V."""
    members = []
    for op in span.basis:
        g = op.entries
        p = code.isometry @ code.isometry.conj().T
        comm = np.linalg.norm(g @ p - p @ g)
        if comm > tol * max(1.0, np.linalg.norm(g)):
            raise ValueError(
                f"span element does not commute with the codespace projector "
                f"(|[g, P]| = {comm:.3e})")
        members.append(Operator(code.isometry.conj().T @ g @ code.isometry,
                                hermitian=True))
    if not members:
        return OperatorSpan(code.K, (), tol=span.tol)
    return span_of(members, dim=code.K, tol=span.tol)


def certify_transversal(code: Code,
                        site_errors: Sequence[GradedErrorSet],
                        site_codes: Sequence[Code] | None = None,
                        kl_tol: float = KL_DEFAULT_TOL) -> TransversalReport:
    """Certify continuous/universal transversal gates for a code.

    Two-tier procedure: per-site Lie closures always run; when every site's
    errors are already closed there can be no continuous transversal logical
    gates. On small systems (N <= 40) the induced logical component is
    computed exactly via the span intersection; on larger systems the
    verdict is universal only when every site closure is universal on its
    local algebra and a declared per-site code passes kl_check, otherwise
    undecided.
    """
    layout = code.layout
    if len(site_errors) != layout.n_sites:
        raise ValueError(
            f"need one error set per site ({layout.n_sites}), got {len(site_errors)}")
    if site_codes is not None and len(site_codes) != layout.n_sites:
        raise ValueError("site_codes must have one entry per site")

    closures = []
    site_reports = []
    closure_cache: dict = {}
    for i, errs in enumerate(site_errors, start=1):
        d = layout.dims[i - 1]
        if errs.dim != d:
            raise ValueError(f"error set for site {i} has dim {errs.dim}, expected {d}")
        local_span = graded_span(errs)
        key = local_span.matrices.tobytes()
        if key not in closure_cache:
            closure_cache[key] = lie_closure(local_span)
        report = closure_cache[key]
        closures.append(report.closure_basis)
        if site_codes is not None:
            kl_ok = kl_check(site_codes[i - 1], local_span, tol=kl_tol).correctable
        elif layout.N <= DENSE_PATH_CAP:
            embedded = span_of(
                [embed_local(op, layout, i) for op in local_span.basis],
                dim=layout.N)
            kl_ok = kl_check(code, embedded, tol=kl_tol).correctable
        else:
            kl_ok = False
        site_reports.append(SiteReport(
            site=i,
            closure_dim=report.closure_dim,
            closed=report.closed,
            universal=report.universal,
            kl_correctable=kl_ok,
        ))

    all_closed = all(s.closed for s in site_reports)
    logical_component_dim: int | None = None
    induced_has_identity = False
    if layout.N <= DENSE_PATH_CAP:
        ft = transversal_algebra(layout, closures)
        la = logical_algebra(code)
        common = span_intersection(ft, la)
        induced = induced_logical_action(code, common)
        logical_component_dim = induced.size
        induced_has_identity = induced.size > 0 and \
            induced.residual_of(np.eye(code.K, dtype=complex)) <= 1e-8 * np.sqrt(code.K)

    if all_closed:
        verdict = VERDICT_NO_CONTINUOUS
    elif logical_component_dim is not None:
        universal = (logical_component_dim >= code.K ** 2 - 1
                     and induced_has_identity)
        verdict = VERDICT_UNIVERSAL if universal else VERDICT_NOT_UNIVERSAL
    else:
        if all(s.universal and s.kl_correctable for s in site_reports):
            verdict = VERDICT_UNIVERSAL
        else:
            verdict = VERDICT_UNDECIDED
    return TransversalReport(
        per_site=tuple(site_reports),
        logical_component_dim=logical_component_dim,
        verdict=verdict,
    )
