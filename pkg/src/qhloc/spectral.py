"""Eigenstructure diagnostics, quasi-Hermiticity residuals and PT phase scans."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from ._linalg import antidiagonal, as_matrix, cluster_values, dag, hermitian_sqrt, sort_eigenvalues
from .errors import ParameterError, PreconditionError
from .models import ChainParams, build_pt_hamiltonian

RealityClass = Literal["real", "complex-conjugate-paired", "other"]

#: eigenvector-matrix condition number above which an operator counts as defective
COND_THRESHOLD = 1e8
#: eigenvalues closer than this (relative to max(1, ||op||_2)) are one cluster
CLUSTER_RTOL = 1e-6


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    reality_class: RealityClass
    diagonalizable: bool
    condition: float
    defect_witness: tuple[complex, int] | None
    purely_imaginary: bool
    distinct: int
    tol: float

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max(initial=0.0))

    @property
    def max_abs_imag(self) -> float:
        return float(np.abs(self.eigenvalues.imag).max(initial=0.0))

    @property
    def max_abs_real(self) -> float:
        return float(np.abs(self.eigenvalues.real).max(initial=0.0))

    def to_dict(self) -> dict:
        witness = None
        if self.defect_witness is not None:
            lam, deficit = self.defect_witness
            witness = {"eigenvalue": [lam.real, lam.imag], "deficit": deficit}
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "reality_class": self.reality_class,
            "diagonalizable": self.diagonalizable,
            "condition": self.condition,
            "defect_witness": witness,
            "purely_imaginary": self.purely_imaginary,
            "distinct": self.distinct,
        }


def _conjugate_closed(w: np.ndarray, tol: float) -> bool:
    # greedy multiset matching of w against conj(w)
    remaining = list(np.conj(w))
    for z in w:
        d = np.abs(np.asarray(remaining) - z)
        k = int(np.argmin(d))
        if d[k] > tol:
            return False
        remaining.pop(k)
    return True


def eigen_report(op, tol: float = 1e-10) -> SpectrumReport:
    """Full eigendecomposition summary of a square matrix.

    Diagonalizability combines two tests: the condition number of the matrix of
    unit eigenvectors must not exceed :data:`COND_THRESHOLD`, and within every
    eigenvalue cluster the geometric multiplicity (nullity of ``op - lambda``)
    must equal the cluster size. The first cluster failing the second test is
    reported as ``defect_witness = (lambda, deficit)``. Eigenvalues inside a
    defective cluster are replaced by the cluster mean, since the spread that
    rounding produces around a Jordan block says nothing about the spectrum.
    """
    a = as_matrix(op)
    n = a.shape[0]
    w, v = np.linalg.eig(a)
    w = sort_eigenvalues(w)
    norms = np.linalg.norm(v, axis=0)
    cond = float(np.linalg.cond(v / norms)) if n else 1.0
    if not np.isfinite(cond):
        cond = float("inf")

    scale = max(1.0, float(np.linalg.norm(a, 2)) if n else 1.0)
    ctol = CLUSTER_RTOL * scale
    clusters = cluster_values(w, ctol)
    witness = None
    for cl in clusters:
        if len(cl) == 1:
            continue
        lam = complex(np.mean(w[cl]))
        s = np.linalg.svd(a - lam * np.eye(n), compute_uv=False)
        geometric = int(np.count_nonzero(s <= ctol))
        if geometric < len(cl):
            # a Jordan block of size k splits its eigenvalue by ~eps^(1/k);
            # the split is rounding noise, so report the cluster mean
            w[cl] = lam
            if witness is None:
                witness = (lam, len(cl) - geometric)
    w = sort_eigenvalues(w)
    diagonalizable = witness is None and cond <= COND_THRESHOLD

    radius = float(np.abs(w).max(initial=0.0))
    bound = tol * max(1.0, radius)
    if np.abs(w.imag).max(initial=0.0) <= bound:
        reality: RealityClass = "real"
    elif _conjugate_closed(w, bound):
        reality = "complex-conjugate-paired"
    else:
        reality = "other"
    imaginary = bool(np.abs(w.real).max(initial=0.0) <= tol * max(1.0, radius))
    return SpectrumReport(w, reality, diagonalizable, cond, witness, imaginary, len(clusters), tol)


def quasi_hermiticity_residual(metric, op, *, normalized: bool = True) -> float:
    """``||M op - op^dagger M||_F``, divided by ``||M||_F ||op||_F`` unless ``normalized=False``."""
    m = as_matrix(metric)
    a = as_matrix(op)
    if m.shape != a.shape:
        raise ParameterError(f"dimension mismatch: metric {m.shape} vs operator {a.shape}")
    r = float(np.linalg.norm(m @ a - dag(a) @ m))
    if not normalized:
        return r
    denom = float(np.linalg.norm(m) * np.linalg.norm(a))
    return r / denom if denom > 0 else r


def positive_definiteness(metric, tol: float = 1e-12) -> tuple[bool, float]:
    """Return ``(is_pd, min_eigenvalue)``; PD means ``min > tol * max|eigenvalue|``."""
    m = as_matrix(metric)
    if np.abs(m - dag(m)).max(initial=0.0) > 1e-12 * max(1.0, np.abs(m).max(initial=0.0)):
        raise ParameterError("positive_definiteness needs a Hermitian matrix")
    w = np.linalg.eigvalsh((m + dag(m)) / 2)
    lo = float(w[0])
    return bool(lo > tol * float(np.abs(w).max())), lo


def similarity_hermitize(metric, op, tol: float = 1e-10) -> np.ndarray:
    """Map ``op`` to ``h = Omega op Omega^{-1}`` with ``Omega`` the square root of the metric.

    ``h`` is Hermitian and isospectral to ``op`` whenever ``op`` is quasi-Hermitian
    for the metric.

    Raises:
        PreconditionError: the metric is not positive definite or ``op`` is not
            quasi-Hermitian with respect to it (residual above ``tol``).
    """
    m = as_matrix(metric)
    a = as_matrix(op)
    pd, lo = positive_definiteness(m)
    if not pd:
        raise PreconditionError(f"metric is not positive definite (min eigenvalue {lo:.3g})")
    res = quasi_hermiticity_residual(m, a)
    if res > tol:
        raise PreconditionError(f"operator is not quasi-Hermitian for this metric (residual {res:.3g})")
    root, inv_root = hermitian_sqrt((m + dag(m)) / 2)
    return root @ a @ inv_root


def check_pt_metric(metric, tol: float = 1e-12) -> bool:
    """Entrywise test of ``J conj(M) J == M`` with ``J`` the antidiagonal permutation."""
    m = as_matrix(metric)
    j = antidiagonal(m.shape[0])
    return bool(np.abs(j @ m.conj() @ j - m).max(initial=0.0) <= tol * max(1.0, np.abs(m).max(initial=0.0)))


def pt_phase(report: SpectrumReport) -> str:
    """Coarse PT label: ``exceptional``, ``unbroken``, ``imaginary`` or ``broken``."""
    if not report.diagonalizable:
        return "exceptional"
    if report.reality_class == "real":
        return "unbroken"
    if report.purely_imaginary:
        return "imaginary"
    return "broken"


def pt_phase_scan(
    params_grid: Iterable[ChainParams], tol: float = 1e-10, jobs: int = 1
) -> list[tuple[ChainParams, SpectrumReport]]:
    """Spectrum report for every grid point, in input order."""
    grid = list(params_grid)

    def one(p: ChainParams) -> tuple[ChainParams, SpectrumReport]:
        return p, eigen_report(build_pt_hamiltonian(p).matrix, tol)

    if jobs > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, grid))
    return [one(p) for p in grid]
