"""Locality in a tensor-product split ``H = H_A x H_B``.

An observable ``1_A x O_B`` is quasi-Hermitian for ``eta = sum_i sqrt(chi_i) eta_A^i x eta_B^i``
iff ``eta_B^i O_B = O_B^dagger eta_B^i`` for every factor with ``chi_i > 0``. This
module computes the operator Schmidt decomposition, solves those block equations
and recovers the common block structure of the factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ._linalg import RANK_RTOL, as_matrix, dag, null_space
from .errors import ParameterError, ReductionError
from .spectral import positive_definiteness

SCHMIDT_RTOL = 1e-10
CLUSTER_GAP = 1e-8
COND_LIMIT = 1e8

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


@dataclass(frozen=True)
class Bipartition:
    dim_A: int
    dim_B: int

    def __post_init__(self):
        if int(self.dim_A) < 1 or int(self.dim_B) < 1:
            raise ParameterError("subsystem dimensions must be positive")

    @property
    def total(self) -> int:
        return self.dim_A * self.dim_B

    @classmethod
    def for_operator(cls, op, dim_A: int) -> "Bipartition":
        d = np.asarray(op).shape[0]
        if dim_A < 1 or d % dim_A:
            raise ParameterError(f"dimension {d} does not factor with dim_A={dim_A}")
        return cls(dim_A, d // dim_A)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """``op = sum_i sqrt(chi_i) A_i x B_i`` with Hilbert-Schmidt orthonormal factors.

    All ``min(dim_A^2, dim_B^2)`` terms are kept; the first ``schmidt_number`` have
    ``sqrt(chi_i) > tol * sqrt(chi_max)``.
    """

    coefficients: np.ndarray
    factors_A: tuple[np.ndarray, ...] = field(repr=False)
    factors_B: tuple[np.ndarray, ...] = field(repr=False)
    schmidt_number: int
    parts: Bipartition

    def reconstruct(self, terms: int | None = None) -> np.ndarray:
        k = len(self.coefficients) if terms is None else terms
        out = np.zeros((self.parts.total, self.parts.total), dtype=complex)
        for c, a, b in zip(self.coefficients[:k], self.factors_A[:k], self.factors_B[:k]):
            out += np.sqrt(c) * np.kron(a, b)
        return out

    def side(self, which: Literal["A", "B"]) -> tuple[np.ndarray, ...]:
        """Factors on one side carrying nonzero weight."""
        f = self.factors_A if which == "A" else self.factors_B
        return f[: self.schmidt_number]

    def to_dict(self, seed: int | None = None) -> dict:
        return {"chi": [float(c) for c in self.coefficients], "schmidt_number": self.schmidt_number, "seed": seed}


def operator_schmidt(op, parts: Bipartition, tol: float = SCHMIDT_RTOL) -> SchmidtDecomposition:
    """Realign ``op`` into a ``dim_A^2 x dim_B^2`` matrix and take its SVD."""
    a = as_matrix(op)
    da, db = parts.dim_A, parts.dim_B
    if a.shape[0] != da * db:
        raise ParameterError(f"operator of size {a.shape[0]} does not factor as {da} x {db}")
    r = a.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    u, s, vh = np.linalg.svd(r, full_matrices=False)
    count = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    fa = tuple(u[:, i].reshape(da, da) for i in range(s.size))
    fb = tuple(vh[i].reshape(db, db) for i in range(s.size))
    return SchmidtDecomposition(s**2, fa, fb, count, parts)


# --- block-metric equations --------------------------------------------------


def _solve(mats: Sequence[np.ndarray], d: int, embed, tol: float) -> list[np.ndarray]:
    # Real-linear solve of X O = O^dagger X for all X, over O in C^{d x d}.
    units = []
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1.0
        units.append(e.reshape(d, d))
    basis = units + [1j * u for u in units]
    cols = []
    for o in basis:
        big = embed(o)
        parts = [x @ big - dag(big) @ x for x in mats]
        v = np.concatenate([p.ravel() for p in parts])
        cols.append(np.concatenate([v.real, v.imag]))
    kernel, _ = null_space(np.array(cols).T, tol)
    sols = [(kernel[:d * d, j] + 1j * kernel[d * d:, j]).reshape(d, d) for j in range(kernel.shape[1])]
    return _nontrivial(sols, d)


def _nontrivial(sols: list[np.ndarray], d: int, tol: float = 1e-10) -> list[np.ndarray]:
    # Project out the identity (real HS inner product) and orthonormalize.
    if not sols:
        return []
    eye = np.eye(d) / np.sqrt(d)
    vecs = []
    for o in sols:
        p = o - np.real(np.trace(dag(eye) @ o)) * eye
        if np.linalg.norm(p) > tol * max(np.linalg.norm(o), 1e-300):
            vecs.append(np.concatenate([p.real.ravel(), p.imag.ravel()]))
    if not vecs:
        return []
    u, s, _ = np.linalg.svd(np.array(vecs).T, full_matrices=False)
    r = int(np.count_nonzero(s > tol * s[0]))
    return [(u[: d * d, j] + 1j * u[d * d:, j]).reshape(d, d) for j in range(r)]


def solve_block_metrics(factors: Sequence, tol: float = RANK_RTOL) -> list[np.ndarray]:
    """Basis of nontrivial ``O`` with ``F O = O^dagger F`` for every factor ``F``.

    The basis is orthonormal under the real Hilbert-Schmidt product and orthogonal
    to the identity, which always solves and is quotiented out. An empty list
    means no local observables.
    """
    mats = [as_matrix(f) for f in factors]
    if not mats:
        raise ParameterError("solve_block_metrics needs at least one factor")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise ParameterError("factors must share one square shape")
    return _solve(mats, d, lambda o: o, tol)


def direct_local_solutions(eta, parts: Bipartition, side: Literal["A", "B"] = "B", tol: float = RANK_RTOL) -> list[np.ndarray]:
    """Nontrivial ``O`` with ``1_A x O`` (or ``O x 1_B``) quasi-Hermitian for ``eta``, solved directly."""
    e = as_matrix(eta)
    if e.shape[0] != parts.total:
        raise ParameterError("metric does not match the bipartition")
    if side == "B":
        ia = np.eye(parts.dim_A)
        return _solve([e], parts.dim_B, lambda o: np.kron(ia, o), tol)
    ib = np.eye(parts.dim_B)
    return _solve([e], parts.dim_A, lambda o: np.kron(o, ib), tol)


def side_solutions(decomp: SchmidtDecomposition, side: Literal["A", "B"], tol: float = RANK_RTOL) -> list[np.ndarray]:
    return solve_block_metrics(decomp.side(side), tol)


@dataclass(frozen=True)
class Reduction:
    """``S`` with every ``S^dagger F S`` block diagonal on ``blocks`` (column index groups)."""

    transform: np.ndarray
    blocks: tuple[tuple[int, ...], ...]
    observable: np.ndarray
    seed: int
    attempts: int


def _clusters(w: np.ndarray) -> list[list[int]]:
    order = np.argsort(w)
    gap = CLUSTER_GAP * max(1.0, float(np.abs(w).max()))
    groups = [[int(order[0])]]
    for prev, k in zip(order, order[1:]):
        if w[k] - w[prev] > gap:
            groups.append([])
        groups[-1].append(int(k))
    return groups


def _block_diagonal(m: np.ndarray, blocks: list[list[int]], tol: float) -> bool:
    mask = np.ones(m.shape, dtype=bool)
    for b in blocks:
        mask[np.ix_(b, b)] = False
    return bool(np.abs(m[mask]).max(initial=0.0) <= tol * max(1.0, np.abs(m).max()))


def simultaneous_reduction(
    factors: Sequence,
    tol: float = 1e-8,
    seed: int = 0,
    max_retries: int = 8,
) -> Reduction | None:
    """Common block structure of the factors, found from a generic local observable.

    A random real combination of the nontrivial solutions is diagonalized as
    ``O = S D S^{-1}``; its eigenvalue clusters give the blocks. Returns ``None``
    when no nontrivial solution exists.

    Raises:
        ReductionError: every attempt produced a defective combination or failed
            the block check.
    """
    mats = [as_matrix(f) for f in factors]
    sols = solve_block_metrics(mats)
    if not sols:
        return None
    rng = np.random.default_rng(seed)
    d = mats[0].shape[0]
    for attempt in range(1, max_retries + 1):
        c = rng.standard_normal(len(sols))
        o = sum(ci * s for ci, s in zip(c, sols))
        w, v = np.linalg.eig(o)
        if np.abs(w.imag).max() > 1e-8 * max(1.0, np.abs(w).max()):
            continue
        v = v / np.linalg.norm(v, axis=0)
        if np.linalg.cond(v) > COND_LIMIT:
            continue
        order = np.argsort(w.real)
        w, v = w.real[order], v[:, order]
        blocks = _clusters(w)
        if len(blocks) < 2:
            continue
        if all(_block_diagonal(dag(v) @ m @ v, blocks, tol) for m in mats):
            return Reduction(v, tuple(tuple(b) for b in blocks), o, seed, attempt)
    raise ReductionError(f"no usable generic combination after {max_retries} attempts (seed {seed}, d={d})")


# --- tightness examples ------------------------------------------------------


def build_eta_min(beta: float) -> np.ndarray:
    """``(1 + beta X) x (1 + beta X) + beta^2 Y x Y``; Schmidt number 2 for ``beta != 0``."""
    beta = float(beta)
    one = np.eye(2) + beta * PAULI_X
    eta = np.kron(one, one) + beta**2 * np.kron(PAULI_Y, PAULI_Y)
    pd, lo = positive_definiteness(eta)
    if not pd:
        raise ParameterError(f"beta={beta} gives an indefinite metric (min eigenvalue {lo:.3g})")
    return eta


def build_eta_max(alpha: float, dim_A: int, dim_B: int) -> np.ndarray:
    """``alpha 1 + sum_ij (0 + E_ij) x (0 + E_ij)`` with ``E_ij`` unit matrices on the trailing block.

    The trailing block has size ``min(dim_A, dim_B) - 1``, giving Schmidt number
    ``(min dim - 1)^2 + 1``. The projector onto the first basis vector of either
    side is a local observable.
    """
    k = min(dim_A, dim_B) - 1
    eta = float(alpha) * np.eye(dim_A * dim_B, dtype=complex)
    for i in range(k):
        for j in range(k):
            ea = np.zeros((dim_A, dim_A))
            eb = np.zeros((dim_B, dim_B))
            ea[1 + i, 1 + j] = 1.0
            eb[1 + i, 1 + j] = 1.0
            eta += np.kron(ea, eb)
    pd, lo = positive_definiteness(eta)
    if not pd:
        raise ParameterError(f"alpha={alpha} gives an indefinite metric (min eigenvalue {lo:.3g})")
    return eta


def schmidt_threshold(parts: Bipartition) -> int:
    """Largest Schmidt number compatible with local observables on the smaller side."""
    d = min(parts.dim_A, parts.dim_B)
    return (d - 1) ** 2 + 1


@dataclass(frozen=True)
class BoundsReport:
    schmidt_number: int
    threshold: int
    exists_A: bool
    exists_B: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "schmidt_number": self.schmidt_number,
            "threshold": self.threshold,
            "local_observables_A": self.exists_A,
            "local_observables_B": self.exists_B,
            "violations": list(self.violations),
        }


def schmidt_bounds_check(decomp: SchmidtDecomposition, parts: Bipartition | None = None, tol: float = RANK_RTOL) -> BoundsReport:
    """Compare the Schmidt number with the existence of local observables on each side.

    Schmidt number 1 forces observables on both sides; a Schmidt number above
    :func:`schmidt_threshold` forbids them on the smaller side (both sides when
    the dimensions agree). Any contradiction is listed in ``violations``.
    """
    parts = decomp.parts if parts is None else parts
    ea = bool(side_solutions(decomp, "A", tol))
    eb = bool(side_solutions(decomp, "B", tol))
    thr = schmidt_threshold(parts)
    bad = []
    if decomp.schmidt_number == 1 and not (ea and eb):
        bad.append("schmidt number 1 without local observables on both sides")
    if decomp.schmidt_number > thr:
        if parts.dim_A <= parts.dim_B and ea:
            bad.append("local observables on A above the Schmidt threshold")
        if parts.dim_B <= parts.dim_A and eb:
            bad.append("local observables on B above the Schmidt threshold")
    return BoundsReport(decomp.schmidt_number, thr, ea, eb, tuple(bad))
