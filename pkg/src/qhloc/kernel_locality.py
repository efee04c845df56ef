"""Kernel-rank certificates for local observables of free fermions.

For a reduced metric ``M`` and subsystem ``A`` let ``A'`` be the complement and
``K(A) = dim ker M^{A'A}``. Local one-body observables supported on ``A`` are
exactly ``o = sum_{mu nu} alpha_{mu nu} w^mu (w^nu)^dagger M^{AA}`` with ``w^mu``
spanning that kernel and ``alpha`` Hermitian. Extensively local observables on
``A`` exist iff ``K(A) > K(S)`` for every proper ``S``; since zero-extension
embeds ``ker M^{S'S}`` into ``ker M^{A'A}``, comparing against the ``|A|``
maximal proper subsets is enough.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal

import numpy as np

from ._linalg import RANK_RTOL, as_matrix, fix_phase, null_space, numerical_rank
from .errors import ParameterError, ScaleCapError
from .subsystems import (
    SubsystemMask,
    all_subsystems,
    connected_subsystems,
    connectivity,
    parity_symmetric_subsystems,
)

Family = Literal["all", "connected", "parity-symmetric"]
PredicateName = Literal["unit-disk", "conds", "parity", "involution"]


def _metric(m) -> np.ndarray:
    return as_matrix(m)


def block(metric, rows: SubsystemMask | Iterable[int], cols: SubsystemMask | Iterable[int]) -> np.ndarray:
    """The submatrix ``M^{RC}`` with rows and columns in ascending site order."""
    m = _metric(metric)
    r = np.asarray(sorted(rows), dtype=int) - 1
    c = np.asarray(sorted(cols), dtype=int) - 1
    if r.size == 0 or c.size == 0:
        raise ParameterError("block needs nonempty row and column sets")
    if r.min() < 0 or c.min() < 0 or max(r.max(), c.max()) >= m.shape[0]:
        raise ParameterError("block indices out of range")
    return m[np.ix_(r, c)]


@dataclass(frozen=True)
class LocalObservableBasis:
    """Kernel of ``M^{A'A}`` and the ``M^{AA}`` block for subsystem ``A``.

    ``kernel_vectors`` has shape ``(|A|, K)`` with orthonormal columns, ordered from
    the most robust direction (smallest singular value) upward.
    """

    subsystem: SubsystemMask
    kernel_vectors: np.ndarray
    block: np.ndarray
    singular_values: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.kernel_vectors.shape[1]

    @property
    def witness(self) -> np.ndarray | None:
        """Most robust kernel vector, phase-fixed, or ``None`` when ``K = 0``."""
        if self.K == 0:
            return None
        return fix_phase(self.kernel_vectors[:, 0])


def kernel_certificate(metric, a: SubsystemMask, tol: float = RANK_RTOL) -> LocalObservableBasis:
    """Orthonormal basis of ``ker M^{A'A}``.

    A singular value counts as zero when it is at most
    ``tol * sigma_max * max(rows, cols)``. For ``A = [n]`` there are no
    constraints and ``K = n``.
    """
    m = _metric(metric)
    aa = m[np.ix_(a.index, a.index)]
    if a.is_full():
        return LocalObservableBasis(a, np.eye(len(a), dtype=complex), aa, np.zeros(0))
    off = m[np.ix_(a.complement_index, a.index)]
    kernel, s = null_space(off, tol)
    return LocalObservableBasis(a, kernel, aa, s)


def kernel_dimension(metric, a: SubsystemMask | None, tol: float = RANK_RTOL) -> int:
    """``K(A)``; the empty subsystem (``None``) has ``K = 0``."""
    if a is None:
        return 0
    if a.is_full():
        return len(a)
    m = _metric(metric)
    return len(a) - numerical_rank(m[np.ix_(a.complement_index, a.index)], tol)


def is_extensively_local(metric, a: SubsystemMask, tol: float = RANK_RTOL, _cache: dict | None = None) -> bool:
    """``K(A) > K(A - {i})`` for every site ``i`` of ``A``."""
    m = _metric(metric)
    cache = {} if _cache is None else _cache

    def k_of(s: SubsystemMask | None) -> int:
        if s is None:
            return 0
        if s.bits not in cache:
            cache[s.bits] = kernel_dimension(m, s, tol)
        return cache[s.bits]

    k = k_of(a)
    return k > 0 and all(k > k_of(a.without(i)) for i in a)


def observable_generators(basis: LocalObservableBasis) -> list[np.ndarray]:
    """The ``K^2`` matrices ``w^mu (w^nu)^dagger M^{AA}`` embedded into ``n x n``.

    Real combinations with Hermitian coefficients ``alpha`` span every local
    reduced observable on the subsystem; see :func:`local_observable`.
    Ordering is row-major in ``(mu, nu)``.
    """
    a = basis.subsystem
    idx = np.ix_(a.index, a.index)
    w = basis.kernel_vectors
    out = []
    for mu in range(basis.K):
        for nu in range(basis.K):
            g = np.zeros((a.n, a.n), dtype=complex)
            g[idx] = np.outer(w[:, mu], w[:, nu].conj()) @ basis.block
            out.append(g)
    return out


def local_observable(basis: LocalObservableBasis, alpha) -> np.ndarray:
    """``sum alpha_{mu nu} w^mu (w^nu)^dagger M^{AA}`` for a Hermitian ``K x K`` array."""
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (basis.K, basis.K):
        raise ParameterError(f"alpha must be {basis.K}x{basis.K}")
    if np.abs(alpha - alpha.conj().T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(alpha).max(initial=0.0)):
        raise ParameterError("alpha must be Hermitian")
    a = basis.subsystem
    o = np.zeros((a.n, a.n), dtype=complex)
    w = basis.kernel_vectors
    o[np.ix_(a.index, a.index)] = w @ alpha @ w.conj().T @ basis.block
    return o


# --- analytic predicates -------------------------------------------------


def associated_involution(metric, tol: float = 1e-12) -> tuple[int, ...] | None:
    """Involution ``f`` with ``M_ij != 0  <=>  i = j or i = f(j)``, if one exists.

    Returned 1-based: ``f[i - 1]`` is the image of site ``i``.
    """
    m = _metric(metric)
    n = m.shape[0]
    nz = np.abs(m) > tol * max(np.abs(m).max(initial=0.0), 1e-300)
    np.fill_diagonal(nz, False)
    f = list(range(1, n + 1))
    for j in range(n):
        partners = np.flatnonzero(nz[:, j])
        if partners.size > 1:
            return None
        if partners.size == 1:
            f[j] = int(partners[0]) + 1
    if any(f[f[i] - 1] != i + 1 for i in range(n)):
        return None
    return tuple(f)


def parity_involution(n: int) -> tuple[int, ...]:
    return tuple(n + 1 - i for i in range(1, n + 1))


def predict_involution(a: SubsystemMask, f: Iterable[int]) -> bool:
    """Extensive locality for block-pair metrics: ``f(A) == A``."""
    f = tuple(f)
    return {f[i - 1] for i in a} == set(a.members)


def predict_parity(a: SubsystemMask) -> bool:
    return predict_involution(a, parity_involution(a.n))


def predict_unit_disk(a: SubsystemMask) -> bool:
    """End-impurity metric with ``|gamma| = 1``: classification by component sizes.

    True iff no connected component is a single site, or ``A = {1, n} u B``
    with ``B`` free of single-site components. ``B`` may contain 1 or ``n``
    itself, so e.g. ``{1, 2, n}`` qualifies; equivalently, every one-site
    component is ``{1}`` or ``{n}`` and then both ends belong to ``A``.
    """
    prof = connectivity(a)
    singles = {c[0] for c in prof.components if len(c) == 1}
    if not singles:
        return True
    return singles <= {1, a.n} and 1 in a and a.n in a


def predict_conds(a: SubsystemMask) -> bool:
    """End-impurity metric with ``|gamma| != 1``: the four component conditions.

    1. a component of at most two sites, other than ``{1,2}`` or ``{n-1,n}``,
       cannot be the whole subsystem;
    2. a one-site component ``{i}`` needs ``i-2`` and ``i+2`` in ``A`` whenever
       they lie in the chain;
    3. a two-site component other than ``{1,2}``, ``{n-1,n}`` must be within
       distance 2 of another component;
    4. a one-site edge component must be ``{1}`` (leftmost) or ``{n}`` (rightmost).
    """
    n = a.n
    prof = connectivity(a)
    comps = prof.components
    edge_pairs = {(1, 2), (n - 1, n)}
    for k, c in enumerate(comps):
        if len(c) <= 2 and c not in edge_pairs and len(comps) == 1:
            return False
        if len(c) == 1:
            i = c[0]
            if (i - 2 >= 1 and i - 2 not in a) or (i + 2 <= n and i + 2 not in a):
                return False
        if len(c) == 2 and c not in edge_pairs and prof.nearest_distance(k) > 2:
            return False
    if len(prof.left) == 1 and prof.left != (1,):
        return False
    if len(prof.right) == 1 and prof.right != (n,):
        return False
    return True


# --- scans ----------------------------------------------------------------


@dataclass(frozen=True)
class LocalityRow:
    mask: SubsystemMask
    K: int
    local: bool
    extensive: bool
    predicate: bool | None = None
    witness: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def agree(self) -> bool | None:
        return None if self.predicate is None else self.predicate == self.extensive

    def to_dict(self) -> dict:
        return {
            "mask": list(self.mask.members),
            "K": self.K,
            "local": self.local,
            "extensive": self.extensive,
            "predicate": self.predicate,
            "agree": self.agree,
        }


@dataclass(frozen=True)
class LocalityReport:
    n: int
    rows: tuple[LocalityRow, ...]
    predicate_name: str | None = None
    family: str = "all"

    def flagged(self) -> list[SubsystemMask]:
        """Subsystems carrying extensively local observables."""
        return [r.mask for r in self.rows if r.extensive]

    def by_bits(self) -> dict[int, LocalityRow]:
        return {r.mask.bits: r for r in self.rows}

    @property
    def agreement(self) -> tuple[int, int]:
        """``(agreeing, compared)`` over rows with a predicate value."""
        judged = [r.agree for r in self.rows if r.agree is not None]
        return sum(judged), len(judged)

    def summary(self) -> str:
        ok, total = self.agreement
        flagged = sum(r.extensive for r in self.rows)
        line = f"subsystems: {len(self.rows)}, extensive: {flagged}"
        if self.predicate_name is not None:
            line += f", agree: {ok}/{total}"
        return line

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mask", "K", "local", "extensive", "predicate", "agree"])
        for r in self.rows:
            d = r.to_dict()
            w.writerow([" ".join(map(str, d["mask"])), d["K"], d["local"], d["extensive"], d["predicate"], d["agree"]])
        return buf.getvalue()


def _family(n: int, family: Family) -> list[SubsystemMask]:
    if family == "all":
        return list(all_subsystems(n))
    if family == "connected":
        return list(connected_subsystems(n))
    if family == "parity-symmetric":
        return list(parity_symmetric_subsystems(n))
    raise ParameterError(f"unknown subsystem family {family!r}")


def _predicate(metric: np.ndarray, predicate) -> tuple[Callable[[SubsystemMask], bool] | None, str | None]:
    if predicate is None:
        return None, None
    if callable(predicate):
        return predicate, getattr(predicate, "__name__", "custom")
    if predicate == "unit-disk":
        return predict_unit_disk, predicate
    if predicate == "conds":
        return predict_conds, predicate
    if predicate == "parity":
        return predict_parity, predicate
    if predicate == "involution":
        f = associated_involution(metric)
        if f is None:
            raise ParameterError("metric has no associated involution")
        return (lambda a: predict_involution(a, f)), predicate
    raise ParameterError(f"unknown predicate {predicate!r}")


def scan_subsystems(
    metric,
    *,
    predicate: PredicateName | Callable[[SubsystemMask], bool] | None = None,
    family: Family = "all",
    cap_n: int = 20,
    tol: float = RANK_RTOL,
    witnesses: bool = False,
    jobs: int = 1,
) -> LocalityReport:
    """Kernel certificate and extensive-locality flag for a family of subsystems.

    Rows are sorted by bitmask. ``family="all"`` enumerates ``2^n - 1`` subsets and
    is refused above ``cap_n`` sites.
    """
    m = _metric(metric)
    n = m.shape[0]
    if family == "all" and n > cap_n:
        raise ScaleCapError(f"exhaustive scan of n={n} exceeds cap_n={cap_n}; use a restricted family")
    pred, pred_name = _predicate(m, predicate)
    masks = sorted(_family(n, family), key=lambda s: s.bits)

    needed: dict[int, SubsystemMask] = {s.bits: s for s in masks}
    for s in masks:
        for i in s:
            sub = s.without(i)
            if sub is not None:
                needed.setdefault(sub.bits, sub)
    todo = list(needed.values())
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ks = list(pool.map(lambda s: kernel_dimension(m, s, tol), todo))
    else:
        ks = [kernel_dimension(m, s, tol) for s in todo]
    cache = {s.bits: k for s, k in zip(todo, ks)}

    rows = []
    for s in masks:
        k = cache[s.bits]
        ext = k > 0 and all(k > (cache[sub.bits] if (sub := s.without(i)) else 0) for i in s)
        wit = kernel_certificate(m, s, tol).witness if witnesses and ext else None
        rows.append(LocalityRow(s, k, k > 0, ext, None if pred is None else bool(pred(s)), wit))
    return LocalityReport(n, tuple(rows), pred_name, family)
