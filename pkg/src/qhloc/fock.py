"""Exact Fock-space machinery for ``n`` fermionic modes.

Basis convention, used everywhere: index ``b`` in ``[0, 2^n)`` has site ``i``
occupied iff bit ``n - i`` of ``b`` is set (site 1 is the most significant bit,
matching ``kron`` order), and ``|b> = prod_{i ascending} (a_i^dagger)^{b_i} |0>``.
With the Jordan-Wigner form ``a_i = Z x ... x Z x sigma x 1 x ... x 1`` this
product carries no extra signs. The vacuum is index 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

from ._linalg import RANK_RTOL, antidiagonal, as_matrix, dag, rank_cutoff
from .errors import ParameterError, ScaleCapError
from .subsystems import SubsystemMask

ORACLE_CAP = 7
BASIS_HEADER = {"ordering": "ascending-site", "vacuum_index": 0}


@lru_cache(maxsize=None)
def _annihilators(n: int) -> tuple[np.ndarray, ...]:
    sigma = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    one = np.eye(2, dtype=complex)
    out = []
    for i in range(n):
        m = np.ones((1, 1), dtype=complex)
        for j in range(n):
            m = np.kron(m, z if j < i else (sigma if j == i else one))
        m.setflags(write=False)
        out.append(m)
    return tuple(out)


@lru_cache(maxsize=None)
def _sectors(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # per particle number k: (basis indices, 0-based occupied sites, ascending)
    occ = [[i for i in range(n) if b >> (n - 1 - i) & 1] for b in range(1 << n)]
    out = []
    for k in range(n + 1):
        idx = np.array([b for b in range(1 << n) if len(occ[b]) == k], dtype=int)
        sites = np.array([occ[b] for b in idx], dtype=int).reshape(len(idx), k)
        out.append((idx, sites))
    return tuple(out)


@dataclass(frozen=True)
class FockSpace:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"a Fock space needs n >= 1 modes, got {self.n!r}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def occupations(self, b: int) -> tuple[int, ...]:
        """Occupied sites (1-based, ascending) of basis state ``b``."""
        return tuple(i for i in range(1, self.n + 1) if b >> (self.n - i) & 1)

    def index_of(self, sites: Iterable[int]) -> int:
        return sum(1 << (self.n - i) for i in set(sites))

    @property
    def number(self) -> np.ndarray:
        """Particle number of each basis state."""
        return np.array([bin(b).count("1") for b in range(self.dim)])

    def annihilator(self, i: int) -> np.ndarray:
        self._site(i)
        return _annihilators(self.n)[i - 1]

    def identity(self) -> "FockOperator":
        return FockOperator(np.eye(self.dim, dtype=complex), self)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def _site(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ParameterError(f"site {i} outside [1, {self.n}]")


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray
    space: FockSpace = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ParameterError(f"operator shape {m.shape} does not match Fock dimension {self.space.dim}")
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, FockOperator):
            if other.space != self.space:
                raise ParameterError("operators live on different Fock spaces")
            return other.matrix
        return np.asarray(other)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ self._other(other), self.space)
        return self.matrix @ np.asarray(other)

    def __add__(self, other):
        return FockOperator(self.matrix + self._other(other), self.space)

    def __sub__(self, other):
        return FockOperator(self.matrix - self._other(other), self.space)

    def __mul__(self, c):
        return FockOperator(self.matrix * complex(c), self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return FockOperator(-self.matrix, self.space)

    def dag(self) -> "FockOperator":
        return FockOperator(dag(self.matrix), self.space)

    def to_dict(self) -> dict:
        from .io import matrix_to_dict

        out = dict(BASIS_HEADER)
        out["n"] = self.space.n
        out.update(matrix_to_dict(self.matrix))
        return out


# --- single-mode operators ------------------------------------------------


def _permuted(space: FockSpace, i: int, p: Sequence[int] | None) -> int:
    space._site(i)
    if p is None:
        return i
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(1, space.n + 1)):
        raise ParameterError("p must be a permutation of 1..n")
    return p[i - 1]


def annihilation(space: FockSpace, i: int, p: Sequence[int] | None = None) -> FockOperator:
    return FockOperator(space.annihilator(_permuted(space, i, p)).copy(), space)


def creation(space: FockSpace, i: int, p: Sequence[int] | None = None) -> FockOperator:
    """``a_{p(i)}^dagger`` as a Jordan-Wigner matrix (``p`` defaults to the identity)."""
    return FockOperator(dag(space.annihilator(_permuted(space, i, p))), space)


def smeared(space: FockSpace, f, kind: Literal["create", "annihilate"] = "create") -> FockOperator:
    """``a^dagger(f) = sum f_i a_i^dagger`` or ``a(f) = sum conj(f_i) a_i``."""
    f = np.asarray(f, dtype=complex).ravel()
    if f.shape != (space.n,):
        raise ParameterError(f"f must have length {space.n}")
    if not np.all(np.isfinite(f)):
        raise ParameterError("f has non-finite entries")
    a = _annihilators(space.n)
    out = sum(np.conj(fi) * a[i] for i, fi in enumerate(f))
    if kind == "annihilate":
        return FockOperator(out, space)
    if kind == "create":
        return FockOperator(dag(out), space)
    raise ParameterError(f"kind must be 'create' or 'annihilate', got {kind!r}")


def lift_one_body(space: FockSpace, o) -> FockOperator:
    """``sum_ij o_ij a_i^dagger a_j``; number conserving by construction."""
    o = as_matrix(o)
    if o.shape != (space.n, space.n):
        raise ParameterError(f"one-body matrix must be {space.n}x{space.n}")
    a = _annihilators(space.n)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for i, j in zip(*np.nonzero(o)):
        out += o[i, j] * (dag(a[i]) @ a[j])
    return FockOperator(out, space)


def number_operator(space: FockSpace, sites: Iterable[int] | None = None) -> FockOperator:
    """``n_S = sum_{i in S} a_i^dagger a_i`` (all sites by default)."""
    sites = range(1, space.n + 1) if sites is None else list(sites)
    d = np.zeros(space.n)
    for i in sites:
        space._site(i)
        d[i - 1] = 1.0
    return lift_one_body(space, np.diag(d))


# --- compound-matrix lifts ----------------------------------------------------


def _compound_lift(space: FockSpace, m: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Matrix with ``<b'|X|b> = det m[occ(b'), occ(b)]`` in equal-number sectors."""
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for k, (idx, sites) in enumerate(_sectors(space.n)):
        if k == 0:
            out[0, 0] = 1.0
            continue
        for start in range(0, len(idx), chunk):
            r = sites[start:start + chunk]
            sub = m[r[:, None, :, None], sites[None, :, None, :]]
            out[np.ix_(idx[start:start + chunk], idx)] = np.linalg.det(sub)
    return out


def lift_metric(space: FockSpace, metric, tol: float = 1e-12) -> FockOperator:
    """The Fock metric ``eta`` with ``eta|0> = |0>`` and ``eta a_i^dagger = sum_j M_ji a_j^dagger eta``.

    Built sector by sector from minors of ``M``, so it is block diagonal in
    particle number and Hermitian whenever ``M`` is.
    """
    m = as_matrix(metric)
    if m.shape != (space.n, space.n):
        raise ParameterError(f"metric must be {space.n}x{space.n}")
    if np.abs(m - dag(m)).max() > tol * max(1.0, np.abs(m).max()):
        raise ParameterError("reduced metric is not Hermitian")
    eta = _compound_lift(space, (m + dag(m)) / 2)
    return FockOperator((eta + dag(eta)) / 2, space)


def parity_operator(space: FockSpace) -> FockOperator:
    """Lift of the site reflection ``i -> n + 1 - i``; fermionic signs come from the minors."""
    return FockOperator(_compound_lift(space, antidiagonal(space.n).astype(complex)), space)


def pt_check(space: FockSpace, h, tol: float = 1e-12) -> bool:
    """``P conj(H) P == H`` with time reversal as conjugation in the occupation basis."""
    h = np.asarray(h, dtype=complex)
    p = parity_operator(space).matrix
    return bool(np.abs(p @ h.conj() @ p - h).max() <= tol * max(1.0, np.abs(h).max()))


# --- Bravyi-Kitaev local operators and the brute-force oracle ---------------


def _subsets(sites: Sequence[int]) -> list[tuple[int, ...]]:
    return [c for r in range(len(sites) + 1) for c in itertools.combinations(sites, r)]


def bk_labels(s: SubsystemMask) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``(S1, S2)`` pairs labelling ``prod_{S1} a^dagger prod_{S2} a`` with ``|S1| + |S2|`` even.

    Subsets are enumerated by size then lexicographically, ``S1`` outermost.
    """
    subs = _subsets(s.members)
    return [(s1, s2) for s1 in subs for s2 in subs if (len(s1) + len(s2)) % 2 == 0]


def _monomial(space: FockSpace, s1: tuple[int, ...], s2: tuple[int, ...]) -> np.ndarray:
    a = _annihilators(space.n)
    m = np.eye(space.dim, dtype=complex)
    for i in s1:
        m = m @ dag(a[i - 1])
    for j in s2:
        m = m @ a[j - 1]
    return m


def bk_local_basis(space: FockSpace, s: SubsystemMask) -> list[FockOperator]:
    """Even monomials in the modes of ``s``; ``2^{2|s| - 1}`` of them, see :func:`bk_labels`."""
    if s.n != space.n:
        raise ParameterError("subsystem and Fock space disagree on n")
    return [FockOperator(_monomial(space, s1, s2), space) for s1, s2 in bk_labels(s)]


class BruteForceResult(NamedTuple):
    dim_local: int
    extensive: bool


def _local_dim(space: FockSpace, eta: np.ndarray, s: SubsystemMask, tol: float) -> int:
    # eta*O = O^dagger*eta over real combinations of BK monomials. A monomial of
    # charge q = |S1| - |S2| only couples to entries with N(b') - N(b) = +-q, and
    # eta is number conserving, so the system splits into independent |q| blocks.
    # The residual is anti-Hermitian, so its upper triangle determines it.
    labels = bk_labels(s)
    charge = np.array([len(s1) - len(s2) for s1, s2 in labels])
    num = space.number
    qdiff = np.where(np.triu(np.ones((space.dim, space.dim), dtype=bool)), np.abs(num[:, None] - num[None, :]), -1)
    nullity = 0
    for q in sorted(set(np.abs(charge).tolist())):
        rows = qdiff == q
        cols = []
        for k in np.flatnonzero(np.abs(charge) == q):
            b = _monomial(space, *labels[k])
            e1 = (eta @ b)[rows]
            e2 = (dag(b) @ eta)[rows]
            # complex coefficient x + iy contributes x*(e1 - e2) + y*i*(e1 + e2)
            for col in (e1 - e2, 1j * (e1 + e2)):
                cols.append(np.concatenate([col.real, col.imag]))
        a = np.array(cols).T
        sv = np.linalg.svd(a, compute_uv=False)
        rank = 0 if sv.size == 0 or sv[0] == 0 else int(np.count_nonzero(sv > rank_cutoff(sv, a.shape, tol)))
        nullity += a.shape[1] - rank
    # the identity always solves; quotient it out
    return nullity - 1


def brute_force_locality(
    space: FockSpace,
    eta,
    s: SubsystemMask,
    *,
    cap: int = ORACLE_CAP,
    tol: float = RANK_RTOL,
    cache: dict | None = None,
) -> BruteForceResult:
    """Count nontrivial BK-local observables on ``s`` and test for an extensive one.

    ``dim_local`` is the real dimension of ``{O in span BK(s) : eta O = O^dagger eta}``
    modulo the identity. The extensive witness compares against every maximal
    proper subset; by monotonicity of the solution spaces this covers all proper
    subsets. Pass one ``cache`` dict across calls sharing the same ``eta``.
    """
    if space.n > cap:
        raise ScaleCapError(f"brute-force oracle capped at n={cap}, got n={space.n}")
    eta = np.asarray(eta, dtype=complex)
    if eta.shape != (space.dim, space.dim):
        raise ParameterError("eta does not match the Fock space")
    cache = {} if cache is None else cache

    def dim(t: SubsystemMask | None) -> int:
        if t is None:
            return 0
        if t.bits not in cache:
            cache[t.bits] = _local_dim(space, eta, t, tol)
        return cache[t.bits]

    d = dim(s)
    return BruteForceResult(d, d > 0 and all(d > dim(s.without(i)) for i in s))


# --- states ------------------------------------------------------------------


def _norm(psi: np.ndarray, eta: np.ndarray) -> complex:
    nrm = complex(np.vdot(psi, eta @ psi))
    if abs(nrm) <= 1e-14 * max(1.0, float(np.vdot(psi, psi).real)):
        raise ParameterError("state has zero norm under this metric")
    return nrm


def expectation(psi, eta, o) -> complex:
    """``<psi|eta O|psi> / <psi|eta|psi>``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    eta = np.asarray(eta, dtype=complex)
    o = np.asarray(o, dtype=complex)
    if eta.shape != (psi.size, psi.size) or o.shape != eta.shape:
        raise ParameterError("state, metric and operator dimensions disagree")
    return complex(np.vdot(psi, eta @ (o @ psi))) / _norm(psi, eta)


def local_state(psi, eta, dims: tuple[int, int]) -> np.ndarray:
    """``rho_A = Tr_B |psi><psi| eta / <psi|eta|psi>``.

    With ``O = O_A x 1_B`` this gives ``Tr(rho_A O_A) = <O>_eta``.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    eta = np.asarray(eta, dtype=complex)
    da, db = (int(d) for d in dims)
    if da * db != psi.size or eta.shape != (psi.size, psi.size):
        raise ParameterError(f"dims {dims} do not factor the state dimension {psi.size}")
    # Tr(rho O) = <psi|eta O|psi>, so rho = |psi><psi| eta (up to normalization)
    rho = np.outer(psi, psi.conj() @ eta) / _norm(psi, eta)
    return np.einsum("ajbj->ab", rho.reshape(da, db, da, db))
