"""First-quantized toy models and their reduced metrics.

The open chain has sites ``1..n``. Hamiltonians are stored as their
first-quantized ``n x n`` matrix ``Gamma`` with ``H = sum_ij Gamma_ij a+_i a_j``.
Sites are 1-based in every public signature; matrices are indexed from 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from ._linalg import as_matrix, cluster_values, dag
from .errors import ModelDomainError, NoMetricError, ParameterError, PreconditionError

Provenance = Literal["farthest", "nearest", "diagonal", "custom", "spectral"]

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class ChainParams:
    """Parameters of the PT-symmetric tight-binding chain.

    Attributes:
        n: number of sites.
        m: impurity site carrying ``gamma``; its partner ``m_bar = n - m + 1``
            carries ``conj(gamma)``.
        gamma: complex impurity potential.
        hoppings: ``t_1 .. t_{n-1}``; defaults to all ones.
        onsite: real potentials ``V_1 .. V_n``; defaults to zeros.
        beta: free real parameter of the nearest-impurity metric family.
    """

    n: int
    m: int = 1
    gamma: complex = 0j
    hoppings: tuple[complex, ...] | None = None
    onsite: tuple[float, ...] | None = None
    beta: float = 0.0

    def __post_init__(self):
        n, m = self.n, self.m
        if not isinstance(n, (int, np.integer)) or n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {n!r}")
        if not isinstance(m, (int, np.integer)) or not 1 <= m <= math.ceil(n / 2):
            raise ParameterError(f"m must satisfy 1 <= m <= ceil(n/2) = {math.ceil(n / 2)}, got {m!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", int(m))
        gamma = complex(self.gamma)
        if not np.isfinite(gamma):
            raise ParameterError("gamma must be finite")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", float(self.beta))

        t = (1.0,) * (n - 1) if self.hoppings is None else self.hoppings
        t = tuple(complex(x) for x in t)
        if len(t) != n - 1:
            raise ParameterError(f"expected {n - 1} hoppings, got {len(t)}")
        if any(x == 0 or not np.isfinite(x) for x in t):
            raise ParameterError("hopping amplitudes must be finite and nonzero")
        object.__setattr__(self, "hoppings", t)

        v = (0.0,) * n if self.onsite is None else self.onsite
        if any(np.iscomplexobj(x) and complex(x).imag != 0 for x in v):
            raise ParameterError("onsite potentials must be real")
        v = tuple(float(np.real(x)) for x in v)
        if len(v) != n:
            raise ParameterError(f"expected {n} onsite potentials, got {len(v)}")
        object.__setattr__(self, "onsite", v)

    @property
    def m_bar(self) -> int:
        return self.n - self.m + 1

    def phases_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        """Whether ``arg t_{n-i} == arg t_i`` for every bond."""
        t = np.asarray(self.hoppings)
        # compare unit phasors to avoid branch-cut trouble
        u = t / np.abs(t)
        return bool(np.all(np.abs(u - u[::-1]) <= tol))

    def onsite_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        """Whether ``V_i == V_{n+1-i}`` (parity about the chain center)."""
        v = np.asarray(self.onsite)
        return bool(np.all(np.abs(v - v[::-1]) <= tol * max(1.0, np.abs(v).max(initial=0.0))))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "gamma": [self.gamma.real, self.gamma.imag],
            "hoppings": [[t.real, t.imag] for t in self.hoppings],
            "onsite": list(self.onsite),
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChainParams":
        def cplx(x):
            if isinstance(x, (list, tuple)):
                if len(x) != 2:
                    raise ParameterError(f"complex values are [re, im] pairs, got {x!r}")
                return complex(x[0], x[1])
            return complex(x)

        try:
            n = d["n"]
        except KeyError:
            raise ParameterError("missing required field 'n'") from None
        hop = d.get("hoppings")
        return cls(
            n=n,
            m=d.get("m", 1),
            gamma=cplx(d.get("gamma", 0.0)),
            hoppings=None if hop is None else tuple(cplx(x) for x in hop),
            onsite=None if d.get("onsite") is None else tuple(d["onsite"]),
            beta=d.get("beta", 0.0),
        )


@dataclass(frozen=True)
class FirstQuantizedHamiltonian:
    """The single-particle matrix ``Gamma`` of a particle-conserving free-fermion model."""

    matrix: np.ndarray
    params: ChainParams | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class ReducedMetric:
    """A Hermitian ``n x n`` reduced metric.

    The stored matrix is exactly Hermitian: inputs within ``tol`` of Hermitian
    are symmetrized, anything further off is rejected. Positive definiteness is
    *not* assumed (see :func:`qhloc.spectral.positive_definiteness`).
    """

    matrix: np.ndarray
    provenance: Provenance = "custom"

    def __post_init__(self):
        a = as_matrix(self.matrix)
        scale = max(np.abs(a).max(initial=0.0), 1.0)
        if np.abs(a - dag(a)).max(initial=0.0) > 1e-12 * scale:
            raise ParameterError("reduced metric must be Hermitian")
        a = (a + dag(a)) / 2
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def _checked(params: ChainParams) -> None:
    if not params.phases_symmetric():
        raise ParameterError("hopping phases must satisfy arg t_{n-i} = arg t_i")
    if not params.onsite_symmetric():
        raise ParameterError("onsite potentials must satisfy V_i = V_{n+1-i}")


def build_pt_hamiltonian(params: ChainParams, *, check_symmetry: bool = True) -> FirstQuantizedHamiltonian:
    """Single-particle matrix of the PT-symmetric chain.

    ``Gamma_ii = V_i + gamma [i=m] + conj(gamma) [i=m_bar]``,
    ``Gamma_{i,i+1} = conj(t_{n-i})`` and ``Gamma_{i+1,i} = t_i``.

    With ``check_symmetry=False`` the phase and onsite symmetry checks are skipped,
    which is useful for building deliberately PT-broken counterexamples.
    """
    if check_symmetry:
        _checked(params)
    n, m = params.n, params.m
    t = np.asarray(params.hoppings)
    g = np.diag(np.asarray(params.onsite, dtype=complex))
    g[m - 1, m - 1] += params.gamma
    g[n - m, n - m] += np.conj(params.gamma)
    i = np.arange(n - 1)
    g[i, i + 1] = np.conj(t[::-1])
    g[i + 1, i] = t
    return FirstQuantizedHamiltonian(g, params)


def build_xx_hamiltonian(n: int, gamma: complex) -> FirstQuantizedHamiltonian:
    """Uniform chain with unit hopping and impurities on the two end sites."""
    return build_pt_hamiltonian(ChainParams(n=n, m=1, gamma=gamma))


def farthest_metric(n: int, gamma: complex) -> ReducedMetric:
    """Analytic reduced metric for the end-impurity chain.

    ``M_ii = 1`` and ``M_ij = -i Im(gamma) conj(gamma)^(j-i-1)`` for ``i < j``;
    the lower triangle is filled by conjugation so the result is exactly Hermitian.
    This matrix is indefinite for many ``gamma``; check before using it as a metric.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    gamma = complex(gamma)
    m = np.eye(n, dtype=complex)
    powers = np.conj(gamma) ** np.arange(n - 1)
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = -1j * gamma.imag * powers[j - i - 1]
            m[j, i] = np.conj(m[i, j])
    return ReducedMetric(m, "farthest")


def nearest_metric(params: ChainParams) -> ReducedMetric:
    """One-parameter reduced metric for adjacent impurities (``n = 2m``).

    Nonzero only on the diagonal and antidiagonal. The central block is
    ``[[1, (beta - i Im gamma)/t_m], [c.c., 1]]``; outer entries follow from
    ``M Gamma = Gamma^dagger M`` one parity shell at a time, for ``i < m``::

        M_ii       = conj(t_i / t_{n-i}) M_{i+1,i+1}
        M_{i,n+1-i} = conj(t_i) / t_{n-i} * M_{i+1,n-i}
        M_{n+1-i,n+1-i} = conj(t_i / t_{n-i}) M_{n-i,n-i}
    """
    n, m = params.n, params.m
    if n != 2 * m:
        raise ModelDomainError(f"nearest-impurity metric needs n = 2m, got n={n}, m={m}")
    _checked(params)
    t = np.asarray(params.hoppings)
    tm = t[m - 1]
    if params.beta**2 + params.gamma.imag**2 / abs(tm) ** 2 >= 1:
        raise ParameterError("need beta^2 + (Im gamma)^2 / |t_m|^2 < 1")

    mat = np.zeros((n, n), dtype=complex)
    c = m - 1  # 0-based index of site m
    mat[c, c] = mat[c + 1, c + 1] = 1.0
    mat[c, c + 1] = (params.beta - 1j * params.gamma.imag) / tm
    mat[c + 1, c] = np.conj(mat[c, c + 1])
    for i in range(m - 1, 0, -1):  # 1-based site i, outward from the center
        a, b = i - 1, n - i  # 0-based i and n+1-i
        ratio = np.conj(t[i - 1] / t[n - i - 1]).real  # real under phase symmetry
        mat[a, a] = ratio * mat[a + 1, a + 1].real
        mat[b, b] = ratio * mat[b - 1, b - 1].real
        mat[a, b] = np.conj(t[i - 1]) / t[n - i - 1] * mat[a + 1, b - 1]
        mat[b, a] = np.conj(mat[a, b])
    return ReducedMetric(mat, "nearest")


def gauge_phases(params: ChainParams) -> np.ndarray:
    """Cumulative phases ``chi`` with ``chi_1 = 0`` and ``chi_{i+1} = sum_{j<=i} theta_j``."""
    theta = np.angle(np.asarray(params.hoppings))
    return np.concatenate([[0.0], np.cumsum(theta)])


def strip_phases(params: ChainParams) -> ChainParams:
    """Replace every hopping by its modulus.

    Under the site-local gauge ``b_i = exp(-i chi_i) a_i`` the two Hamiltonians are
    unitarily equivalent (``Gamma' = D^dagger Gamma D`` with ``D = diag(exp(i chi))``),
    so spectra agree.
    """
    if not params.phases_symmetric():
        raise PreconditionError("strip_phases requires arg t_{n-i} = arg t_i")
    return replace(params, hoppings=tuple(complex(abs(t)) for t in params.hoppings))


def gauge_unitary(params: ChainParams) -> np.ndarray:
    """Diagonal unitary ``D`` relating the phased and phase-stripped models."""
    return np.diag(np.exp(1j * gauge_phases(params)))


def metric_from_spectrum(op, d: Sequence[float] | np.ndarray | None = None) -> np.ndarray:
    """A metric ``eta`` with ``eta op = op^dagger eta`` built from eigenvectors.

    ``eta^{-1} = U d U^dagger`` where the columns of ``U`` are unit eigenvectors of
    ``op``; vectors within a degenerate cluster are orthonormalized. ``d`` is a
    positive vector (the diagonal of a matrix commuting with the eigenvalues), one
    entry per eigenvalue in the sorted order reported by
    :func:`qhloc.spectral.eigen_report`; identity by default.

    Raises:
        NoMetricError: ``op`` has non-real eigenvalues or is not diagonalizable.
    """
    from .spectral import eigen_report

    a = as_matrix(op)
    rep = eigen_report(a)
    if rep.reality_class != "real":
        raise NoMetricError("operator has non-real eigenvalues")
    if not rep.diagonalizable:
        raise NoMetricError("operator is not diagonalizable")

    n = a.shape[0]
    w, vecs = np.linalg.eig(a)
    order = np.lexsort((w.imag, w.real))
    w, vecs = w[order], vecs[:, order]
    scale = max(np.linalg.norm(a, 2), 1.0)
    u = np.empty_like(vecs)
    for cluster in cluster_values(w, 1e-8 * scale):
        q, _ = np.linalg.qr(vecs[:, cluster])
        u[:, cluster] = q
    u = u / np.linalg.norm(u, axis=0)

    if d is None:
        dvec = np.ones(n)
    else:
        dvec = np.asarray(d, dtype=float).ravel()
        if dvec.shape != (n,) or np.any(dvec <= 0):
            raise ParameterError("d must be a positive vector with one entry per eigenvalue")
    eta_inv = (u * dvec) @ dag(u)
    eta = np.linalg.inv(eta_inv)
    return (eta + dag(eta)) / 2
