import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import spectra_match, symmetric_hoppings
from qhloc import (
    ChainParams,
    ModelDomainError,
    NoMetricError,
    ParameterError,
    PreconditionError,
    build_pt_hamiltonian,
    build_xx_hamiltonian,
    farthest_metric,
    gauge_unitary,
    metric_from_spectrum,
    nearest_metric,
    quasi_hermiticity_residual,
    strip_phases,
)
from qhloc._linalg import antidiagonal


def test_pt_hamiltonian_two_sites():
    g = build_pt_hamiltonian(ChainParams(n=2, m=1, gamma=1j)).matrix
    np.testing.assert_array_equal(g, [[1j, 1], [1, -1j]])


def test_pt_hamiltonian_hermitian_limit():
    g = build_pt_hamiltonian(ChainParams(n=3)).matrix
    np.testing.assert_array_equal(g, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def test_pt_hamiltonian_central_impurities():
    g = build_pt_hamiltonian(ChainParams(n=4, m=2, gamma=0.5j)).matrix
    assert g[1, 1] == 0.5j and g[2, 2] == -0.5j
    assert g[0, 0] == 0 and g[3, 3] == 0
    assert all(g[i, i + 1] == 1 and g[i + 1, i] == 1 for i in range(3))


def test_pt_hamiltonian_hopping_placement():
    t = (2.0, 3.0 + 1j, 5.0)
    g = build_pt_hamiltonian(ChainParams(n=4, hoppings=t), check_symmetry=False).matrix
    # Gamma_{i,i+1} = conj(t_{n-i}), Gamma_{i+1,i} = t_i
    assert g[0, 1] == 5.0 and g[1, 2] == 3.0 - 1j and g[2, 3] == 2.0
    assert g[1, 0] == 2.0 and g[2, 1] == 3.0 + 1j and g[3, 2] == 5.0


def test_xx_examples():
    np.testing.assert_array_equal(build_xx_hamiltonian(2, 1j).matrix, [[1j, 1], [1, -1j]])
    g = build_xx_hamiltonian(5, np.exp(1j * np.pi / 3)).matrix
    assert g[0, 0] == np.exp(1j * np.pi / 3) and g[4, 4] == np.exp(-1j * np.pi / 3)
    with pytest.raises(ParameterError):
        build_xx_hamiltonian(1, 0.5j)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=1), dict(n=4, m=3), dict(n=4, m=0), dict(n=3, hoppings=(1, 0)), dict(n=3, hoppings=(1,)), dict(n=2, onsite=(1,))],
)
def test_chain_params_validation(kwargs):
    with pytest.raises(ParameterError):
        ChainParams(**kwargs)


def test_asymmetric_onsite_rejected():
    with pytest.raises(ParameterError):
        build_pt_hamiltonian(ChainParams(n=3, onsite=(1.0, 0.0, 0.0)))
    # V_i = V_{n+1-i} is the accepted parity condition
    build_pt_hamiltonian(ChainParams(n=3, onsite=(1.0, 0.0, 1.0)))


def test_chain_params_json_round_trip():
    p = ChainParams(n=4, m=2, gamma=0.3 + 0.4j, hoppings=(1, 2j, 1), onsite=(1, 2, 2, 1), beta=0.1)
    assert ChainParams.from_dict(p.to_dict()) == p


def test_farthest_metric_examples():
    np.testing.assert_array_equal(
        np.asarray(farthest_metric(3, 1j)), [[1, -1j, -1], [1j, 1, -1j], [-1, 1j, 1]]
    )
    np.testing.assert_array_equal(np.asarray(farthest_metric(2, 0.5j)), [[1, -0.5j], [0.5j, 1]])
    np.testing.assert_array_equal(np.asarray(farthest_metric(5, 0.7)), np.eye(5))


def test_farthest_metric_frozen_entries():
    m = np.asarray(farthest_metric(5, 0.5j))
    # -i Im(gamma) conj(gamma)^{j-i-1}
    assert m[0, 1] == -0.5j
    assert m[0, 2] == -0.25
    assert m[0, 4] == pytest.approx(0.0625)
    assert m[4, 0] == np.conj(m[0, 4])


def test_nearest_metric_examples():
    np.testing.assert_allclose(np.asarray(nearest_metric(ChainParams(n=2, gamma=0.5j))), [[1, -0.5j], [0.5j, 1]])
    m = np.asarray(nearest_metric(ChainParams(n=4, m=2, gamma=0.5j, beta=0.2)))
    assert m[1, 2] == pytest.approx(0.2 - 0.5j)
    assert m[0, 3] == pytest.approx(0.2 - 0.5j)
    assert m[0, 0] == m[3, 3] == m[1, 1] == 1
    d = np.asarray(nearest_metric(ChainParams(n=4, m=2, gamma=0.0)))
    np.testing.assert_array_equal(d, np.diag(np.diag(d)))


def test_nearest_metric_errors():
    with pytest.raises(ModelDomainError):
        nearest_metric(ChainParams(n=3, m=1, gamma=0.5j))
    with pytest.raises(ParameterError):
        nearest_metric(ChainParams(n=4, m=2, gamma=0.8j, beta=0.7))


@given(st.integers(1, 5), st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.integers(0, 2**31))
def test_nearest_metric_is_metric_for_general_hoppings(m, im_gamma, beta, seed):
    rng = np.random.default_rng(seed)
    n = 2 * m
    t = symmetric_hoppings(rng, n)
    # keep beta^2 + Im^2/|t_m|^2 < 1
    t = tuple(x / abs(x) * max(abs(x), 1.0) if i == m - 1 else x for i, x in enumerate(t))
    v = rng.normal(size=m)
    p = ChainParams(n=n, m=m, gamma=complex(rng.normal(), im_gamma), hoppings=t, onsite=tuple(v) + tuple(v[::-1]), beta=beta)
    mm = np.asarray(nearest_metric(p))
    assert quasi_hermiticity_residual(mm, build_pt_hamiltonian(p).matrix) <= 1e-12
    j = antidiagonal(n)
    mask = (np.eye(n) + j) > 0
    assert np.all(mm[~mask] == 0)
    np.testing.assert_array_equal(mm, mm.conj().T)
    np.testing.assert_allclose(j @ mm.conj() @ j, mm, atol=1e-12)


@given(st.integers(2, 9), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_farthest_metric_properties(n, gamma):
    m = np.asarray(farthest_metric(n, gamma))
    np.testing.assert_array_equal(m, m.conj().T)
    j = antidiagonal(n)
    np.testing.assert_allclose(j @ m.conj() @ j, m, atol=1e-12 * max(1, np.abs(m).max()))
    h = build_xx_hamiltonian(n, gamma).matrix
    assert quasi_hermiticity_residual(m, h) <= 1e-12


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_strip_phases_isospectral(n, seed):
    rng = np.random.default_rng(seed)
    p = ChainParams(n=n, gamma=complex(*rng.normal(size=2)), hoppings=symmetric_hoppings(rng, n))
    q = strip_phases(p)
    assert all(t.imag == 0 and t.real > 0 for t in q.hoppings)
    g, gq = build_pt_hamiltonian(p).matrix, build_pt_hamiltonian(q).matrix
    d = gauge_unitary(p)
    np.testing.assert_allclose(d.conj().T @ g @ d, gq, atol=1e-12)
    assert spectra_match(np.linalg.eigvals(g), np.linalg.eigvals(gq), 1e-10)


def test_strip_phases_examples():
    p = ChainParams(n=3, hoppings=(np.exp(1j * np.pi / 4),) * 2)
    assert strip_phases(p).hoppings == (1, 1)
    r = ChainParams(n=3, hoppings=(2.0, 3.0))
    assert strip_phases(r) == r
    with pytest.raises(PreconditionError):
        strip_phases(ChainParams(n=3, hoppings=(1j, 1.0)))


def test_real_gamma_is_hermitian_after_strip(rng):
    # Hermiticity also needs |t_i| = |t_{n-i}|, so use fully parity-symmetric hoppings
    t = symmetric_hoppings(rng, 6)
    t = tuple(np.sqrt(np.asarray(t) * np.asarray(t[::-1])))
    p = ChainParams(n=6, gamma=0.7, hoppings=t)
    g = build_pt_hamiltonian(strip_phases(p)).matrix
    assert np.abs(g - g.conj().T).max() <= 1e-12


def test_metric_from_spectrum():
    h = np.array([[0, 1], [1, 0.5]], dtype=complex)
    np.testing.assert_allclose(metric_from_spectrum(h), np.eye(2), atol=1e-12)
    with pytest.raises(NoMetricError):
        metric_from_spectrum([[1j, 1], [1, -1j]])
    with pytest.raises(NoMetricError):
        metric_from_spectrum(build_xx_hamiltonian(2, 2j).matrix)
    g = build_xx_hamiltonian(3, 0.5j).matrix
    eta = metric_from_spectrum(g)
    assert np.linalg.norm(eta @ g - g.conj().T @ eta) <= 1e-10
    assert np.linalg.eigvalsh(eta).min() > 0


def test_metric_from_spectrum_degenerate_and_weighted(rng):
    # a degenerate real spectrum: similarity transform of diag(1, 1, 2)
    s = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    op = s @ np.diag([1.0, 1.0, 2.0]) @ np.linalg.inv(s)
    eta = metric_from_spectrum(op, d=[1.0, 2.0, 3.0])
    assert np.linalg.norm(eta @ op - op.conj().T @ eta) <= 1e-9 * np.linalg.norm(eta)
    with pytest.raises(ParameterError):
        metric_from_spectrum(op, d=[1.0, -1.0, 1.0])
