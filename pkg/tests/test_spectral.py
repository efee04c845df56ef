import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_pd, spectra_match, symmetric_hoppings
from qhloc import (
    ChainParams,
    ParameterError,
    PreconditionError,
    build_pt_hamiltonian,
    build_xx_hamiltonian,
    check_pt_metric,
    eigen_report,
    farthest_metric,
    nearest_metric,
    positive_definiteness,
    pt_phase,
    pt_phase_scan,
    quasi_hermiticity_residual,
    similarity_hermitize,
    strip_phases,
)

JORDAN = np.array([[1j, 1], [1, -1j]])


def test_eigen_report_identity():
    r = eigen_report(np.eye(3))
    assert r.reality_class == "real" and r.diagonalizable and r.defect_witness is None


def test_eigen_report_jordan_block():
    r = eigen_report(JORDAN)
    assert not r.diagonalizable
    assert r.distinct == 1
    lam, deficit = r.defect_witness
    assert abs(lam) < 1e-6 and deficit == 1


def test_eigen_report_xx_unit_circle_real():
    r = eigen_report(build_xx_hamiltonian(4, 1j).matrix)
    assert r.reality_class == "real"
    np.testing.assert_allclose(r.eigenvalues.real, [-np.sqrt(2), 0, 0, np.sqrt(2)], atol=1e-7)


def test_eigen_report_sorted_and_paired():
    r = eigen_report(build_pt_hamiltonian(ChainParams(n=4, m=2, gamma=1.5j)).matrix)
    w = r.eigenvalues
    assert r.reality_class == "complex-conjugate-paired"
    assert list(np.lexsort((w.imag, w.real))) == list(range(4))
    assert r.to_dict()["reality_class"] == "complex-conjugate-paired"


def test_eigen_report_other():
    assert eigen_report(np.diag([1j, 2.0])).reality_class == "other"


def test_residual_examples():
    h = np.array([[0, 1 - 1j], [1 + 1j, 2]])
    assert quasi_hermiticity_residual(np.eye(2), h) == 0
    assert quasi_hermiticity_residual(farthest_metric(5, 0.8j), build_xx_hamiltonian(5, 0.8j).matrix) <= 1e-12
    assert quasi_hermiticity_residual(np.eye(2), JORDAN) > 0.1
    with pytest.raises(ParameterError):
        quasi_hermiticity_residual(np.eye(3), JORDAN)


@given(st.floats(-5, 5), st.integers(2, 7), st.complex_numbers(max_magnitude=2, allow_nan=False))
def test_chemical_potential_freedom(mu, n, gamma):
    # the unnormalized residual is invariant; the normalized one rescales with ||op||
    m = farthest_metric(n, gamma)
    h = build_xx_hamiltonian(n, gamma).matrix
    r1 = quasi_hermiticity_residual(m, h, normalized=False)
    r2 = quasi_hermiticity_residual(m, h + mu * np.eye(n), normalized=False)
    assert abs(r1 - r2) <= 1e-12 * max(1.0, np.linalg.norm(np.asarray(m)) * np.linalg.norm(h))


def test_positive_definiteness_examples():
    assert positive_definiteness(np.eye(4)) == (True, 1.0)
    ok, lo = positive_definiteness(nearest_metric(ChainParams(n=2, gamma=0.5j)))
    assert ok and lo == pytest.approx(0.5)
    # |gamma| = 1 gives a rank-one farthest metric: smallest eigenvalue is zero
    ok, lo = positive_definiteness(farthest_metric(3, 1j))
    assert not ok and abs(lo) < 1e-12
    ok, lo = positive_definiteness(farthest_metric(3, 2j))
    assert not ok and lo < -0.1
    with pytest.raises(ParameterError):
        positive_definiteness(JORDAN)


def test_similarity_hermitize_examples():
    h = np.array([[0, 2], [0.5, 1]], dtype=complex)
    np.testing.assert_allclose(similarity_hermitize(np.eye(2), np.array([[1, 1j], [-1j, 0]])), [[1, 1j], [-1j, 0]])
    g = build_xx_hamiltonian(3, 0.5j).matrix
    hh = similarity_hermitize(farthest_metric(3, 0.5j), g)
    assert np.linalg.norm(hh - hh.conj().T) <= 1e-10 * np.linalg.norm(hh)
    assert spectra_match(np.linalg.eigvalsh((hh + hh.conj().T) / 2), np.linalg.eigvals(g), 1e-10)
    with pytest.raises(PreconditionError):
        similarity_hermitize(farthest_metric(3, 2j), build_xx_hamiltonian(3, 2j).matrix)
    with pytest.raises(PreconditionError):
        similarity_hermitize(np.eye(2), h)


@given(st.integers(2, 6), st.integers(0, 2**31))
def test_similarity_hermitize_random(d, seed):
    rng = np.random.default_rng(seed)
    eta = random_pd(rng, d)
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    op = np.linalg.solve(eta, (x + x.conj().T) / 2)  # eta^{-1} * Hermitian is eta-quasi-Hermitian
    h = similarity_hermitize(eta, op)
    assert np.linalg.norm(h - h.conj().T) <= 1e-10 * np.linalg.norm(h)
    assert spectra_match(np.linalg.eigvals(h), np.linalg.eigvals(op), 1e-10 * max(1, np.abs(h).max()))


def test_check_pt_metric_examples():
    assert check_pt_metric(np.eye(3))
    assert check_pt_metric(farthest_metric(4, 0.7j))
    assert not check_pt_metric(np.diag([1.0, 2.0]))


def test_phase_scan_boundary():
    grid = [ChainParams(n=4, m=2, gamma=1j * g) for g in (0.5, 1.0, 1.5)]
    out = pt_phase_scan(grid, jobs=2)
    assert [p for p, _ in out] == grid
    labels = [pt_phase(r) for _, r in out]
    assert labels[0] == "unbroken" and labels[1] == "exceptional"
    assert out[1][1].distinct <= 2
    assert out[2][1].reality_class == "complex-conjugate-paired"


def test_phase_scan_two_sites_purely_imaginary():
    (_, r), = pt_phase_scan([ChainParams(n=2, gamma=1.5j)])
    assert r.purely_imaginary and pt_phase(r) == "imaginary"


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_toy_spectra_conjugate_closed(n, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, (n + 1) // 2 + 1))
    v = rng.normal(size=n)
    p = ChainParams(n=n, m=m, gamma=complex(*rng.normal(size=2)), hoppings=symmetric_hoppings(rng, n), onsite=tuple((v + v[::-1]) / 2))
    w = np.linalg.eigvals(build_pt_hamiltonian(p).matrix)
    assert spectra_match(w, w.conj(), 1e-8 * max(1, np.abs(w).max()))
    # phase labels survive the gauge transformation
    a = eigen_report(build_pt_hamiltonian(p).matrix)
    b = eigen_report(build_pt_hamiltonian(strip_phases(p)).matrix)
    assert pt_phase(a) == pt_phase(b)
