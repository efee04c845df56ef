"""PT-symmetric chains: spectra across the transition and their reduced metrics."""

# %%
import numpy as np

from qhloc import (
    ChainParams, build_pt_hamiltonian, eigen_report, farthest_metric,
    nearest_metric, positive_definiteness, pt_phase, quasi_hermiticity_residual,
    similarity_hermitize,
)

# %% Four sites, impurities on the two central sites, unit hopping.
for im in np.linspace(0, 2.5, 11):
    rep = eigen_report(build_pt_hamiltonian(ChainParams(n=4, m=2, gamma=1j * im)).matrix)
    print(f"Im gamma = {im:4.2f}  {pt_phase(rep):11s}  max|Im| = {rep.max_abs_imag:.2e}  distinct = {rep.distinct}")

# %% The nearest-impurity metric family has one free real parameter beta.
p = ChainParams(n=6, m=3, gamma=0.4j, beta=0.3)
g = build_pt_hamiltonian(p).matrix
m = np.asarray(nearest_metric(p))
print("residual", quasi_hermiticity_residual(m, g))
print("positive definite", positive_definiteness(m))

# %% Whenever the metric is PD, sqrt(M) Gamma sqrt(M)^-1 is Hermitian.
h = similarity_hermitize(m, g)
print("||h - h^dag|| =", np.linalg.norm(h - h.conj().T))
print(np.sort(np.linalg.eigvalsh(h)))
print(np.sort(np.linalg.eigvals(g).real))

# %% Impurities at the ends instead: powers of gamma fill the metric.
print(np.round(np.asarray(farthest_metric(4, 0.5j)), 4))
