"""Lift a reduced metric to Fock space and check locality by brute force."""

# %%
import numpy as np

from qhloc import (
    ChainParams, FockSpace, SubsystemMask, brute_force_locality, build_pt_hamiltonian,
    farthest_metric, kernel_dimension, lift_metric, lift_one_body,
)

# %% The full metric acts on each particle-number sector through minors of M.
n, gamma = 4, 0.5j
space = FockSpace(n)
m = np.asarray(farthest_metric(n, gamma))
eta = lift_metric(space, m).matrix
h = lift_one_body(space, build_pt_hamiltonian(ChainParams(n=n, m=1, gamma=gamma)).matrix).matrix
print("||eta H - H^dag eta|| =", np.linalg.norm(eta @ h - h.conj().T @ eta))
print("eta |0> =", eta[:, 0][:4], "...")

# %% Count BK-local observables directly and compare with the kernel rank.
cache = {}
for sites in ([1], [1, 2], [1, 3], [2, 3], [1, 2, 4]):
    a = SubsystemMask.of(n, sites)
    k = kernel_dimension(m, a)
    bf = brute_force_locality(space, eta, a, cache=cache)
    print(sites, "K =", k, " oracle dim =", bf.dim_local, " expected =", 2 ** (2 * k - 1) - 1 if k else 0)
