"""Operator Schmidt decomposition of a metric and the local observables it allows."""

# %%
import numpy as np

from qhloc import (
    Bipartition, build_eta_max, build_eta_min, operator_schmidt, schmidt_bounds_check,
    simultaneous_reduction, solve_block_metrics,
)

# %% A metric with two Schmidt terms.
parts = Bipartition(2, 2)
dec = operator_schmidt(build_eta_min(0.1), parts)
print("schmidt number", dec.schmidt_number, " chi =", np.round(dec.coefficients, 6))
for o in solve_block_metrics(dec.side("B")):
    print("local observable on B:\n", np.round(o, 4), "\n spectrum", np.round(np.linalg.eigvals(o), 6))

# %% Two qubits per side, Schmidt number at the threshold, still admitting local observables.
parts = Bipartition(4, 4)
dec = operator_schmidt(build_eta_max(1.0, 4, 4), parts)
print(schmidt_bounds_check(dec).to_dict())

# %% The common block structure of the B factors.
red = simultaneous_reduction(dec.side("B"), seed=0)
print("blocks", red.blocks)
