"""Local observables in quasi-Hermitian lattice and bipartite quantum systems."""

from .errors import (
    ModelDomainError,
    NoMetricError,
    ParameterError,
    PreconditionError,
    QHLocError,
    ReductionError,
    ScaleCapError,
)
from .fock import (
    FockOperator,
    FockSpace,
    annihilation,
    bk_local_basis,
    brute_force_locality,
    creation,
    expectation,
    lift_metric,
    lift_one_body,
    local_state,
    number_operator,
    parity_operator,
    pt_check,
    smeared,
)
from .kernel_locality import (
    LocalityReport,
    LocalObservableBasis,
    associated_involution,
    is_extensively_local,
    kernel_certificate,
    kernel_dimension,
    local_observable,
    observable_generators,
    predict_conds,
    predict_involution,
    predict_parity,
    predict_unit_disk,
    scan_subsystems,
)
from .models import (
    ChainParams,
    FirstQuantizedHamiltonian,
    ReducedMetric,
    build_pt_hamiltonian,
    build_xx_hamiltonian,
    farthest_metric,
    gauge_unitary,
    metric_from_spectrum,
    nearest_metric,
    strip_phases,
)
from .schmidt import (
    Bipartition,
    SchmidtDecomposition,
    build_eta_max,
    build_eta_min,
    direct_local_solutions,
    operator_schmidt,
    schmidt_bounds_check,
    simultaneous_reduction,
    solve_block_metrics,
)
from .spectral import (
    SpectrumReport,
    check_pt_metric,
    eigen_report,
    positive_definiteness,
    pt_phase,
    pt_phase_scan,
    quasi_hermiticity_residual,
    similarity_hermitize,
)
from .subsystems import SubsystemMask, connectivity

__version__ = "0.1.0"
