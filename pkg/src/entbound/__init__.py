"""Certified lower bounds on the effective entanglement an optical channel
preserves, computed from homodyne moments of two conditional coherent-state
probes and the known input overlap."""

from .bound import (
    BoundResult,
    DataInconsistentError,
    SolverFailureError,
    compile_sdp,
    min_negativity,
    overlap_scan,
)
from .channels import (
    ExactSubspace,
    InputSpec,
    LossNoiseChannel,
    ThermalSplitterChannel,
    displaced_thermal_subspace,
    initial_negativity,
    input_overlap,
    simulate_loss_noise,
    simulate_thermal_splitter,
)
from .estimation import (
    ConditionalMoments,
    DefectBounds,
    EstimationDomainError,
    OffDiagFloors,
    ProbeRecord,
    SubspaceEstimate,
    eigen_defect_bound,
    estimate,
    kappa_from_means,
    offdiag_floors,
    overlap_window_full,
    overlap_window_relaxed,
    supplementary_window,
    supplementary_window_exact,
    with_exact,
)
from .hermitian import (
    HERMITICITY_TOL,
    PSD_TOL,
    NonHermitianError,
    Spectrum,
    eig_hermitian,
    eigvals_hermitian,
    is_psd,
    negativity,
    partial_transpose_A,
    trace_norm,
)
from .projection import (
    ConvexRegion,
    DegenerateSubspaceError,
    LinearConstraint,
    OrthoBasis,
    ProjectedStateTemplate,
    assemble_constraints,
    constraint_violations,
    fix_gauge,
    polygon_regions,
)
from .solver import EqualityRow, InequalityRow, SDProblem, SDSolution, solve

__version__ = "0.1.0"
