"""vqelab: statevector VQE laboratory for layered RY/CZ circuits.

Simulation of the all-pairs-entangling variational ansatz, Ising and
SYK Hamiltonians, exact adjoint/parameter-shift derivatives, Adam
optimization with learning-rate decay, and the experiment drivers for
gradient statistics, convergence ensembles, landscape analysis and
expressibility.  The `vqelab` command exposes the experiments and
persists CSV/JSON/SVG artifacts.
"""

__version__ = "0.1.0"

from .simcore import (
    CircuitSpec,
    ParameterVector,
    StateVector,
    apply_cz,
    apply_layer,
    apply_ry,
    euclidean_distance,
    haar_random_state,
    inner_product,
    phase_aligned_distance,
    prepare_circuit_state,
    real_sphere_state,
    zero_state,
)
from .hamiltonian import (
    HermiticityError,
    PauliSum,
    PauliTerm,
    SpectrumInfo,
    SykCouplings,
    apply_hamiltonian,
    build_ising,
    build_syk_from_couplings,
    exact_spectrum,
    expectation,
    fit_trace_scaling,
    ground_space_fidelity,
    majorana_string,
    sample_syk,
    trace_h_squared,
)
from .diff import (
    NonPositiveEigenvalueError,
    SteepSubspace,
    basin_inverse_volume,
    energy,
    energy_and_gradient,
    energy_gradient,
    energy_gradient_shift,
    euclidean_loss_and_gradient,
    hessian,
    make_energy_loss,
    make_state_matching_loss,
    projected_distance,
    squared_euclidean_loss_and_gradient,
    top_k_eigensystem,
)
from .optim import (
    AdamConfig,
    AdamState,
    Constant,
    DivergenceError,
    ExponentialDecay,
    StepRecord,
    Trajectory,
    adam_step,
    lr_at,
    minimize,
)
from .experiments import (
    EnsembleResult,
    ExpressibilityResult,
    GradientStats,
    LandscapeAnalysis,
    ModelSpec,
    VqeRunRecord,
    estimate_growth_rate,
    run_barren_plateau,
    run_expressibility,
    run_trajectory_analysis,
    run_vqe,
    run_vqe_ensemble,
    worker_count,
)
