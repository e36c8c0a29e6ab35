"""Experiment drivers: gradient statistics, VQE runs and ensembles,
landscape analysis, and expressibility.

Seed discipline: every stochastic draw derives from a master seed
through numpy SeedSequence spawn keys (stream constant, index), so
whole experiments replay bit-identically and are independent of any
execution order.  The streams are:

    1  barren-plateau parameter draws        (master_seed, sample index)
    2  single-run VQE initial parameters     (run seed, 0)
    3  ensemble per-run seeds                (master_seed, run index)
    4  fresh SYK disorder seeds              (master_seed, run index)
    5  expressibility target states          (master_seed, target index)
    6  expressibility initial parameters     (master_seed, target index)

Worker count: the VQELAB_THREADS environment variable caps thread-pool
width for ensemble/sample maps (0 or unset = auto).  Auto currently
resolves to serial execution: the kernels are GIL-bound numpy micro-ops
at desk scale, so threads only pay off when requested explicitly.
Results never depend on the worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import math
import os

import numpy as np

from .diff import (
    SteepSubspace,
    _energy_raw,
    basin_inverse_volume,
    hessian,
    make_energy_loss,
    make_state_matching_loss,
    projected_distance,
    top_k_eigensystem,
)
from .hamiltonian import (
    PauliSum,
    build_ising,
    exact_spectrum,
    ground_space_fidelity,
    sample_syk,
    trace_h_squared,
)
from .optim import AdamConfig, Trajectory, minimize
from .simcore import (
    CircuitSpec,
    StateVector,
    _haar_from_rng,
    _prepare_raw,
    _real_sphere_from_rng,
)

STREAM_BP_THETA = 1
STREAM_VQE_INIT = 2
STREAM_ENSEMBLE = 3
STREAM_DISORDER = 4
STREAM_TARGET = 5
STREAM_EXPRESS_INIT = 6


def _rng(master_seed: int, stream: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream, index))
    return np.random.default_rng(ss)


def _child_seed(master_seed: int, stream: int, index: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream, index))
    return int(ss.generate_state(1)[0])


def worker_count() -> int:
    """Resolved VQELAB_THREADS; 0 or unset means auto (currently 1)."""
    raw = os.environ.get("VQELAB_THREADS", "0")
    try:
        k = int(raw)
    except ValueError as exc:
        raise ValueError(f"VQELAB_THREADS={raw!r} is not an integer") from exc
    if k < 0:
        raise ValueError(f"VQELAB_THREADS={k} must be >= 0")
    return k if k > 0 else 1


def _pool_map(fn, items: list) -> list:
    k = worker_count()
    if k <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ModelSpec:
    """Which Hamiltonian to build: 'ising' (field g) or 'syk' (disorder seed)."""

    kind: str
    g: float = 2.0
    seed: int = 0
    J: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("ising", "syk"):
            raise ValueError(f"unknown model kind {self.kind!r}")

    @property
    def tag(self) -> str:
        if self.kind == "ising":
            return f"ising(g={self.g:g})"
        return f"syk(seed={self.seed})"

    def build(self, n: int) -> PauliSum:
        if self.kind == "ising":
            return build_ising(n, self.g)
        return sample_syk(n, self.seed, self.J)[1]


def _resolve_model(model, n: int) -> tuple[PauliSum, str]:
    if isinstance(model, ModelSpec):
        return model.build(n), model.tag
    if isinstance(model, PauliSum):
        if model.n != n:
            raise ValueError(f"Hamiltonian is for n={model.n}, requested n={n}")
        return model, "custom"
    raise TypeError(f"model must be ModelSpec or PauliSum, got {type(model)}")


# --- barren-plateau statistics ----------------------------------------------


@dataclass
class GradientStats:
    """Sample statistics of dE/dtheta over uniform random parameters.

    per_component_variance uses the unbiased (ddof=1) estimator; the
    norm quartiles are numpy linear-interpolation percentiles.  bound
    is 4 Tr(H^2) / 2^(2n); violations lists the components whose sample
    variance exceeds bound * (1 + 5/sqrt(S)), which flags a problem
    without aborting the run.
    """

    n: int
    L: int
    samples: int
    per_component_variance: np.ndarray
    variance_mean: float
    variance_min: float
    variance_max: float
    norm_mean: float
    norm_q1: float
    norm_q3: float
    bound: float
    violations: tuple[int, ...]


def run_barren_plateau(
    model, n: int, L: int, samples: int, master_seed: int = 0
) -> GradientStats:
    """Collect `samples` exact gradients at i.i.d. U(0, 2pi) parameters."""
    if samples < 2:
        raise ValueError("variance needs at least 2 samples")
    H, _ = _resolve_model(model, n)
    spec = CircuitSpec(n, L)
    loss = make_energy_loss(spec, H)
    dim = spec.num_parameters

    def one(s: int) -> np.ndarray:
        theta = _rng(master_seed, STREAM_BP_THETA, s).uniform(0, 2 * math.pi, dim)
        return loss(theta)[1]

    grads = np.array(_pool_map(one, list(range(samples))))
    variances = grads.var(axis=0, ddof=1)
    norms = np.linalg.norm(grads, axis=1)
    q1, q3 = np.percentile(norms, [25, 75])
    bound = 4.0 * trace_h_squared(H) / 4.0**n
    slack = bound * (1.0 + 5.0 / math.sqrt(samples))
    violations = tuple(int(i) for i in np.nonzero(variances > slack)[0])
    return GradientStats(
        n=n,
        L=L,
        samples=samples,
        per_component_variance=variances,
        variance_mean=float(variances.mean()),
        variance_min=float(variances.min()),
        variance_max=float(variances.max()),
        norm_mean=float(norms.mean()),
        norm_q1=float(q1),
        norm_q3=float(q3),
        bound=bound,
        violations=violations,
    )


def estimate_growth_rate(stats_by_L) -> float:
    """Slope of log(norm_mean) against log(L).

    Callers supply depths past variance saturation; with saturated
    per-component variance the norm grows like L^(1/2), so the slope
    estimates that exponent.
    """
    stats = list(stats_by_L)
    if len(stats) < 3:
        raise ValueError("growth-rate fit needs at least 3 depths")
    if len({s.L for s in stats}) < len(stats):
        raise ValueError("depths must be distinct")
    x = np.log([s.L for s in stats])
    y = np.log([s.norm_mean for s in stats])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# --- VQE runs ---------------------------------------------------------------


@dataclass
class VqeRunRecord:
    """One VQE optimization against an exactly diagonalized Hamiltonian.

    final_error = E(theta_best) - E0, in energy units.  fidelity_series
    samples the ground-space fidelity at every recorded snapshot;
    error_bound_met is |final_error| <= 1e-5 * bandwidth.
    """

    model: object
    model_tag: str
    n: int
    L: int
    seed: int
    trajectory: Trajectory
    ground_energy: float
    bandwidth: float
    final_error: float
    fidelity_series: tuple[tuple[int, float], ...]
    fidelity_at_best: float
    error_bound_met: bool


ERROR_BOUND_FACTOR = 1e-5


def run_vqe(
    model,
    n: int,
    L: int,
    adam: AdamConfig | None = None,
    seed: int = 0,
    fidelity_stride: int = 5,
) -> VqeRunRecord:
    """One optimization run from U(0, 2pi) initial parameters.

    Snapshots are taken every fidelity_stride steps (and at tau_best),
    and the ground-space fidelity is evaluated at each snapshot.
    """
    if adam is None:
        adam = AdamConfig.protocol_default()
    H, tag = _resolve_model(model, n)
    spec = CircuitSpec(n, L)
    spectrum = exact_spectrum(H)
    theta0 = _rng(seed, STREAM_VQE_INIT, 0).uniform(0, 2 * math.pi, spec.num_parameters)
    traj = minimize(make_energy_loss(spec, H), theta0, adam, snapshot_stride=fidelity_stride)
    e0 = spectrum.ground_energy
    fid = []
    for tau in sorted(traj.theta_snapshots):
        psi = StateVector(n, _prepare_raw(n, L, traj.theta_snapshots[tau]))
        fid.append((tau, ground_space_fidelity(psi, spectrum)))
    fidelity_at_best = dict(fid)[traj.tau_best]
    final_error = traj.loss_best - e0
    return VqeRunRecord(
        model=model,
        model_tag=tag,
        n=n,
        L=L,
        seed=seed,
        trajectory=traj,
        ground_energy=e0,
        bandwidth=spectrum.bandwidth,
        final_error=final_error,
        fidelity_series=tuple(fid),
        fidelity_at_best=fidelity_at_best,
        error_bound_met=abs(final_error) <= ERROR_BOUND_FACTOR * spectrum.bandwidth,
    )


@dataclass
class EnsembleResult:
    """Sequence of VqeRunRecord plus non-fatal per-run failures.

    Indexing and iteration expose the successful records, ordered by
    run index; failures holds (run_index, repr(exception)) pairs.
    """

    records: tuple[VqeRunRecord, ...]
    failures: tuple[tuple[int, str], ...]

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __iter__(self):
        return iter(self.records)


def run_vqe_ensemble(
    model,
    n: int,
    L: int,
    runs: int,
    adam: AdamConfig | None = None,
    master_seed: int = 0,
    fresh_disorder: bool = False,
    fidelity_stride: int = 5,
) -> EnsembleResult:
    """Independent VQE runs with per-run derived seeds.

    SYK ensembles keep the disorder fixed across runs by default (only
    the initialization varies); fresh_disorder=True redraws couplings
    per run from stream 4 for disorder-averaged studies.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")

    def one(run_id: int):
        run_seed = _child_seed(master_seed, STREAM_ENSEMBLE, run_id)
        m = model
        if fresh_disorder:
            if not (isinstance(m, ModelSpec) and m.kind == "syk"):
                raise ValueError("fresh_disorder applies only to syk models")
            m = replace(m, seed=_child_seed(master_seed, STREAM_DISORDER, run_id))
        try:
            return run_id, run_vqe(m, n, L, adam, run_seed, fidelity_stride), None
        except Exception as exc:  # noqa: BLE001 - ensemble isolates run failures
            return run_id, None, repr(exc)

    out = _pool_map(one, list(range(runs)))
    records = tuple(rec for _, rec, err in out if err is None)
    failures = tuple((rid, err) for rid, _, err in out if err is not None)
    return EnsembleResult(records, failures)


# --- landscape analysis ------------------------------------------------------


@dataclass
class LandscapeAnalysis:
    """Hessian structure at theta_best plus the projected trajectory.

    rows holds (tau, projected_distance, energy_error) for every theta
    snapshot of the run, ascending in tau.  basin_log_inverse_volume is
    None when any of the top-k eigenvalues is non-positive.
    """

    k: int
    subspace: SteepSubspace
    basin_log_inverse_volume: float | None
    rows: tuple[tuple[int, float, float], ...]


def run_trajectory_analysis(record: VqeRunRecord, k: int = 100) -> LandscapeAnalysis:
    """Top-k Hessian analysis of a finished run; k is clipped to nL."""
    H, _ = _resolve_model(record.model, record.n)
    spec = CircuitSpec(record.n, record.L)
    traj = record.trajectory
    if not traj.theta_snapshots:
        raise ValueError("trajectory has no snapshots to analyze")
    theta_star = traj.theta_best
    k_eff = min(k, spec.num_parameters)
    sub = top_k_eigensystem(hessian(spec, H, _as_pv(spec, theta_star)), k_eff)
    try:
        vol = basin_inverse_volume(sub)
    except ValueError:
        vol = None
    rows = []
    for tau in sorted(traj.theta_snapshots):
        th = traj.theta_snapshots[tau]
        dist = projected_distance(th, theta_star, sub)
        err = _energy_raw(spec, H, th) - record.ground_energy
        rows.append((tau, dist, err))
    return LandscapeAnalysis(k_eff, sub, vol, tuple(rows))


def _as_pv(spec: CircuitSpec, angles: np.ndarray):
    from .simcore import ParameterVector

    return ParameterVector(spec.n, spec.L, angles)


# --- expressibility -----------------------------------------------------------


@dataclass
class ExpressibilityResult:
    """Mean over targets of the minimum trajectory distance.

    epsilon_m averages per-target minima of D = ||psi(theta) - phi||;
    normalized divides by 2^n, the number of state components.
    """

    n: int
    L: int
    m: int
    per_target_min_distance: np.ndarray
    epsilon_m: float
    normalized: float
    complex_targets: bool


def run_expressibility(
    n: int,
    L: int,
    m: int = 10,
    adam: AdamConfig | None = None,
    master_seed: int = 0,
    complex_targets: bool = False,
) -> ExpressibilityResult:
    """Minimize the state distance to m random targets, 500 steps each.

    Targets default to the uniform real-sphere ensemble: the RY/CZ
    circuit produces real amplitude vectors only, so real targets are
    the ones the distance can actually be driven to zero on.  Passing
    complex_targets=True draws Haar (complex Gaussian) targets instead;
    a generic complex target keeps every real vector at distance of
    order sqrt(2 - sqrt(2)), which dominates epsilon_m.

    Internally each target is fitted by minimizing D^2, which is smooth
    at the optimum; the reported per-target value is the minimum D over
    the trajectory (the square root of the best D^2, identical to
    minimizing D directly since sqrt is monotone).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if adam is None:
        adam = AdamConfig.protocol_default()
    spec = CircuitSpec(n, L)

    def one(i: int) -> float:
        t_rng = _rng(master_seed, STREAM_TARGET, i)
        amps = _haar_from_rng(n, t_rng) if complex_targets else _real_sphere_from_rng(n, t_rng)
        target = StateVector(n, amps)
        theta0 = _rng(master_seed, STREAM_EXPRESS_INIT, i).uniform(
            0, 2 * math.pi, spec.num_parameters
        )
        traj = minimize(
            make_state_matching_loss(spec, target),
            theta0,
            adam,
            snapshot_stride=max(adam.steps, 1),
        )
        return math.sqrt(max(traj.loss_best, 0.0))

    dists = np.array(_pool_map(one, list(range(m))))
    eps = float(dists.mean())
    return ExpressibilityResult(
        n=n,
        L=L,
        m=m,
        per_target_min_distance=dists,
        epsilon_m=eps,
        normalized=eps / 2.0**n,
        complex_targets=complex_targets,
    )
