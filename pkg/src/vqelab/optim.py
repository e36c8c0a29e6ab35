"""Adam with exponential learning-rate decay, and the minimize loop.

Defaults follow the experiment protocol: (alpha, beta1, beta2) =
(0.05, 0.9, 0.999), 500 parameter updates, and the schedule
alpha_tau = alpha0 * c^(tau/500) with c = 0.3.  The exponent is
real-valued (no floor): the schedule is a smooth decay.

The loop records loss, gradient norm and learning rate at every step
tau = 0..steps (steps updates, steps+1 evaluations) and keeps the best
point seen anywhere on the trajectory, including tau = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DivergenceError(RuntimeError):
    """The loss or gradient turned non-finite during minimization."""

    def __init__(self, tau: int, loss: float, grad_norm: float):
        super().__init__(
            f"non-finite value at tau={tau}: loss={loss}, "
            f"grad norm={grad_norm}"
        )
        self.tau = tau
        self.loss = loss
        self.grad_norm = grad_norm


@dataclass(frozen=True)
class ExponentialDecay:
    """alpha_tau = alpha0 * c^(tau/period)."""

    alpha0: float
    c: float
    period: int = 500

    def __post_init__(self) -> None:
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if not 0 < self.c <= 1:
            raise ValueError("c must lie in (0, 1]")
        if self.period < 1:
            raise ValueError("period must be >= 1")


@dataclass(frozen=True)
class Constant:
    """alpha_tau = alpha for every tau."""

    alpha: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class AdamConfig:
    alpha: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    steps: int = 500
    schedule: ExponentialDecay | Constant | None = None

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1, beta2 must lie in [0, 1)")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    def resolved_schedule(self) -> ExponentialDecay | Constant:
        if self.schedule is None:
            return Constant(self.alpha)
        return self.schedule

    @classmethod
    def protocol_default(cls, steps: int = 500) -> AdamConfig:
        """The standard run configuration: decaying schedule, c = 0.3."""
        return cls(steps=steps, schedule=ExponentialDecay(0.05, 0.3, 500))


def lr_at(config: AdamConfig, tau: int) -> float:
    """Learning rate applied at update tau (tau >= 0)."""
    if tau < 0:
        raise ValueError(f"tau={tau} must be >= 0")
    sched = config.resolved_schedule()
    if isinstance(sched, Constant):
        return sched.alpha
    return sched.alpha0 * sched.c ** (tau / sched.period)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, dim: int) -> AdamState:
        return cls(np.zeros(dim), np.zeros(dim), 0)


def adam_step(
    state: AdamState,
    grad: np.ndarray,
    theta: np.ndarray,
    config: AdamConfig,
    tau: int,
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; t = tau + 1.  Pure function."""
    if grad.shape != theta.shape or grad.shape != state.m.shape:
        raise ValueError(
            f"shape mismatch: grad {grad.shape}, theta {theta.shape}, "
            f"state {state.m.shape}"
        )
    t = tau + 1
    m = config.beta1 * state.m + (1 - config.beta1) * grad
    v = config.beta2 * state.v + (1 - config.beta2) * grad**2
    m_hat = m / (1 - config.beta1**t)
    v_hat = v / (1 - config.beta2**t)
    lr = lr_at(config, tau)
    theta_new = theta - lr * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return AdamState(m, v, t), theta_new


@dataclass(frozen=True)
class StepRecord:
    tau: int
    loss: float
    grad_norm: float
    lr: float


@dataclass
class Trajectory:
    """Per-step record of one minimization run.

    theta_snapshots maps tau to a copy of theta at that step; it always
    contains tau = 0, every multiple of the snapshot stride, the final
    step, and tau_best (so best-point analysis is exact even with a
    coarse stride).
    """

    steps: list[StepRecord] = field(default_factory=list)
    theta_snapshots: dict[int, np.ndarray] = field(default_factory=dict)
    theta_best: np.ndarray | None = None
    loss_best: float = float("inf")
    tau_best: int = -1

    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.steps])


def minimize(
    loss_and_grad,
    theta0: np.ndarray,
    config: AdamConfig,
    snapshot_stride: int = 10,
) -> Trajectory:
    """Run config.steps Adam updates from theta0.

    loss_and_grad(theta) -> (float, array) must be deterministic.
    Evaluations happen at tau = 0..steps; the update with lr_at(tau)
    moves theta_tau to theta_{tau+1}.  theta_best is the argmin over
    every evaluated step.  Non-finite loss or gradient aborts with
    DivergenceError carrying tau.
    """
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be >= 1")
    theta = np.array(theta0, dtype=np.float64, copy=True)
    traj = Trajectory()
    state = AdamState.fresh(theta.shape[0])
    for tau in range(config.steps + 1):
        loss, grad = loss_and_grad(theta)
        loss = float(loss)
        grad_norm = float(np.linalg.norm(grad))
        if not (np.isfinite(loss) and np.isfinite(grad_norm)):
            raise DivergenceError(tau, loss, grad_norm)
        traj.steps.append(StepRecord(tau, loss, grad_norm, lr_at(config, tau)))
        if tau % snapshot_stride == 0 or tau == config.steps:
            traj.theta_snapshots[tau] = theta.copy()
        if loss < traj.loss_best:
            traj.loss_best = loss
            traj.tau_best = tau
            traj.theta_best = theta.copy()
        if tau < config.steps:
            state, theta = adam_step(state, grad, theta, config, tau)
    if traj.tau_best not in traj.theta_snapshots:
        traj.theta_snapshots[traj.tau_best] = traj.theta_best.copy()
    return traj
