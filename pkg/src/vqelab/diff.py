"""Exact derivatives of the circuit energy and the Euclidean loss.

Production gradients use a reverse (adjoint) sweep: one forward pass
builds |psi(theta)>, one backward pass peels the circuit layer by layer
while maintaining the bra H|psi> (or the residual psi - target), so the
full nL-component gradient costs two state evolutions instead of nL.

The parameter-shift rule is kept as an independent oracle: every gate
is an RY rotation, so dE/dk = [E(theta + (pi/2) e_k) - E(...)]/2 is
exact up to floating point, with no truncation error.  The Hessian uses
the double-shift analogue, again exact.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .hamiltonian import PauliSum, expectation
from .simcore import (
    CircuitSpec,
    ParameterVector,
    StateVector,
    _cz_layer_mask,
    _prepare_raw,
    _ry_inplace,
    prepare_circuit_state,
)

HESSIAN_MAX_PARAMETERS = 1024


class NonPositiveEigenvalueError(ValueError):
    """Basin volume requested with a non-positive Hessian eigenvalue.

    Carries the offending position (`index`, 0-based within the top-k
    list) and the eigenvalue itself.
    """

    def __init__(self, index: int, eigenvalue: float):
        super().__init__(
            f"eigenvalue {eigenvalue} at top-k position {index} is not "
            "strictly positive; choose a smaller k"
        )
        self.index = index
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class SteepSubspace:
    """Top-k Hessian eigenpairs: eigenvalues descending (signed).

    eigenvectors has shape (k, nL); row i is the unit direction paired
    with eigenvalues[i].
    """

    k: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_dims(spec: CircuitSpec, theta: ParameterVector) -> None:
    if (theta.n, theta.L) != (spec.n, spec.L):
        raise ValueError(
            f"parameters are for (n={theta.n}, L={theta.L}), "
            f"circuit is (n={spec.n}, L={spec.L})"
        )


def _reverse_sweep(
    n: int, L: int, angles: np.ndarray, bra: np.ndarray, ket: np.ndarray
) -> np.ndarray:
    """Accumulate g_k = Re <bra | dU/dtheta_k U^dag | ket> per angle.

    bra and ket enter at the end of the circuit and are consumed
    (mutated) while peeling layers off both.  The RY generator
    contributes the factor 1/2 folded into the pair expression below;
    callers scale the result.
    """
    grad = np.empty(n * L)
    mask = _cz_layer_mask(n) if n >= 2 else None
    for layer in reversed(range(L)):
        if mask is not None:
            ket *= mask
            bra *= mask
        for q in reversed(range(n)):
            half = 1 << q
            vb = bra.reshape(-1, 2, half)
            vk = ket.reshape(-1, 2, half)
            g = np.vdot(vb[:, 1], vk[:, 0]) - np.vdot(vb[:, 0], vk[:, 1])
            grad[layer * n + q] = g.real
            a = angles[layer * n + q]
            _ry_inplace(ket, n, q, -a)
            _ry_inplace(bra, n, q, -a)
    return grad


def energy_and_gradient(
    spec: CircuitSpec, H: PauliSum, theta: ParameterVector
) -> tuple[float, np.ndarray]:
    """(E(theta), dE/dtheta) in one forward plus one reverse sweep."""
    _check_dims(spec, theta)
    if H.n != spec.n:
        raise ValueError(f"operator n={H.n}, circuit n={spec.n}")
    psi = _prepare_raw(spec.n, spec.L, theta.angles)
    hpsi = H.apply_raw(psi)
    e = np.vdot(psi, hpsi)
    grad = _reverse_sweep(spec.n, spec.L, theta.angles, bra=hpsi, ket=psi)
    return float(e.real), grad


def energy_gradient(
    spec: CircuitSpec, H: PauliSum, theta: ParameterVector
) -> np.ndarray:
    """dE/dtheta by the adjoint sweep; matches the shift rule to 1e-9."""
    return energy_and_gradient(spec, H, theta)[1]


def energy_gradient_shift(
    spec: CircuitSpec, H: PauliSum, theta: ParameterVector, k: int
) -> float:
    """Single component dE/dtheta_k by the parameter-shift rule."""
    _check_dims(spec, theta)
    if not 0 <= k < spec.num_parameters:
        raise IndexError(f"component {k} outside [0, {spec.num_parameters})")
    shifted = theta.angles.copy()
    shifted[k] += math.pi / 2
    e_plus = _energy_raw(spec, H, shifted)
    shifted[k] -= math.pi
    e_minus = _energy_raw(spec, H, shifted)
    return (e_plus - e_minus) / 2.0


def _energy_raw(spec: CircuitSpec, H: PauliSum, angles: np.ndarray) -> float:
    psi = _prepare_raw(spec.n, spec.L, angles)
    return float(np.vdot(psi, H.apply_raw(psi)).real)


def euclidean_loss_and_gradient(
    spec: CircuitSpec, theta: ParameterVector, target: StateVector
) -> tuple[float, np.ndarray]:
    """D(theta) = ||psi(theta) - target|| and its gradient.

    dD/dk = Re <d_k psi | psi - target> / D; at the cusp D = 0 the
    gradient is defined as the zero vector so optimizers idle there.
    """
    sq, sq_grad = squared_euclidean_loss_and_gradient(spec, theta, target)
    d = math.sqrt(max(sq, 0.0))
    if d == 0.0:
        return 0.0, np.zeros(spec.num_parameters)
    return d, sq_grad / (2.0 * d)


def squared_euclidean_loss_and_gradient(
    spec: CircuitSpec, theta: ParameterVector, target: StateVector
) -> tuple[float, np.ndarray]:
    """D^2 and its gradient 2 Re <d_k psi | psi - target>.

    Smooth everywhere, unlike D itself; this is what expressibility
    runs feed to the optimizer (min over a trajectory of D^2 is the
    square of the min of D, so the reported metric is unchanged).
    """
    _check_dims(spec, theta)
    if target.n != spec.n:
        raise ValueError(f"target n={target.n}, circuit n={spec.n}")
    psi = _prepare_raw(spec.n, spec.L, theta.angles)
    residual = psi - target.amplitudes
    sq = float(np.vdot(residual, residual).real)
    # the sweep already yields the full 2 Re <d_k psi | residual>
    grad = _reverse_sweep(spec.n, spec.L, theta.angles, bra=residual, ket=psi)
    return sq, grad


def hessian(spec: CircuitSpec, H: PauliSum, theta: ParameterVector) -> np.ndarray:
    """Exact Hessian by the double parameter-shift rule.

    H_jk = [E(+s_j+s_k) - E(+s_j-s_k) - E(-s_j+s_k) + E(-s_j-s_k)] / 4
    with s = (pi/2) e; symmetric by construction.  Cost is about
    2 (nL)^2 energy evaluations, guarded at nL <= 1024.
    """
    _check_dims(spec, theta)
    p = spec.num_parameters
    if p > HESSIAN_MAX_PARAMETERS:
        raise ValueError(
            f"Hessian refused for nL={p} > {HESSIAN_MAX_PARAMETERS}"
        )
    s = math.pi / 2
    e0 = _energy_raw(spec, H, theta.angles)
    hess = np.empty((p, p))
    for j in range(p):
        a = theta.angles.copy()
        a[j] += 2 * s
        e_pp = _energy_raw(spec, H, a)
        a[j] -= 4 * s
        e_mm = _energy_raw(spec, H, a)
        hess[j, j] = (e_pp - 2.0 * e0 + e_mm) / 4.0
    for j in range(p):
        for k in range(j + 1, p):
            a = theta.angles.copy()
            a[j] += s
            a[k] += s
            e_pp = _energy_raw(spec, H, a)
            a[k] -= 2 * s
            e_pm = _energy_raw(spec, H, a)
            a[j] -= 2 * s
            e_mm = _energy_raw(spec, H, a)
            a[k] += 2 * s
            e_mp = _energy_raw(spec, H, a)
            v = (e_pp - e_pm - e_mp + e_mm) / 4.0
            hess[j, k] = v
            hess[k, j] = v
    return hess


def top_k_eigensystem(hess: np.ndarray, k: int) -> SteepSubspace:
    """Top-k eigenpairs of a symmetric matrix, descending by value.

    Ranking is by signed eigenvalue, not magnitude: the steep subspace
    is the locally most positively curved one.
    """
    hess = np.asarray(hess, dtype=np.float64)
    p = hess.shape[0]
    if hess.shape != (p, p):
        raise ValueError(f"expected a square matrix, got {hess.shape}")
    if not 1 <= k <= p:
        raise ValueError(f"k={k} outside [1, {p}]")
    asym = float(np.max(np.abs(hess - hess.T))) if p else 0.0
    if asym > 1e-8:
        raise ValueError(f"matrix asymmetry {asym} exceeds 1e-8")
    evals, evecs = np.linalg.eigh((hess + hess.T) / 2.0)
    order = np.argsort(evals)[::-1][:k]
    return SteepSubspace(
        k=k,
        eigenvalues=evals[order].copy(),
        eigenvectors=evecs[:, order].T.copy(),
    )


def basin_inverse_volume(subspace: SteepSubspace) -> float:
    """sum_i log lambda_i over the top-k eigenvalues.

    Only defined when all of them are strictly positive; a violation
    raises NonPositiveEigenvalueError carrying the offending index.
    """
    for i, lam in enumerate(subspace.eigenvalues):
        if lam <= 0.0:
            raise NonPositiveEigenvalueError(i, float(lam))
    return float(np.sum(np.log(subspace.eigenvalues)))


def projected_distance(theta_t, theta_star, subspace: SteepSubspace) -> float:
    """||P (theta_t - theta_star)|| with P the projector onto the subspace.

    Accepts ParameterVector or plain arrays.  Differences are taken on
    raw parameter values, never wrapped modulo 2 pi: optimization
    trajectories live on the real line.
    """
    theta_t = np.asarray(getattr(theta_t, "angles", theta_t), dtype=np.float64)
    theta_star = np.asarray(
        getattr(theta_star, "angles", theta_star), dtype=np.float64
    )
    if theta_t.shape != theta_star.shape:
        raise ValueError(
            f"shape mismatch: {theta_t.shape} vs {theta_star.shape}"
        )
    if subspace.eigenvectors.shape[1] != theta_t.shape[0]:
        raise ValueError(
            f"subspace is over {subspace.eigenvectors.shape[1]} parameters, "
            f"points have {theta_t.shape[0]}"
        )
    comps = subspace.eigenvectors @ (theta_t - theta_star)
    return float(np.linalg.norm(comps))


def energy(spec: CircuitSpec, H: PauliSum, theta: ParameterVector) -> float:
    """E(theta) = <psi(theta)|H|psi(theta)>, with the Hermiticity check."""
    _check_dims(spec, theta)
    return expectation(H, prepare_circuit_state(spec, theta))


def make_energy_loss(spec: CircuitSpec, H: PauliSum):
    """Bind (spec, H) into a loss_and_grad callable on bare angle arrays."""
    if H.n != spec.n:
        raise ValueError(f"operator n={H.n}, circuit n={spec.n}")
    n, L = spec.n, spec.L

    def loss_and_grad(angles: np.ndarray) -> tuple[float, np.ndarray]:
        psi = _prepare_raw(n, L, angles)
        hpsi = H.apply_raw(psi)
        e = float(np.vdot(psi, hpsi).real)
        return e, _reverse_sweep(n, L, angles, bra=hpsi, ket=psi)

    return loss_and_grad


def make_state_matching_loss(spec: CircuitSpec, target: StateVector):
    """Bind a target state into a D^2 loss_and_grad on bare angle arrays."""
    if target.n != spec.n:
        raise ValueError(f"target n={target.n}, circuit n={spec.n}")
    n, L = spec.n, spec.L
    ref = target.amplitudes.copy()

    def loss_and_grad(angles: np.ndarray) -> tuple[float, np.ndarray]:
        psi = _prepare_raw(n, L, angles)
        residual = psi - ref
        sq = float(np.vdot(residual, residual).real)
        grad = _reverse_sweep(n, L, angles, bra=residual, ket=psi)
        return sq, 2.0 * grad

    return loss_and_grad
