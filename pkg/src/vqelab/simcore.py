"""Matrix-free n-qubit statevector kernels and the layered RY/CZ ansatz.

Conventions, fixed once here and verified by the test suite:

- Qubit 0 is the least significant bit of the amplitude index: basis
  index i assigns bit b of i to qubit b.
- RY(t) = exp(-i t Y/2) acts on the target pair as
  [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]], so RY(pi)|0> = |1>.
- One ansatz layer applies RY to every qubit (qubit 0 first), then CZ
  to every pair (a, b) with a < b in lexicographic order.  CZ gates
  commute, so the order only pins down reproducibility.

Gates sweep the amplitude buffer in place; no 2^n x 2^n matrix is ever
materialized here.  Dense matrices appear only in test oracles.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

MAX_QUBITS = 14


@dataclass
class StateVector:
    """Pure state of n qubits as 2^n complex amplitudes.

    The buffer is owned by the holder: gate functions mutate it in
    place and return the same object for chaining.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError(
                f"amplitude buffer has shape {self.amplitudes.shape}, "
                f"expected ({1 << self.n},) for n={self.n}"
            )

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class ParameterVector:
    """The nL circuit angles, row-major by layer then qubit.

    The angle of (layer l, qubit q) lives at index l*n + q, both
    zero-based.  Values are unconstrained reals; 2 pi periodicity is a
    property of the energy, not of the storage.
    """

    n: int
    L: int
    angles: np.ndarray

    def __post_init__(self) -> None:
        self.angles = np.asarray(self.angles, dtype=np.float64)
        if self.angles.shape != (self.n * self.L,):
            raise ValueError(
                f"angle buffer has shape {self.angles.shape}, "
                f"expected ({self.n * self.L},) for n={self.n}, L={self.L}"
            )

    def angle_index(self, layer: int, qubit: int) -> int:
        return layer * self.n + qubit

    def copy(self) -> ParameterVector:
        return ParameterVector(self.n, self.L, self.angles.copy())


@dataclass(frozen=True)
class CircuitSpec:
    """Fixed ansatz architecture: n qubits, L layers.

    n = 1 is admitted as a degenerate case (the CZ pair set is empty);
    it is what makes the closed-form one-qubit derivative oracles in
    the differentiation tests possible.
    """

    n: int
    L: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"n={self.n} outside [1, {MAX_QUBITS}]")
        if self.L < 1:
            raise ValueError(f"L={self.L} must be >= 1")

    @property
    def num_parameters(self) -> int:
        return self.n * self.L


# --- raw kernels -----------------------------------------------------------
# These operate on bare complex128 buffers and are shared by the public
# wrappers below and by the hot loops in the differentiation module.


def _ry_inplace(amps: np.ndarray, n: int, qubit: int, angle: float) -> None:
    c = math.cos(0.5 * angle)
    s = math.sin(0.5 * angle)
    v = amps.reshape(1 << (n - qubit - 1), 2, 1 << qubit)
    a0 = v[:, 0].copy()
    v[:, 0] *= c
    v[:, 0] -= s * v[:, 1]
    v[:, 1] *= c
    v[:, 1] += s * a0


@lru_cache(maxsize=None)
def _cz_layer_mask(n: int) -> np.ndarray:
    """Diagonal of the product of CZ over all pairs: (-1)^C(popcount, 2).

    Each CZ contributes one sign per 1-pair, so the composite sign at
    basis index i counts unordered pairs of set bits.  Multiplying by
    this mask is IEEE-exact equal to applying the CZs one by one (every
    factor is +-1).
    """
    idx = np.arange(1 << n)
    pop = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pop += (idx >> b) & 1
    pairs = pop * (pop - 1) // 2
    mask = np.where(pairs % 2 == 0, 1.0, -1.0)
    mask.setflags(write=False)
    return mask


def _layer_inplace(amps: np.ndarray, n: int, layer_angles: np.ndarray) -> None:
    for q in range(n):
        _ry_inplace(amps, n, q, layer_angles[q])
    if n >= 2:
        amps *= _cz_layer_mask(n)


def _prepare_raw(n: int, L: int, angles: np.ndarray) -> np.ndarray:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    for layer in range(L):
        _layer_inplace(amps, n, angles[layer * n : (layer + 1) * n])
    return amps


# --- public operations -----------------------------------------------------


def zero_state(n: int) -> StateVector:
    """|0...0>: amplitude 1 at index 0."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n={n} outside [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def apply_ry(state: StateVector, qubit: int, angle: float) -> StateVector:
    """Rotate the target qubit by RY(angle), in place."""
    if not 0 <= qubit < state.n:
        raise IndexError(f"qubit {qubit} out of range for n={state.n}")
    _ry_inplace(state.amplitudes, state.n, qubit, angle)
    return state


def apply_cz(state: StateVector, a: int, b: int) -> StateVector:
    """Negate every amplitude whose basis index has bits a and b set."""
    if a == b:
        raise IndexError(f"CZ requires distinct qubits, got a=b={a}")
    if not (0 <= a < state.n and 0 <= b < state.n):
        raise IndexError(f"qubit pair ({a}, {b}) out of range for n={state.n}")
    idx = np.arange(1 << state.n)
    both = ((idx >> a) & (idx >> b) & 1).astype(bool)
    state.amplitudes[both] *= -1.0
    return state


def apply_layer(state: StateVector, layer_angles: np.ndarray) -> StateVector:
    """One ansatz layer: RY on every qubit, then CZ on every pair."""
    layer_angles = np.asarray(layer_angles, dtype=np.float64)
    if layer_angles.shape != (state.n,):
        raise ValueError(
            f"layer needs {state.n} angles, got shape {layer_angles.shape}"
        )
    _layer_inplace(state.amplitudes, state.n, layer_angles)
    return state


def prepare_circuit_state(spec: CircuitSpec, theta: ParameterVector) -> StateVector:
    """U_L ... U_1 |0>, layer l consuming angles [l*n, (l+1)*n)."""
    if (theta.n, theta.L) != (spec.n, spec.L):
        raise ValueError(
            f"parameters are for (n={theta.n}, L={theta.L}), "
            f"circuit is (n={spec.n}, L={spec.L})"
        )
    return StateVector(spec.n, _prepare_raw(spec.n, spec.L, theta.angles))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> with the conjugate on the first argument."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def haar_random_state(n: int, seed: int) -> StateVector:
    """Haar-random state: normalized vector of i.i.d. complex Gaussians."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n={n} outside [1, {MAX_QUBITS}]")
    rng = np.random.default_rng(seed)
    return StateVector(n, _haar_from_rng(n, rng))


def _haar_from_rng(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((2, 1 << n))
    amps = g[0] + 1j * g[1]
    return amps / np.linalg.norm(amps)


def real_sphere_state(n: int, seed: int) -> StateVector:
    """Uniform draw from the unit sphere of real-amplitude states.

    The RY/CZ circuit has real matrix entries, so it can only reach
    real amplitude vectors; this is the matching target ensemble for
    expressibility runs (a generic complex target sits at a finite
    distance floor from every real vector).
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n={n} outside [1, {MAX_QUBITS}]")
    rng = np.random.default_rng(seed)
    return StateVector(n, _real_sphere_from_rng(n, rng))


def _real_sphere_from_rng(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal(1 << n)
    return (g / np.linalg.norm(g)).astype(np.complex128)


def euclidean_distance(a: StateVector, b: StateVector) -> float:
    """Raw 2-norm of the amplitude difference; no phase alignment."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def phase_aligned_distance(a: StateVector, b: StateVector) -> float:
    """min over global phase of ||a - e^{i phi} b||, as a diagnostic.

    Equals sqrt(2 - 2|<a|b>|) for unit vectors.  Not used by the
    expressibility metric, which is defined on the raw norm.
    """
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    na = float(np.linalg.norm(a.amplitudes))
    nb = float(np.linalg.norm(b.amplitudes))
    ov = abs(np.vdot(a.amplitudes, b.amplitudes))
    return math.sqrt(max(na * na + nb * nb - 2.0 * ov, 0.0))
