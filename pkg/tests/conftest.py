"""Shared dense-matrix and finite-difference oracles.

Everything here is an independent reimplementation against which the
matrix-free production code is checked: explicit Kronecker products
with qubit 0 as the least significant bit (an operator A on qubit q of
n is I_{2^(n-q-1)} (x) A (x) I_{2^q}), naive circuit assembly, dense
Pauli strings, and central finite differences.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2)
PAULI = {
    "I": I2,
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


def kron_lsb(ops):
    """Kronecker product of per-qubit 2x2 ops, ops[0] on qubit 0 (LSB)."""
    return reduce(np.kron, reversed(list(ops)))


def dense_on_qubit(n: int, q: int, op: np.ndarray) -> np.ndarray:
    return kron_lsb([op if i == q else I2 for i in range(n)])


def dense_ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def dense_cz(n: int, a: int, b: int) -> np.ndarray:
    dim = 1 << n
    d = np.ones(dim)
    for i in range(dim):
        if (i >> a) & 1 and (i >> b) & 1:
            d[i] = -1.0
    return np.diag(d)


def dense_layer(n: int, angles) -> np.ndarray:
    u = np.eye(1 << n, dtype=complex)
    for q in range(n):
        u = dense_on_qubit(n, q, dense_ry(angles[q])) @ u
    for a in range(n):
        for b in range(a + 1, n):
            u = dense_cz(n, a, b) @ u
    return u


def dense_prepare(n: int, L: int, angles) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    for layer in range(L):
        psi = dense_layer(n, angles[layer * n : (layer + 1) * n]) @ psi
    return psi


def dense_pauli_term(term) -> np.ndarray:
    return term.coefficient * kron_lsb([PAULI[p] for p in term.string])


def dense_pauli_sum(H) -> np.ndarray:
    dim = 1 << H.n
    mat = np.zeros((dim, dim), dtype=complex)
    for t in H.terms:
        mat = mat + dense_pauli_term(t)
    return mat


def central_fd(f, x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for k in range(x.shape[0]):
        xp = x.copy()
        xp[k] += h
        xm = x.copy()
        xm[k] -= h
        g[k] = (f(xp) - f(xm)) / (2 * h)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
