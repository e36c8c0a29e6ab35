"""Ising and SYK Hamiltonians as real-coefficient Pauli sums.

Provides matrix-free application of a Pauli sum to a statevector,
dense exact spectra (n <= 12 only), the closed-form trace of H^2, and
the log-log regression used for the Tr(H^2) scaling analysis.

The SYK construction maps 2n Majorana operators onto n qubits with the
standard Z-tail convention,

    gamma_{2k-1} = 2^{-1/2} (Z_1 ... Z_{k-1}) X_k
    gamma_{2k}   = 2^{-1/2} (Z_1 ... Z_{k-1}) Y_k

so that gamma_i^2 = 1/2, matching {gamma_i, gamma_j} = delta_ij.  Any
other mapping is unitarily equivalent; spectra are the invariant the
tests pin down.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import json
import math

import numpy as np

from .simcore import MAX_QUBITS, StateVector

DENSE_MAX_QUBITS = 12
COEFF_DROP = 1e-15


class HermiticityError(RuntimeError):
    """An expectation value came out with a non-negligible imaginary part."""


@dataclass(frozen=True)
class PauliTerm:
    """One real-coefficient Pauli string, e.g. -2.0 * 'XIZ'.

    string[q] is the single-qubit letter acting on qubit q.
    """

    coefficient: float
    string: tuple[str, ...]

    def __post_init__(self) -> None:
        if not all(p in "IXYZ" for p in self.string):
            raise ValueError(f"invalid Pauli letters in {self.string}")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @property
    def n(self) -> int:
        return len(self.string)

    def label(self) -> str:
        return "".join(self.string)


class PauliSum:
    """Hermitian operator as a merged list of distinct Pauli strings.

    Immutable after construction.  Duplicate strings are merged by
    summing coefficients; merged coefficients below 1e-15 in magnitude
    are dropped.  Application to a state is matrix-free: terms sharing
    the same X/Y bit-flip mask are fused into a single permutation plus
    diagonal factor.
    """

    def __init__(self, n: int, terms) -> None:
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"n={n} outside [1, {MAX_QUBITS}]")
        merged: dict[tuple[str, ...], float] = {}
        for t in terms:
            if t.n != n:
                raise ValueError(
                    f"term {t.label()} has {t.n} letters, expected {n}"
                )
            merged[t.string] = merged.get(t.string, 0.0) + t.coefficient
        self.n = n
        self.terms = tuple(
            PauliTerm(c, s) for s, c in merged.items() if abs(c) > COEFF_DROP
        )
        self._groups: list[tuple[int, np.ndarray]] | None = None

    def __len__(self) -> int:
        return len(self.terms)

    # --- matrix-free application ------------------------------------------

    def _compiled(self) -> list[tuple[int, np.ndarray]]:
        """Group terms by bit-flip mask.

        A string with X/Y support xmask sends |i> to
        coeff * i^{#Y} * (-1)^{popcount(i & zymask)} |i ^ xmask>,
        where zymask collects the Z and Y positions.  Terms with equal
        xmask add their diagonal factors.
        """
        if self._groups is not None:
            return self._groups
        dim = 1 << self.n
        idx = np.arange(dim)
        acc: dict[int, np.ndarray] = {}
        for t in self.terms:
            xmask = 0
            zymask = 0
            n_y = 0
            for q, p in enumerate(t.string):
                if p in ("X", "Y"):
                    xmask |= 1 << q
                if p in ("Z", "Y"):
                    zymask |= 1 << q
                if p == "Y":
                    n_y += 1
            pop = np.zeros(dim, dtype=np.int64)
            for b in range(self.n):
                if (zymask >> b) & 1:
                    pop += (idx >> b) & 1
            diag = (t.coefficient * (1j ** n_y)) * np.where(pop % 2 == 0, 1.0, -1.0)
            if xmask in acc:
                acc[xmask] = acc[xmask] + diag
            else:
                acc[xmask] = diag.astype(np.complex128)
        self._groups = sorted(acc.items())
        return self._groups

    def apply_raw(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps)
        idx = np.arange(amps.shape[0])
        for xmask, diag in self._compiled():
            if xmask == 0:
                out += diag * amps
            else:
                out[idx ^ xmask] += diag * amps
        return out

    def dense(self) -> np.ndarray:
        """Explicit 2^n x 2^n matrix; guarded, for spectra and oracles."""
        if self.n > DENSE_MAX_QUBITS:
            raise ValueError(
                f"dense matrix refused for n={self.n} > {DENSE_MAX_QUBITS}"
            )
        dim = 1 << self.n
        idx = np.arange(dim)
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for xmask, diag in self._compiled():
            mat[idx ^ xmask, idx] += diag
        return mat


@dataclass
class SpectrumInfo:
    """Exact spectrum summary: eigenvalues ascending, E0, bandwidth.

    bandwidth is max - min eigenvalue (the Delta E of the convergence
    bound).  ground_space spans the E0 eigenspace, re-orthonormalized.
    """

    eigenvalues: np.ndarray
    ground_energy: float
    bandwidth: float
    ground_space: tuple[StateVector, ...]
    degeneracy: int


@dataclass
class SykCouplings:
    """The C(2n, 4) Gaussian couplings of one SYK disorder draw."""

    n: int
    q: int
    seed: int
    entries: dict[tuple[int, int, int, int], float]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "seed": self.seed,
            "entries": [[*k, v] for k, v in sorted(self.entries.items())],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> SykCouplings:
        entries = {tuple(row[:4]): float(row[4]) for row in d["entries"]}
        return cls(int(d["n"]), int(d["q"]), int(d["seed"]), entries)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1)
            f.write("\n")

    @classmethod
    def load(cls, path) -> SykCouplings:
        with open(path, encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


# --- construction ----------------------------------------------------------


def build_ising(n: int, g: float) -> PauliSum:
    """Ferromagnetic transverse-field Ising chain with periodic boundary.

    H = -sum_i Z_i Z_{i+1 mod n} - g sum_i X_i.  At n=2 the two bond
    terms land on the same string and merge to coefficient -2.
    """
    if n < 2:
        raise ValueError(f"Ising chain needs n >= 2, got {n}")
    terms = []
    for i in range(n):
        s = ["I"] * n
        s[i] = "Z"
        s[(i + 1) % n] = "Z"
        terms.append(PauliTerm(-1.0, tuple(s)))
    for i in range(n):
        s = ["I"] * n
        s[i] = "X"
        terms.append(PauliTerm(-float(g), tuple(s)))
    return PauliSum(n, terms)


def majorana_string(i: int, n: int) -> PauliTerm:
    """Jordan-Wigner image of Majorana operator gamma_i, i in 1..2n."""
    if not 1 <= i <= 2 * n:
        raise IndexError(f"Majorana index {i} outside 1..{2 * n}")
    k = (i + 1) // 2
    s = ["I"] * n
    for q in range(k - 1):
        s[q] = "Z"
    s[k - 1] = "X" if i % 2 == 1 else "Y"
    return PauliTerm(2.0 ** -0.5, tuple(s))


_MUL = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def _mul_strings(
    c1: complex, s1: tuple[str, ...], c2: complex, s2: tuple[str, ...]
) -> tuple[complex, tuple[str, ...]]:
    phase = c1 * c2
    out = []
    for a, b in zip(s1, s2):
        if a == "I":
            out.append(b)
        elif b == "I":
            out.append(a)
        elif a == b:
            out.append("I")
        else:
            f, p = _MUL[(a, b)]
            phase *= f
            out.append(p)
    return phase, tuple(out)


def sample_syk(n: int, seed: int, J: float = 1.0) -> tuple[SykCouplings, PauliSum]:
    """One SYK q=4 disorder realization on 2n Majoranas.

    Couplings are i.i.d. Gaussian with variance J^2 3!/(2n)^3 (one draw
    per ascending 4-tuple, in lexicographic order, from a fresh
    generator seeded with `seed`).  The Hamiltonian is
    H = - sum J_{ijkl} gamma_i gamma_j gamma_k gamma_l, each 4-product
    reduced to a single Pauli string; the accumulated phase must come
    out real, which is asserted and validates the i^{q/2} prefactor.
    """
    if n < 2:
        raise ValueError(f"SYK needs n >= 2, got {n}")
    combos = list(combinations(range(1, 2 * n + 1), 4))
    sigma = abs(J) * math.sqrt(6.0) / (2 * n) ** 1.5
    values = np.random.default_rng(seed).normal(0.0, sigma, len(combos))
    couplings = SykCouplings(
        n, 4, seed, {c: float(v) for c, v in zip(combos, values)}
    )
    majo = [majorana_string(i, n) for i in range(1, 2 * n + 1)]
    terms = []
    for (i1, i2, i3, i4), v in zip(combos, values):
        c, s = 1.0 + 0.0j, ("I",) * n
        for i in (i1, i2, i3, i4):
            m = majo[i - 1]
            c, s = _mul_strings(c, s, m.coefficient, m.string)
        c *= -v
        if abs(c.imag) > 1e-12 * max(1.0, abs(c)):
            raise HermiticityError(
                f"Majorana product {(i1, i2, i3, i4)} has complex "
                f"coefficient {c}"
            )
        terms.append(PauliTerm(c.real, s))
    return couplings, PauliSum(n, terms)


def build_syk_from_couplings(couplings: SykCouplings) -> PauliSum:
    """Rebuild the Pauli sum from persisted couplings, bit-exactly."""
    n = couplings.n
    majo = [majorana_string(i, n) for i in range(1, 2 * n + 1)]
    terms = []
    for key in sorted(couplings.entries):
        v = couplings.entries[key]
        c, s = 1.0 + 0.0j, ("I",) * n
        for i in key:
            m = majo[i - 1]
            c, s = _mul_strings(c, s, m.coefficient, m.string)
        c *= -v
        terms.append(PauliTerm(c.real, s))
    return PauliSum(n, terms)


# --- evaluation ------------------------------------------------------------


def apply_hamiltonian(H: PauliSum, state: StateVector) -> StateVector:
    """H|psi> as a new StateVector; the input is untouched."""
    if H.n != state.n:
        raise ValueError(f"operator n={H.n}, state n={state.n}")
    return StateVector(state.n, H.apply_raw(state.amplitudes))


def expectation(H: PauliSum, state: StateVector) -> float:
    """Re <psi|H|psi>; the imaginary part must vanish to 1e-10."""
    if H.n != state.n:
        raise ValueError(f"operator n={H.n}, state n={state.n}")
    val = np.vdot(state.amplitudes, H.apply_raw(state.amplitudes))
    if abs(val.imag) > 1e-10:
        raise HermiticityError(
            f"expectation {val} has imaginary part above 1e-10"
        )
    return float(val.real)


def exact_spectrum(H: PauliSum, degeneracy_tol: float = 1e-9) -> SpectrumInfo:
    """Dense Hermitian eigendecomposition, n <= 12.

    The ground space collects every eigenvector whose eigenvalue lies
    within degeneracy_tol * max(1, bandwidth) of E0, re-orthonormalized
    by QR.
    """
    if H.n > DENSE_MAX_QUBITS:
        raise ValueError(
            f"exact spectrum refused for n={H.n} > {DENSE_MAX_QUBITS}"
        )
    evals, evecs = np.linalg.eigh(H.dense())
    e0 = float(evals[0])
    bandwidth = float(evals[-1] - evals[0])
    cut = e0 + degeneracy_tol * max(1.0, bandwidth)
    deg = int(np.searchsorted(evals, cut, side="right"))
    deg = max(deg, 1)
    q, _ = np.linalg.qr(evecs[:, :deg])
    ground = tuple(StateVector(H.n, q[:, j].copy()) for j in range(deg))
    return SpectrumInfo(evals, e0, bandwidth, ground, deg)


def trace_h_squared(H: PauliSum) -> float:
    """Tr(H^2) = 2^n sum coeff^2, by orthogonality of distinct strings."""
    return float((1 << H.n) * sum(t.coefficient**2 for t in H.terms))


def fit_trace_scaling(points) -> tuple[float, float]:
    """Fit Tr(H^2) = a * n^b * 2^n by least squares in log space.

    points is a sequence of (n, trace) pairs; returns (a, b).
    """
    pts = [(int(n), float(t)) for n, t in points]
    if len(pts) < 2:
        raise ValueError("fit needs at least 2 points")
    if len({n for n, _ in pts}) < 2:
        raise ValueError("fit needs at least 2 distinct n values")
    if any(t <= 0 for _, t in pts):
        raise ValueError("traces must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([t / 2.0 ** n for n, t in pts])
    b, log_a = np.polyfit(x, y, 1)
    return float(np.exp(log_a)), float(b)


def ground_space_fidelity(state: StateVector, spectrum: SpectrumInfo) -> float:
    """Sum of |<psi|phi_i>|^2 over the ground-space basis; in [0, 1]."""
    if spectrum.ground_space and spectrum.ground_space[0].n != state.n:
        raise ValueError(
            f"spectrum is for n={spectrum.ground_space[0].n}, state n={state.n}"
        )
    return float(
        sum(
            abs(np.vdot(phi.amplitudes, state.amplitudes)) ** 2
            for phi in spectrum.ground_space
        )
    )
