"""Observer-side reconstruction: from a bit stream to a unitary description.

The outcome alphabet becomes a diagonal projection family, relative
frequencies become amplitudes, and an affine phase per outcome turns the
description into a one-tick unitary propagator. Amplitudes live only in the
state; the propagator carries unit-modulus phase factors, which is the only
convention under which it is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError

# Two-sided 95% normal quantile for the Wilson interval.
Z95 = 1.959963984540054

UNITARY_TOL = 1e-12
STEP_TOL = 1e-10


@dataclass(eq=False)
class PhaseFunctions:
    """Affine phases phi_i(t) = omega_i * t + theta_i, radians."""

    omegas: np.ndarray
    thetas: np.ndarray

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=np.float64)
        self.thetas = np.asarray(self.thetas, dtype=np.float64)
        if self.omegas.shape != self.thetas.shape or self.omegas.ndim != 1:
            raise ContractViolation("omegas and thetas must be equal-length 1-d")
        if not (np.all(np.isfinite(self.omegas)) and np.all(np.isfinite(self.thetas))):
            raise ContractViolation("phase parameters must be finite")

    @property
    def d(self) -> int:
        return self.omegas.size

    def phi(self, t: float) -> np.ndarray:
        return self.omegas * t + self.thetas


@dataclass(eq=False)
class ProjectionFamily:
    d: int
    projections: list

    def check(self, tol: float = UNITARY_TOL) -> None:
        eye = np.eye(self.d, dtype=np.complex128)
        total = np.zeros_like(eye)
        for i, e in enumerate(self.projections):
            if e.shape != (self.d, self.d):
                raise ContractViolation("projection shape mismatch")
            if np.max(np.abs(e @ e - e)) > tol:
                raise ContractViolation(f"projection {i} is not idempotent")
            if np.max(np.abs(e - e.conj().T)) > tol:
                raise ContractViolation(f"projection {i} is not self-adjoint")
            total += e
        for i, a in enumerate(self.projections):
            for j, b in enumerate(self.projections):
                if i != j and np.max(np.abs(a @ b)) > tol:
                    raise ContractViolation(f"projections {i},{j} not orthogonal")
        if np.max(np.abs(total - eye)) > tol:
            raise ContractViolation("projections do not resolve the identity")


def standard_projections(d: int) -> ProjectionFamily:
    """The diagonal family: E_i has a single 1 at (i, i). Exact by construction."""
    if d < 2:
        raise DomainError("need dimension >= 2")
    projections = []
    for i in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, i] = 1.0
        projections.append(e)
    return ProjectionFamily(d=d, projections=projections)


def validate_amplitudes(alphas, tol: float = 1e-12) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.ndim != 1 or alphas.size < 1:
        raise ContractViolation("amplitudes must be a 1-d vector")
    if abs(float(np.sum(alphas * alphas)) - 1.0) > tol:
        raise ContractViolation("amplitudes must satisfy sum(alpha^2) = 1")
    return alphas


def state_at(alphas, phases: PhaseFunctions, t: float) -> np.ndarray:
    """Component i is alpha_i * exp(-i*phi_i(t)); unit norm by construction."""
    alphas = validate_amplitudes(alphas)
    if alphas.size != phases.d:
        raise ContractViolation("amplitude/phase dimension mismatch")
    return alphas * np.exp(-1j * phases.phi(t))


def propagator_at(phases: PhaseFunctions, t: float, projections=None) -> np.ndarray:
    """One-tick propagator: sum of exp(-i*phi_i(t)) * E_i, unit-modulus
    coefficients on the projection family."""
    coeffs = np.exp(-1j * phases.phi(t))
    if projections is None:
        return np.diag(coeffs)
    fam = projections
    u = np.zeros((fam.d, fam.d), dtype=np.complex128)
    for c, e in zip(coeffs, fam.projections):
        u = u + c * e
    return u


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL):
    """(is_unitary, max deviation of u @ u_dagger from the identity)."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ContractViolation("unitarity check needs a square matrix")
    dev = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
    return dev <= tol, dev


def step(state: np.ndarray, u: np.ndarray, tol: float = STEP_TOL) -> np.ndarray:
    """Advance the state one tick. Rejects non-unitary propagators."""
    ok, dev = check_unitary(u, tol)
    if not ok:
        raise ContractViolation(f"propagator deviates from unitarity by {dev:.3e}")
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (u.shape[0],):
        raise ContractViolation("state/propagator dimension mismatch")
    if abs(np.linalg.norm(state) - 1.0) > tol:
        raise ContractViolation("state must be normalized")
    return u @ state


@dataclass(eq=False)
class BornEstimate:
    """Outcome statistics of a bit stream.

    `smoothed` is the add-one (Laplace) variant, the uniform-prior posterior
    mean; the raw frequencies and Wilson 95% intervals sit alongside it.
    """

    counts: np.ndarray
    total: int
    frequencies: np.ndarray
    wilson_low: np.ndarray
    wilson_high: np.ndarray
    smoothed: np.ndarray

    def to_dict(self) -> dict:
        return {
            "counts": [int(c) for c in self.counts],
            "total": self.total,
            "frequencies": [float(f) for f in self.frequencies],
            "wilson_low": [float(v) for v in self.wilson_low],
            "wilson_high": [float(v) for v in self.wilson_high],
            "smoothed": [float(v) for v in self.smoothed],
        }


def _stream_bits(stream) -> np.ndarray:
    bits = stream.bits if hasattr(stream, "bits") else np.asarray(stream)
    return np.asarray(bits, dtype=np.int64)


def born_estimate(stream) -> BornEstimate:
    """Counts, frequencies, and Wilson 95% intervals for a bit stream."""
    bits = _stream_bits(stream)
    n = bits.size
    if n == 0:
        raise DomainError("cannot estimate from an empty stream")
    counts = np.bincount(bits, minlength=2).astype(np.int64)
    freqs = counts / n
    z2 = Z95 * Z95
    denom = 1.0 + z2 / n
    center = (freqs + z2 / (2 * n)) / denom
    half = Z95 * np.sqrt(freqs * (1 - freqs) / n + z2 / (4 * n * n)) / denom
    return BornEstimate(
        counts=counts,
        total=int(n),
        frequencies=freqs,
        wilson_low=np.maximum(0.0, center - half),
        wilson_high=np.minimum(1.0, center + half),
        smoothed=(counts + 1) / (n + 2),
    )


def infer_amplitudes(est: BornEstimate) -> np.ndarray:
    """Square-root-of-frequency amplitudes, renormalized.

    A useful rule for the observer, not a theorem: it reproduces the stream
    statistics and nothing more.
    """
    alphas = np.sqrt(np.maximum(est.frequencies, 0.0))
    norm = float(np.linalg.norm(alphas))
    if norm == 0.0:
        raise DomainError("cannot infer amplitudes from all-zero frequencies")
    return alphas / norm


@dataclass(eq=False)
class QuantumDescription:
    """The reconstructed bundle: amplitudes plus affine phase parameters."""

    alphas: np.ndarray
    omegas: np.ndarray
    thetas: np.ndarray

    def __post_init__(self):
        self.alphas = validate_amplitudes(self.alphas)
        self.omegas = np.asarray(self.omegas, dtype=np.float64)
        self.thetas = np.asarray(self.thetas, dtype=np.float64)
        if not (self.alphas.size == self.omegas.size == self.thetas.size):
            raise ContractViolation("alphas, omegas, thetas must share length")

    @property
    def d(self) -> int:
        return self.alphas.size

    @property
    def phases(self) -> PhaseFunctions:
        return PhaseFunctions(omegas=self.omegas, thetas=self.thetas)

    def state_at(self, t: float) -> np.ndarray:
        return state_at(self.alphas, self.phases, t)

    def propagator_at(self, t: float) -> np.ndarray:
        return propagator_at(self.phases, t)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "alphas": [float(a) for a in self.alphas],
            "omegas": [float(w) for w in self.omegas],
            "thetas": [float(v) for v in self.thetas],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuantumDescription":
        desc = cls(
            alphas=np.asarray(data["alphas"], dtype=np.float64),
            omegas=np.asarray(data["omegas"], dtype=np.float64),
            thetas=np.asarray(data["thetas"], dtype=np.float64),
        )
        if "d" in data and int(data["d"]) != desc.d:
            raise ContractViolation("declared dimension disagrees with vectors")
        return desc


def matrix_to_json(m: np.ndarray) -> list:
    """Nested [re, im] pairs, row major."""
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    rows = [[complex(re, im) for re, im in row] for row in data]
    return np.asarray(rows, dtype=np.complex128)
