"""Truncated Fock-space vectors and coherent-state primitives.

Conventions: dimensionless quadratures with x = (a + a†)/√2, so the
oscillator eigenfunctions are psi_n(x) = pi^(-1/4) (2^n n!)^(-1/2) H_n(x)
exp(-x²/2) and the rotated-quadrature eigenstate overlaps a coherent state
|alpha⟩ as

    ⟨x_theta|alpha⟩ = pi^(-1/4) exp(-|alpha|²/2)
                      exp(-x²/2 + √2 e^(-i theta) x alpha - alpha² e^(-2i theta)/2).

All exponentials are evaluated from a single combined exponent so the
formulas stay finite for arbitrarily large |alpha| (the separate factors
would under/overflow already around |alpha| ≈ 27).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, TailTooHeavy

DEFAULT_N_MAX = 64
TAIL_TOL = 1e-10
TAIL_WINDOW = 5

_PI_QUARTER = math.pi ** (-0.25)


@dataclass(frozen=True)
class FockVector:
    """State vector in the photon-number basis, truncated at n_max."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return FockVector(self.coeffs / n)

    def tail_mass(self, window: int = TAIL_WINDOW) -> float:
        """Probability mass in the top `window` Fock levels (n > n_max - window)."""
        w = min(window, self.coeffs.size)
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(np.abs(self.coeffs[-w:]) ** 2)) / total

    def has_converged_tail(self, tol: float = TAIL_TOL) -> bool:
        return self.tail_mass() < tol

    def inner(self, other: "FockVector") -> complex:
        """⟨self|other⟩; the shorter vector is zero-padded."""
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return complex(np.vdot(a, b))

    def expected_photon_number(self) -> float:
        p = np.abs(self.coeffs) ** 2
        return float(np.sum(p * np.arange(p.size)) / np.sum(p))


def sqrt_factorial(n: int) -> float:
    """√(n!), via a running product below n = 150 and lgamma above."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > 150:
        return math.exp(0.5 * math.lgamma(n + 1))
    out = 1.0
    for k in range(2, n + 1):
        out *= math.sqrt(k)
    return out


def hermite_psi(n: int, x: float) -> float:
    """Value of the n-th harmonic-oscillator eigenfunction at x.

    Uses the stable two-term recurrence
    psi_n = √(2/n) x psi_{n-1} - √((n-1)/n) psi_{n-2}.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    psi_prev = _PI_QUARTER * math.exp(-0.5 * x * x)
    if n == 0:
        return psi_prev
    psi = math.sqrt(2.0) * x * psi_prev
    for k in range(2, n + 1):
        psi, psi_prev = math.sqrt(2.0 / k) * x * psi - math.sqrt((k - 1) / k) * psi_prev, psi
    return psi


def hermite_psi_table(n_max: int, x) -> np.ndarray:
    """psi_n(x) for n = 0..n_max; x may be a scalar or an array (last axis appended)."""
    xs = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + xs.shape)
    out[0] = _PI_QUARTER * np.exp(-0.5 * xs * xs)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xs * out[0]
    for k in range(2, n_max + 1):
        out[k] = math.sqrt(2.0 / k) * xs * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return np.moveaxis(out, 0, -1)


def quadrature_overlap(x, theta, alpha):
    """⟨x_theta|alpha⟩ for a rotated-quadrature eigenstate and coherent state.

    Broadcasts over array inputs; stable for arbitrarily large |alpha|.
    """
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=complex)
    phase = np.exp(-1j * np.asarray(theta, dtype=float))
    exponent = (
        -0.5 * np.abs(alpha) ** 2
        - 0.5 * x * x
        + math.sqrt(2.0) * phase * x * alpha
        - 0.5 * alpha * alpha * phase * phase
    )
    out = _PI_QUARTER * np.exp(exponent)
    if out.ndim == 0:
        return complex(out)
    return out


def coherent_overlap(a, b):
    """⟨a|b⟩ = exp(-|a|²/2 - |b|²/2 + conj(a) b). Broadcasts over arrays."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    exponent = -0.5 * np.abs(a) ** 2 - 0.5 * np.abs(b) ** 2 + np.conj(a) * b
    out = np.exp(exponent)
    if out.ndim == 0:
        return complex(out)
    return out


def gram_matrix(amps) -> np.ndarray:
    """Pairwise coherent-state overlap matrix G[j, k] = ⟨amp_j|amp_k⟩."""
    amps = np.asarray(amps, dtype=complex)
    return coherent_overlap(amps[:, None], amps[None, :])


def coherent_coeffs(alpha: complex, n_max: int) -> np.ndarray:
    """Photon-number coefficients exp(-|alpha|²/2) alpha^n / √(n!), no tail check."""
    out = np.empty(n_max + 1, dtype=complex)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def coherent_matrix(amps, n_max: int) -> np.ndarray:
    """Rows of photon-number coefficients for an array of amplitudes.

    Vectorized form of coherent_coeffs; shape amps.shape + (n_max + 1,).
    """
    amps = np.asarray(amps, dtype=complex)
    ratios = np.ones(amps.shape + (n_max + 1,), dtype=complex)
    ratios[..., 1:] = amps[..., None] / np.sqrt(np.arange(1, n_max + 1))
    mat = np.cumprod(ratios, axis=-1)
    return np.exp(-0.5 * np.abs(amps) ** 2)[..., None] * mat


def coherent_to_fock(alpha: complex, n_max: int) -> FockVector:
    """Coherent state as a FockVector; rejects truncations with visible tails."""
    vec = FockVector(coherent_coeffs(alpha, n_max))
    if not vec.has_converged_tail():
        raise TailTooHeavy(
            f"coherent amplitude |alpha|={abs(alpha):.3g} needs n_max > {n_max}"
        )
    return vec


def fidelity(a: FockVector, b: FockVector) -> float:
    return abs(a.inner(b)) ** 2


def misfit(a: FockVector, b: FockVector, norm_tol: float = 1e-8) -> float:
    """1 - |⟨a|b⟩|² for unit vectors; raises NotNormalized beyond norm_tol."""
    for v, name in ((a, "first"), (b, "second")):
        if abs(v.norm() - 1.0) > norm_tol:
            raise NotNormalized(f"{name} argument has norm {v.norm():.12f}")
    eps = 1.0 - fidelity(a, b)
    return min(max(eps, 0.0), 1.0)
