"""Finite superpositions of coherent states with Gram-matrix normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSuperposition, TailTooHeavy
from .states import TAIL_TOL, TAIL_WINDOW, FockVector, coherent_matrix, gram_matrix

MERGE_TOL = 1e-12
DEGENERATE_TOL = 1e-14


def _merge_terms(coeffs: np.ndarray, amps: np.ndarray, tol: float = MERGE_TOL):
    """Add up coefficients of amplitudes that coincide within tol (first-seen order)."""
    out_c: list[complex] = []
    out_a: list[complex] = []
    for c, a in zip(coeffs, amps):
        for i, seen in enumerate(out_a):
            if abs(a - seen) <= tol:
                out_c[i] += c
                break
        else:
            out_c.append(complex(c))
            out_a.append(complex(a))
    return np.array(out_c, dtype=complex), np.array(out_a, dtype=complex)


@dataclass(frozen=True)
class CoherentSuperposition:
    """Sum_j coeffs[j] |amps[j]⟩ with non-orthogonal terms.

    Terms with equal amplitudes (within MERGE_TOL) are merged on construction,
    so no two stored terms share an amplitude.
    """

    coeffs: np.ndarray
    amps: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        a = np.asarray(self.amps, dtype=complex)
        if c.shape != a.shape or c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs and amps must be matching non-empty 1-d sequences")
        c, a = _merge_terms(c, a)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_terms(cls, terms, normalized: bool = False) -> "CoherentSuperposition":
        """Build from an iterable of (coefficient, amplitude) pairs."""
        coeffs, amps = zip(*terms)
        return cls(np.array(coeffs, dtype=complex), np.array(amps, dtype=complex), normalized)

    def __len__(self) -> int:
        return self.coeffs.size


def css_norm_squared(s: CoherentSuperposition) -> float:
    """Gram quadratic form Sum_{jk} conj(c_j) c_k ⟨amp_j|amp_k⟩."""
    g = gram_matrix(s.amps)
    val = np.conj(s.coeffs) @ g @ s.coeffs
    return max(float(val.real), 0.0)


def css_inner(a: CoherentSuperposition, b: CoherentSuperposition) -> complex:
    """⟨a|b⟩ via pairwise coherent overlaps."""
    from .states import coherent_overlap

    g = coherent_overlap(a.amps[:, None], b.amps[None, :])
    return complex(np.conj(a.coeffs) @ g @ b.coeffs)


def css_normalize(s: CoherentSuperposition) -> CoherentSuperposition:
    """Scaled copy with unit Gram norm.

    Raises DegenerateSuperposition when the norm² falls at or below 1e-14,
    which signals a destructively interfering parameter point.
    """
    n2 = css_norm_squared(s)
    if n2 <= DEGENERATE_TOL:
        raise DegenerateSuperposition(f"superposition norm² = {n2:.3e}")
    return CoherentSuperposition(s.coeffs / np.sqrt(n2), s.amps, normalized=True)


def css_to_fock(s: CoherentSuperposition, n_max: int) -> FockVector:
    """Photon-number expansion of a normalized superposition.

    The truncation must hold both per amplitude (tail predicate on the largest
    |amp|) and globally: the norm of the truncated expansion may drift from 1
    by at most 1e-8, otherwise TailTooHeavy is raised.
    """
    if not s.normalized:
        raise ValueError("css_to_fock expects a normalized superposition")
    mat = coherent_matrix(s.amps, n_max)
    row_norms = np.sum(np.abs(mat) ** 2, axis=-1)
    row_tails = np.sum(np.abs(mat[..., -TAIL_WINDOW:]) ** 2, axis=-1)
    if np.max(row_tails / row_norms) >= TAIL_TOL:
        biggest = float(np.max(np.abs(s.amps)))
        raise TailTooHeavy(f"amplitude {biggest:.3g} exceeds truncation n_max={n_max}")
    vec = s.coeffs @ mat
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > 1e-8:
        raise TailTooHeavy(f"truncated expansion norm drifted to {norm:.10f}")
    return FockVector(vec / norm)
