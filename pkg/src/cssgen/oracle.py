"""Brute-force two-mode Fock-basis simulation of both schemes.

Everything here works on dense truncated photon-number grids and knows
nothing about the analytic output coefficients: inputs are expanded into the
number basis, the 50:50 splitter is applied as an explicit unitary, and
homodyne results are imposed by contracting the measured mode against the
quadrature eigenfunctions.  It exists to referee the scheme engine.

The splitter unitary conserves total photon number, so it is applied block
by block on the diagonals n1 + n2 = N.  Each block carries the exponential
of the truncated mixing generator at angle pi/4 followed by a parity phase
on the second mode, which pins the coherent-state mapping to
|a⟩|b⟩ -> |(a+b)/√2⟩|(a-b)/√2⟩.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateSuperposition, TailTooHeavy
from .schemes import SchemeKind, SchemeParams, css_input_state
from .states import FockVector, hermite_psi_table
from .superposition import CoherentSuperposition, css_normalize, css_to_fock

DEFAULT_ORACLE_N_MAX = 80
_LEAK_TOL = 1e-9


@dataclass(frozen=True)
class TwoModeFock:
    """Two-mode state on the square grid coeffs[n1, n2], both modes truncated alike."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("coeffs must be a square 2-d grid")
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_max(self) -> int:
        return self.coeffs.shape[0] - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "TwoModeFock":
        return TwoModeFock(self.coeffs / self.norm())

    def expected_total_n(self) -> float:
        p = np.abs(self.coeffs) ** 2
        n = np.arange(self.coeffs.shape[0])
        total = n[:, None] + n[None, :]
        return float(np.sum(p * total) / np.sum(p))


def product_state(a: FockVector, b: FockVector) -> TwoModeFock:
    if a.n_max != b.n_max:
        raise ValueError("modes must share a truncation")
    return TwoModeFock(np.outer(a.coeffs, b.coeffs))


@lru_cache(maxsize=4)
def _bs_blocks(n_total: int) -> tuple:
    """Per-block splitter rotations exp(pi/4 (a†b - ab†)) for N = 0..n_total."""
    blocks = []
    for big_n in range(n_total + 1):
        k = np.arange(big_n)  # raising part within the block
        step = np.sqrt((k + 1.0) * (big_n - k))
        gen = np.zeros((big_n + 1, big_n + 1))
        gen[k + 1, k] = step
        gen -= gen.T
        blocks.append(expm((math.pi / 4.0) * gen))
    return tuple(blocks)


def bs50_fock(state: TwoModeFock) -> TwoModeFock:
    """Apply the 50:50 splitter; raises TailTooHeavy if mass leaks off the grid.

    Within each total-photon-number block the rotation is exact; components a
    block would move beyond the per-mode truncation are monitored and must
    stay below 1e-9 of the norm.
    """
    n_max = state.n_max
    blocks = _bs_blocks(2 * n_max)
    out = np.zeros_like(state.coeffs)
    leak = 0.0
    for big_n in range(2 * n_max + 1):
        lo = max(0, big_n - n_max)
        hi = min(big_n, n_max)
        vec = np.zeros(big_n + 1, dtype=complex)
        idx = np.arange(lo, hi + 1)
        vec[idx] = state.coeffs[idx, big_n - idx]
        if not np.any(vec):
            continue
        rotated = blocks[big_n] @ vec
        out[idx, big_n - idx] = rotated[idx]
        if lo > 0 or hi < big_n:
            mask = np.ones(big_n + 1, dtype=bool)
            mask[idx] = False
            leak += float(np.sum(np.abs(rotated[mask]) ** 2))
    if leak > _LEAK_TOL * state.norm() ** 2:
        raise TailTooHeavy(f"splitter moved {leak:.3e} of the state past the truncation")
    n2 = np.arange(n_max + 1)
    out = out * np.where(n2 % 2 == 0, 1.0, -1.0)[None, :]
    return TwoModeFock(out)


def project_quadrature(state: TwoModeFock, mode: str, theta: float, x: float) -> FockVector:
    """Contract one mode against ⟨x_theta| = sum_n psi_n(x) e^(-i n theta) ⟨n|.

    mode is "measured" (first, the splitter's sum port) or "kept" (second).
    The returned single-mode vector is unnormalized: its norm² is the joint
    probability density of the result x.
    """
    if mode not in ("measured", "kept"):
        raise ValueError("mode must be 'measured' or 'kept'")
    n = np.arange(state.n_max + 1)
    bra = hermite_psi_table(state.n_max, x) * np.exp(-1j * theta * n)
    axis = 0 if mode == "measured" else 1
    return FockVector(np.tensordot(bra, state.coeffs, axes=([0], [axis])))


def _conditioned(state: TwoModeFock, theta: float, x: float) -> FockVector:
    kept = project_quadrature(bs50_fock(state), "measured", theta, x)
    if kept.norm() ** 2 < 1e-14:
        raise DegenerateSuperposition(f"conditional norm² = {kept.norm()**2:.3e}")
    vec = kept.normalized()
    if not vec.has_converged_tail(1e-9):
        raise TailTooHeavy("conditioned state has mass at the truncation edge")
    return vec


def _input_state(amp_plus: complex, amp_minus: complex, n_max: int) -> FockVector:
    css = css_normalize(
        CoherentSuperposition(
            np.array([1.0, 1.0], dtype=complex),
            np.array([amp_plus, amp_minus], dtype=complex),
        )
    )
    return css_to_fock(css, n_max)


def simulate_scheme(p: SchemeParams, n_max: int = DEFAULT_ORACLE_N_MAX) -> FockVector:
    """Full conditional chain of either scheme in the truncated number basis.

    Each splitter unit takes two copies of its input; the sum port is
    projected on the measured quadrature value and the difference port moves
    on.  Stages renormalize, so intermediate densities drop out; the result
    is the normalized conditional output state.
    """
    a, phi = p.alpha, p.phi
    in1 = _input_state(a * 1j * np.exp(0.5j * phi), a * 1j * np.exp(-0.5j * phi), n_max)
    psi1 = _conditioned(product_state(in1, in1), 0.0, p.x1)

    if p.scheme is SchemeKind.S2:
        in2 = css_to_fock(css_input_state(p.r, p.theta, p.n_css, p.gamma), n_max)
        return _conditioned(product_state(psi1, in2), 0.0, p.x2)

    if p.scheme is SchemeKind.S1_LINE:
        psi2 = psi1 if p.x2 == p.x1 else _conditioned(product_state(in1, in1), 0.0, p.x2)
    else:
        in2 = _input_state(a * np.exp(0.5j * phi), a * np.exp(-0.5j * phi), n_max)
        psi2 = _conditioned(product_state(in2, in2), math.pi / 2.0, p.x2)
    return _conditioned(product_state(psi1, psi2), 0.0, p.x3)
