"""Success probabilities of the conditional measurements and average misfit.

Each homodyne result x_i is accepted within a window of half-width delta.
The probability of one measurement comes from the reduced density of the
measured mode of the two-mode state right after the corresponding splitter,

    p(x) = sum_jk c_j conj(c_k) ⟨kept_k|kept_j⟩ ⟨x_theta|meas_j⟩ conj(⟨x_theta|meas_k⟩),

integrated over the window by Gauss-Legendre panels.  Later measurements are
conditioned on the optimal earlier results (small-window approximation), the
overall probability is the product over measurements, and the degeneracy of
the optimal solutions widens each axis to a union of windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import AllOutcomesDegenerate, DegenerateSuperposition
from .schemes import (
    SchemeKind,
    SchemeParams,
    css_input_state,
    degenerate_outcome_values,
    scheme_output,
    _unit_terms,
)
from .states import FockVector, coherent_overlap, misfit, quadrature_overlap
from .superposition import CoherentSuperposition, css_normalize, css_to_fock


@dataclass(frozen=True)
class TwoModeCss:
    """Sum_j coeffs[j] |amps_measured[j]⟩ ⊗ |amps_kept[j]⟩."""

    coeffs: np.ndarray
    amps_measured: np.ndarray
    amps_kept: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        m = np.asarray(self.amps_measured, dtype=complex)
        k = np.asarray(self.amps_kept, dtype=complex)
        if not (c.shape == m.shape == k.shape) or c.ndim != 1:
            raise ValueError("coeffs and amplitude arrays must be matching 1-d sequences")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "amps_measured", m)
        object.__setattr__(self, "amps_kept", k)

    def norm_squared(self) -> float:
        gm = coherent_overlap(self.amps_measured[:, None], self.amps_measured[None, :])
        gk = coherent_overlap(self.amps_kept[:, None], self.amps_kept[None, :])
        val = np.conj(self.coeffs) @ ((gm * gk).T @ self.coeffs)
        return float(val.real)


@dataclass(frozen=True)
class WindowConfig:
    """Shared acceptance half-width and outcome-grid resolution per axis."""

    delta: float
    grid_points: int = 9

    def __post_init__(self):
        if not (0.0 < self.delta <= 2.0):
            raise ValueError("delta must lie in (0, 2]")
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValueError("grid_points must be an odd integer >= 3")


@dataclass(frozen=True)
class RunReport:
    """Figures of merit of one parameter point (probabilities need a window)."""

    params: SchemeParams
    epsilon: float
    n_max: int
    delta: float | None = None
    per_measurement_p: tuple | None = None
    overall_p: float | None = None
    epsilon_avg: float | None = None


def _mixed_two_mode(w1, u1, w2, u2) -> TwoModeCss:
    """Two normalized single-mode superpositions through the 50:50 splitter."""
    coeffs = (w1[:, None] * w2[None, :]).ravel()
    meas = ((u1[:, None] + u2[None, :]) / math.sqrt(2.0)).ravel()
    kept = ((u1[:, None] - u2[None, :]) / math.sqrt(2.0)).ravel()
    return TwoModeCss(coeffs, meas, kept)


def _normalized_unit(x: float, beta: float, bigphi: float, cat_amp: complex):
    w, u = _unit_terms(x, beta, bigphi, cat_amp)
    css = css_normalize(CoherentSuperposition(w, u))
    # merging can reorder; rebuild aligned weights
    return css.coeffs, css.amps


def _source_pair(p: SchemeParams, lattice_unit2: bool) -> np.ndarray:
    """The two coherent amplitudes of an input superposition, full magnitude."""
    rot = 1.0 if lattice_unit2 else 1.0j
    return p.alpha * rot * np.exp(np.array([0.5j, -0.5j]) * p.phi)


def two_mode_before_measurement(p: SchemeParams, index: int) -> tuple[TwoModeCss, float]:
    """Pre-measurement two-mode state and homodyne phase for measurement `index`.

    Earlier measurements are fixed at their optimal results from `p`.  The
    measured mode is always the splitter's sum port.
    """
    n_meas = 2 if p.scheme is SchemeKind.S2 else 3
    if not 1 <= index <= n_meas:
        raise ValueError(f"measurement index must be 1..{n_meas}")
    beta, bigphi = p.beta, p.bigphi
    cat = math.sqrt(2.0) * beta

    if index == 1:
        amps = _source_pair(p, lattice_unit2=False)
        norm2 = 2.0 + 2.0 * math.exp(-2.0 * beta * beta) * math.cos(bigphi % (2 * math.pi))
        w = np.full(2, 1.0 / math.sqrt(norm2), dtype=complex)
        return _mixed_two_mode(w, amps, w, amps), 0.0

    if index == 2 and p.scheme is SchemeKind.S2:
        w1, u1 = _normalized_unit(p.x1, beta, bigphi, cat)
        css2 = css_input_state(p.r, p.theta, p.n_css, p.gamma)
        return _mixed_two_mode(w1, u1, css2.coeffs, css2.amps), 0.0

    if index == 2:
        lattice = p.scheme is SchemeKind.S1_LATTICE
        amps = _source_pair(p, lattice_unit2=lattice)
        norm2 = 2.0 + 2.0 * math.exp(-2.0 * beta * beta) * math.cos(bigphi % (2 * math.pi))
        w = np.full(2, 1.0 / math.sqrt(norm2), dtype=complex)
        theta = math.pi / 2.0 if lattice else 0.0
        return _mixed_two_mode(w, amps, w, amps), theta

    w1, u1 = _normalized_unit(p.x1, beta, bigphi, cat)
    if p.scheme is SchemeKind.S1_LINE:
        w2, u2 = _normalized_unit(p.x2, beta, bigphi, cat)
    else:
        w2, u2 = _normalized_unit(-p.x2, beta, bigphi, cat * 1j)
    return _mixed_two_mode(w1, u1, w2, u2), 0.0


def reduced_density_quadrature_pdf(s: TwoModeCss, theta: float) -> Callable:
    """Quadrature probability density of the measured mode; accepts arrays."""
    gk = coherent_overlap(s.amps_kept[None, :], s.amps_kept[:, None])  # ⟨k_k|k_j⟩
    weights = (s.coeffs[:, None] * np.conj(s.coeffs[None, :])) * gk

    def pdf(x):
        x = np.asarray(x, dtype=float)
        ov = quadrature_overlap(x[..., None], theta, s.amps_measured)
        val = np.einsum("...j,jk,...k->...", ov, weights, np.conj(ov))
        return np.maximum(val.real, 0.0)

    return pdf


_GL_NODES, _GL_WEIGHTS = leggauss(24)


def _panel_integral(pdf, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = pdf(xs.ravel()).reshape(xs.shape)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def integrate_pdf(pdf, a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive Gauss-Legendre panel integration to absolute tolerance."""
    if b <= a:
        return 0.0
    panels = max(2, int(math.ceil((b - a) / 0.5)))
    prev = _panel_integral(pdf, a, b, panels)
    for _ in range(12):
        panels *= 2
        cur = _panel_integral(pdf, a, b, panels)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    return prev


def success_probability(s: TwoModeCss, theta: float, x_opt: float, delta: float) -> float:
    """Window probability of one homodyne measurement around its optimum."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    pdf = reduced_density_quadrature_pdf(s, theta)
    return min(integrate_pdf(pdf, x_opt - delta, x_opt + delta), 1.0)


def merge_intervals(centers: Sequence[float], delta: float) -> list[tuple[float, float]]:
    """Union of [c - delta, c + delta] windows as disjoint intervals."""
    spans = sorted((c - delta, c + delta) for c in centers)
    out = [spans[0]]
    for lo, hi in spans[1:]:
        if lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def overall_probability(p: SchemeParams, w: WindowConfig) -> tuple[float, list[float]]:
    """Product of per-measurement window probabilities.

    Each axis accepts the union of the windows around every degenerate
    optimal result (overlapping windows are merged), so the product already
    accounts for the solution multiplicity.
    """
    per = []
    for i, centers in enumerate(degenerate_outcome_values(p), start=1):
        s, theta = two_mode_before_measurement(p, i)
        pdf = reduced_density_quadrature_pdf(s, theta)
        prob = sum(integrate_pdf(pdf, lo, hi) for lo, hi in merge_intervals(centers, w.delta))
        per.append(min(prob, 1.0))
    overall = float(np.prod(per))
    return overall, per


def _axis_outcomes(p: SchemeParams) -> list[float]:
    if p.scheme is SchemeKind.S2:
        return [p.x1, p.x2]
    return [p.x1, p.x2, p.x3]


def _with_outcomes(p: SchemeParams, xs: Sequence[float]) -> SchemeParams:
    from dataclasses import replace

    if p.scheme is SchemeKind.S2:
        return replace(p, x1=xs[0], x2=xs[1])
    return replace(p, x1=xs[0], x2=xs[1], x3=xs[2])


def average_misfit(
    p: SchemeParams,
    target: FockVector,
    w: WindowConfig,
    n_max: int | None = None,
) -> float:
    """Probability-weighted misfit over subdivided measurement windows.

    Every axis window [x_i - delta, x_i + delta] splits into grid_points
    subranges; each joint outcome is represented by the subrange centers,
    weighted by the product of per-subrange probabilities.  Subrange
    probabilities use the optimal-result conditioning throughout, matching
    the small-window approximation of the overall probability.
    """
    if n_max is None:
        n_max = target.n_max
    g = w.grid_points
    axis_probs = []
    axis_centers = []
    for i, x_opt in enumerate(_axis_outcomes(p), start=1):
        s, theta = two_mode_before_measurement(p, i)
        pdf = reduced_density_quadrature_pdf(s, theta)
        edges = np.linspace(x_opt - w.delta, x_opt + w.delta, g + 1)
        probs = [integrate_pdf(pdf, edges[j], edges[j + 1]) for j in range(g)]
        axis_probs.append(np.array(probs))
        axis_centers.append(0.5 * (edges[:-1] + edges[1:]))

    num = 0.0
    den = 0.0
    n_degenerate = 0
    for combo in np.ndindex(*([g] * len(axis_probs))):
        weight = float(np.prod([axis_probs[i][j] for i, j in enumerate(combo)]))
        xs = [axis_centers[i][j] for i, j in enumerate(combo)]
        try:
            out = css_to_fock(scheme_output(_with_outcomes(p, xs)), n_max)
        except DegenerateSuperposition:
            n_degenerate += 1
            continue
        num += weight * misfit(out, target)
        den += weight
    if den == 0.0:
        raise AllOutcomesDegenerate(f"all {n_degenerate} outcome cells were degenerate")
    return num / den


def run_report(
    p: SchemeParams,
    target: FockVector,
    window: WindowConfig | None = None,
    n_max: int | None = None,
) -> RunReport:
    """Misfit plus, when a window is given, probabilities and average misfit."""
    if n_max is None:
        n_max = target.n_max
    eps = misfit(css_to_fock(scheme_output(p), n_max), target)
    if window is None:
        return RunReport(params=p, epsilon=eps, n_max=n_max)
    overall, per = overall_probability(p, window)
    eps_avg = average_misfit(p, target, window, n_max)
    return RunReport(
        params=p,
        epsilon=eps,
        n_max=n_max,
        delta=window.delta,
        per_measurement_p=tuple(per),
        overall_p=overall,
        epsilon_avg=eps_avg,
    )
