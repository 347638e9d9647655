"""Conditional output superpositions of the two generation schemes.

Scheme 1 feeds two copies of a two-component coherent superposition into a
50:50 splitter per unit, measures a quadrature on the sum port, and mixes the
two conditioned cat-like intermediates on a third splitter (three homodyne
results x1, x2, x3).  Scheme 2 replaces the second unit by an equidistant
coherent-state superposition approximating a squeezed vacuum (two results).

The output state depends on the input magnitude alpha and phase separation
phi only through

    beta = alpha sin(phi/2)        (coherent spacing of the output grid)
    Phi  = alpha² sin(phi) mod 2pi (interference phase of the vacuum weight)

since the vacuum-to-cat weight of each conditioned unit is exactly
a0/a1 = 2 exp(-2 beta²) cosh(2 beta x - i Phi) after the common factor
pi^(-1/4) exp(-x²/2 + 2 i alpha x cos(phi/2)) is divided out.  All scheme
functions evaluate in that factored form, which stays finite at tabulated
magnitudes alpha ~ 1e2..1e4 where exp(-alpha²) underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import TailTooHeavy
from .states import misfit, quadrature_overlap
from .superposition import CoherentSuperposition, css_normalize, css_to_fock
from .targets import squeezed_vacuum

_PI_QUARTER = math.pi ** (-0.25)
TWO_PI = 2.0 * math.pi


class SchemeKind(Enum):
    S1_LINE = "s1-line"
    S1_LATTICE = "s1-lattice"
    S2 = "s2"


FAMILIES = ("s1-line", "s1-lattice", "s2-line", "s2-lattice")


def family_to_kind(family: str) -> tuple[SchemeKind, float]:
    """Map a CLI scheme family string to (SchemeKind, theta)."""
    table = {
        "s1-line": (SchemeKind.S1_LINE, 0.0),
        "s1-lattice": (SchemeKind.S1_LATTICE, 0.0),
        "s2-line": (SchemeKind.S2, 0.0),
        "s2-lattice": (SchemeKind.S2, math.pi),
    }
    if family not in table:
        raise ValueError(f"unknown scheme family {family!r}; pick one of {FAMILIES}")
    return table[family]


def kind_to_family(kind: SchemeKind, theta: float = 0.0) -> str:
    if kind is SchemeKind.S1_LINE:
        return "s1-line"
    if kind is SchemeKind.S1_LATTICE:
        return "s1-lattice"
    return "s2-lattice" if abs(theta - math.pi) < 1e-9 else "s2-line"


@dataclass(frozen=True)
class SchemeParams:
    """Free parameters of one scheme instance.

    Homodyne phases are not free: scheme 1 measures x quadratures everywhere
    on the line and swaps the second measurement to the y quadrature on the
    lattice (x2 then holds the y result); scheme 2 measures x twice.  For
    scheme 2, theta in {0, pi} selects a line or a 3 x n_css lattice output.
    """

    scheme: SchemeKind
    alpha: float
    phi: float
    x1: float
    x2: float
    x3: float | None = None
    r: float | None = None
    gamma: float | None = None
    theta: float = 0.0
    n_css: int = 7

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive and finite")
        if not (0 < self.phi <= math.pi):
            raise ValueError("phi must lie in (0, pi]")
        for name in ("x1", "x2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.scheme is SchemeKind.S2:
            if self.x3 is not None:
                raise ValueError("x3 is not a scheme-2 parameter")
            if self.r is None or self.r < 0:
                raise ValueError("scheme 2 needs r >= 0")
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("scheme 2 needs gamma > 0")
            if not (abs(self.theta) < 1e-9 or abs(self.theta - math.pi) < 1e-9):
                raise ValueError("theta must be 0 or pi")
            if self.n_css < 1 or self.n_css % 2 == 0:
                raise ValueError("n_css must be an odd integer >= 1")
        else:
            if self.x3 is None or not math.isfinite(self.x3):
                raise ValueError("scheme 1 needs a finite x3")

    @property
    def beta(self) -> float:
        return self.alpha * math.sin(0.5 * self.phi)

    @property
    def bigphi(self) -> float:
        """Interference phase alpha² sin(phi); compare mod 2 pi."""
        return self.alpha * self.alpha * math.sin(self.phi)

    @property
    def family(self) -> str:
        return kind_to_family(self.scheme, self.theta)


@dataclass(frozen=True)
class IntermediateCoeffs:
    """Vacuum/cat weights of the conditioned unit outputs (a from x1, b from x2)."""

    a0: complex
    a1: complex
    b0: complex
    b1: complex
    b0p: complex
    b1p: complex


def _vacuum_weight(x: float, beta: float, bigphi: float) -> complex:
    """a0/a1 of a conditioned unit: 2 exp(-2 beta²) cosh(2 beta x - i Phi)."""
    z = complex(2.0 * beta * x, -bigphi % TWO_PI)
    # exp(-2 beta²) folded into cosh to keep both branches finite
    w = 0.5 * (np.exp(z - 2.0 * beta * beta) + np.exp(-z - 2.0 * beta * beta))
    return complex(2.0 * w)


def _common_factor(x: float, alpha: float, phi: float) -> complex:
    """pi^(-1/4) exp(-x²/2 + 2 i alpha x cos(phi/2)): the unit's a1 (and b1)."""
    return _PI_QUARTER * complex(np.exp(complex(-0.5 * x * x, 2.0 * alpha * x * math.cos(0.5 * phi))))


def intermediate_coeffs(p: SchemeParams) -> IntermediateCoeffs:
    """Literal overlap coefficients of both conditioned units.

    b0/b1 read x2 as an x-quadrature result (line geometry), b0p/b1p as a
    y-quadrature result (lattice geometry); both are provided regardless of
    p.scheme so the identities between them stay checkable.
    """
    beta, bigphi = p.beta, p.bigphi
    ca = _common_factor(p.x1, p.alpha, p.phi)
    cb = _common_factor(p.x2, p.alpha, p.phi)
    cbp = _common_factor(-p.x2, p.alpha, p.phi)
    return IntermediateCoeffs(
        a0=ca * _vacuum_weight(p.x1, beta, bigphi),
        a1=ca,
        b0=cb * _vacuum_weight(p.x2, beta, bigphi),
        b1=cb,
        b0p=cbp * _vacuum_weight(-p.x2, beta, bigphi),
        b1p=cbp,
    )


def _unit_terms(x: float, beta: float, bigphi: float, cat_amp: complex):
    """(weights, amplitudes) of one conditioned unit, in the dropped-common-factor gauge."""
    w0 = _vacuum_weight(x, beta, bigphi)
    weights = np.array([w0, 1.0, 1.0], dtype=complex)
    amps = np.array([0.0, cat_amp, -cat_amp], dtype=complex)
    return weights, amps


def _mix_and_project(w1, u1, w2, u2, x_result: float) -> CoherentSuperposition:
    """50:50 mix of two superpositions followed by an x-quadrature projection.

    Keeps the difference port (u - v)/√2 and projects the sum port on
    ⟨x_result| at theta = 0.
    """
    wu = w1[:, None] * w2[None, :]
    measured = (u1[:, None] + u2[None, :]) / math.sqrt(2.0)
    kept = (u1[:, None] - u2[None, :]) / math.sqrt(2.0)
    coeffs = wu * quadrature_overlap(x_result, 0.0, measured)
    return CoherentSuperposition(coeffs.ravel(), kept.ravel())


def scheme1_line_terms(p: SchemeParams) -> CoherentSuperposition:
    """Unnormalized line output: five terms at amplitudes {-2, -1, 0, 1, 2} beta."""
    if p.scheme is not SchemeKind.S1_LINE:
        raise ValueError("params are not for the line geometry")
    beta, bigphi = p.beta, p.bigphi
    cat = math.sqrt(2.0) * beta
    w1, u1 = _unit_terms(p.x1, beta, bigphi, cat)
    w2, u2 = _unit_terms(p.x2, beta, bigphi, cat)
    return _mix_and_project(w1, u1, w2, u2, p.x3)


def scheme1_lattice_terms(p: SchemeParams) -> CoherentSuperposition:
    """Unnormalized lattice output: nine terms at k beta + i l beta, k,l in {-1,0,1}.

    The second unit's input carries phase phi/2 (not pi/2 + phi/2) and its
    homodyne reads the y quadrature, which makes its coefficients those of the
    first unit evaluated at -x2.
    """
    if p.scheme is not SchemeKind.S1_LATTICE:
        raise ValueError("params are not for the lattice geometry")
    beta, bigphi = p.beta, p.bigphi
    w1, u1 = _unit_terms(p.x1, beta, bigphi, math.sqrt(2.0) * beta)
    w2, u2 = _unit_terms(-p.x2, beta, bigphi, math.sqrt(2.0) * beta * 1j)
    return _mix_and_project(w1, u1, w2, u2, p.x3)


def css_weights(r: float, gamma: float, n_css: int) -> np.ndarray:
    """Unnormalized envelope exp(-(l gamma)² / (e^(2r) - 1)) for l = -n..n."""
    n = (n_css - 1) // 2
    ls = np.arange(-n, n + 1, dtype=float)
    if r <= 0:
        w = np.zeros(n_css)
        w[n] = 1.0
        return w
    denom = math.expm1(2.0 * r)
    return np.exp(-((ls * gamma) ** 2) / denom)


def scheme2_terms(p: SchemeParams) -> CoherentSuperposition:
    """Unnormalized scheme-2 output: 3 * n_css terms at k beta - l gamma e^(i theta/2)/√2."""
    if p.scheme is not SchemeKind.S2:
        raise ValueError("params are not for scheme 2")
    beta, bigphi = p.beta, p.bigphi
    w1, u1 = _unit_terms(p.x1, beta, bigphi, math.sqrt(2.0) * beta)
    n = (p.n_css - 1) // 2
    ls = np.arange(-n, n + 1, dtype=float)
    w2 = css_weights(p.r, p.gamma, p.n_css).astype(complex)
    u2 = ls * p.gamma * np.exp(0.5j * p.theta)
    return _mix_and_project(w1, u1, w2, u2, p.x2)


def scheme_terms(p: SchemeParams) -> CoherentSuperposition:
    if p.scheme is SchemeKind.S1_LINE:
        return scheme1_line_terms(p)
    if p.scheme is SchemeKind.S1_LATTICE:
        return scheme1_lattice_terms(p)
    return scheme2_terms(p)


def scheme1_line_output(p: SchemeParams) -> CoherentSuperposition:
    return css_normalize(scheme1_line_terms(p))


def scheme1_lattice_output(p: SchemeParams) -> CoherentSuperposition:
    return css_normalize(scheme1_lattice_terms(p))


def scheme2_output(p: SchemeParams) -> CoherentSuperposition:
    return css_normalize(scheme2_terms(p))


def scheme_output(p: SchemeParams) -> CoherentSuperposition:
    """Normalized conditional output superposition for any scheme."""
    return css_normalize(scheme_terms(p))


# -- published coefficient transcriptions, kept for cross-checks ------------

def scheme1_line_coeffs_direct(p: SchemeParams) -> CoherentSuperposition:
    """Line output assembled from the five published coefficient formulas."""
    beta, bigphi = p.beta, p.bigphi
    a0, b0 = _vacuum_weight(p.x1, beta, bigphi), _vacuum_weight(p.x2, beta, bigphi)
    q = lambda mu: quadrature_overlap(p.x3, 0.0, mu)
    coeffs = [
        q(0.0),                                 # amplitude -2 beta, a1 b1 gauge
        a0 * q(beta) + b0 * q(-beta),           # -beta
        a0 * b0 * q(0.0) + q(2 * beta) + q(-2 * beta),  # 0
        a0 * q(-beta) + b0 * q(beta),           # +beta
        q(0.0),                                 # +2 beta
    ]
    amps = beta * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    return CoherentSuperposition(np.array(coeffs), amps.astype(complex))


def scheme1_lattice_coeffs_published(p: SchemeParams) -> CoherentSuperposition:
    """Lattice output with the published central coefficient a0 b0' ⟨x3|beta⟩.

    The splitter derivation instead pairs vacuum with vacuum, giving
    a0 b0' ⟨x3|0⟩; the Fock oracle confirms the derived form, so this variant
    exists only to document the discrepancy.
    """
    beta, bigphi = p.beta, p.bigphi
    a0 = _vacuum_weight(p.x1, beta, bigphi)
    b0p = _vacuum_weight(-p.x2, beta, bigphi)
    q = lambda mu: quadrature_overlap(p.x3, 0.0, mu)
    coeffs, amps = [], []
    for k in (-1, 0, 1):
        for l in (-1, 0, 1):
            wa = a0 if k == 0 else 1.0
            wb = b0p if l == 0 else 1.0
            if k == 0 and l == 0:
                c = a0 * b0p * q(beta)
            else:
                c = wa * wb * q(beta * (k - 1j * l))
            coeffs.append(c)
            amps.append(beta * (k + 1j * l))
    return CoherentSuperposition(np.array(coeffs), np.array(amps))


# -- squeezed-vacuum approximation by a line of coherent states --------------

@dataclass(frozen=True)
class SqueezedVacuumCss:
    superposition: CoherentSuperposition
    gamma: float
    epsilon: float


def truncation_for_squeezing(r: float, n_max_floor: int = 96) -> int:
    """Truncation with a converged tail for a squeezed vacuum of parameter r."""
    t = math.tanh(r)
    if t < 1e-12:
        return n_max_floor
    # |coeff|² ~ t^(2m)/sqrt(pi m); demand the top of the basis be below 1e-14
    m = int(math.ceil(math.log(1e-14) / (2.0 * math.log(t)))) + 8
    return max(n_max_floor, 2 * m)


def css_input_state(r: float, theta: float, n_states: int, gamma: float) -> CoherentSuperposition:
    n = (n_states - 1) // 2
    ls = np.arange(-n, n + 1, dtype=float)
    w = css_weights(r, gamma, n_states).astype(complex)
    amps = ls * gamma * np.exp(0.5j * theta)
    return css_normalize(CoherentSuperposition(w, amps))


def squeezed_vacuum_css(
    r: float,
    theta: float = 0.0,
    n_states: int = 7,
    gamma: float | None = None,
    n_max: int | None = None,
) -> SqueezedVacuumCss:
    """Equidistant coherent-state approximation of a squeezed vacuum.

    Weights follow exp(-(l gamma)²/(e^(2r)-1)); when gamma is omitted it is
    chosen to minimize the misfit against the exact squeezed vacuum by a
    bracketing scalar search.  r = 0 returns the bare vacuum with zero misfit.
    """
    if n_states < 1 or n_states % 2 == 0:
        raise ValueError("n_states must be an odd integer >= 1")
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0.0:
        css = CoherentSuperposition(np.array([1.0 + 0j]), np.array([0.0 + 0j]), normalized=True)
        return SqueezedVacuumCss(css, gamma if gamma else 0.0, 0.0)
    if n_max is None:
        n_max = truncation_for_squeezing(r)
    target = squeezed_vacuum(r, theta, n_max)

    def eps_of(g: float) -> float:
        return misfit(css_to_fock(css_input_state(r, theta, n_states, g), n_max), target)

    def eps_or_infeasible(g: float) -> float:
        try:
            return eps_of(g)
        except TailTooHeavy:
            return 1.0

    if gamma is not None:
        return SqueezedVacuumCss(css_input_state(r, theta, n_states, gamma), gamma, eps_of(gamma))
    if n_states == 1:
        g = 1.0  # envelope has a single term; gamma is irrelevant
        return SqueezedVacuumCss(css_input_state(r, theta, n_states, g), g, eps_of(g))
    grid = np.linspace(0.05, 3.5, 140)
    coarse = [eps_or_infeasible(g) for g in grid]
    i = int(np.argmin(coarse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(
        eps_or_infeasible, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    g = float(res.x)
    return SqueezedVacuumCss(css_input_state(r, theta, n_states, g), g, eps_of(g))


@lru_cache(maxsize=8)
def _gamma_table(n_states: int, r_hi: float, points: int) -> tuple:
    rs = np.linspace(1e-3, r_hi, points)
    gs = [squeezed_vacuum_css(float(r), 0.0, n_states).gamma for r in rs]
    return tuple(rs), tuple(gs)


def gamma_for_r(r: float, n_states: int = 7, r_hi: float = 1.6, points: int = 161) -> float:
    """Misfit-optimal gamma for a given squeezing, interpolated from a cached grid."""
    if r <= 1e-3:
        return 0.32  # envelope collapses to the vacuum term; any gamma works
    rs, gs = _gamma_table(n_states, r_hi, points)
    return float(np.interp(r, rs, gs))


# -- (alpha, phi) <-> (beta, Phi) reduction ----------------------------------

def reduced(p: SchemeParams) -> tuple[float, float]:
    """(beta, Phi): the two functions of (alpha, phi) the output depends on."""
    return p.beta, p.bigphi


def params_from_reduced(
    scheme: SchemeKind,
    beta: float,
    bigphi: float,
    *,
    x1: float,
    x2: float,
    x3: float | None = None,
    r: float | None = None,
    gamma: float | None = None,
    theta: float = 0.0,
    n_css: int = 7,
    phi_hint: float | None = None,
) -> SchemeParams:
    """Reconstruct explicit (alpha, phi) from the reduced pair.

    Any branch Phi + 2 pi m (m >= 0) reproduces the same output state; m = 0
    yields the smallest alpha (down to alpha = beta at Phi = 0). A phi_hint
    picks the branch whose phase separation lands nearest the hint, matching
    reported parameter scales.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    phi_mod = bigphi % TWO_PI
    if phi_hint is not None:
        m = max(0, round((2.0 * beta * beta / math.tan(0.5 * phi_hint) - phi_mod) / TWO_PI))
    else:
        m = 0
    branch = phi_mod + TWO_PI * m
    phi = 2.0 * math.atan2(2.0 * beta * beta, branch)
    alpha = beta / math.sin(0.5 * phi)
    return SchemeParams(
        scheme=scheme, alpha=alpha, phi=phi, x1=x1, x2=x2, x3=x3,
        r=r, gamma=gamma, theta=theta, n_css=n_css,
    )


def small_alpha_equivalent(p: SchemeParams) -> SchemeParams:
    """Parameter set with identical output but alpha of order beta.

    Used to run the Fock oracle at tabulated rows, whose raw magnitudes
    (alpha ~ 1e2..1e4) cannot be represented in any practical truncation.
    """
    beta, bigphi = reduced(p)
    return params_from_reduced(
        p.scheme, beta, bigphi, x1=p.x1, x2=p.x2, x3=p.x3,
        r=p.r, gamma=p.gamma, theta=p.theta, n_css=p.n_css,
    )


# -- measurement-result degeneracies -----------------------------------------
#
# Verified numerically against the output states themselves:
#   * line, swap x1<->x2 with x3 -> -x3:  identical state (any target);
#   * line and lattice, joint sign flip of (x1, x2):  exactly the complex
#     conjugate state, so the misfit is unchanged for any target with real
#     photon-number coefficients (all families built here);
#   * scheme 2, sign flip of x1: exactly the conjugate state as well;
#   * single sign flips of x1 or x2 in scheme 1: no state-level identity;
#     they hold to high accuracy only near optima of real targets and are
#     treated as an empirical check, not asserted.
# The swap map is NOT a lattice symmetry (counterexamples are easy to find),
# even though the line and lattice are often described together.

def exact_symmetry_variants(p: SchemeParams) -> list[SchemeParams]:
    """Maps leaving the misfit against real-coefficient targets exactly invariant."""
    if p.scheme is SchemeKind.S2:
        return [replace(p, x1=-p.x1)]
    out = [replace(p, x1=-p.x1, x2=-p.x2)]
    if p.scheme is SchemeKind.S1_LINE:
        out.insert(0, replace(p, x1=p.x2, x2=p.x1, x3=-p.x3))
    return out


def empirical_symmetry_variants(p: SchemeParams) -> list[SchemeParams]:
    """Single sign flips: equal misfit observed numerically near optima."""
    if p.scheme is SchemeKind.S2:
        return []
    return [replace(p, x1=-p.x1), replace(p, x2=-p.x2)]


def degenerate_outcome_values(p: SchemeParams) -> list[list[float]]:
    """Per-measurement-axis accepted result values implied by the degeneracies.

    Line solutions come in the orbit (±x1, ±x2) x (swap with x3 -> -x3).
    Because the line's two units are identical pipelines, the swap class
    contributes exactly as much probability as the sign-mirrored boxes
    (±x1, ±x2, -x3), so the acceptance factorizes per axis into the sign
    orbits {±x1}, {±x2}, {±x3}.  The lattice has no swap map, leaving
    {±x1}, {±x2}, {x3}; scheme 2 admits only the x1 sign flip.  Duplicate
    values (e.g. x_i = 0) are removed.
    """

    def uniq(vals):
        out: list[float] = []
        for v in vals:
            if not any(abs(v - w) < 1e-12 for w in out):
                out.append(float(v))
        return out

    if p.scheme is SchemeKind.S2:
        return [uniq([p.x1, -p.x1]), uniq([p.x2])]
    if p.scheme is SchemeKind.S1_LINE:
        return [uniq([p.x1, -p.x1]), uniq([p.x2, -p.x2]), uniq([p.x3, -p.x3])]
    return [uniq([p.x1, -p.x1]), uniq([p.x2, -p.x2]), uniq([p.x3])]
