"""Factories for the nonclassical target states, all as normalized FockVectors.

Squeezing convention: S(zeta) = exp((zeta a†² - conj(zeta) a²)/2) with
zeta = r e^(i theta).  Real zeta then squeezes the y quadrature, the squeezed
vacuum has positive even photon-number coefficients, and superpositions of
coherent states along the real axis can approximate it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import TailTooHeavy, TargetUnbuildable
from .states import DEFAULT_N_MAX, FockVector, sqrt_factorial

_KINDS = {
    "AS": ("amplitude-squeezed", 3),
    "B": ("binomial", 2),
    "NS": ("squeezed-number", 2),
    "SV": ("squeezed-vacuum", 2),
    "ADHOC": ("adhoc", None),
}
_TEXT_RE = re.compile(r"^\s*([A-Za-z]+)\s*\(\s*([^()]*)\s*\)\s*$")


@dataclass(frozen=True)
class TargetSpec:
    """Tagged target-state family plus its parameters.

    Text form is TAG(p1,p2,...) with tags AS, B, NS, SV, ADHOC, e.g.
    "AS(1,2,1)", "B(0.1,5)", "NS(2,0.3)", "SV(0.85,0)", "ADHOC(3,0,1)".
    """

    tag: str
    params: tuple

    def __post_init__(self):
        tag = self.tag.upper()
        if tag not in _KINDS:
            raise ValueError(f"unknown target tag {self.tag!r}")
        _, arity = _KINDS[tag]
        params = tuple(float(p) for p in self.params)
        if arity is not None and len(params) != arity:
            raise ValueError(f"{tag} takes {arity} parameters, got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise ValueError("target parameters must be finite")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "params", params)

    @property
    def kind(self) -> str:
        return _KINDS[self.tag][0]

    def text(self) -> str:
        def fmt(v: float) -> str:
            return f"{int(v)}" if float(v).is_integer() else repr(float(v))

        return f"{self.tag}({','.join(fmt(p) for p in self.params)})"

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        m = _TEXT_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse target spec {text!r}")
        tag = m.group(1).upper()
        body = m.group(2).strip()
        params = tuple(float(p) for p in body.split(",")) if body else ()
        return cls(tag, params)

    def build(self, n_max: int = DEFAULT_N_MAX) -> FockVector:
        """Construct the target at the given truncation; wraps failures."""
        try:
            if self.tag == "AS":
                return amplitude_squeezed(*self.params, n_max=n_max)
            if self.tag == "B":
                p, m = self.params
                return binomial_state(p, int(round(m)), n_max=n_max)
            if self.tag == "NS":
                n, r = self.params
                return squeezed_number(int(round(n)), r, n_max=n_max)
            if self.tag == "SV":
                r, theta = self.params
                return squeezed_vacuum(r, theta, n_max=n_max)
            return adhoc_superposition(self.params, n_max=n_max)
        except (ValueError, TailTooHeavy) as exc:
            raise TargetUnbuildable(f"{self.text()}: {exc}") from exc


def _finalize(weights: np.ndarray, what: str) -> FockVector:
    vec = FockVector(weights).normalized()
    if not vec.has_converged_tail():
        raise TailTooHeavy(f"{what} has non-negligible mass at the truncation edge")
    return vec


def amplitude_squeezed(alpha0: float, u: float, delta: float, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Gaussian-modulated circle superposition in the photon-number basis.

    Coefficients are proportional to alpha0^n / √(n!) · exp(-(delta-n)²/(2u²));
    the overall constant is fixed numerically by normalization.
    """
    if u <= 0 or alpha0 <= 0:
        raise ValueError("alpha0 and u must be positive")
    w = np.empty(n_max + 1)
    power = math.sqrt(2.0 * math.pi) / u
    for n in range(n_max + 1):
        w[n] = power * math.exp(-((delta - n) ** 2) / (2.0 * u * u))
        power *= alpha0 / math.sqrt(n + 1)
    return _finalize(w.astype(complex), "amplitude-squeezed state")


def binomial_state(p: float, m: int, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Finite state with binomial photon statistics: coeff[n] = √(C(m,n) p^n (1-p)^(m-n))."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 0 or m > n_max:
        raise ValueError("need 0 <= m <= n_max")
    w = np.zeros(n_max + 1, dtype=complex)
    choose = 1.0
    for n in range(m + 1):
        w[n] = math.sqrt(choose * p**n * (1.0 - p) ** (m - n))
        choose *= (m - n) / (n + 1.0)
    return FockVector(w)  # analytically normalized, tail exactly zero above m


def squeezed_vacuum(r: float, theta: float = 0.0, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Squeezed vacuum for zeta = r e^(i theta): even coefficients only.

    coeff[2m] = (e^(i theta) tanh r)^m √((2m)!) / (2^m m! √(cosh r)).
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    w = np.zeros(n_max + 1, dtype=complex)
    lam = math.tanh(r) * np.exp(1j * theta)
    term = 1.0 / math.sqrt(math.cosh(r))
    w[0] = term
    for m in range(1, n_max // 2 + 1):
        term = term * lam * math.sqrt((2 * m - 1) / (2 * m))
        w[2 * m] = term
    return _finalize(w, f"squeezed vacuum r={r}")


@lru_cache(maxsize=16)
def _squeeze_matrix(zeta: complex, n_max: int) -> np.ndarray:
    """exp((zeta a†² - conj(zeta) a²)/2) on the truncated number basis."""
    n = np.arange(n_max + 1)
    lower = np.sqrt((n[2:] - 1) * n[2:])  # a² |n⟩ = √(n(n-1)) |n-2⟩
    gen = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    gen[np.arange(n_max - 1), np.arange(2, n_max + 1)] = -0.5 * np.conj(zeta) * lower
    gen[np.arange(2, n_max + 1), np.arange(n_max - 1)] = 0.5 * zeta * lower
    return expm(gen)


def squeeze_operator_column(n: int, zeta: complex, n_max: int) -> np.ndarray:
    """Column ⟨m|S(zeta)|n⟩ of the truncated squeeze-operator exponential."""
    if n < 0 or n > n_max:
        raise ValueError("need 0 <= n <= n_max")
    return _squeeze_matrix(complex(zeta), n_max)[:, n].copy()


def squeezed_number(n: int, r: float, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """S(r)|n⟩ with real squeezing, built from the truncated exponential.

    The exact operator only couples levels of equal parity, so opposite-parity
    residue from the matrix exponential (roundoff-level) is zeroed.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if r < 0:
        raise ValueError("r must be non-negative")
    if n > n_max:
        raise ValueError("need n <= n_max")
    if r == 0.0:
        w = np.zeros(n_max + 1, dtype=complex)
        w[n] = 1.0
        return FockVector(w)
    col = squeeze_operator_column(n, complex(r), n_max)
    m = np.arange(n_max + 1)
    col[(m % 2) != (n % 2)] = 0.0
    return _finalize(col, f"squeezed number state n={n}, r={r}")


def adhoc_superposition(coeffs, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Normalized Sum_n coeffs[n] |n⟩ for hand-picked real coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0 or c.size > n_max + 1:
        raise ValueError("need 1..n_max+1 coefficients")
    if np.all(c == 0):
        raise ValueError("all-zero coefficient list")
    w = np.zeros(n_max + 1, dtype=complex)
    w[: c.size] = c
    return FockVector(w).normalized()
