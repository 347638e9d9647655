"""Bundled reference parameter sets with previously reported figures of merit.

Five tables (I, II: first scheme along a line; III: first scheme on a
lattice; IV, V: second scheme along a line / on a lattice; table I collects
degenerate solutions for one lattice target across parameter scales).  Each
row carries the reported misfit, input parameters, homodyne results and,
where available, the window half-width with its success probability and
average misfit.  These drive regression tests and the `table` command.

Reported magnitudes and phases are printed to few digits, which leaves the
interference phase Phi = alpha² sin(phi) completely undetermined modulo
2 pi (its spread across the rounding interval is thousands of radians), so
evaluating a row recovers Phi by a one-dimensional scan at the published
beta.  A few rows have a beta column that disagrees with alpha sin(phi/2)
beyond rounding; both readings are tried and the better one kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .metrics import WindowConfig, average_misfit, overall_probability
from .optimizer import batch_objective
from .schemes import TWO_PI, SchemeParams, family_to_kind, params_from_reduced, scheme_output
from .states import misfit
from .superposition import css_to_fock
from .targets import TargetSpec

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ReferenceRow:
    table: str
    row: int
    target: str
    family: str
    epsilon: float
    alpha: float
    phi: float
    beta: float
    x1: float
    x2: float
    x3: float | None = None
    r: float | None = None
    gamma: float | None = None
    delta: float | None = None
    overall_p: float | None = None
    epsilon_avg: float | None = None
    note: str = ""
    epsilon_anomalous: bool = False  # documented as irreproducible; not gated

    @property
    def label(self) -> str:
        return f"{self.table}.{self.row} {self.target}"

    def params_at(self, bigphi: float, beta: float | None = None) -> SchemeParams:
        kind, theta = family_to_kind(self.family)
        return params_from_reduced(
            kind,
            self.beta if beta is None else beta,
            bigphi,
            x1=self.x1, x2=self.x2, x3=self.x3,
            r=self.r, gamma=self.gamma, theta=theta,
        )


def _r1(row, tgt, eps, alpha, phi, beta, x1, x2, x3, note=""):
    return ReferenceRow("I", row, tgt, "s1-lattice", eps, alpha, phi, beta, x1, x2, x3, note=note)


TABLE_I = (
    _r1(1, "AS(1,2,1)", 1.421e-4, 22981, 7.1e-5, 0.82, 2.26, -2.18, 4.13),
    _r1(2, "AS(1,2,1)", 1.031e-4, 4363, 3.9e-4, 0.85, 2.039, -2.2, 3.81),
    _r1(3, "AS(1,2,1)", 1.027e-4, 349, 4.9e-3, 0.86, 1.97, -2.18, 3.75),
    _r1(4, "AS(1,2,1)", 1.137e-4, 886, 2e-3, 0.89, 1.83, 2.15, 3.54),
    _r1(5, "AS(1,2,1)", 1.046e-4, 347, 5.1e-3, 0.87, -1.91, 2.17, 3.65),
    _r1(6, "AS(1,2,1)", 1.055e-4, 238, 7.3e-3, 0.88, 1.88, -2.16, 3.62),
    _r1(7, "AS(1,2,1)", 1.586e-4, 698, 2.3e-3, 0.8, 2.35, -2.19, 4.241),
    _r1(8, "AS(1,2,1)", 1.046e-4, 417, 4.2e-3, 0.88, -1.89, 2.17, 3.62),
    _r1(9, "AS(1,2,1)", 1.106e-4, 307, 5.5e-3, 0.85, 2.08, 2.2, 3.87),
)


def _r2(row, tgt, eps, alpha, phi, beta, x1, x2, x3, delta, p, ea, note="", anomalous=False):
    return ReferenceRow("II", row, tgt, "s1-line", eps, alpha, phi, beta, x1, x2, x3,
                        delta=delta, overall_p=p, epsilon_avg=ea, note=note,
                        epsilon_anomalous=anomalous)


TABLE_II = (
    _r2(1, "AS(1,1.5,1)", 8.8e-5, 616, 1.7e-3, 0.55, 1.14, 0.82, 2.63, 0.75, 0.004, 0.073,
        note="not reproducible at the printed parameters (broad phase/beta scans bottom out near 0.65)",
        anomalous=True),
    _r2(2, "AS(1,2,1)", 2.6e-4, 245, 6.3e-3, 0.77, -1.97, -0.25, -1.94, 0.35, 0.025, 0.011),
    _r2(3, f"AS({_SQRT2},2.5,2)", 7.5e-3, 698, 3.7e-3, 1.29, 2.13, -1.03, -1.52, 0.3, 0.005, 0.043),
    _r2(4, f"AS({_SQRT2},3,2)", 4.4e-3, 691, 3.1e-3, 1.31, -2.17, -1.0, -1.61, 0.4, 0.012, 0.068,
        note="beta column disagrees with alpha sin(phi/2) beyond rounding"),
    _r2(5, "B(0.1,5)", 2.5e-4, 780, 6.4e-3, 0.6, 0.29, 3.72, 2.62, 1.0, 0.004, 0.041,
        note="beta column disagrees with alpha sin(phi/2) beyond rounding"),
    _r2(6, "B(0.3,6)", 9.6e-3, 492, 5.2e-3, 1.29, -0.38, 2.52, 0.8, 0.4, 0.014, 0.024),
    _r2(7, "B(0.2,8)", 2.8e-3, 939, 2.9e-3, 1.39, 0.54, -1.86, 2.17, 0.5, 0.017, 0.024),
    _r2(8, "ADHOC(4,1,1)", 3.4e-4, 269, 1.9e-3, 0.26, -3.99, 0.1, -0.45, 0.5, 0.085, 0.019),
    _r2(9, "ADHOC(8,5,3,1)", 2.0e-3, 540, 2.6e-3, 0.71, 3.44, 1.63, -3.59, 1.5, 0.005, 0.077),
)


def _r3(row, tgt, eps, alpha, phi, beta, x1, x2, x3, delta, p, ea, note=""):
    return ReferenceRow("III", row, tgt, "s1-lattice", eps, alpha, phi, beta, x1, x2, x3,
                        delta=delta, overall_p=p, epsilon_avg=ea, note=note)


TABLE_III = (
    _r3(1, "AS(1,1,1)", 2.3e-4, 1114, 1.1e-3, 0.63, 1.77, 0.23, 2.02, 0.5, 0.005, 0.078),
    _r3(2, f"AS({_SQRT2},1.5,2)", 4.2e-3, 341, 5.1e-3, 0.86, 0.92, -1.04, 2.37, 0.4, 0.002, 0.082),
    _r3(3, "B(0.1,4)", 1.7e-4, 481, 2.3e-3, 0.56, 0.84, 1.51, 2.03, 0.4, 0.001, 0.028),
    _r3(4, "B(0.4,3)", 6e-3, 1105, 1.9e-3, 1.02, 0.0, -1.58, 1.55, 0.3, 0.003, 0.049),
    _r3(5, "B(0.2,8)", 6.3e-3, 449, 6.9e-3, 1.54, 0.0, -2.15, 2.1, 0.5, 0.004, 0.054),
    _r3(6, "B(0.2,10)", 1.5e-3, 1679, 1.7e-3, 1.42, 0.0, -2.39, 1.93, 0.8, 0.002, 0.051,
        note="reported probability is not consistent with the stated window definition at any delta"),
    _r3(7, "B(0.3,10)", 6.1e-3, 407, 8.3e-3, 1.71, 0.0, -2.43, 2.44, 0.7, 0.001, 0.057),
    _r3(8, "NS(2,0.1)", 5.5e-4, 671, 1.3e-3, 0.45, 0.56, -2.45, 0.0, 0.15, 0.009, 0.088),
    _r3(9, "ADHOC(3,0,1)", 6.4e-4, 227, 1.5e-3, 0.17, -0.09, -2.99, 0.0, 0.3, 0.003, 0.062),
    _r3(10, "ADHOC(4,1,1)", 7.9e-4, 374, 5.8e-3, 1.1, -2.47, -1.93, 1.61, 0.5, 0.008, 0.087),
)


def _r4(row, tgt, eps, alpha, phi, beta, r, gamma, x1, x2, delta, p, ea, note=""):
    return ReferenceRow("IV", row, tgt, "s2-line", eps, alpha, phi, beta, x1, x2,
                        r=r, gamma=gamma, delta=delta, overall_p=p, epsilon_avg=ea, note=note)


TABLE_IV = (
    _r4(1, "AS(1,1,1)", 1.7e-3, 549, 1.4e-3, 0.38, 0.1, 0.44, 0.68, 1.25, 0.25, 0.032, 0.045),
    _r4(2, "AS(1,2,1)", 3.4e-3, 1355, 1.2e-3, 0.78, 0.1, 0.44, 0.42, 1.35, 0.3, 0.094, 0.011),
    _r4(3, f"AS({_SQRT2},3,2)", 5.9e-3, 383, 6.8e-3, 1.31, 0.002, 0.32, 0.5, 0.92, 0.3, 0.04, 0.011),
    _r4(4, "B(0.2,8)", 6e-3, 1883, 1.2e-3, 1.14, 0.1, 0.44, 0.41, 1.08, 0.35, 0.098, 0.012),
    _r4(5, "NS(1,0.05)", 2.1e-4, 258, 2.2e-3, 0.29, 0.17, 0.51, 1.49, 2.11, 0.15, 0.002, 0.043),
    _r4(6, "NS(1,0.15)", 2.6e-4, 206, 6.1e-3, 0.63, 0.3, 0.66, 1.51, 2.14, 0.15, 0.005, 0.038),
    _r4(7, "NS(2,0.3)", 1.3e-5, 92, 7.7e-3, 0.36, 0.85, 1.19, 0.67, 0.0, 0.15, 0.01, 0.048),
    _r4(8, "NS(2,0.5)", 2.8e-3, 509, 4.5e-3, 1.13, 0.53, 0.89, 0.84, 0.0, 0.15, 0.002, 0.039),
    _r4(9, "ADHOC(1,0,1)", 9.1e-4, 731, 1.1e-3, 0.38, 0.002, 0.32, 0.0, 0.0, 0.15, 0.028, 0.025),
    _r4(10, "ADHOC(2,2,1)", 4.2e-3, 242, 3.9e-3, 0.47, 0.001, 0.32, 0.23, 1.2, 0.4, 0.17, 0.019),
)


def _r5(row, tgt, eps, alpha, phi, beta, r, gamma, x1, x2, delta, p, ea, note="", anomalous=False):
    return ReferenceRow("V", row, tgt, "s2-lattice", eps, alpha, phi, beta, x1, x2,
                        r=r, gamma=gamma, delta=delta, overall_p=p, epsilon_avg=ea, note=note,
                        epsilon_anomalous=anomalous)


TABLE_V = (
    _r5(1, "AS(1,1,1)", 3.2e-4, 264, 2.5e-3, 0.33, 0.1, 0.44, 1.06, 1.75, 0.3, 0.008, 0.05),
    _r5(2, "AS(1,2,1)", 3.2e-6, 586, 2.7e-3, 0.78, 0.13, 0.47, 0.42, 1.5, 0.35, 0.13, 0.003),
    _r5(3, f"AS({_SQRT2},1.5,2)", 2.5e-3, 1595, 1.4e-3, 1.14, 0.37, 0.73, 1.51, 1.72, 0.25, 0.026, 0.04),
    _r5(4, "B(0.2,8)", 6.9e-6, 1810, 1.5e-3, 1.31, 0.2, 0.55, 0.0, 1.46, 0.35, 0.13, 0.001),
    _r5(5, "B(0.4,6)", 3.7e-4, 771, 4.6e-3, 1.76, 0.43, 0.79, 1.12, 1.62, 0.4, 0.028, 0.009),
    _r5(6, "B(0.5,5)", 3.3e-3, 2751, 1.3e-3, 1.83, 0.54, 0.9, 1.49, 1.65, 0.45, 0.014, 0.028),
    _r5(7, "ADHOC(1,0,1)", 1.5e-6, 267, 4.7e-3, 0.63, 0.11, 0.45, 0.0, 0.0, 0.15, 0.016, 0.03),
    _r5(8, "ADHOC(2,1,1)", 9.2e-5, 90, 7.5e-3, 0.33, 0.1, 0.44, 0.11, 1.04, 0.2, 0.051, 0.003,
        note="reported misfit appears swapped with the row below; these parameters reproduce"
             " ~9e-4 against ADHOC(2,2,1) and ~4e-2 against the labeled target",
        anomalous=True),
    _r5(9, "ADHOC(2,2,1)", 1.5e-3, 403, 2.7e-3, 0.55, 0.13, 0.47, 0.0, 0.4, 0.15, 0.031, 0.011,
        note="these parameters reproduce the reported misfit against ADHOC(2,1,1), not the label",
        anomalous=True),
)


TABLES: dict[str, tuple[ReferenceRow, ...]] = {
    "I": TABLE_I, "II": TABLE_II, "III": TABLE_III, "IV": TABLE_IV, "V": TABLE_V,
}

# Rows whose misfit reproduction is gated in the acceptance suite; they span
# every table and avoid the rows flagged above as internally inconsistent.
DESIGNATED: tuple[tuple[str, int], ...] = (
    ("I", 3), ("II", 2), ("II", 5), ("II", 8),
    ("III", 3), ("III", 8), ("IV", 7), ("V", 4),
)


def get_row(table: str, row: int) -> ReferenceRow:
    for r in TABLES[table]:
        if r.row == row:
            return r
    raise KeyError(f"no row {row} in table {table}")


def tolerance_factor(published_eps: float) -> float:
    """Reproduction tolerance: 10x, relaxed to 100x below 1e-5 where the
    two-digit parameter rounding dominates."""
    return 100.0 if published_eps < 1e-5 else 10.0


@dataclass(frozen=True)
class RowEvaluation:
    row: ReferenceRow
    params: SchemeParams
    epsilon: float
    epsilon_raw: float
    ratio: float
    within_tolerance: bool
    overall_p: float | None = None
    per_measurement_p: tuple | None = None
    epsilon_avg: float | None = None


def _beta_candidates(row: ReferenceRow) -> list[float]:
    derived = row.alpha * math.sin(0.5 * row.phi)
    if abs(derived - row.beta) < 1e-12:
        return [row.beta]
    return [row.beta, derived]  # rounding (or a misprint) separates the two readings


def _scan_phase(row: ReferenceRow, beta: float, target_coeffs, n_max: int, points: int):
    phis = np.linspace(0.0, TWO_PI, points, endpoint=False)
    genes = np.column_stack([
        np.full(points, beta), phis,
        np.full(points, row.x1), np.full(points, row.x2),
        np.full(points, row.x3 if row.x3 is not None else row.r),
    ])
    obj = batch_objective(row.family, genes, target_coeffs, n_max, gamma_override=row.gamma)
    i = int(np.argmin(obj))
    return float(phis[i]), float(obj[i])


def evaluate_row(
    row: ReferenceRow,
    n_max: int = 96,
    phase_points: int = 720,
    with_probabilities: bool = True,
) -> RowEvaluation:
    """Evaluate a reference row, recovering the printed-away interference phase.

    The published beta and measurement results are kept fixed; only
    Phi = alpha² sin(phi) mod 2 pi, which two-digit rounding of (alpha, phi)
    cannot pin down, is recovered by a scan plus a bounded polish.
    """
    target = TargetSpec.parse(row.target)
    tvec = target.build(n_max)

    raw = SchemeParams(
        scheme=family_to_kind(row.family)[0], alpha=row.alpha, phi=row.phi,
        x1=row.x1, x2=row.x2, x3=row.x3, r=row.r, gamma=row.gamma,
        theta=family_to_kind(row.family)[1],
    )
    eps_raw = misfit(css_to_fock(scheme_output(raw), n_max), tvec)

    best = None
    for beta in _beta_candidates(row):
        phi0, _ = _scan_phase(row, beta, tvec.coeffs, n_max, phase_points)

        def eps_of(f: float) -> float:
            return misfit(css_to_fock(scheme_output(row.params_at(f % TWO_PI, beta)), n_max), tvec)

        span = TWO_PI / phase_points
        res = minimize_scalar(eps_of, bounds=(phi0 - span, phi0 + span), method="bounded",
                              options={"xatol": 1e-12})
        eps = eps_of(float(res.x))
        if best is None or eps < best[0]:
            best = (eps, row.params_at(float(res.x) % TWO_PI, beta))
    eps, params = best

    overall = per = eps_avg = None
    if with_probabilities and row.delta is not None:
        w = WindowConfig(row.delta)
        overall, per_list = overall_probability(params, w)
        per = tuple(per_list)
        eps_avg = average_misfit(params, tvec, w, n_max)
    ratio = eps / row.epsilon
    return RowEvaluation(
        row=row, params=params, epsilon=eps, epsilon_raw=eps_raw, ratio=ratio,
        within_tolerance=ratio <= tolerance_factor(row.epsilon),
        overall_p=overall, per_measurement_p=per, epsilon_avg=eps_avg,
    )
