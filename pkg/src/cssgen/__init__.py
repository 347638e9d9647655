"""Conditional engineering of nonclassical states via coherent-state
superpositions in traveling optical fields: analytic scheme outputs,
a brute-force Fock-basis oracle, measurement statistics, and a
genetic-algorithm parameter search."""

from .errors import (
    AllOutcomesDegenerate,
    ConfigError,
    CssgenError,
    DegenerateSuperposition,
    NotNormalized,
    TailTooHeavy,
    TargetUnbuildable,
)
from .metrics import (
    RunReport,
    TwoModeCss,
    WindowConfig,
    average_misfit,
    overall_probability,
    reduced_density_quadrature_pdf,
    run_report,
    success_probability,
)
from .optimizer import Bounds, GaConfig, OptimizeResult, optimize, reoptimize_fixed_phi
from .oracle import TwoModeFock, bs50_fock, project_quadrature, simulate_scheme
from .schemes import (
    IntermediateCoeffs,
    SchemeKind,
    SchemeParams,
    SqueezedVacuumCss,
    intermediate_coeffs,
    params_from_reduced,
    scheme1_lattice_output,
    scheme1_line_output,
    scheme2_output,
    scheme_output,
    small_alpha_equivalent,
    squeezed_vacuum_css,
)
from .states import (
    FockVector,
    coherent_overlap,
    coherent_to_fock,
    fidelity,
    hermite_psi,
    misfit,
    quadrature_overlap,
)
from .superposition import (
    CoherentSuperposition,
    css_norm_squared,
    css_normalize,
    css_to_fock,
)
from .targets import (
    TargetSpec,
    adhoc_superposition,
    amplitude_squeezed,
    binomial_state,
    squeezed_number,
    squeezed_vacuum,
)

__version__ = "0.1.0"
