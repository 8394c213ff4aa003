"""Quantum particle in a box with radially oscillating walls.

The moving-wall problem is mapped onto a static domain, where the wall
motion appears as a time-dependent dilation coupling.  This package
builds the static-domain eigenbasis (disc or segment), assembles the
dilation and position operators over it, propagates states exactly and
to first perturbative order, and locates drive-frequency resonances.
"""

__version__ = "0.1.0"

from .basis import (
    BasisSet,
    BoxSpec,
    Mode,
    ModeIndex,
    PhysicalConstants,
    Truncation,
    build_basis,
    eval_mode,
    normalization,
)
from .bessel import bessel_j, bessel_j_prime, bessel_zero
from .dynamics import (
    DriveProfile,
    EffectiveHamiltonianModel,
    Sinusoid,
    StateVector,
    Tabulated,
    TimeGrid,
    Trajectory,
    h_eff,
    lambda_eval,
    observables,
    propagate_exact,
    propagate_first_order,
)
from .operators import (
    OperatorMatrix,
    dilation_matrix,
    position_matrix,
    radial_dilation_element,
)
from .quadrature import QuadratureSpec, adaptive_quad, default_quadrature_spec
from .resonance import (
    ScanResult,
    TransitionTable,
    resonance_scan,
    transition_frequencies,
    velocity_spectrum,
)

__all__ = [
    "BasisSet",
    "BoxSpec",
    "DriveProfile",
    "EffectiveHamiltonianModel",
    "Mode",
    "ModeIndex",
    "OperatorMatrix",
    "PhysicalConstants",
    "QuadratureSpec",
    "ScanResult",
    "Sinusoid",
    "StateVector",
    "Tabulated",
    "TimeGrid",
    "Trajectory",
    "TransitionTable",
    "Truncation",
    "adaptive_quad",
    "bessel_j",
    "bessel_j_prime",
    "bessel_zero",
    "build_basis",
    "default_quadrature_spec",
    "dilation_matrix",
    "eval_mode",
    "h_eff",
    "lambda_eval",
    "normalization",
    "observables",
    "position_matrix",
    "propagate_exact",
    "propagate_first_order",
    "radial_dilation_element",
    "resonance_scan",
    "transition_frequencies",
    "velocity_spectrum",
]
