"""Stability and ergodicity analysis for censored/kinked structural VARs.

The package reduces a threshold model to a cone-partitioned switched linear
system and bounds its growth rate three ways: products of regime matrices
(lower and norm upper bounds), transition-constrained Lyapunov programs,
and cone-relaxed programs with nonnegative multipliers.  A certified bound
below one implies the stochastic model is stable in the ergodic sense; a
product lower bound above one is evidence of explosiveness.
"""

from .model import (
    CanonicalModel,
    CksvarModel,
    CoherenceError,
    CoherenceReport,
    MonetaryModelSpec,
    RegimeSystem,
    build_monetary,
    build_regime_system,
    canonicalize,
    check_coherence,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    shift_threshold,
)
from .spectral import (
    SpectralBound,
    jsr_lower_bound,
    jsr_upper_bound_norm,
    spectral_radius,
)
from .lyapunov import (
    LmiProblem,
    LmiResult,
    LyapunovCertificate,
    ValidationReport,
    bound_by_bisection,
    build_lmi_problem,
    lift_cone,
    lmi_feasible,
    m_lift_matrix,
    m_lift_vector,
    validate_certificate,
)
from .simulate import (
    StabilityScanReport,
    Trajectory,
    Verdict,
    VerdictOptions,
    ergodicity_verdict,
    simulate_cksvar,
    simulate_skeleton,
    skeleton_stability_scan,
    trajectory_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CksvarModel",
    "CanonicalModel",
    "CoherenceError",
    "CoherenceReport",
    "MonetaryModelSpec",
    "RegimeSystem",
    "SpectralBound",
    "LmiProblem",
    "LmiResult",
    "LyapunovCertificate",
    "ValidationReport",
    "StabilityScanReport",
    "Trajectory",
    "Verdict",
    "VerdictOptions",
    "build_monetary",
    "build_regime_system",
    "build_lmi_problem",
    "bound_by_bisection",
    "canonicalize",
    "check_coherence",
    "ergodicity_verdict",
    "jsr_lower_bound",
    "jsr_upper_bound_norm",
    "lift_cone",
    "lmi_feasible",
    "load_model",
    "m_lift_matrix",
    "m_lift_vector",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "shift_threshold",
    "simulate_cksvar",
    "simulate_skeleton",
    "skeleton_stability_scan",
    "spectral_radius",
    "trajectory_to_csv",
    "validate_certificate",
]
