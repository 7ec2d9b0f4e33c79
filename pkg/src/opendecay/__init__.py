"""Open-system dynamics in the rapid-decay scaling regime.

The package covers a dissipative two-level system (triple/Bloch
evolution, Lindblad form, complete-positivity diagnostics) and quantum
Brownian motion of a harmonic oscillator (memory-kernel propagator,
time-local master-equation coefficients, Gaussian moment transport and
a truncated number-basis cross-check), plus a small scenario runner
behind the ``opendecay`` command line.
"""

__version__ = "0.1.0"

from . import qbm  # noqa: F401  (re-export the subpackage)
from .acceptance import CriterionResult, run_all
from .bloch import (
    BlochGenerator,
    DecaySpectrum,
    decay_spectrum,
    find_classification_boundary,
    propagate_bloch,
    propagator_matrix,
    rapid_generator,
    scan_decay_regimes,
    weak_generator,
)
from .errors import (
    AccuracyError,
    ConfigError,
    ConventionMismatchError,
    DegenerateSystemError,
    DivergenceError,
    IntegratorAccuracyError,
    InversionError,
    NodeSingularityError,
    OpenDecayError,
    OverdampedRenormalizationError,
    StiffnessError,
    StructuralError,
    TruncationError,
    ValidationError,
)
from .lindblad import (
    GKSReport,
    Liouvillian2,
    bloch_density_bridge,
    gks_check,
    propagate_density,
    random_density_matrix,
    spin_liouvillian,
    steady_states,
)
from .model import (
    BathSpectrum,
    CouplingScale,
    DensityMatrix2,
    GaussianState,
    OscillatorParams,
    SpinBosonParams,
    UnitsConvention,
    make_spin_params,
    validate_density,
)
from .scenarios import (
    ResultTable,
    parse_config,
    parse_csv,
    parse_json,
    run_scenario,
)
from .spectral import (
    bose_occupation,
    dressed_rate,
    gamma_theta,
    gamma_theta_weak,
    limit_rates,
    renormalized_frequency_sq,
    self_energy,
    spectral_density,
)

__all__ = [
    "__version__",
    # errors
    "OpenDecayError",
    "ConfigError",
    "ValidationError",
    "DegenerateSystemError",
    "DivergenceError",
    "AccuracyError",
    "OverdampedRenormalizationError",
    "StiffnessError",
    "IntegratorAccuracyError",
    "ConventionMismatchError",
    "StructuralError",
    "NodeSingularityError",
    "InversionError",
    "TruncationError",
    # model
    "UnitsConvention",
    "SpinBosonParams",
    "make_spin_params",
    "OscillatorParams",
    "BathSpectrum",
    "CouplingScale",
    "DensityMatrix2",
    "GaussianState",
    "validate_density",
    # spectral
    "spectral_density",
    "bose_occupation",
    "dressed_rate",
    "limit_rates",
    "gamma_theta",
    "gamma_theta_weak",
    "self_energy",
    "renormalized_frequency_sq",
    # bloch
    "BlochGenerator",
    "DecaySpectrum",
    "rapid_generator",
    "weak_generator",
    "propagate_bloch",
    "propagator_matrix",
    "decay_spectrum",
    "scan_decay_regimes",
    "find_classification_boundary",
    # lindblad
    "Liouvillian2",
    "GKSReport",
    "spin_liouvillian",
    "propagate_density",
    "random_density_matrix",
    "steady_states",
    "gks_check",
    "bloch_density_bridge",
    # scenarios / acceptance
    "ResultTable",
    "parse_config",
    "parse_csv",
    "parse_json",
    "run_scenario",
    "CriterionResult",
    "run_all",
    "qbm",
]
