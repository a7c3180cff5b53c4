"""Steady-state entanglement of a driven three-mode cavity-magnonic system.

A microwave cavity mode couples to two magnon modes carrying self-Kerr
and cross-Kerr nonlinearities.  The package linearizes the dynamics
around the classical working point, solves the steady-state covariance
matrix, and reports Gaussian entanglement measures (pairwise and
one-vs-two logarithmic negativities, the minimum residual contangle)
over parameter sweeps.

The HTTP layer lives in :mod:`magkerr.service` and the command line in
:mod:`magkerr.cli`; both are kept out of this namespace so importing
the library does not pull in the web stack.
"""

__version__ = "0.1.0"

from .bogoliubov import BogoliubovParams, MatchingReport, matching_report, squeeze_params
from .configfile import LoadedConfig, load_config, load_config_text
from .dynamics import (
    StabilityVerdict,
    build_diffusion,
    build_drift,
    char_poly,
    integrate_transient,
    is_stable,
    routh_hurwitz_stable,
    solve_lyapunov,
)
from .errors import (
    ConfigError,
    IntegrationError,
    MagkerrError,
    NumericalError,
    PhysicalityError,
    SolverError,
    SqueezeDomainError,
    StabilityError,
)
from .gaussian import (
    ContangleReport,
    EntanglementReport,
    PhysicalityReport,
    entanglement_report,
    excitation_numbers,
    log_negativity_one_vs_two,
    log_negativity_pair,
    partial_transpose,
    physicality_check,
    residual_contangle,
    symplectic_eigenvalues,
)
from .model import (
    BareConfig,
    EffectiveConfig,
    bath_occupancies,
    derive_effective,
    ghz,
    mhz,
    nhz,
    thermal_occupancy,
    to_mhz,
)
from .steady_state import (
    MeanFieldState,
    branch_scan,
    continuation_solve,
    mean_field_residual,
    solve_mean_field,
)
from .sweep import (
    PRESET_NAMES,
    SweepAxis,
    SweepGrid,
    SweepRecord,
    preset,
    records_to_csv,
    run_point,
    run_sweep,
)

__all__ = [
    "__version__",
    "BareConfig",
    "BogoliubovParams",
    "ConfigError",
    "ContangleReport",
    "EffectiveConfig",
    "EntanglementReport",
    "IntegrationError",
    "LoadedConfig",
    "MagkerrError",
    "MatchingReport",
    "MeanFieldState",
    "NumericalError",
    "PRESET_NAMES",
    "PhysicalityError",
    "PhysicalityReport",
    "SolverError",
    "SqueezeDomainError",
    "StabilityError",
    "StabilityVerdict",
    "SweepAxis",
    "SweepGrid",
    "SweepRecord",
    "bath_occupancies",
    "branch_scan",
    "build_diffusion",
    "build_drift",
    "char_poly",
    "continuation_solve",
    "derive_effective",
    "entanglement_report",
    "excitation_numbers",
    "ghz",
    "integrate_transient",
    "is_stable",
    "load_config",
    "load_config_text",
    "log_negativity_one_vs_two",
    "log_negativity_pair",
    "matching_report",
    "mean_field_residual",
    "mhz",
    "nhz",
    "partial_transpose",
    "physicality_check",
    "preset",
    "records_to_csv",
    "residual_contangle",
    "routh_hurwitz_stable",
    "run_point",
    "run_sweep",
    "solve_lyapunov",
    "solve_mean_field",
    "squeeze_params",
    "symplectic_eigenvalues",
    "thermal_occupancy",
    "to_mhz",
]
