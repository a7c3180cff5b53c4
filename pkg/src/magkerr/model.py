"""Parameters of the driven cavity / Kittel-magnon / HMS-magnon model.

Two levels of description coexist and both are first-class inputs:

* :class:`BareConfig` holds laboratory quantities: mode frequencies, the
  drive frequency and amplitudes, bare self-Kerr and cross-Kerr
  coefficients.  Used when the classical working point is solved for
  explicitly ("microscopic" mode).
* :class:`EffectiveConfig` holds the coefficients of the linearized
  fluctuation model: drive-dressed detunings, effective Kerr rates, the
  enhanced cross-Kerr coupling, and bath occupancies.  Reference
  parameter tables quote these directly ("effective" mode).

:func:`derive_effective` is the bridge: given a bare configuration and
the classical circulating occupations ``|<b>|^2`` and ``|<c>|^2`` it
produces the effective coefficients

    Delta_b~ = Delta_b + 4 K_b |<b>|^2 + G |<c>|^2
    Delta_c~ = Delta_c + 4 K_c |<c>|^2 + G |<b>|^2
    K_b~     = 2 K_b |<b>|^2
    K_c~     = 2 K_c |<c>|^2
    G~       = G sqrt(|<b>|^2 |<c>|^2)

using the real-amplitude convention for the dressed couplings (the
classical phases are absorbed into the quadrature frame).

Unit conventions
----------------
Every frequency and rate attribute is an angular frequency in rad/s.
Human-facing interfaces (config files, the HTTP API, CSV output) use the
customary "/2pi" figures instead: MHz for rates and detunings, nHz for
bare Kerr coefficients, Kelvin for the electron-bath temperature.
:func:`mhz`, :func:`ghz` and :func:`nhz` convert a "/2pi" figure to
rad/s; :func:`to_mhz` goes back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from scipy.constants import hbar as HBAR, k as K_B

from .errors import ConfigError

TWO_PI = 2.0 * math.pi

MODES = ("a", "b", "c")


def mhz(value: float) -> float:
    """rad/s from a frequency quoted as value = f/2pi in MHz."""
    return TWO_PI * 1.0e6 * value


def ghz(value: float) -> float:
    """rad/s from a frequency quoted as value = f/2pi in GHz."""
    return TWO_PI * 1.0e9 * value


def nhz(value: float) -> float:
    """rad/s from a rate quoted as value = f/2pi in nHz."""
    return TWO_PI * 1.0e-9 * value


def to_mhz(omega: float) -> float:
    """The f/2pi figure in MHz for an angular frequency in rad/s."""
    return omega / (TWO_PI * 1.0e6)


@dataclass(frozen=True)
class BareConfig:
    """Laboratory-frame parameters, all angular frequencies in rad/s.

    Detunings are measured from the drive: ``Delta_x = omega_x - omega_d``.
    Either the detunings or the absolute frequencies may be supplied; when
    both are present they must agree.  ``K_b``/``K_c`` are the self-Kerr
    coefficients of the two magnon modes, ``G`` the cross-Kerr coefficient
    between them, ``g_ab`` the cavity-Kittel beam-splitter coupling, and
    ``Omega_b``/``Omega_c`` the classical drive amplitudes.  ``T_e`` is the
    temperature (K) of the common equilibrium bath.
    """

    gamma_a: float
    gamma_b: float
    gamma_c: float
    Delta_a: float | None = None
    Delta_b: float | None = None
    Delta_c: float | None = None
    omega_a: float | None = None
    omega_b: float | None = None
    omega_c: float | None = None
    omega_d: float | None = None
    K_b: float = 0.0
    K_c: float = 0.0
    G: float = 0.0
    g_ab: float = 0.0
    Omega_b: float = 0.0
    Omega_c: float = 0.0
    T_e: float = 0.0

    def detuning(self, mode: str) -> float:
        """Resolved drive detuning of ``mode``, from Delta_x or omega_x - omega_d."""
        delta = getattr(self, f"Delta_{mode}")
        if delta is not None:
            return delta
        omega = getattr(self, f"omega_{mode}")
        if omega is None or self.omega_d is None:
            raise ConfigError(
                f"Delta_{mode} or (omega_{mode}, omega_d) must be supplied"
            )
        return omega - self.omega_d


@dataclass(frozen=True)
class EffectiveConfig:
    """Coefficients of the linearized fluctuation model, rad/s.

    ``Delta_b_tilde``/``Delta_c_tilde`` are the Kerr-dressed magnon
    detunings, ``K_b_tilde``/``K_c_tilde`` the effective self-Kerr rates,
    ``G_tilde`` the drive-enhanced cross-Kerr coupling, and ``n_a``,
    ``n_b``, ``n_c`` the thermal occupancies of each mode's bath.
    """

    Delta_a: float
    Delta_b_tilde: float
    Delta_c_tilde: float
    gamma_a: float
    gamma_b: float
    gamma_c: float
    K_b_tilde: float = 0.0
    K_c_tilde: float = 0.0
    G_tilde: float = 0.0
    g_ab: float = 0.0
    n_a: float = 0.0
    n_b: float = 0.0
    n_c: float = 0.0


def thermal_occupancy(omega: float, T_e: float) -> float:
    """Bose-Einstein occupancy of a mode at angular frequency ``omega``.

    Parameters
    ----------
    omega : float
        Mode angular frequency in rad/s; must be positive.
    T_e : float
        Bath temperature in K; must be non-negative.  ``T_e = 0`` returns
        exactly 0.0.
    """
    if not math.isfinite(omega) or omega <= 0.0:
        raise ValueError("omega must be positive and finite")
    if not math.isfinite(T_e) or T_e < 0.0:
        raise ValueError("T_e must be non-negative and finite")
    if T_e == 0.0:
        return 0.0
    x = HBAR * omega / (K_B * T_e)
    if x > 700.0:
        # exp(x) overflows double precision; the occupancy underflows to 0.
        return 0.0
    return 1.0 / math.expm1(x)


def _check_finite(name: str, value, out: list[str]) -> None:
    if value is not None and not math.isfinite(value):
        out.append(f"{name} must be finite")


def validate_bare(cfg: BareConfig) -> list[str]:
    """All rule violations of a bare configuration, empty when valid."""
    out: list[str] = []
    for f in fields(cfg):
        _check_finite(f.name, getattr(cfg, f.name), out)
    if out:
        return out
    for mode in MODES:
        if getattr(cfg, f"gamma_{mode}") <= 0.0:
            out.append(f"gamma_{mode} must be positive")
    if cfg.T_e < 0.0:
        out.append("T_e must be non-negative")
    for mode in MODES:
        omega = getattr(cfg, f"omega_{mode}")
        if omega is not None and omega <= 0.0:
            out.append(f"omega_{mode} must be positive")
    if cfg.omega_d is not None and cfg.omega_d <= 0.0:
        out.append("omega_d must be positive")
    for mode in MODES:
        delta = getattr(cfg, f"Delta_{mode}")
        omega = getattr(cfg, f"omega_{mode}")
        if delta is None and (omega is None or cfg.omega_d is None):
            out.append(f"Delta_{mode} or (omega_{mode}, omega_d) must be supplied")
        elif delta is not None and omega is not None and cfg.omega_d is not None:
            # Config files round to ~1e-6 relative; anything beyond that is
            # a genuinely contradictory input, not rounding.
            tol = 1.0e-6 * max(1.0, abs(omega), abs(cfg.omega_d))
            if abs(delta - (omega - cfg.omega_d)) > tol:
                out.append(f"Delta_{mode} inconsistent with omega_{mode} - omega_d")
    return out


def validate_effective(cfg: EffectiveConfig) -> list[str]:
    """All rule violations of an effective configuration, empty when valid."""
    out: list[str] = []
    for f in fields(cfg):
        _check_finite(f.name, getattr(cfg, f.name), out)
    if out:
        return out
    for mode in MODES:
        if getattr(cfg, f"gamma_{mode}") <= 0.0:
            out.append(f"gamma_{mode} must be positive")
    for mode in MODES:
        if getattr(cfg, f"n_{mode}") < 0.0:
            out.append(f"n_{mode} must be non-negative")
    return out


def validate(cfg) -> list[str]:
    """Violation list for either config flavor (empty when valid)."""
    if isinstance(cfg, BareConfig):
        return validate_bare(cfg)
    if isinstance(cfg, EffectiveConfig):
        return validate_effective(cfg)
    raise TypeError(f"expected BareConfig or EffectiveConfig, got {type(cfg)!r}")


def require_valid(cfg) -> None:
    """Raise :class:`ConfigError` listing every violation, if any."""
    violations = validate(cfg)
    if violations:
        raise ConfigError("; ".join(violations))


def bath_occupancies(
    cfg: BareConfig,
) -> tuple[float, float, float]:
    """Thermal occupancy of each mode's bath at the lab-frame frequencies."""
    if cfg.T_e == 0.0:
        return (0.0, 0.0, 0.0)
    occ = []
    for mode in MODES:
        omega = getattr(cfg, f"omega_{mode}")
        if omega is None:
            raise ConfigError(
                "bath occupancies at T_e > 0 require omega_a, omega_b, omega_c"
            )
        occ.append(thermal_occupancy(omega, cfg.T_e))
    return tuple(occ)


def derive_effective(cfg: BareConfig, nb2: float, nc2: float) -> EffectiveConfig:
    """Effective linearized coefficients at a classical working point.

    Parameters
    ----------
    cfg : BareConfig
        Valid bare configuration.
    nb2, nc2 : float
        Classical circulating occupations ``|<b>|^2`` and ``|<c>|^2``;
        must be non-negative.
    """
    if not (math.isfinite(nb2) and nb2 >= 0.0) or not (
        math.isfinite(nc2) and nc2 >= 0.0
    ):
        raise ValueError("mean occupations |<b>|^2, |<c>|^2 must be non-negative")
    require_valid(cfg)
    n_a, n_b, n_c = bath_occupancies(cfg)
    return EffectiveConfig(
        Delta_a=cfg.detuning("a"),
        Delta_b_tilde=cfg.detuning("b") + 4.0 * cfg.K_b * nb2 + cfg.G * nc2,
        Delta_c_tilde=cfg.detuning("c") + 4.0 * cfg.K_c * nc2 + cfg.G * nb2,
        K_b_tilde=2.0 * cfg.K_b * nb2,
        K_c_tilde=2.0 * cfg.K_c * nc2,
        G_tilde=cfg.G * math.sqrt(nb2 * nc2),
        g_ab=cfg.g_ab,
        gamma_a=cfg.gamma_a,
        gamma_b=cfg.gamma_b,
        gamma_c=cfg.gamma_c,
        n_a=n_a,
        n_b=n_b,
        n_c=n_c,
    )
