"""Squeezed-frame analysis of the magnon pair.

The self-Kerr terms turn each magnon mode into a detuned degenerate
parametric problem; diagonalizing it with a Bogoliubov (two-mode
squeeze-frame) rotation explains where the cavity detuning should sit
for optimal entanglement extraction.  For a mode with dressed detuning
``Delta~`` and effective Kerr rate ``K~``:

    C        = (Delta~ - K~) / (Delta~ + K~)      (squeeze parameter base)
    theta    = (1/4) ln C                          (squeeze angle)
    Delta_beta = sqrt(Delta~^2 - K~^2)             (quasiparticle detuning)

and the cavity-facing couplings pick up hyperbolic factors,
``g_cos = g_ab cosh(theta)``, ``g_sin = g_ab sinh(theta)``, while the
cross-Kerr coupling is rescaled to ``G_script = G~ sqrt(C)``.  The frame
only exists while ``|Delta~| > |K~|`` (C > 0).

:func:`squeeze_params` reports per-mode and symmetrized quantities (the
symmetrized ones use the mean of the b and c values, appropriate when
the two magnon branches sit close together).  :func:`matching_report`
summarizes the candidate cavity detunings: the bare matching conditions
``-Delta~_b`` / ``-Delta~_c`` and the squeeze-frame prediction
``-sign(Delta~) Delta_beta``, which shifts toward zero as the Kerr terms
grow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SqueezeDomainError
from .model import EffectiveConfig, require_valid


@dataclass(frozen=True)
class BogoliubovParams:
    """Squeeze-frame quantities, per magnon mode and symmetrized."""

    C_b: float
    C_c: float
    theta_b: float
    theta_c: float
    C_sym: float
    theta_sym: float
    Delta_beta_b: float
    Delta_beta_c: float
    Delta_beta: float
    G_script: float
    g_cos: float
    g_sin: float


@dataclass(frozen=True)
class MatchingReport:
    """Candidate cavity detunings for entanglement extraction, rad/s.

    ``delta_a_bogoliubov`` is ``None`` (with ``note`` explaining why)
    when the squeeze frame is undefined at the given coefficients.
    """

    delta_a_match_b: float
    delta_a_match_bc: float
    delta_a_bogoliubov: float | None
    note: str = ""


def _squeeze_base(delta: float, kerr: float, label: str) -> float:
    if kerr == 0.0:
        return 1.0
    denom = delta + kerr
    if denom == 0.0 or (delta - kerr) / denom <= 0.0:
        raise SqueezeDomainError(
            f"Bogoliubov frame undefined; |Delta_tilde| <= K_tilde ({label})"
        )
    return (delta - kerr) / denom


def squeeze_params(cfg: EffectiveConfig) -> BogoliubovParams:
    """Squeeze-frame parameters of both magnon modes.

    Raises :class:`SqueezeDomainError` when any of the per-mode or
    symmetrized squeeze bases is non-positive (``|Delta~| <= K~``).
    """
    require_valid(cfg)
    c_b = _squeeze_base(cfg.Delta_b_tilde, cfg.K_b_tilde, "mode b")
    c_c = _squeeze_base(cfg.Delta_c_tilde, cfg.K_c_tilde, "mode c")
    delta_sym = 0.5 * (cfg.Delta_b_tilde + cfg.Delta_c_tilde)
    kerr_sym = 0.5 * (cfg.K_b_tilde + cfg.K_c_tilde)
    c_sym = _squeeze_base(delta_sym, kerr_sym, "symmetrized")
    theta_sym = 0.25 * math.log(c_sym)
    return BogoliubovParams(
        C_b=c_b,
        C_c=c_c,
        theta_b=0.25 * math.log(c_b),
        theta_c=0.25 * math.log(c_c),
        C_sym=c_sym,
        theta_sym=theta_sym,
        Delta_beta_b=math.sqrt(cfg.Delta_b_tilde**2 - cfg.K_b_tilde**2),
        Delta_beta_c=math.sqrt(cfg.Delta_c_tilde**2 - cfg.K_c_tilde**2),
        Delta_beta=math.sqrt(delta_sym**2 - kerr_sym**2),
        G_script=cfg.G_tilde * math.sqrt(c_sym),
        g_cos=cfg.g_ab * math.cosh(theta_sym),
        g_sin=cfg.g_ab * math.sinh(theta_sym),
    )


def matching_report(cfg: EffectiveConfig) -> MatchingReport:
    """Candidate cavity detunings, bare and squeeze-frame."""
    require_valid(cfg)
    delta_sym = 0.5 * (cfg.Delta_b_tilde + cfg.Delta_c_tilde)
    try:
        params = squeeze_params(cfg)
    except SqueezeDomainError as exc:
        return MatchingReport(
            delta_a_match_b=-cfg.Delta_b_tilde,
            delta_a_match_bc=-cfg.Delta_c_tilde,
            delta_a_bogoliubov=None,
            note=str(exc),
        )
    sign = math.copysign(1.0, delta_sym) if delta_sym != 0.0 else 0.0
    return MatchingReport(
        delta_a_match_b=-cfg.Delta_b_tilde,
        delta_a_match_bc=-cfg.Delta_c_tilde,
        delta_a_bogoliubov=-sign * params.Delta_beta,
    )
