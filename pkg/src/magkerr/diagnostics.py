"""Runtime self-checks: fast cross-validations of the numerical core.

Exposed through ``magkerr check`` and the ``/check`` endpoint.  Each
check pits one production path against an independent route (transient
integration vs Lyapunov solve, Routh-Hurwitz vs eigenvalues, closed-form
vs generic symplectic spectra, dense root scan vs Newton) on seeded
random draws, plus the reference-table consistency round trip.  Sample
counts are sized for interactive use; the test suite runs the same
comparisons at full depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import steady_state
from .dynamics import (
    build_diffusion,
    build_drift,
    integrate_transient,
    is_stable,
    routh_hurwitz_stable,
    solve_lyapunov,
)
from .gaussian import (
    log_negativity_pair,
    physicality_check,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_nu_minus,
)
from .model import BareConfig, EffectiveConfig, derive_effective, ghz, mhz, nhz
from .sweep import preset, run_sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_effective_config(
    rng: np.random.Generator, stable_bias: bool = False
) -> EffectiveConfig:
    """Random coefficients with the model's frequency hierarchy.

    ``stable_bias`` keeps nonlinear rates small relative to losses so
    most draws are comfortably stable (for Lyapunov-oracle sampling);
    without it the draw deliberately straddles instability thresholds.
    """
    if stable_bias:
        kerr = mhz(rng.uniform(0.0, 10.0))
        cross = mhz(rng.uniform(0.0, 10.0))
        gammas = mhz(10.0) * rng.uniform(0.5, 2.0, size=3)
    else:
        kerr = mhz(rng.uniform(0.0, 80.0))
        cross = mhz(rng.uniform(0.0, 100.0))
        gammas = mhz(10.0) * rng.uniform(0.1, 2.0, size=3)
    return EffectiveConfig(
        Delta_a=mhz(rng.uniform(-250.0, 250.0)),
        Delta_b_tilde=mhz(rng.uniform(-250.0, 250.0)),
        Delta_c_tilde=mhz(rng.uniform(-250.0, 250.0)),
        gamma_a=float(gammas[0]),
        gamma_b=float(gammas[1]),
        gamma_c=float(gammas[2]),
        K_b_tilde=kerr * rng.choice([-1.0, 1.0]),
        K_c_tilde=kerr * rng.uniform(0.5, 2.0),
        G_tilde=cross,
        g_ab=mhz(rng.uniform(0.0, 50.0)),
        n_a=rng.uniform(0.0, 0.5),
        n_b=rng.uniform(0.0, 0.5),
        n_c=rng.uniform(0.0, 0.5),
    )


def random_stable_model(
    rng: np.random.Generator,
) -> tuple[EffectiveConfig, np.ndarray, np.ndarray]:
    """A random drift/diffusion pair that is strictly stable."""
    while True:
        cfg = random_effective_config(rng, stable_bias=True)
        A = build_drift(cfg)
        verdict = is_stable(A)
        # Keep a real margin so transient integration settles quickly.
        if verdict.stable and verdict.margin < -0.05 * mhz(10.0):
            return cfg, A, build_diffusion(cfg)


def random_physical_cm(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    """Random physical covariance matrix (uncertainty bound obeyed).

    Built as the steady state of a random quadratic network with local
    thermal damping, which is a valid quantum channel by construction.
    """
    n = 2 * n_modes
    omega = symplectic_form(n_modes)
    while True:
        h = rng.normal(size=(n, n))
        h = 0.5 * (h + h.T)
        gammas = rng.uniform(0.2, 1.0, size=n_modes)
        nbar = rng.uniform(0.0, 2.0, size=n_modes)
        A = omega @ h - np.diag(np.repeat(gammas, 2))
        verdict = is_stable(A)
        if not verdict.stable or verdict.margin > -1.0e-2:
            continue
        D = np.diag(np.repeat(gammas * (2.0 * nbar + 1.0), 2))
        return solve_lyapunov(A, D, verdict=verdict)


def two_mode_squeezed_cm(r: float) -> np.ndarray:
    """Covariance matrix of a two-mode squeezed vacuum, vacuum 1/2."""
    ch, sh = 0.5 * math.cosh(2.0 * r), 0.5 * math.sinh(2.0 * r)
    V = np.zeros((4, 4))
    V[0, 0] = V[1, 1] = V[2, 2] = V[3, 3] = ch
    V[0, 2] = V[2, 0] = sh
    V[1, 3] = V[3, 1] = -sh
    return V


def _check_lyapunov_transient(rng: np.random.Generator, samples: int) -> CheckResult:
    worst = 0.0
    models = [random_stable_model(rng) for _ in range(samples)]
    A = np.stack([m[1] for m in models])
    D = np.stack([m[2] for m in models])
    V = np.stack([solve_lyapunov(a, d) for _, a, d in models])
    margins = np.array([abs(is_stable(a).margin) for _, a, _ in models])
    t_final = 30.0 / margins
    dt = 0.01 / np.array([np.max(np.abs(a)) for a in A])
    V0 = np.broadcast_to(0.5 * np.eye(6), A.shape).copy()
    V_t = integrate_transient(A, D, V0, t_final, dt)
    scale = np.max(np.abs(V), axis=(1, 2))
    worst = float(np.max(np.max(np.abs(V_t - V), axis=(1, 2)) / scale))
    return CheckResult(
        name="lyapunov-vs-transient",
        passed=worst < 1.0e-8,
        detail=f"worst relative deviation {worst:.3e} over {samples} stable draws",
    )


def _check_symplectic_routes(rng: np.random.Generator, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        V4 = random_physical_cm(rng, 2)
        nu_cf = two_mode_nu_minus(V4)
        signs = np.array([1.0, -1.0, 1.0, 1.0])
        nu_eig = float(symplectic_eigenvalues(V4 * np.outer(signs, signs))[0])
        worst = max(worst, abs(nu_cf - nu_eig))
    e_tmsv = log_negativity_pair(two_mode_squeezed_cm(0.5), ("a", "b"))
    tmsv_err = abs(e_tmsv - 1.0)
    passed = worst < 1.0e-10 and tmsv_err < 1.0e-10
    return CheckResult(
        name="symplectic-closed-form-vs-eig",
        passed=passed,
        detail=(
            f"worst route disagreement {worst:.3e} over {samples} CMs; "
            f"squeezed-vacuum negativity error {tmsv_err:.3e}"
        ),
    )


def _check_stability_routes(rng: np.random.Generator, samples: int) -> CheckResult:
    disagreements = 0
    checked = 0
    for _ in range(samples):
        A = build_drift(random_effective_config(rng))
        verdict = is_stable(A)
        if verdict.marginal:
            continue
        checked += 1
        if routh_hurwitz_stable(A) != verdict.stable:
            disagreements += 1
    return CheckResult(
        name="routh-hurwitz-vs-eigenvalues",
        passed=disagreements == 0,
        detail=f"{disagreements} disagreements over {checked} non-marginal draws",
    )


def _kerr_response_roots(
    delta: float, gamma: float, kerr: float, drive: float
) -> list[float]:
    """All |<c>|^2 roots of the single-mode Kerr response, by bracketing.

    The steady-state modulus obeys
    ``x ((delta + 2 K x)^2 + gamma^2) = drive^2`` with ``x = |<c>|^2``, a
    cubic in ``x``.  Its stationary points (quadratic formula on the
    derivative) split ``[0, x_max]`` into monotone intervals; each
    sign-changing interval is reduced by bisection.  Independent of the
    Newton path by construction.
    """
    if kerr == 0.0:
        return [drive**2 / (delta**2 + gamma**2)]

    def f(x: float) -> float:
        return x * ((delta + 2.0 * kerr * x) ** 2 + gamma**2) - drive**2

    # f(x_max) >= x_max gamma^2 - drive^2 > 0, so the top bracket closes.
    x_max = 1.05 * drive**2 / gamma**2
    # f' = 12 K^2 x^2 + 8 delta K x + (delta^2 + gamma^2)
    a, b, c = 12.0 * kerr**2, 8.0 * delta * kerr, delta**2 + gamma**2
    disc = b * b - 4.0 * a * c
    knots = [0.0]
    if disc > 0.0:
        knots += [
            x
            for x in ((-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a))
            if 0.0 < x < x_max
        ]
    knots.append(x_max)
    roots = []
    for lo, hi in zip(knots, knots[1:]):
        f_lo, f_hi = f(lo), f(hi)
        if f_lo == 0.0:
            roots.append(lo)
            continue
        if f_lo * f_hi > 0.0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = f(mid)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if f_lo * f_mid < 0.0:
                hi = mid
            else:
                lo, f_lo = mid, f_mid
        roots.append(0.5 * (lo + hi))
    return sorted(set(roots))


def _check_mean_field(rng: np.random.Generator, samples: int) -> CheckResult:
    worst_kerr = 0.0
    worst_linear = 0.0
    for _ in range(samples):
        # Kerr-only single mode: magnon c driven, everything else off.
        delta = mhz(rng.uniform(-150.0, 150.0))
        gamma = mhz(rng.uniform(2.0, 20.0))
        kerr = nhz(rng.uniform(0.1, 1.0))
        # Amplitudes around 1e8 put the Kerr shift 2 K |<c>|^2 on the
        # same footing as the detuning, so bistable draws occur.
        drive = mhz(rng.uniform(50.0, 500.0)) * 3.0e8
        cfg = BareConfig(
            gamma_a=mhz(5.0),
            gamma_b=mhz(5.0),
            gamma_c=gamma,
            Delta_a=mhz(100.0),
            Delta_b=mhz(-100.0),
            Delta_c=delta,
            K_c=kerr,
            Omega_c=drive,
        )
        state = steady_state.continuation_solve(cfg)
        got = abs(state.c_amp) ** 2
        roots = _kerr_response_roots(delta, gamma, kerr, drive)
        best = min(abs(got - r) / max(got, 1.0) for r in roots)
        worst_kerr = max(worst_kerr, best)

        # Linear problem: closed form must be hit at solver tolerance.
        lin = replace(cfg, K_c=0.0, g_ab=mhz(rng.uniform(0.0, 30.0)), Omega_b=drive)
        state = steady_state.solve_mean_field(lin)
        chi_a = 1j * lin.detuning("a") + lin.gamma_a
        chi_b = 1j * lin.detuning("b") + lin.gamma_b + lin.g_ab**2 / chi_a
        b_exact = -1j * drive / chi_b
        c_exact = -1j * drive / (1j * delta + gamma)
        err = max(
            abs(state.b_amp - b_exact) / abs(b_exact),
            abs(state.c_amp - c_exact) / abs(c_exact),
        )
        worst_linear = max(worst_linear, err)
    passed = worst_kerr < 1.0e-8 and worst_linear < 1.0e-12
    return CheckResult(
        name="mean-field-vs-response-scan",
        passed=passed,
        detail=(
            f"worst Kerr-root deviation {worst_kerr:.3e}, "
            f"worst linear closed-form deviation {worst_linear:.3e} "
            f"over {samples} draws"
        ),
    )


def _check_monogamy(subgrid: int) -> CheckResult:
    grid = preset("fig2")
    grid = replace(
        grid,
        axis1=replace(grid.axis1, points=subgrid),
        axis2=replace(grid.axis2, points=subgrid),
    )
    records = run_sweep(grid)
    stable = [r for r in records if r.stable]
    worst = min((r.R_min for r in stable), default=0.0)
    bad_nu = min((r.nu_min for r in stable), default=1.0)
    passed = worst >= -1.0e-9 and bad_nu >= 0.5 - 1.0e-9
    return CheckResult(
        name="monogamy-and-physicality",
        passed=passed,
        detail=(
            f"min residual contangle {worst:.3e}, min symplectic eigenvalue "
            f"{bad_nu:.6f} over {len(stable)} stable points ({subgrid}x{subgrid})"
        ),
    )


def _check_reference_table() -> CheckResult:
    """Consistency of derive_effective with the reference parameter set."""
    bare = BareConfig(
        gamma_a=mhz(18.6),
        gamma_b=mhz(6.7),
        gamma_c=mhz(6.7),
        omega_a=ghz(10.07),
        omega_b=ghz(9.86),
        omega_c=ghz(9.7845),
        omega_d=ghz(9.97),
        K_b=nhz(0.1),
        K_c=nhz(0.6),
        G=nhz(0.5),
        g_ab=mhz(30.0),
    )
    eff = derive_effective(bare, 7.5e16, 2.0e16)
    targets = {
        "Delta_b_tilde": (eff.Delta_b_tilde, mhz(-70.0)),
        "Delta_c_tilde": (eff.Delta_c_tilde, mhz(-100.0)),
        "G_tilde": (eff.G_tilde, mhz(19.4)),
    }
    worst = max(abs(got - want) / abs(want) for got, want in targets.values())
    return CheckResult(
        name="reference-table-consistency",
        passed=worst < 5.0e-3,
        detail=f"worst relative deviation {worst:.2%} across dressed coefficients",
    )


def run_invariant_suite(seed: int = 0, fast: bool = True) -> list[CheckResult]:
    """Run every cross-check; ``fast`` trims sample counts for CLI use."""
    rng = np.random.default_rng(seed)
    lyap, sympl, stab, mf, sub = (
        (20, 200, 2000, 10, 11) if fast else (100, 1000, 10000, 50, 21)
    )
    return [
        _check_lyapunov_transient(rng, lyap),
        _check_symplectic_routes(rng, sympl),
        _check_stability_routes(rng, stab),
        _check_mean_field(rng, mf),
        _check_monogamy(sub),
        _check_reference_table(),
    ]
