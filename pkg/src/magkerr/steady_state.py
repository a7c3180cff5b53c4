"""Classical working point of the driven model.

The steady-state mean values obey

    0 = -(i Delta_b + gamma_b) <b> - 2i K_b |<b>|^2 <b> - i G |<c>|^2 <b>
        - i Omega_b - g_ab^2 <b> / (i Delta_a + gamma_a)
    0 = -(i Delta_c + gamma_c) <c> - 2i K_c |<c>|^2 <c> - i G |<b>|^2 <c>
        - i Omega_c

after exact elimination of the undriven cavity amplitude
``<a> = -i g_ab <b> / (i Delta_a + gamma_a)``.  The solver works on the
four real components of (<b>, <c>) with a damped Newton iteration and an
analytic Jacobian.  With Kerr terms the drive response can be multivalued
(magnonic bistability); :func:`branch_scan` combines a continuation ramp
of the drive amplitudes from zero with randomized seeds to enumerate
coexisting branches.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from . import dynamics
from .errors import SolverError
from .model import BareConfig, derive_effective, require_valid

# Convergence is declared relative to the drive magnitude (the natural
# scale of every residual term), floored at 1 for the undriven case.
_REL_TOL = 1.0e-10
_MAX_ITER = 200
# Two solutions closer than this (relative) count as the same branch.
_DEDUP_TOL = 1.0e-6
_CONTINUATION_STEPS = 32
# Random seeds are drawn within |amp|^2 <= 4e17, generously above the
# occupations the couplings of interest produce.
_SEED_RADIUS = np.sqrt(4.0e17)


@dataclass(frozen=True)
class MeanFieldState:
    """One classical working point.

    ``stable`` refers to the linearized fluctuation dynamics at this
    point; an unstable steady state is a valid solver outcome.
    """

    a_amp: complex
    b_amp: complex
    c_amp: complex
    stable: bool
    residual_norm: float


def eliminate_cavity(b_amp: complex, cfg: BareConfig) -> complex:
    """Cavity amplitude slaved to the Kittel mode, exact elimination."""
    return -1j * cfg.g_ab * b_amp / (1j * cfg.detuning("a") + cfg.gamma_a)


def _drive_scale(cfg: BareConfig) -> float:
    return max(1.0, abs(cfg.Omega_b), abs(cfg.Omega_c))


def mean_field_residual(state, cfg: BareConfig) -> np.ndarray:
    """Steady-state equation residual, four real components.

    ``state`` is ``(b_amp, c_amp)`` or anything with ``b_amp``/``c_amp``
    attributes.  Components are ``(Re F_b, Im F_b, Re F_c, Im F_c)``.
    """
    if hasattr(state, "b_amp"):
        b, c = state.b_amp, state.c_amp
    else:
        b, c = state
    f_b, f_c = _residual_complex(b, c, cfg)
    return np.array([f_b.real, f_b.imag, f_c.real, f_c.imag])


def _residual_complex(b: complex, c: complex, cfg: BareConfig):
    chi_a = 1j * cfg.detuning("a") + cfg.gamma_a
    nb2 = abs(b) ** 2
    nc2 = abs(c) ** 2
    f_b = (
        -(1j * cfg.detuning("b") + cfg.gamma_b) * b
        - 2j * cfg.K_b * nb2 * b
        - 1j * cfg.G * nc2 * b
        - 1j * cfg.Omega_b
        - cfg.g_ab**2 * b / chi_a
    )
    f_c = (
        -(1j * cfg.detuning("c") + cfg.gamma_c) * c
        - 2j * cfg.K_c * nc2 * c
        - 1j * cfg.G * nb2 * c
        - 1j * cfg.Omega_c
    )
    return f_b, f_c


def _jacobian(b: complex, c: complex, cfg: BareConfig) -> np.ndarray:
    """Analytic 4x4 Jacobian of the real residual vector.

    Assembled from the Wirtinger derivatives: for each residual F and
    complex unknown z, dF/dx = F_z + F_zbar and dF/dy = i(F_z - F_zbar).
    """
    chi_a = 1j * cfg.detuning("a") + cfg.gamma_a
    nb2 = abs(b) ** 2
    nc2 = abs(c) ** 2
    fb_b = (
        -(1j * cfg.detuning("b") + cfg.gamma_b)
        - 4j * cfg.K_b * nb2
        - 1j * cfg.G * nc2
        - cfg.g_ab**2 / chi_a
    )
    fb_bbar = -2j * cfg.K_b * b * b
    fb_c = -1j * cfg.G * b * np.conj(c)
    fb_cbar = -1j * cfg.G * b * c
    fc_c = (
        -(1j * cfg.detuning("c") + cfg.gamma_c)
        - 4j * cfg.K_c * nc2
        - 1j * cfg.G * nb2
    )
    fc_cbar = -2j * cfg.K_c * c * c
    fc_b = -1j * cfg.G * c * np.conj(b)
    fc_bbar = -1j * cfg.G * c * b

    jac = np.empty((4, 4))
    rows = [
        [(fb_b, fb_bbar), (fb_c, fb_cbar)],
        [(fc_b, fc_bbar), (fc_c, fc_cbar)],
    ]
    for row, pairs in enumerate(rows):
        for col, (f_z, f_zbar) in enumerate(pairs):
            d_dx = f_z + f_zbar
            d_dy = 1j * (f_z - f_zbar)
            jac[2 * row, 2 * col] = d_dx.real
            jac[2 * row, 2 * col + 1] = d_dy.real
            jac[2 * row + 1, 2 * col] = d_dx.imag
            jac[2 * row + 1, 2 * col + 1] = d_dy.imag
    return jac


def _linear_solution(cfg: BareConfig) -> tuple[complex, complex]:
    """Closed-form working point with all nonlinear terms dropped."""
    chi_a = 1j * cfg.detuning("a") + cfg.gamma_a
    chi_b = 1j * cfg.detuning("b") + cfg.gamma_b + cfg.g_ab**2 / chi_a
    chi_c = 1j * cfg.detuning("c") + cfg.gamma_c
    return -1j * cfg.Omega_b / chi_b, -1j * cfg.Omega_c / chi_c


def _stability_at(b: complex, c: complex, cfg: BareConfig) -> bool:
    eff = derive_effective(cfg, abs(b) ** 2, abs(c) ** 2)
    return dynamics.is_stable(dynamics.build_drift(eff)).stable


def _newton(
    x0: np.ndarray, cfg: BareConfig, tol: float, max_iter: int
) -> tuple[np.ndarray, float, bool]:
    """Damped Newton on the 4-vector (Re b, Im b, Re c, Im c)."""
    scale = _drive_scale(cfg)
    x = np.array(x0, dtype=float)
    f = mean_field_residual((complex(x[0], x[1]), complex(x[2], x[3])), cfg)
    fnorm = float(np.linalg.norm(f))
    best_x, best_norm = x.copy(), fnorm
    for _ in range(max_iter):
        if fnorm <= tol * scale:
            return x, fnorm, True
        jac = _jacobian(complex(x[0], x[1]), complex(x[2], x[3]), cfg)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        # Backtracking line search on the residual norm.
        alpha = 1.0
        while alpha > 1.0e-8:
            x_try = x + alpha * step
            f_try = mean_field_residual(
                (complex(x_try[0], x_try[1]), complex(x_try[2], x_try[3])), cfg
            )
            fnorm_try = float(np.linalg.norm(f_try))
            if np.isfinite(fnorm_try) and fnorm_try < (1.0 - 1.0e-4 * alpha) * fnorm:
                break
            alpha *= 0.5
        else:
            break
        x, f, fnorm = x_try, f_try, fnorm_try
        if fnorm < best_norm:
            best_x, best_norm = x.copy(), fnorm
    if best_norm <= tol * scale:
        return best_x, best_norm, True
    return best_x, best_norm, False


def _state_from(x: np.ndarray, resid: float, cfg: BareConfig) -> MeanFieldState:
    b = complex(x[0], x[1])
    c = complex(x[2], x[3])
    return MeanFieldState(
        a_amp=eliminate_cavity(b, cfg),
        b_amp=b,
        c_amp=c,
        stable=_stability_at(b, c, cfg),
        residual_norm=resid,
    )


def solve_mean_field(
    cfg: BareConfig,
    seed_amp: tuple[complex, complex] | None = None,
    tol: float = _REL_TOL,
    max_iter: int = _MAX_ITER,
) -> MeanFieldState:
    """Solve the steady-state equations from one starting point.

    ``seed_amp`` is an initial ``(<b>, <c>)`` guess; by default the
    closed-form linear working point.  Raises :class:`SolverError`
    carrying the best iterate if the iteration does not converge.
    A converged-but-unstable point is a normal result, not an error.
    """
    require_valid(cfg)
    if seed_amp is None:
        b0, c0 = _linear_solution(cfg)
    else:
        b0, c0 = seed_amp
    x0 = np.array([b0.real, b0.imag, c0.real, c0.imag])
    x, resid, ok = _newton(x0, cfg, tol, max_iter)
    if not ok:
        raise SolverError(
            f"mean-field iteration did not converge: residual {resid:.3e} "
            f"after {max_iter} iterations (tolerance {tol:.1e} relative)",
            best=_state_from(x, resid, cfg),
        )
    return _state_from(x, resid, cfg)


def _phase_seed(x: np.ndarray, cfg: BareConfig) -> np.ndarray:
    """One sweep of the self-consistency map behind the steady state.

    Rearranging the steady-state equations gives each amplitude as the
    drive divided by its occupation-dressed susceptibility.  Applying
    that map to a trial point returns amplitudes whose phases match
    their own occupations, which is what Newton needs to tell the
    branches of a multivalued response apart.
    """
    b, c = complex(x[0], x[1]), complex(x[2], x[3])
    nb2, nc2 = abs(b) ** 2, abs(c) ** 2
    chi_a = 1j * cfg.detuning("a") + cfg.gamma_a
    chi_b = (
        1j * (cfg.detuning("b") + 2.0 * cfg.K_b * nb2 + cfg.G * nc2)
        + cfg.gamma_b
        + cfg.g_ab**2 / chi_a
    )
    chi_c = (
        1j * (cfg.detuning("c") + 2.0 * cfg.K_c * nc2 + cfg.G * nb2)
        + cfg.gamma_c
    )
    b_new = -1j * cfg.Omega_b / chi_b
    c_new = -1j * cfg.Omega_c / chi_c
    return np.array([b_new.real, b_new.imag, c_new.real, c_new.imag])


def _branch_hop(
    x_prev: np.ndarray, scaled: BareConfig, tol: float, max_iter: int
) -> tuple[np.ndarray, float, bool]:
    """Deterministic restarts after the followed branch terminates.

    At a saddle-node fold the warm-started Newton has no nearby root to
    converge to (the Jacobian is singular where branches merge), and the
    residual norm keeps a shallow valley around the vanished root that
    traps descent methods seeded with the dying branch's phase.  The
    physical power-up response jumps to the branch that survives, so the
    restarts fan trial occupations around the last solution and the
    linear response, pass each through :func:`_phase_seed` to make the
    phase self-consistent, and try the damped Newton first with
    MINPACK's trust-region hybrid as fallback.
    """
    b_lin, c_lin = _linear_solution(scaled)
    lin = np.array([b_lin.real, b_lin.imag, c_lin.real, c_lin.imag])
    drive = _drive_scale(scaled)
    amp = max(float(np.linalg.norm(x_prev)), float(np.linalg.norm(lin)), 1.0)

    def fun(u: np.ndarray) -> np.ndarray:
        return (
            mean_field_residual(
                (complex(u[0], u[1]) * amp, complex(u[2], u[3]) * amp), scaled
            )
            / drive
        )

    def jac(u: np.ndarray) -> np.ndarray:
        return (
            _jacobian(complex(u[0], u[1]) * amp, complex(u[2], u[3]) * amp, scaled)
            * (amp / drive)
        )

    trials = [f * x_prev for f in (2.0, 1.0, 3.0, 4.0, 0.5, 0.25, 8.0)]
    trials += [f * lin for f in (1.0, 2.0, 0.5)]
    seeds: list[np.ndarray] = []
    for u in trials:
        v = _phase_seed(u, scaled)
        seeds.append(v)
        seeds.append(_phase_seed(v, scaled))
    seeds.extend(trials)
    best_x, best_resid = np.array(x_prev, dtype=float), np.inf
    for seed in seeds:
        x, resid, ok = _newton(seed, scaled, tol, max_iter)
        if not ok:
            sol = optimize.root(
                fun, seed / amp, jac=jac, method="hybr", options={"xtol": 1.0e-14}
            )
            x, resid, ok = _newton(sol.x * amp, scaled, tol, max_iter)
        if ok:
            return x, resid, True
        if resid < best_resid:
            best_x, best_resid = x, resid
    return best_x, best_resid, False


# Refinement budget for the ramp; each split halves (geometrically) the
# failing step, so a handful per fold is plenty and the cubic response
# has at most two folds.
_MAX_SPLITS = 48


def continuation_solve(
    cfg: BareConfig, tol: float = _REL_TOL, max_iter: int = _MAX_ITER
) -> MeanFieldState:
    """Working point continuously connected to the undriven one.

    Ramps both drive amplitudes geometrically from ~1e-3 of their target
    over 32 steps, warm-starting each Newton solve from the previous
    solution.  This selects the physical power-up branch in bistable
    regimes.  When a step fails the ramp is refined toward the failure;
    if the branch genuinely ends there (a fold), the solver restarts
    deterministically and continues on the branch the jump reaches.
    """
    require_valid(cfg)
    if cfg.Omega_b == 0.0 and cfg.Omega_c == 0.0:
        return solve_mean_field(cfg, seed_amp=(0.0 + 0.0j, 0.0 + 0.0j))
    x = np.zeros(4)
    resid = 0.0
    s_prev = 0.0
    pending = list(np.geomspace(1.0e-3, 1.0, _CONTINUATION_STEPS))[::-1]
    splits = 0
    while pending:
        s = pending[-1]
        scaled = replace(cfg, Omega_b=s * cfg.Omega_b, Omega_c=s * cfg.Omega_c)
        x_new, resid_new, ok = _newton(x, scaled, tol, max_iter)
        if not ok and splits < _MAX_SPLITS and s > s_prev * (1.0 + 1.0e-6) > 0.0:
            pending.append(float(np.sqrt(s_prev * s)))
            splits += 1
            continue
        if not ok:
            x_new, resid_new, ok = _branch_hop(x, scaled, tol, max_iter)
        if not ok:
            full_resid = float(
                np.linalg.norm(
                    mean_field_residual(
                        (
                            complex(x_new[0], x_new[1]),
                            complex(x_new[2], x_new[3]),
                        ),
                        cfg,
                    )
                )
            )
            raise SolverError(
                f"continuation failed at drive scale {s:.3e}: "
                f"residual {resid_new:.3e}",
                best=_state_from(x_new, full_resid, cfg),
            )
        x, resid, s_prev = x_new, resid_new, s
        pending.pop()
    return _state_from(x, resid, cfg)


def branch_scan(
    cfg: BareConfig,
    n_seeds: int = 16,
    rng: np.random.Generator | None = None,
    tol: float = _REL_TOL,
    max_iter: int = _MAX_ITER,
) -> list[MeanFieldState]:
    """Enumerate coexisting steady-state branches.

    Combines the continuation solution with ``n_seeds`` random restarts;
    converged solutions closer than 1e-6 (relative) are merged.  The
    continuation branch is always first; remaining branches are sorted by
    total occupation.  Seeds that fail to converge are skipped.
    """
    require_valid(cfg)
    rng = rng or np.random.default_rng(0)
    states: list[MeanFieldState] = []
    try:
        states.append(continuation_solve(cfg, tol, max_iter))
    except SolverError:
        pass
    extra: list[MeanFieldState] = []
    for _ in range(n_seeds):
        radius = _SEED_RADIUS * np.sqrt(rng.uniform(size=2))
        phase = rng.uniform(0.0, 2.0 * np.pi, size=2)
        seed = (
            radius[0] * np.exp(1j * phase[0]),
            radius[1] * np.exp(1j * phase[1]),
        )
        try:
            extra.append(solve_mean_field(cfg, seed_amp=seed, tol=tol, max_iter=max_iter))
        except SolverError:
            continue
    extra.sort(key=lambda s: abs(s.b_amp) ** 2 + abs(s.c_amp) ** 2)
    for cand in extra:
        if not any(_same_branch(cand, known) for known in states):
            states.append(cand)
    return states


def _same_branch(s1: MeanFieldState, s2: MeanFieldState) -> bool:
    d = np.hypot(abs(s1.b_amp - s2.b_amp), abs(s1.c_amp - s2.c_amp))
    scale = max(
        1.0,
        np.hypot(abs(s1.b_amp), abs(s1.c_amp)),
        np.hypot(abs(s2.b_amp), abs(s2.c_amp)),
    )
    return d < _DEDUP_TOL * scale
