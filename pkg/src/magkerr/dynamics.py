"""Linearized fluctuation dynamics of the three-mode model.

Quadratures are ordered ``(X_a, Y_a, X_b, Y_b, X_c, Y_c)`` with
``X = (o + o^dag)/sqrt(2)``, ``Y = (o - o^dag)/(i sqrt(2))``, so the
vacuum variance is 1/2.  The fluctuations obey ``du = A u dt + noise``
with the drift matrix ``A`` built from an :class:`~.model.EffectiveConfig`
and the diffusion matrix ``D = diag(gamma_o (2 n_o + 1))`` (each entry
doubled for the two quadratures).  The steady-state covariance matrix
``V`` solves ``A V + V A^T + D = 0``.

Stability is decided twice, by independent routes: a Routh-Hurwitz test
on the characteristic polynomial (no eigensolver involved) and the sign
of the largest eigenvalue real part.  The Lyapunov equation is solved by
vectorizing to the dense 36x36 Kronecker-sum system; a fourth-order
explicit transient integrator is kept alongside purely as a
verification oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, NumericalError, StabilityError
from .model import EffectiveConfig, require_valid

QUADRATURES = ("X_a", "Y_a", "X_b", "Y_b", "X_c", "Y_c")


def build_drift(cfg: EffectiveConfig) -> np.ndarray:
    """Drift matrix of the linearized quadrature dynamics, shape (6, 6)."""
    require_valid(cfg)
    da = cfg.Delta_a
    db_m = cfg.Delta_b_tilde - cfg.K_b_tilde
    db_p = cfg.Delta_b_tilde + cfg.K_b_tilde
    dc_m = cfg.Delta_c_tilde - cfg.K_c_tilde
    dc_p = cfg.Delta_c_tilde + cfg.K_c_tilde
    g = cfg.g_ab
    G2 = 2.0 * cfg.G_tilde
    ga, gb, gc = cfg.gamma_a, cfg.gamma_b, cfg.gamma_c
    return np.array(
        [
            [-ga, da, 0.0, g, 0.0, 0.0],
            [-da, -ga, -g, 0.0, 0.0, 0.0],
            [0.0, g, -gb, db_m, 0.0, 0.0],
            [-g, 0.0, -db_p, -gb, -G2, 0.0],
            [0.0, 0.0, 0.0, 0.0, -gc, dc_m],
            [0.0, 0.0, -G2, 0.0, -dc_p, -gc],
        ]
    )


def build_diffusion(cfg: EffectiveConfig) -> np.ndarray:
    """Diffusion matrix of the input noise, shape (6, 6), diagonal."""
    require_valid(cfg)
    rates = [
        cfg.gamma_a * (2.0 * cfg.n_a + 1.0),
        cfg.gamma_b * (2.0 * cfg.n_b + 1.0),
        cfg.gamma_c * (2.0 * cfg.n_c + 1.0),
    ]
    return np.diag(np.repeat(rates, 2))


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the eigenvalue stability test.

    ``margin`` is the largest eigenvalue real part (negative when
    stable).  ``marginal`` flags a margin indistinguishable from zero at
    the matrix scale; such points are reported as unstable.
    """

    stable: bool
    margin: float
    marginal: bool


def _norm_inf(A: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0


def is_stable(A: np.ndarray, marginal_tol: float = 1.0e-9) -> StabilityVerdict:
    """Eigenvalue stability verdict for a drift matrix."""
    A = np.asarray(A, dtype=float)
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    margin = float(np.max(ev.real))
    band = marginal_tol * _norm_inf(A)
    return StabilityVerdict(
        stable=margin < -band,
        margin=margin,
        marginal=abs(margin) <= band,
    )


def char_poly(A: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients of ``A``, monic, descending.

    Uses the Faddeev-LeVerrier recursion (traces of matrix powers only,
    no eigensolver), so it serves as a route independent from LAPACK for
    stability and symplectic-spectrum cross-checks.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    eye = np.eye(n)
    M = eye
    for k in range(1, n + 1):
        if k > 1:
            M = A @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ M) / k
    return coeffs


def routh_hurwitz_stable(A: np.ndarray) -> bool:
    """Routh-Hurwitz verdict: True iff all char-poly roots have Re < 0.

    Zero or sign-flipped pivots (marginal spectra) return False; the
    verdict is only guaranteed to match :func:`is_stable` outside its
    marginal band.
    """
    A = np.asarray(A, dtype=float)
    scale = _norm_inf(A)
    if scale == 0.0:
        return False
    c = char_poly(A / scale)
    if not np.all(np.isfinite(c)):
        return False
    # Necessary condition: a monic Hurwitz polynomial has all
    # coefficients strictly positive.
    if np.any(c[1:] <= 0.0):
        return False
    n = len(c) - 1
    width = (n // 2) + 1
    row0 = np.zeros(width)
    row1 = np.zeros(width)
    row0[: len(c[0::2])] = c[0::2]
    row1[: len(c[1::2])] = c[1::2]
    for _ in range(n - 1):
        pivot = row1[0]
        if pivot <= 0.0:
            return False
        nxt = np.zeros(width)
        nxt[:-1] = row0[1:] - (row0[0] / pivot) * row1[1:]
        row0, row1 = row1, nxt
    return row1[0] > 0.0


def solve_lyapunov(
    A: np.ndarray,
    D: np.ndarray,
    verdict: StabilityVerdict | None = None,
    residual_tol: float = 1.0e-10,
) -> np.ndarray:
    """Steady-state covariance matrix solving ``A V + V A^T + D = 0``.

    The equation is vectorized into the dense Kronecker-sum system
    ``(I (x) A + A (x) I) vec(V) = -vec(D)`` and solved by LU with
    partial pivoting.  The result is symmetrized and its residual checked
    against ``residual_tol * max|D|``.

    Raises
    ------
    StabilityError
        If ``A`` is not strictly stable (no steady state exists).
    NumericalError
        If the solved residual exceeds the tolerance (ill-conditioned
        system, e.g. nearly marginal ``A``).
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if verdict is None:
        verdict = is_stable(A)
    if not verdict.stable:
        note = " (marginal)" if verdict.marginal else ""
        raise StabilityError(
            f"drift matrix is not stable{note}: margin={verdict.margin:.6e}"
        )
    n = A.shape[0]
    eye = np.eye(n)
    lhs = np.kron(eye, A) + np.kron(A, eye)
    vec_v = np.linalg.solve(lhs, -D.flatten(order="F"))
    V = vec_v.reshape((n, n), order="F")
    V = 0.5 * (V + V.T)
    residual = float(np.max(np.abs(A @ V + V @ A.T + D)))
    bound = residual_tol * max(float(np.max(np.abs(D))), 1.0e-300)
    if residual > bound:
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds {bound:.3e}; "
            "system too close to marginal stability"
        )
    return V


def integrate_transient(
    A: np.ndarray,
    D: np.ndarray,
    V0: np.ndarray,
    t_final,
    dt,
) -> np.ndarray:
    """Integrate ``dV/dt = A V + V A^T + D`` from ``V0`` to ``t_final``.

    Classic fixed-step RK4; kept only as a verification oracle for
    :func:`solve_lyapunov`, never on the production path.  ``dt`` is the
    maximum step (the actual step divides ``t_final`` evenly).  Leading
    batch dimensions broadcast: ``A``, ``D``, ``V0`` of shape
    ``(..., n, n)`` with per-batch ``t_final``/``dt`` integrate together.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    V = np.array(V0, dtype=float, copy=True)
    t_final = np.asarray(t_final, dtype=float)
    dt = np.asarray(dt, dtype=float)
    if np.any(t_final <= 0.0) or np.any(dt <= 0.0):
        raise ValueError("t_final and dt must be positive")
    n_steps = int(np.max(np.ceil(t_final / dt)))
    if n_steps > 50_000_000:
        raise IntegrationError(f"step budget exceeded: {n_steps} RK4 steps")
    h = t_final / n_steps
    if h.ndim:
        h = h[..., np.newaxis, np.newaxis]
    AT = np.swapaxes(A, -1, -2)
    for step in range(n_steps):
        k1 = A @ V + V @ AT + D
        v2 = V + (0.5 * h) * k1
        k2 = A @ v2 + v2 @ AT + D
        v3 = V + (0.5 * h) * k2
        k3 = A @ v3 + v3 @ AT + D
        v4 = V + h * k3
        k4 = A @ v4 + v4 @ AT + D
        V = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % 64 == 0 and not np.all(np.abs(V) < 1.0e30):
            raise IntegrationError(
                f"transient integration overflowed at step {step}"
            )
    if not np.all(np.isfinite(V)):
        raise IntegrationError("transient integration produced non-finite values")
    return V
