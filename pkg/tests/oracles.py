"""Independently coded reference routes for the test suite.

Everything here deliberately avoids the algorithms the package uses:
characteristic polynomials come from determinant interpolation instead
of the trace recursion, symplectic spectra from closed-form root
formulas on that polynomial instead of an eigensolver, and the drift
and diffusion matrices are a fresh literal transcription of the
linearized quadrature equations.  If a production routine and its
oracle here agree, the agreement is between two unrelated derivations.
"""

from __future__ import annotations

import math

import numpy as np


def char_poly_fit(M: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial by determinant interpolation.

    det(x I - M) is evaluated at n+1 nodes and the coefficients are
    recovered through a Vandermonde solve.  The matrix is normalized to
    unit magnitude first so the node spread stays well conditioned.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    scale = max(float(np.max(np.abs(M))), 1.0)
    B = M / scale
    nodes = np.linspace(-1.6, 1.7, n + 1)
    eye = np.eye(n)
    dets = np.array([np.linalg.det(x * eye - B) for x in nodes])
    coeffs = np.linalg.solve(np.vander(nodes, n + 1), dets)
    coeffs = coeffs / coeffs[0]
    return coeffs * scale ** np.arange(n + 1)


def _polish_cubic_root(a2: float, a1: float, a0: float, x: float) -> float:
    # A couple of Newton steps; the closed forms lose a few digits when
    # roots are clustered.
    for _ in range(3):
        f = ((x + a2) * x + a1) * x + a0
        df = (3.0 * x + 2.0 * a2) * x + a1
        if df == 0.0:
            return x
        x -= f / df
    return x


def cubic_real_roots(a2: float, a1: float, a0: float) -> list[float]:
    """Real roots of x^3 + a2 x^2 + a1 x + a0, ascending.

    Trigonometric form for three real roots, Cardano's stable branch
    for one; no companion matrices and no iterative root-finder beyond
    a short Newton polish.
    """
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    shift = -a2 / 3.0
    if p == 0.0 and q == 0.0:
        return [shift, shift, shift]
    disc = -4.0 * p**3 - 27.0 * q * q
    if disc >= 0.0 and p < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q) / (2.0 * p) * math.sqrt(-3.0 / p)
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg) / 3.0
        roots = [
            m * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift for k in range(3)
        ]
        return sorted(_polish_cubic_root(a2, a1, a0, r) for r in roots)
    s = math.sqrt(max(q * q / 4.0 + p**3 / 27.0, 0.0))
    u = -q / 2.0 - math.copysign(s, q)
    a = math.copysign(abs(u) ** (1.0 / 3.0), u) if u != 0.0 else 0.0
    t = a - p / (3.0 * a) if a != 0.0 else 0.0
    return [_polish_cubic_root(a2, a1, a0, t + shift)]


def symplectic_form_ref(n_modes: int) -> np.ndarray:
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = j
    return out


def symplectic_spectrum_fit(V: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues from the characteristic polynomial of
    Omega V, which is even in lambda; the roots in mu = lambda^2 are
    -nu^2 and come from the closed-form quadratic or cubic.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0] // 2
    c = char_poly_fit(symplectic_form_ref(n) @ V)
    if n == 1:
        mus = [-c[2]]
    elif n == 2:
        s = math.sqrt(max(c[2] * c[2] / 4.0 - c[4], 0.0))
        mus = [-c[2] / 2.0 - s, -c[2] / 2.0 + s]
    elif n == 3:
        mus = cubic_real_roots(c[2], c[4], c[6])
    else:
        raise ValueError("supports 1 to 3 modes")
    return np.array(sorted(math.sqrt(max(-m, 0.0)) for m in mus))


def tmsv_cm(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum covariance, vacuum = 1/2 convention."""
    ch = 0.5 * math.cosh(2.0 * r)
    sh = 0.5 * math.sinh(2.0 * r)
    V = np.zeros((4, 4))
    V[:2, :2] = np.diag([ch, ch])
    V[2:, 2:] = np.diag([ch, ch])
    V[:2, 2:] = np.diag([sh, -sh])
    V[2:, :2] = np.diag([sh, -sh])
    return V


def drift_reference(cfg) -> np.ndarray:
    """Hand-transcribed drift of the linearized quadrature equations.

    Order (X_a, Y_a, X_b, Y_b, X_c, Y_c).  The cavity couples to the
    Kittel quadratures through the beam-splitter rate, each magnon's own
    Kerr rate splits its X/Y detunings, and the enhanced cross-Kerr
    coupling feeds X_b into dY_c/dt and X_c into dY_b/dt only.
    """
    da, ga = cfg.Delta_a, cfg.gamma_a
    db, gb, kb = cfg.Delta_b_tilde, cfg.gamma_b, cfg.K_b_tilde
    dc, gc, kc = cfg.Delta_c_tilde, cfg.gamma_c, cfg.K_c_tilde
    gt, g = cfg.G_tilde, cfg.g_ab
    return np.array(
        [
            [-ga, da, 0.0, g, 0.0, 0.0],
            [-da, -ga, -g, 0.0, 0.0, 0.0],
            [0.0, g, -gb, db - kb, 0.0, 0.0],
            [-g, 0.0, -(db + kb), -gb, -2.0 * gt, 0.0],
            [0.0, 0.0, 0.0, 0.0, -gc, dc - kc],
            [0.0, 0.0, -2.0 * gt, 0.0, -(dc + kc), -gc],
        ]
    )


def diffusion_reference(cfg) -> np.ndarray:
    """Diagonal input-noise matrix, gamma_o (2 n_o + 1) per quadrature."""
    diag = [
        cfg.gamma_a * (2.0 * cfg.n_a + 1.0),
        cfg.gamma_a * (2.0 * cfg.n_a + 1.0),
        cfg.gamma_b * (2.0 * cfg.n_b + 1.0),
        cfg.gamma_b * (2.0 * cfg.n_b + 1.0),
        cfg.gamma_c * (2.0 * cfg.n_c + 1.0),
        cfg.gamma_c * (2.0 * cfg.n_c + 1.0),
    ]
    return np.diag(diag)
