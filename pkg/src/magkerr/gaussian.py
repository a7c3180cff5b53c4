"""Gaussian-state entanglement measures on quadrature covariance matrices.

All functions take covariance matrices in the ordering and convention of
:mod:`.dynamics`: quadrature vector ``(X_a, Y_a, X_b, Y_b, X_c, Y_c)``,
vacuum variance 1/2.  A physical covariance matrix has every symplectic
eigenvalue >= 1/2.

Bipartite entanglement is quantified by the logarithmic negativity
``E = max[0, -ln(2 nu_minus)]`` with ``nu_minus`` the smallest symplectic
eigenvalue of the partially transposed covariance matrix.  For two-mode
states ``nu_minus`` is also available in closed form from the block
invariants; both routes are evaluated and must agree.  Genuine tripartite
entanglement is witnessed through the residual contangle
``R_i|jk = E_i|jk^2 - E_i|j^2 - E_i|k^2`` (monogamy makes each of these
non-negative); its minimum over the three splits is the reported
tripartite measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import NumericalError, PhysicalityError

MODE_INDEX = {"a": 0, "b": 1, "c": 2}

# 2 nu_minus within this distance of 1 counts as separable exactly.
_E_ZERO_TOL = 1.0e-12
# Agreement required between the closed-form and eigenvalue routes.
_ROUTE_TOL = 1.0e-8


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form Omega, shape (2n, 2n)."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = j
    return out


def _mode_indices(modes) -> list[int]:
    idx = []
    for m in modes:
        if m not in MODE_INDEX:
            raise ValueError(f"unknown mode label {m!r}; expected one of a, b, c")
        idx.append(MODE_INDEX[m])
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate mode labels")
    return sorted(idx)


def partial_transpose(V: np.ndarray, modes) -> np.ndarray:
    """Covariance matrix after transposing the listed modes.

    At the covariance level transposition flips the sign of the Y
    quadrature of each transposed mode: ``V -> P V P``.  ``modes`` must
    be a non-empty proper subset of ``{a, b, c}`` (transposing nothing or
    everything is a no-op up to local rotations and is rejected).
    """
    V = np.asarray(V, dtype=float)
    n_modes = V.shape[0] // 2
    idx = _mode_indices(modes)
    if not idx or len(idx) >= n_modes:
        raise ValueError("modes must be a non-empty proper subset of the modes")
    signs = np.ones(V.shape[0])
    for k in idx:
        signs[2 * k + 1] = -1.0
    return V * np.outer(signs, signs)


def symplectic_eigenvalues(M: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a symmetric matrix, ascending, shape (n,).

    Computed as the moduli of the eigenvalues of ``Omega M``, which come
    in pairs ``+/- i nu``; each adjacent pair of sorted moduli is merged
    into one symplectic eigenvalue.
    """
    M = np.asarray(M, dtype=float)
    n2 = M.shape[0]
    if M.shape != (n2, n2) or n2 % 2:
        raise ValueError("M must be square with even dimension")
    scale = max(float(np.max(np.abs(M))), 1.0)
    if float(np.max(np.abs(M - M.T))) > 1.0e-9 * scale:
        raise ValueError("M must be symmetric")
    try:
        ev = np.linalg.eigvals(symplectic_form(n2 // 2) @ M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symplectic eigensolve failed: {exc}") from exc
    mods = np.sort(np.abs(ev))
    return 0.5 * (mods[0::2] + mods[1::2])


def two_mode_nu_minus(V4: np.ndarray) -> float:
    """Closed-form smallest symplectic eigenvalue of a PT'd two-mode CM.

    For ``V4 = [[A, C], [C^T, B]]`` the partial transpose changes the
    invariant ``det A + det B + 2 det C`` into
    ``Sigma~ = det A + det B - 2 det C`` and
    ``nu_minus = sqrt((Sigma~ - sqrt(Sigma~^2 - 4 det V4)) / 2)``.
    Takes the original (not transposed) two-mode covariance matrix.
    """
    V4 = np.asarray(V4, dtype=float)
    if V4.shape != (4, 4):
        raise ValueError("V4 must be 4x4")
    a = np.linalg.det(V4[:2, :2])
    b = np.linalg.det(V4[2:, 2:])
    c = np.linalg.det(V4[:2, 2:])
    sigma = a + b - 2.0 * c
    disc = max(sigma * sigma - 4.0 * np.linalg.det(V4), 0.0)
    inner = 0.5 * (sigma - math.sqrt(disc))
    return math.sqrt(max(inner, 0.0))


def _negativity_from_nu(nu: float) -> float:
    if 2.0 * nu >= 1.0 - _E_ZERO_TOL:
        return 0.0
    return -math.log(2.0 * nu)


def _pair_submatrix(V: np.ndarray, pair) -> np.ndarray:
    i, j = _mode_indices(pair)
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    return V[np.ix_(idx, idx)]


def log_negativity_pair(V: np.ndarray, pair, check: bool = True) -> float:
    """Logarithmic negativity of a mode pair's reduced two-mode state.

    Both the closed-form and the generic eigenvalue route are evaluated
    and must agree to 1e-8; disagreement raises :class:`NumericalError`.
    """
    V = np.asarray(V, dtype=float)
    if check:
        require_physical(V)
    V4 = _pair_submatrix(V, pair)
    nu_cf = two_mode_nu_minus(V4)
    signs = np.array([1.0, -1.0, 1.0, 1.0])
    nu_eig = float(symplectic_eigenvalues(V4 * np.outer(signs, signs))[0])
    if abs(nu_eig - nu_cf) > _ROUTE_TOL * max(1.0, nu_cf):
        raise NumericalError(
            f"symplectic eigenvalue routes disagree: {nu_eig!r} vs {nu_cf!r}"
        )
    return _negativity_from_nu(nu_eig)


def log_negativity_one_vs_two(V: np.ndarray, single: str, check: bool = True) -> float:
    """Logarithmic negativity across the one-vs-two split ``single | rest``."""
    V = np.asarray(V, dtype=float)
    if check:
        require_physical(V)
    nu = float(symplectic_eigenvalues(partial_transpose(V, (single,)))[0])
    return _negativity_from_nu(nu)


@dataclass(frozen=True)
class ContangleReport:
    """Residual contangle of each one-vs-two split and their minimum."""

    R_a_bc: float
    R_b_ac: float
    R_c_ab: float
    R_min: float


def residual_contangle(V: np.ndarray, check: bool = True) -> ContangleReport:
    """Residual contangle ``R_i|jk`` for all three splits.

    Uses squared logarithmic negativities as the entanglement monotone.
    Monogamy guarantees each residual is non-negative up to numerical
    noise; the minimum over splits witnesses genuine tripartite
    entanglement when positive.
    """
    V = np.asarray(V, dtype=float)
    if check:
        require_physical(V)
    pair_e = {
        frozenset(p): log_negativity_pair(V, p, check=False)
        for p in combinations("abc", 2)
    }

    def residual(single: str) -> float:
        others = [m for m in "abc" if m != single]
        e_one = log_negativity_one_vs_two(V, single, check=False)
        return e_one**2 - sum(pair_e[frozenset((single, o))] ** 2 for o in others)

    r = {m: residual(m) for m in "abc"}
    return ContangleReport(
        R_a_bc=r["a"],
        R_b_ac=r["b"],
        R_c_ab=r["c"],
        R_min=min(r.values()),
    )


def excitation_numbers(V: np.ndarray) -> tuple[float, float, float]:
    """Steady-state excitation number of each mode.

    ``N_o = (<X^2> + <Y^2> - 1)/2`` in the vacuum-1/2 convention.
    """
    V = np.asarray(V, dtype=float)
    return tuple(
        0.5 * (V[2 * k, 2 * k] + V[2 * k + 1, 2 * k + 1] - 1.0) for k in range(3)
    )


@dataclass(frozen=True)
class PhysicalityReport:
    """Uncertainty-bound check: smallest symplectic eigenvalue and defect."""

    physical: bool
    nu_min: float
    defect: float


def physicality_check(V: np.ndarray, tol: float = 1.0e-9) -> PhysicalityReport:
    """Check ``V`` against the bosonic uncertainty bound ``nu_min >= 1/2``."""
    V = np.asarray(V, dtype=float)
    nu_min = float(symplectic_eigenvalues(V)[0])
    defect = max(0.0, 0.5 - nu_min)
    return PhysicalityReport(
        physical=nu_min >= 0.5 - tol, nu_min=nu_min, defect=defect
    )


def require_physical(V: np.ndarray) -> PhysicalityReport:
    """Raise :class:`PhysicalityError` unless ``V`` is a physical CM."""
    report = physicality_check(V)
    if not report.physical:
        raise PhysicalityError(
            f"covariance matrix violates the uncertainty bound "
            f"(nu_min={report.nu_min!r}, defect={report.defect:.3e})"
        )
    return report


@dataclass(frozen=True)
class EntanglementReport:
    """All steady-state measures of one working point.

    Measure fields are ``None`` when the point is unstable (no steady
    state to evaluate).
    """

    E_ab: float | None
    E_bc: float | None
    E_ac: float | None
    E_a_bc: float | None
    E_b_ac: float | None
    E_c_ab: float | None
    R_a_bc: float | None
    R_b_ac: float | None
    R_c_ab: float | None
    R_min: float | None
    N_a: float | None
    N_b: float | None
    N_c: float | None
    nu_min: float | None
    stable: bool

    @classmethod
    def unstable(cls) -> "EntanglementReport":
        return cls(*([None] * 14), stable=False)


def entanglement_report(
    V: np.ndarray, check: bool = True, nu_min: float | None = None
) -> EntanglementReport:
    """Assemble every measure for a stable point's covariance matrix."""
    V = np.asarray(V, dtype=float)
    if check:
        nu_min = require_physical(V).nu_min
    elif nu_min is None:
        nu_min = float(symplectic_eigenvalues(V)[0])
    e_ab = log_negativity_pair(V, ("a", "b"), check=False)
    e_bc = log_negativity_pair(V, ("b", "c"), check=False)
    e_ac = log_negativity_pair(V, ("a", "c"), check=False)
    e_one = {m: log_negativity_one_vs_two(V, m, check=False) for m in "abc"}
    r_a = e_one["a"] ** 2 - e_ab**2 - e_ac**2
    r_b = e_one["b"] ** 2 - e_ab**2 - e_bc**2
    r_c = e_one["c"] ** 2 - e_ac**2 - e_bc**2
    n_a, n_b, n_c = excitation_numbers(V)
    return EntanglementReport(
        E_ab=e_ab,
        E_bc=e_bc,
        E_ac=e_ac,
        E_a_bc=e_one["a"],
        E_b_ac=e_one["b"],
        E_c_ab=e_one["c"],
        R_a_bc=r_a,
        R_b_ac=r_b,
        R_c_ab=r_c,
        R_min=min(r_a, r_b, r_c),
        N_a=n_a,
        N_b=n_b,
        N_c=n_c,
        nu_min=nu_min,
        stable=True,
    )
