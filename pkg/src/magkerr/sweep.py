"""Parameter sweeps over working points, with bundled reference presets.

A :class:`SweepGrid` pairs a baseline configuration with one or two
axes.  Axis values are expressed in the external "/2pi" units (MHz,
Kelvin, or a dimensionless scale) and the grid applies them onto the
baseline per point.  Evaluation of a point is pure: a record depends
only on the grid, the global seed, and the point's indices, so sweeps
are embarrassingly parallel and their CSV output is byte-identical for
any worker count.

Presets (``fig2``, ``fig3``, ``fig4``) bundle the reference parameter
sets: the two-detuning plane, the cavity-detuning scans at three Kerr
levels, and the bath-temperature scan.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import multiprocessing
import numpy as np

from . import steady_state
from .dynamics import build_diffusion, build_drift, is_stable, solve_lyapunov
from .errors import ConfigError, MagkerrError, SolverError
from .gaussian import EntanglementReport, entanglement_report, physicality_check
from .model import (
    BareConfig,
    EffectiveConfig,
    derive_effective,
    ghz,
    mhz,
    require_valid,
    thermal_occupancy,
)

# Interior knot count used for every preset frequency axis.
PRESET_AXIS_POINTS = 101

# Lab-frame mode frequencies of the reference device (rad/s): cavity,
# Kittel magnon, HMS magnon.
REFERENCE_OMEGAS = (ghz(10.07), ghz(9.86), ghz(9.7845))


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: external name, inclusive range, point count."""

    name: str
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepGrid:
    """Baseline configuration plus one or two sweep axes.

    ``mode`` selects the evaluation pipeline: "effective" evaluates the
    baseline :class:`EffectiveConfig` directly, "microscopic" solves the
    classical working point of the baseline :class:`BareConfig` first.
    ``omegas`` carries lab-frame mode frequencies for temperature axes
    in effective mode.
    """

    axis1: SweepAxis
    axis2: SweepAxis | None = None
    mode: str = "effective"
    base_effective: EffectiveConfig | None = None
    base_bare: BareConfig | None = None
    omegas: tuple[float, float, float] | None = None
    description: str = ""

    def shape(self) -> tuple[int, int]:
        return (self.axis1.points, self.axis2.points if self.axis2 else 1)


@dataclass(frozen=True)
class SweepRecord:
    """One grid point's outcome; measure fields are None when unstable."""

    axis1: float
    axis2: float | None
    E_ab: float | None
    E_bc: float | None
    E_ac: float | None
    E_a_bc: float | None
    E_b_ac: float | None
    E_c_ab: float | None
    R_min: float | None
    N_a: float | None
    N_b: float | None
    N_c: float | None
    stable: bool
    nu_min: float | None
    note: str = ""


_MEASURE_FIELDS = (
    "E_ab",
    "E_bc",
    "E_ac",
    "E_a_bc",
    "E_b_ac",
    "E_c_ab",
    "R_min",
    "N_a",
    "N_b",
    "N_c",
)


def _set_occupancies(cfg: EffectiveConfig, T_e: float, omegas) -> EffectiveConfig:
    if T_e == 0.0:
        return replace(cfg, n_a=0.0, n_b=0.0, n_c=0.0)
    if omegas is None:
        raise ConfigError(
            "a T_e_K axis requires omega_a_MHz, omega_b_MHz, omega_c_MHz"
        )
    n = [thermal_occupancy(w, T_e) for w in omegas]
    return replace(cfg, n_a=n[0], n_b=n[1], n_c=n[2])


# Axis appliers for effective mode: external value (MHz, K, or bare) onto
# the config. Each has signature (cfg, value, grid) -> cfg.
_EFFECTIVE_AXES = {
    "Delta_a_MHz": lambda c, v, g: replace(c, Delta_a=mhz(v)),
    "Delta_b_tilde_MHz": lambda c, v, g: replace(c, Delta_b_tilde=mhz(v)),
    "Delta_c_tilde_MHz": lambda c, v, g: replace(c, Delta_c_tilde=mhz(v)),
    "K_b_tilde_MHz": lambda c, v, g: replace(c, K_b_tilde=mhz(v)),
    "K_c_tilde_MHz": lambda c, v, g: replace(c, K_c_tilde=mhz(v)),
    "G_tilde_MHz": lambda c, v, g: replace(c, G_tilde=mhz(v)),
    "g_ab_MHz": lambda c, v, g: replace(c, g_ab=mhz(v)),
    "gamma_a_MHz": lambda c, v, g: replace(c, gamma_a=mhz(v)),
    "gamma_b_MHz": lambda c, v, g: replace(c, gamma_b=mhz(v)),
    "gamma_c_MHz": lambda c, v, g: replace(c, gamma_c=mhz(v)),
    "T_e_K": lambda c, v, g: _set_occupancies(c, v, g.omegas),
    # Scales the baseline self-Kerr pair together; lets one axis move
    # (K_b~, K_c~) through proportional levels.
    "kerr_scale": lambda c, v, g: replace(
        c,
        K_b_tilde=v * g.base_effective.K_b_tilde,
        K_c_tilde=v * g.base_effective.K_c_tilde,
    ),
}

_BARE_AXES = {
    "Delta_a_MHz": lambda c, v, g: replace(c, Delta_a=mhz(v)),
    "Delta_b_MHz": lambda c, v, g: replace(c, Delta_b=mhz(v)),
    "Delta_c_MHz": lambda c, v, g: replace(c, Delta_c=mhz(v)),
    "Omega_b_MHz": lambda c, v, g: replace(c, Omega_b=mhz(v)),
    "Omega_c_MHz": lambda c, v, g: replace(c, Omega_c=mhz(v)),
    "g_ab_MHz": lambda c, v, g: replace(c, g_ab=mhz(v)),
    "gamma_a_MHz": lambda c, v, g: replace(c, gamma_a=mhz(v)),
    "gamma_b_MHz": lambda c, v, g: replace(c, gamma_b=mhz(v)),
    "gamma_c_MHz": lambda c, v, g: replace(c, gamma_c=mhz(v)),
    "T_e_K": lambda c, v, g: replace(c, T_e=v),
}


def axis_names(mode: str) -> tuple[str, ...]:
    """Valid sweep-axis parameter names for a mode."""
    table = _EFFECTIVE_AXES if mode == "effective" else _BARE_AXES
    return tuple(table)


def validate_grid(grid: SweepGrid) -> None:
    """Raise :class:`ConfigError` for structural grid problems."""
    if grid.mode not in ("effective", "microscopic"):
        raise ConfigError(f"unknown mode {grid.mode!r}")
    base = grid.base_effective if grid.mode == "effective" else grid.base_bare
    if base is None:
        raise ConfigError(f"{grid.mode} mode requires a matching baseline config")
    require_valid(base)
    table = _EFFECTIVE_AXES if grid.mode == "effective" else _BARE_AXES
    for axis in filter(None, (grid.axis1, grid.axis2)):
        if axis.name not in table:
            raise ConfigError(
                f"unknown sweep axis {axis.name!r} for {grid.mode} mode; "
                f"expected one of {', '.join(sorted(table))}"
            )
        if axis.points < 2:
            raise ConfigError(f"axis {axis.name!r} needs at least two points")
        if not (np.isfinite(axis.start) and np.isfinite(axis.stop)):
            raise ConfigError(f"axis {axis.name!r} range must be finite")
        if (
            axis.name == "T_e_K"
            and grid.mode == "effective"
            and grid.omegas is None
        ):
            raise ConfigError(
                "a T_e_K axis requires omega_a_MHz, omega_b_MHz, omega_c_MHz"
            )
    if grid.axis2 is not None and grid.axis1.name == grid.axis2.name:
        raise ConfigError("axis1 and axis2 must sweep different parameters")


def _config_at(grid: SweepGrid, i: int, j: int):
    table = _EFFECTIVE_AXES if grid.mode == "effective" else _BARE_AXES
    cfg = grid.base_effective if grid.mode == "effective" else grid.base_bare
    cfg = table[grid.axis1.name](cfg, float(grid.axis1.values()[i]), grid)
    if grid.axis2 is not None:
        cfg = table[grid.axis2.name](cfg, float(grid.axis2.values()[j]), grid)
    return cfg


def evaluate_effective(cfg: EffectiveConfig) -> tuple[EntanglementReport, str]:
    """Stability, covariance, and measures of one effective config."""
    A = build_drift(cfg)
    verdict = is_stable(A)
    if not verdict.stable:
        note = "unstable (marginal)" if verdict.marginal else "unstable"
        return EntanglementReport.unstable(), note
    V = solve_lyapunov(A, build_diffusion(cfg), verdict=verdict)
    phys = physicality_check(V)
    if not phys.physical:
        return (
            EntanglementReport.unstable(),
            f"unphysical covariance (defect={phys.defect:.3e})",
        )
    return entanglement_report(V, check=False, nu_min=phys.nu_min), ""


def run_point(
    cfg,
    rng: np.random.Generator | None = None,
    branch: int | None = None,
) -> tuple[EntanglementReport, str]:
    """Evaluate one working point; returns (report, note).

    Accepts an :class:`EffectiveConfig` or a :class:`BareConfig` (the
    latter solves the classical working point first; ``branch`` selects
    a branch-scan result instead of the power-up branch).
    """
    if isinstance(cfg, EffectiveConfig):
        return evaluate_effective(cfg)
    if not isinstance(cfg, BareConfig):
        raise TypeError(f"expected a config, got {type(cfg)!r}")
    require_valid(cfg)
    if branch is None:
        state = steady_state.continuation_solve(cfg)
    else:
        branches = steady_state.branch_scan(cfg, rng=rng)
        if not 0 <= branch < len(branches):
            raise SolverError(
                f"branch {branch} not found; scan located {len(branches)} branch(es)"
            )
        state = branches[branch]
    eff = derive_effective(cfg, abs(state.b_amp) ** 2, abs(state.c_amp) ** 2)
    report, note = evaluate_effective(eff)
    extra = f"|b|^2={abs(state.b_amp) ** 2:.6e} |c|^2={abs(state.c_amp) ** 2:.6e}"
    return report, f"{note}; {extra}" if note else extra


def _record_from(
    report: EntanglementReport, note: str, v1: float, v2: float | None
) -> SweepRecord:
    return SweepRecord(
        axis1=v1,
        axis2=v2,
        E_ab=report.E_ab,
        E_bc=report.E_bc,
        E_ac=report.E_ac,
        E_a_bc=report.E_a_bc,
        E_b_ac=report.E_b_ac,
        E_c_ab=report.E_c_ab,
        R_min=report.R_min,
        N_a=report.N_a,
        N_b=report.N_b,
        N_c=report.N_c,
        stable=report.stable,
        nu_min=report.nu_min,
        note=note,
    )


def _evaluate_index(grid: SweepGrid, seed: int, i: int, j: int) -> SweepRecord:
    v1 = float(grid.axis1.values()[i])
    v2 = float(grid.axis2.values()[j]) if grid.axis2 is not None else None
    try:
        cfg = _config_at(grid, i, j)
        # The per-point seed depends only on (global seed, indices) so
        # randomized restarts cannot couple points or worker layouts.
        rng = np.random.default_rng([seed, i, j])
        report, note = run_point(cfg, rng=rng)
    except (MagkerrError, ValueError) as exc:
        return _record_from(
            EntanglementReport.unstable(), f"error: {exc}", v1, v2
        )
    return _record_from(report, note, v1, v2)


_WORKER_GRID: SweepGrid | None = None
_WORKER_SEED = 0


def _worker_init(grid: SweepGrid, seed: int) -> None:
    global _WORKER_GRID, _WORKER_SEED
    _WORKER_GRID = grid
    _WORKER_SEED = seed


def _worker_eval(ij: tuple[int, int]) -> SweepRecord:
    return _evaluate_index(_WORKER_GRID, _WORKER_SEED, ij[0], ij[1])


def run_sweep(
    grid: SweepGrid, jobs: int = 1, seed: int = 0
) -> list[SweepRecord]:
    """Evaluate every grid point; per-point failures become records.

    Records are ordered by (axis1 index, axis2 index) regardless of the
    worker count, and every record's numbers are bit-identical across
    worker counts (points are evaluated independently).
    """
    validate_grid(grid)
    n1, n2 = grid.shape()
    indices = [(i, j) for i in range(n1) for j in range(n2)]
    if jobs <= 1:
        return [_evaluate_index(grid, seed, i, j) for i, j in indices]
    ctx = multiprocessing.get_context("spawn")
    chunk = max(1, len(indices) // (jobs * 8))
    with ProcessPoolExecutor(
        max_workers=jobs,
        mp_context=ctx,
        initializer=_worker_init,
        initargs=(grid, seed),
    ) as pool:
        return list(pool.map(_worker_eval, indices, chunksize=chunk))


def preset(name: str) -> SweepGrid:
    """Bundled reference grid by name (fig2, fig3, fig4)."""
    if name == "fig2":
        base = EffectiveConfig(
            Delta_a=mhz(-200.0),
            Delta_b_tilde=mhz(-200.0),
            Delta_c_tilde=mhz(-100.0),
            gamma_a=mhz(5.5),
            gamma_b=mhz(12.0),
            gamma_c=mhz(12.0),
            K_b_tilde=0.0,
            K_c_tilde=0.0,
            G_tilde=mhz(19.4),
            g_ab=mhz(35.0),
        )
        return SweepGrid(
            axis1=SweepAxis("Delta_b_tilde_MHz", -200.0, 0.0, PRESET_AXIS_POINTS),
            axis2=SweepAxis("Delta_a_MHz", -200.0, 200.0, PRESET_AXIS_POINTS),
            mode="effective",
            base_effective=base,
            omegas=REFERENCE_OMEGAS,
            description="two-detuning plane, Kerr-free",
        )
    if name == "fig3":
        base = EffectiveConfig(
            Delta_a=mhz(0.0),
            Delta_b_tilde=mhz(-70.0),
            Delta_c_tilde=mhz(-100.0),
            gamma_a=mhz(18.6),
            gamma_b=mhz(6.7),
            gamma_c=mhz(6.7),
            K_b_tilde=mhz(15.0),
            K_c_tilde=mhz(24.0),
            G_tilde=mhz(19.4),
            g_ab=mhz(30.0),
        )
        return SweepGrid(
            axis1=SweepAxis("Delta_a_MHz", 0.0, 200.0, PRESET_AXIS_POINTS),
            axis2=SweepAxis("kerr_scale", 0.0, 1.0, 3),
            mode="effective",
            base_effective=base,
            omegas=REFERENCE_OMEGAS,
            description="cavity-detuning scans at three self-Kerr levels",
        )
    if name == "fig4":
        base = EffectiveConfig(
            Delta_a=mhz(100.0),
            Delta_b_tilde=mhz(-70.0),
            Delta_c_tilde=mhz(-100.0),
            gamma_a=mhz(18.6),
            gamma_b=mhz(6.7),
            gamma_c=mhz(6.7),
            K_b_tilde=mhz(15.0),
            K_c_tilde=mhz(24.0),
            G_tilde=mhz(19.4),
            g_ab=mhz(30.0),
        )
        return SweepGrid(
            axis1=SweepAxis("T_e_K", 0.0, 0.3, 61),
            axis2=None,
            mode="effective",
            base_effective=base,
            omegas=REFERENCE_OMEGAS,
            description="bath-temperature scan at full Kerr strength",
        )
    raise ConfigError(f"unknown preset {name!r}; expected fig2, fig3, or fig4")


PRESET_NAMES = ("fig2", "fig3", "fig4")


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def records_to_csv(grid: SweepGrid, records: list[SweepRecord]) -> str:
    """Render records as CSV, schema v1.

    First line is a ``#`` comment naming the schema version, mode, and
    axis columns; then a header row with the record field names (axis
    fields carry the swept parameter names); then one row per record.
    Floats use shortest round-trip decimals; unstable points leave the
    measure fields empty.  Notes are sanitized so rows never need
    quoting.
    """
    axes = [grid.axis1.name] + ([grid.axis2.name] if grid.axis2 else [])
    lines = [
        f"# magkerr-sweep-csv v1 mode={grid.mode} axes={','.join(axes)}",
        ",".join(
            axes
            + list(_MEASURE_FIELDS)
            + ["stable", "nu_min", "note"]
        ),
    ]
    for rec in records:
        cells = [_fmt(rec.axis1)]
        if grid.axis2 is not None:
            cells.append(_fmt(rec.axis2))
        cells += [_fmt(getattr(rec, f)) for f in _MEASURE_FIELDS]
        cells.append("true" if rec.stable else "false")
        cells.append(_fmt(rec.nu_min))
        cells.append(rec.note.replace(",", ";").replace("\n", " "))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
