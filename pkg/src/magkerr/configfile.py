"""Flat key/value configuration files.

Format: one ``key = value`` assignment per line, ``#`` starts a comment,
blank lines are ignored.  Keys follow the external symbol names with a
unit suffix (``Delta_b_tilde_MHz``, ``K_b_nHz``, ``T_e_K``, ...); values
are plain numbers in those units.  Unknown keys are an error: a config
that tries to set something this model does not have should fail loudly,
not silently steer a sweep.

Sweep axes use dotted keys::

    sweep.axis1.name = Delta_a_MHz
    sweep.axis1.min_MHz = -200
    sweep.axis1.max_MHz = 200
    sweep.axis1.points = 101

The min/max suffix must match the axis parameter's unit (``_MHz`` for
frequencies, ``_K`` for the temperature axis, bare ``min``/``max`` for
the dimensionless ``kerr_scale``).

:func:`assemble` turns already-parsed key/value numbers plus optional
axes into configs; the HTTP service reuses it so files and JSON requests
go through identical validation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .model import (
    BareConfig,
    EffectiveConfig,
    mhz,
    nhz,
    require_valid,
    thermal_occupancy,
)
from .sweep import SweepAxis, SweepGrid, axis_names, validate_grid

# key -> (dataclass field, converter to rad/s or passthrough)
_SHARED_KEYS = {
    "omega_a_MHz": ("omega_a", mhz),
    "omega_b_MHz": ("omega_b", mhz),
    "omega_c_MHz": ("omega_c", mhz),
    "gamma_a_MHz": ("gamma_a", mhz),
    "gamma_b_MHz": ("gamma_b", mhz),
    "gamma_c_MHz": ("gamma_c", mhz),
    "g_ab_MHz": ("g_ab", mhz),
    "Delta_a_MHz": ("Delta_a", mhz),
    "T_e_K": ("T_e", float),
}

_EFFECTIVE_ONLY = {
    "Delta_b_tilde_MHz": ("Delta_b_tilde", mhz),
    "Delta_c_tilde_MHz": ("Delta_c_tilde", mhz),
    "K_b_tilde_MHz": ("K_b_tilde", mhz),
    "K_c_tilde_MHz": ("K_c_tilde", mhz),
    "G_tilde_MHz": ("G_tilde", mhz),
}

_BARE_ONLY = {
    "omega_d_MHz": ("omega_d", mhz),
    "Delta_b_MHz": ("Delta_b", mhz),
    "Delta_c_MHz": ("Delta_c", mhz),
    "K_b_nHz": ("K_b", nhz),
    "K_c_nHz": ("K_c", nhz),
    "G_nHz": ("G", nhz),
    "Omega_b_MHz": ("Omega_b", mhz),
    "Omega_c_MHz": ("Omega_c", mhz),
}

_EFFECTIVE_REQUIRED = (
    "Delta_a_MHz",
    "Delta_b_tilde_MHz",
    "Delta_c_tilde_MHz",
    "g_ab_MHz",
    "gamma_a_MHz",
    "gamma_b_MHz",
    "gamma_c_MHz",
)

_BARE_REQUIRED = ("gamma_a_MHz", "gamma_b_MHz", "gamma_c_MHz")

MODEL_KEYS = tuple(sorted({**_SHARED_KEYS, **_EFFECTIVE_ONLY, **_BARE_ONLY}))


@dataclass(frozen=True)
class LoadedConfig:
    """Parsed config: a baseline model and, optionally, a sweep grid."""

    mode: str
    effective: EffectiveConfig | None
    bare: BareConfig | None
    omegas: tuple[float, float, float] | None
    T_e: float
    grid: SweepGrid | None


def parse_config_text(text: str) -> dict[str, str]:
    """Raw key/value pairs from config text; duplicate keys are errors."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_float(key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r}: expected a number, got {value!r}") from None


def _parse_axis(raw: dict[str, str], which: str, mode: str) -> SweepAxis | None:
    prefix = f"sweep.{which}."
    keys = {k: v for k, v in raw.items() if k.startswith(prefix)}
    if not keys:
        return None
    name = keys.pop(prefix + "name", None)
    if name is None:
        raise ConfigError(f"sweep {which} needs {prefix}name")
    if name not in axis_names(mode):
        raise ConfigError(
            f"unknown sweep axis {name!r} for {mode} mode; expected one of "
            + ", ".join(sorted(axis_names(mode)))
        )
    points_raw = keys.pop(prefix + "points", None)
    if points_raw is None:
        raise ConfigError(f"sweep {which} needs {prefix}points")
    try:
        points = int(points_raw)
    except ValueError:
        raise ConfigError(
            f"key {prefix}points: expected an integer, got {points_raw!r}"
        ) from None
    # Unit-suffixed range keys must match the swept parameter's unit.
    if name.endswith("_MHz"):
        suffix = "_MHz"
    elif name.endswith("_K"):
        suffix = "_K"
    else:
        suffix = ""
    lo_key, hi_key = prefix + "min" + suffix, prefix + "max" + suffix
    if lo_key not in keys or hi_key not in keys:
        raise ConfigError(f"sweep {which} needs {lo_key} and {hi_key}")
    lo = _parse_float(lo_key, keys.pop(lo_key))
    hi = _parse_float(hi_key, keys.pop(hi_key))
    if keys:
        raise ConfigError("unknown sweep keys: " + ", ".join(sorted(keys)))
    return SweepAxis(name=name, start=lo, stop=hi, points=points)


def assemble(
    values: dict[str, float],
    mode: str = "effective",
    axis1: SweepAxis | None = None,
    axis2: SweepAxis | None = None,
) -> LoadedConfig:
    """Build configs from external-key numbers plus optional sweep axes.

    ``values`` maps external key names (``Delta_a_MHz`` etc.) to numbers
    in their external units.  Key validity depends on ``mode``; a
    parameter covered by a sweep axis may be omitted from ``values``.
    """
    if mode not in ("effective", "microscopic"):
        raise ConfigError(f"mode must be 'effective' or 'microscopic', got {mode!r}")
    if axis1 is None and axis2 is not None:
        raise ConfigError("axis2 given without axis1")

    known = dict(_SHARED_KEYS)
    known.update(_EFFECTIVE_ONLY if mode == "effective" else _BARE_ONLY)
    unknown = sorted(set(values) - set(known))
    if unknown:
        hints = []
        for key in unknown:
            other = _BARE_ONLY if mode == "effective" else _EFFECTIVE_ONLY
            hints.append(
                f"{key!r} (only valid in the other mode)" if key in other else repr(key)
            )
        raise ConfigError("unknown config keys: " + ", ".join(hints))

    fields = {
        known[k][0]: known[k][1](_parse_float(k, v)) for k, v in values.items()
    }
    axes = [ax for ax in (axis1, axis2) if ax is not None]
    for ax in axes:
        if ax.name in known:
            # Swept parameters may be omitted from the baseline; seed
            # them with the axis start so the config is complete.
            field, conv = known[ax.name]
            fields.setdefault(field, conv(ax.start))

    axis_params = {ax.name for ax in axes}
    required = _EFFECTIVE_REQUIRED if mode == "effective" else _BARE_REQUIRED
    missing = [
        k for k in required if known[k][0] not in fields and k not in axis_params
    ]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    omega_fields = ("omega_a", "omega_b", "omega_c")
    omegas = None
    if all(f in fields for f in omega_fields):
        omegas = tuple(fields[f] for f in omega_fields)
    T_e = fields.get("T_e", 0.0)

    if mode == "effective":
        eff_fields = {
            k: v
            for k, v in fields.items()
            if k in EffectiveConfig.__dataclass_fields__
        }
        if T_e > 0.0:
            if omegas is None:
                raise ConfigError(
                    "T_e_K > 0 requires omega_a_MHz, omega_b_MHz, omega_c_MHz"
                )
            n_a, n_b, n_c = (thermal_occupancy(w, T_e) for w in omegas)
            eff_fields.update(n_a=n_a, n_b=n_b, n_c=n_c)
        effective = EffectiveConfig(**eff_fields)
        require_valid(effective)
        bare = None
    else:
        bare_fields = {
            k: v for k, v in fields.items() if k in BareConfig.__dataclass_fields__
        }
        bare = BareConfig(**bare_fields)
        require_valid(bare)
        effective = None

    grid = None
    if axis1 is not None:
        grid = SweepGrid(
            axis1=axis1,
            axis2=axis2,
            mode=mode,
            base_effective=effective,
            base_bare=bare,
            omegas=omegas,
        )
        validate_grid(grid)
    return LoadedConfig(
        mode=mode,
        effective=effective,
        bare=bare,
        omegas=omegas,
        T_e=T_e,
        grid=grid,
    )


def read_config_text(
    text: str, mode_override: str | None = None
) -> tuple[dict[str, float], str, SweepAxis | None, SweepAxis | None]:
    """Split config text into (values, mode, axis1, axis2) without building.

    The CLI uses this to translate a file into a service request; use
    :func:`load_config_text` to get constructed configs directly.
    """
    raw = parse_config_text(text)
    mode = mode_override or raw.pop("mode", "effective")
    raw.pop("mode", None)
    if mode not in ("effective", "microscopic"):
        raise ConfigError(f"mode must be 'effective' or 'microscopic', got {mode!r}")
    axis1 = _parse_axis(raw, "axis1", mode)
    axis2 = _parse_axis(raw, "axis2", mode)
    stray = [
        k
        for k in raw
        if k.startswith("sweep.")
        and not k.startswith(("sweep.axis1.", "sweep.axis2."))
    ]
    if stray:
        raise ConfigError("unknown sweep keys: " + ", ".join(sorted(stray)))
    values = {
        k: _parse_float(k, v)
        for k, v in raw.items()
        if not k.startswith("sweep.")
    }
    return values, mode, axis1, axis2


def load_config_text(text: str, mode_override: str | None = None) -> LoadedConfig:
    """Build the model (and grid, if present) described by config text."""
    return assemble(*read_config_text(text, mode_override))


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc


def read_config(
    path: str, mode_override: str | None = None
) -> tuple[dict[str, float], str, SweepAxis | None, SweepAxis | None]:
    """Split a config file into (values, mode, axis1, axis2)."""
    return read_config_text(_read_text(path), mode_override)


def load_config(path: str, mode_override: str | None = None) -> LoadedConfig:
    """Load and build a config file from ``path``."""
    return load_config_text(_read_text(path), mode_override)
