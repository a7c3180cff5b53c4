"""Command-line interface.

The CLI is a thin client over the service layer: each subcommand builds
the same request schema the HTTP API accepts and either calls the
handler in process (default) or posts it to a running server given with
``--server``.  Results print to stdout (JSON for single points, CSV for
sweeps); errors print to stderr with exit code 2 for configuration
problems and 3 for solver or numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .configfile import read_config
from .errors import ConfigError, MagkerrError
from .model import to_mhz
from .service import (
    AxisSpec,
    CheckRequest,
    Params,
    PointRequest,
    SweepRequest,
    handle_check,
    handle_point,
    handle_preset_run,
    handle_sweep_csv,
)
from .sweep import PRESET_NAMES, SweepGrid, preset

_HTTP_EXIT = {400: 2, 422: 3}
# Sweeps can run for minutes; let the server finish.
_HTTP_TIMEOUT = 3600.0


def _params_from(values: dict[str, float]) -> Params:
    unknown = sorted(set(values) - set(Params.model_fields))
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(map(repr, unknown)))
    return Params(**values)


def _axis_spec(axis) -> AxisSpec | None:
    if axis is None:
        return None
    return AxisSpec(name=axis.name, min=axis.start, max=axis.stop, points=axis.points)


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _http_error(resp) -> int:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    print(f"error ({resp.status_code}): {detail}", file=sys.stderr)
    return _HTTP_EXIT.get(resp.status_code, 1)


def _post(server: str, path: str, payload: dict):
    import httpx

    return httpx.post(
        server.rstrip("/") + path, json=payload, timeout=_HTTP_TIMEOUT
    )


def cmd_point(args) -> int:
    values, mode, axis1, _ = read_config(args.config, args.mode)
    if axis1 is not None:
        raise ConfigError("config defines a sweep; use the sweep command")
    req = PointRequest(
        mode=mode, params=_params_from(values), branch=args.branch, seed=args.seed
    )
    if args.server:
        resp = _post(args.server, "/point", req.model_dump(exclude_none=True))
        if resp.status_code != 200:
            return _http_error(resp)
        _write_out(json.dumps(resp.json(), indent=2) + "\n", None)
        return 0
    result = handle_point(req)
    _write_out(result.model_dump_json(indent=2) + "\n", None)
    return 0


def cmd_sweep(args) -> int:
    values, mode, axis1, axis2 = read_config(args.config, args.mode)
    if axis1 is None:
        raise ConfigError("config defines no sweep axis; use the point command")
    req = SweepRequest(
        mode=mode,
        params=_params_from(values),
        axis1=_axis_spec(axis1),
        axis2=_axis_spec(axis2),
        jobs=args.jobs,
        seed=args.seed,
    )
    if args.server:
        resp = _post(args.server, "/sweep/csv", req.model_dump(exclude_none=True))
        if resp.status_code != 200:
            return _http_error(resp)
        _write_out(resp.text, args.out)
        return 0
    _write_out(handle_sweep_csv(req), args.out)
    return 0


def _axis_suffix(name: str) -> str:
    if name.endswith("_MHz"):
        return "_MHz"
    if name.endswith("_K"):
        return "_K"
    return ""


_EFFECTIVE_DUMP_KEYS = (
    ("Delta_a_MHz", "Delta_a"),
    ("Delta_b_tilde_MHz", "Delta_b_tilde"),
    ("Delta_c_tilde_MHz", "Delta_c_tilde"),
    ("K_b_tilde_MHz", "K_b_tilde"),
    ("K_c_tilde_MHz", "K_c_tilde"),
    ("G_tilde_MHz", "G_tilde"),
    ("g_ab_MHz", "g_ab"),
    ("gamma_a_MHz", "gamma_a"),
    ("gamma_b_MHz", "gamma_b"),
    ("gamma_c_MHz", "gamma_c"),
)


def dump_grid(grid: SweepGrid) -> str:
    """Render a grid as loadable config text (effective mode only)."""
    lines = [f"mode = {grid.mode}"]
    base = grid.base_effective
    for key, field in _EFFECTIVE_DUMP_KEYS:
        lines.append(f"{key} = {to_mhz(getattr(base, field)):.10g}")
    if grid.omegas is not None:
        for key, omega in zip(
            ("omega_a_MHz", "omega_b_MHz", "omega_c_MHz"), grid.omegas
        ):
            lines.append(f"{key} = {to_mhz(omega):.10g}")
    for which, axis in (("axis1", grid.axis1), ("axis2", grid.axis2)):
        if axis is None:
            continue
        suffix = _axis_suffix(axis.name)
        lines.append(f"sweep.{which}.name = {axis.name}")
        lines.append(f"sweep.{which}.min{suffix} = {axis.start:.10g}")
        lines.append(f"sweep.{which}.max{suffix} = {axis.stop:.10g}")
        lines.append(f"sweep.{which}.points = {axis.points}")
    return "\n".join(lines) + "\n"


def cmd_preset(args) -> int:
    if args.dump:
        _write_out(dump_grid(preset(args.name)), args.out)
        return 0
    if args.server:
        resp = _post(
            args.server,
            f"/presets/{args.name}/run?jobs={args.jobs}&seed={args.seed}",
            {},
        )
        if resp.status_code != 200:
            return _http_error(resp)
        _write_out(resp.text, args.out)
        return 0
    _write_out(handle_preset_run(args.name, jobs=args.jobs, seed=args.seed), args.out)
    return 0


def cmd_check(args) -> int:
    req = CheckRequest(seed=args.seed, fast=not args.full)
    if args.server:
        resp = _post(args.server, "/check", req.model_dump())
        if resp.status_code != 200:
            return _http_error(resp)
        result = resp.json()
        checks = result["checks"]
        passed = result["passed"]
    else:
        result = handle_check(req)
        checks = [c.model_dump() for c in result.checks]
        passed = result.passed
    for item in checks:
        tag = "ok  " if item["passed"] else "FAIL"
        print(f"{tag}  {item['name']}: {item['detail']}")
    failed = sum(not c["passed"] for c in checks)
    print(f"{len(checks)} checks, {failed} failed")
    return 0 if passed else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magkerr",
        description="steady-state entanglement of a driven three-mode "
        "cavity-magnonic model with Kerr nonlinearities",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, server=True):
        if server:
            p.add_argument(
                "--server",
                metavar="URL",
                help="send the request to a running magkerr server",
            )
        p.add_argument("--seed", type=int, default=0, help="restart seed (default 0)")

    p = sub.add_parser("point", help="evaluate one working point from a config file")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--mode", choices=("effective", "microscopic"))
    p.add_argument(
        "--branch",
        type=int,
        help="classical branch index (microscopic mode; default: power-up branch)",
    )
    common(p)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="run the sweep defined in a config file")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--mode", choices=("effective", "microscopic"))
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="run (or dump) a bundled reference sweep")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument(
        "--dump",
        action="store_true",
        help="print the preset as config text instead of running it",
    )
    common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("check", help="run the numerical self-check suite")
    p.add_argument(
        "--full", action="store_true", help="larger sample counts (slower)"
    )
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MagkerrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 3


if __name__ == "__main__":
    raise SystemExit(main())
