"""HTTP service exposing the simulator.

The FastAPI app wraps the core package with pydantic request/response
schemas.  Every route body delegates to a plain handler function
(:func:`handle_point`, :func:`handle_sweep`, ...) that works on the
schema objects directly, so the CLI can call the handlers in process
and get byte-identical behavior to a remote server.

Domain errors map to structured JSON: configuration problems are 400,
solver/numerical failures are 422, both with a ``kind`` field naming
the error class.
"""

from __future__ import annotations

from dataclasses import asdict
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .configfile import assemble
from .diagnostics import run_invariant_suite
from .errors import (
    ConfigError,
    MagkerrError,
    NumericalError,
    PhysicalityError,
    SolverError,
    SqueezeDomainError,
    StabilityError,
)
from .sweep import (
    PRESET_NAMES,
    SweepAxis,
    preset,
    records_to_csv,
    run_point,
    run_sweep,
)

Mode = Literal["effective", "microscopic"]


class Params(BaseModel):
    """Model parameters in external units (MHz as 2*pi MHz, nHz, K).

    All fields are optional here; which ones are required or even legal
    depends on the request's ``mode`` and is enforced centrally by the
    config assembler.
    """

    model_config = ConfigDict(extra="forbid")

    omega_a_MHz: float | None = None
    omega_b_MHz: float | None = None
    omega_c_MHz: float | None = None
    omega_d_MHz: float | None = None
    gamma_a_MHz: float | None = None
    gamma_b_MHz: float | None = None
    gamma_c_MHz: float | None = None
    g_ab_MHz: float | None = None
    T_e_K: float | None = None
    Delta_a_MHz: float | None = None
    Delta_b_MHz: float | None = None
    Delta_c_MHz: float | None = None
    Delta_b_tilde_MHz: float | None = None
    Delta_c_tilde_MHz: float | None = None
    K_b_tilde_MHz: float | None = None
    K_c_tilde_MHz: float | None = None
    G_tilde_MHz: float | None = None
    K_b_nHz: float | None = None
    K_c_nHz: float | None = None
    G_nHz: float | None = None
    Omega_b_MHz: float | None = None
    Omega_c_MHz: float | None = None


class AxisSpec(BaseModel):
    """One sweep axis: parameter name plus an inclusive linear range."""

    model_config = ConfigDict(extra="forbid")

    name: str
    min: float
    max: float
    points: int = Field(ge=2)

    def to_axis(self) -> SweepAxis:
        return SweepAxis(
            name=self.name, start=self.min, stop=self.max, points=self.points
        )


class PointRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Mode = "effective"
    params: Params = Params()
    # Microscopic mode only: pick the n-th classical branch (sorted by
    # total occupation) instead of the power-up branch.
    branch: int | None = None
    seed: int = 0


class PointResponse(BaseModel):
    """Steady-state measures; all None when the point is unstable."""

    stable: bool
    E_ab: float | None = None
    E_bc: float | None = None
    E_ac: float | None = None
    E_a_bc: float | None = None
    E_b_ac: float | None = None
    E_c_ab: float | None = None
    R_a_bc: float | None = None
    R_b_ac: float | None = None
    R_c_ab: float | None = None
    R_min: float | None = None
    N_a: float | None = None
    N_b: float | None = None
    N_c: float | None = None
    nu_min: float | None = None
    note: str = ""


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Mode = "effective"
    params: Params = Params()
    axis1: AxisSpec
    axis2: AxisSpec | None = None
    jobs: int = Field(default=1, ge=1, le=64)
    seed: int = 0


class RecordModel(BaseModel):
    axis1: float
    axis2: float | None = None
    E_ab: float | None = None
    E_bc: float | None = None
    E_ac: float | None = None
    E_a_bc: float | None = None
    E_b_ac: float | None = None
    E_c_ab: float | None = None
    R_min: float | None = None
    N_a: float | None = None
    N_b: float | None = None
    N_c: float | None = None
    stable: bool
    nu_min: float | None = None
    note: str = ""


class SweepResponse(BaseModel):
    mode: Mode
    axes: list[str]
    records: list[RecordModel]


class AxisInfo(BaseModel):
    name: str
    start: float
    stop: float
    points: int


class PresetInfo(BaseModel):
    name: str
    description: str
    mode: str
    axes: list[AxisInfo]
    shape: tuple[int, int]


class PresetList(BaseModel):
    presets: list[str]


class CheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    fast: bool = True


class CheckItem(BaseModel):
    name: str
    passed: bool
    detail: str


class CheckResponse(BaseModel):
    passed: bool
    checks: list[CheckItem]


def _loaded(req: PointRequest | SweepRequest):
    values = req.params.model_dump(exclude_none=True)
    axis1 = axis2 = None
    if isinstance(req, SweepRequest):
        axis1 = req.axis1.to_axis()
        axis2 = req.axis2.to_axis() if req.axis2 is not None else None
    return assemble(values, req.mode, axis1, axis2)


def handle_point(req: PointRequest) -> PointResponse:
    if req.branch is not None and req.mode != "microscopic":
        raise ConfigError("branch selection requires microscopic mode")
    loaded = _loaded(req)
    cfg = loaded.effective if req.mode == "effective" else loaded.bare
    rng = np.random.default_rng([req.seed])
    report, note = run_point(cfg, rng=rng, branch=req.branch)
    return PointResponse(**asdict(report), note=note)


def handle_sweep(req: SweepRequest) -> SweepResponse:
    loaded = _loaded(req)
    records = run_sweep(loaded.grid, jobs=req.jobs, seed=req.seed)
    axes = [loaded.grid.axis1.name]
    if loaded.grid.axis2 is not None:
        axes.append(loaded.grid.axis2.name)
    return SweepResponse(
        mode=req.mode,
        axes=axes,
        records=[RecordModel(**asdict(r)) for r in records],
    )


def handle_sweep_csv(req: SweepRequest) -> str:
    loaded = _loaded(req)
    records = run_sweep(loaded.grid, jobs=req.jobs, seed=req.seed)
    return records_to_csv(loaded.grid, records)


def _preset_or_404(name: str):
    if name not in PRESET_NAMES:
        raise HTTPException(
            status_code=404,
            detail=f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}",
        )
    return preset(name)


def handle_preset_info(name: str) -> PresetInfo:
    grid = _preset_or_404(name)
    axes = [grid.axis1] + ([grid.axis2] if grid.axis2 is not None else [])
    return PresetInfo(
        name=name,
        description=grid.description,
        mode=grid.mode,
        axes=[
            AxisInfo(name=a.name, start=a.start, stop=a.stop, points=a.points)
            for a in axes
        ],
        shape=grid.shape(),
    )


def handle_preset_run(name: str, jobs: int = 1, seed: int = 0) -> str:
    grid = _preset_or_404(name)
    records = run_sweep(grid, jobs=jobs, seed=seed)
    return records_to_csv(grid, records)


def handle_check(req: CheckRequest) -> CheckResponse:
    results = run_invariant_suite(seed=req.seed, fast=req.fast)
    items = [
        CheckItem(name=r.name, passed=r.passed, detail=r.detail) for r in results
    ]
    return CheckResponse(passed=all(r.passed for r in results), checks=items)


app = FastAPI(title="magkerr", version=__version__)

# Most specific first; the fallback for any other MagkerrError is 422.
_ERROR_KINDS = (
    (ConfigError, 400, "config"),
    (SolverError, 422, "solver"),
    (StabilityError, 422, "stability"),
    (PhysicalityError, 422, "physicality"),
    (SqueezeDomainError, 422, "squeeze-domain"),
    (NumericalError, 422, "numerical"),
)


@app.exception_handler(MagkerrError)
async def _domain_error(request: Request, exc: MagkerrError) -> JSONResponse:
    for cls, status, kind in _ERROR_KINDS:
        if isinstance(exc, cls):
            break
    else:
        status, kind = 422, "model"
    return JSONResponse(status_code=status, content={"detail": str(exc), "kind": kind})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/presets", response_model=PresetList)
def presets() -> PresetList:
    return PresetList(presets=list(PRESET_NAMES))


@app.get("/presets/{name}", response_model=PresetInfo)
def preset_info(name: str) -> PresetInfo:
    return handle_preset_info(name)


@app.post("/presets/{name}/run")
def preset_run(name: str, jobs: int = 1, seed: int = 0) -> PlainTextResponse:
    return PlainTextResponse(handle_preset_run(name, jobs, seed), media_type="text/csv")


@app.post("/point", response_model=PointResponse)
def point(req: PointRequest) -> PointResponse:
    return handle_point(req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    return handle_sweep(req)


@app.post("/sweep/csv")
def sweep_csv(req: SweepRequest) -> PlainTextResponse:
    return PlainTextResponse(handle_sweep_csv(req), media_type="text/csv")


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return handle_check(req)
