"""HTTP surface for the lab: scenarios, verification, sweeps, extractor demo.

The service owns all computation; clients only transport JSON and write
the returned files.  Invalid parameters surface as 422 responses with a
human-readable detail message.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .checks import verify_all
from .scenarios import Scenario, extractor_demo, render_json, run_scenario, sweep_markov


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Scenario
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    trials: Optional[int] = Field(default=None, ge=1, le=100_000_000)


class RunResponse(BaseModel):
    name: str
    summary: dict
    files: dict[str, str]


class CheckModel(BaseModel):
    name: str
    tolerance: float
    max_deviation: float
    cases: int
    passed: bool
    note: str


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0, lt=2**64)


class VerifyResponse(BaseModel):
    seed: int
    passed: bool
    checks: list[CheckModel]
    files: dict[str, str]


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha_start: float = Field(default=0.0, ge=0.0, le=1.0)
    alpha_stop: float = Field(default=1.0, ge=0.0, le=1.0)
    alpha_step: float = Field(default=0.01, gt=0.0, le=0.5)
    mu: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class SweepResponse(BaseModel):
    summary: dict
    files: dict[str, str]


class ExtractorDemoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=64, ge=1, le=4096)
    mu: list[float] = Field(default_factory=lambda: [0.5])
    draws: int = Field(default=1000, ge=1, le=1_000_000)
    seed: int = Field(default=0, ge=0, lt=2**64)


class ExtractorDemoResponse(BaseModel):
    summary: dict
    files: dict[str, str]


def create_app() -> FastAPI:
    app = FastAPI(title="aaakeylab", version=__version__)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/scenario/run", response_model=RunResponse)
    async def scenario_run(req: RunRequest) -> RunResponse:
        result = run_scenario(req.scenario, seed=req.seed, trials=req.trials)
        return RunResponse(name=result.name, summary=result.summary, files=result.files)

    @app.post("/verify", response_model=VerifyResponse)
    async def verify(req: VerifyRequest) -> VerifyResponse:
        summary = verify_all(req.seed)
        return VerifyResponse(
            seed=summary["seed"],
            passed=summary["passed"],
            checks=summary["checks"],
            files={"verify.json": render_json(summary)},
        )

    @app.post("/sweep/markov", response_model=SweepResponse)
    async def sweep(req: SweepRequest) -> SweepResponse:
        result = sweep_markov(req.alpha_start, req.alpha_stop, req.alpha_step, req.mu)
        return SweepResponse(summary=result.summary, files=result.files)

    @app.post("/extractor/demo", response_model=ExtractorDemoResponse)
    async def extractor(req: ExtractorDemoRequest) -> ExtractorDemoResponse:
        result = extractor_demo(req.n, tuple(req.mu), req.draws, req.seed)
        return ExtractorDemoResponse(summary=result.summary, files=result.files)

    return app


app = create_app()
