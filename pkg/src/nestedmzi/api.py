"""HTTP front end.

Run with ``nestedmzi serve`` or ``uvicorn nestedmzi.api:app``.  Circuit
problems come back as 422 with positioned diagnostics; configuration
problems as 400.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__
from .circuit import SCENARIOS, analyze, builtin_scenario_text, serialize
from .errors import CircuitError, ConfigurationError
from .service import DiagnosticOut, RunRequest, RunResult, run_simulation

app = FastAPI(
    title="nestedmzi",
    version=__version__,
    description="Nested interferometer simulator: quantum and classical "
    "engines with quad-cell and total-intensity which-path witnesses.",
)


class ParseRequest(BaseModel):
    text: str


class ParseResponse(BaseModel):
    ok: bool
    canonical: Optional[str] = None
    diagnostics: list[DiagnosticOut] = []


class ScenarioResponse(BaseModel):
    scenario: str
    text: str


def _diag_out(diags) -> list[DiagnosticOut]:
    return [
        DiagnosticOut(severity=d.severity, line=d.line, column=d.column, message=d.message)
        for d in diags
    ]


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/scenarios/{which}", response_model=ScenarioResponse)
def scenario(which: str) -> ScenarioResponse:
    if which not in SCENARIOS:
        raise HTTPException(status_code=404, detail=f"unknown scenario {which!r}")
    return ScenarioResponse(scenario=which, text=builtin_scenario_text(which))


@app.post("/circuits/parse", response_model=ParseResponse)
def parse_circuit(request: ParseRequest) -> ParseResponse:
    circuit, diags = analyze(request.text)
    return ParseResponse(
        ok=circuit is not None,
        canonical=serialize(circuit) if circuit is not None else None,
        diagnostics=_diag_out(diags),
    )


@app.post("/simulate", response_model=RunResult)
def simulate(request: RunRequest) -> RunResult:
    try:
        return run_simulation(request)
    except CircuitError as exc:
        raise HTTPException(
            status_code=422,
            detail={"diagnostics": [d.__dict__ for d in exc.diagnostics]},
        ) from exc
    except ConfigurationError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
