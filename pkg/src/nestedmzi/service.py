"""Request/response models and the simulation runner.

This is the single entry point both front ends use: the HTTP API exposes
:func:`run_simulation` over REST and the command line calls it in-process,
so one ``RunRequest`` describes a run everywhere.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .circuit import Circuit, builtin_scenario, parse, serialize, validate
from .classical import (
    SimGrid,
    expand_paths,
    quad_cell_signal,
    synthesize_field,
    total_intensity_spectrum,
)
from .quantum import WeightTable, mirror_weights, propagate
from .spectral import ComparisonReport, Spectrum, compare_weights, extract_peak_weights, power_spectrum

SPECTRUM_DELTA_I = "delta_i"
SPECTRUM_I_TOTAL = "i_total"


class GridOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    duration: float = Field(default=1.0, gt=0)
    sample_rate: float = Field(default=4096.0, gt=0)
    ny: int = Field(default=513, ge=3)
    ylim: float = Field(default=6.0, gt=0)


class RunRequest(BaseModel):
    """One simulation run.

    Exactly one of ``scenario`` (built-in configuration) or
    ``circuit_text`` (an ``.mzi`` program) selects the circuit.  ``phi``
    overrides the circuit's named phase parameter; ``eps`` overrides every
    mirror's deflection amplitude.
    """

    model_config = ConfigDict(extra="forbid")

    scenario: Optional[Literal["a", "b", "c"]] = None
    circuit_text: Optional[str] = None
    phi: Optional[float] = None
    engine: Literal["quantum", "classical", "both"] = "both"
    witness: Literal["delta-i", "i-total", "both"] = "both"
    variant: Literal["paraxial", "exact"] = "paraxial"
    eps: Optional[float] = Field(default=None, gt=0)
    grid: GridOptions = Field(default_factory=GridOptions)

    @model_validator(mode="after")
    def _exactly_one_circuit(self):
        if (self.scenario is None) == (self.circuit_text is None):
            raise ValueError("provide exactly one of 'scenario' or 'circuit_text'")
        return self


class DiagnosticOut(BaseModel):
    severity: str
    line: int
    column: int
    message: str


class WeightsOut(BaseModel):
    entries: dict[str, float]
    lost_norm: float


class WeightsSection(BaseModel):
    quantum: Optional[WeightsOut] = None
    classical: Optional[WeightsOut] = None


class ComparisonEntryOut(BaseModel):
    quantum: float
    classical: float
    deviation: float


class ComparisonOut(BaseModel):
    per_mirror: dict[str, ComparisonEntryOut]
    max_deviation: float


class ConfigEcho(BaseModel):
    scenario: Optional[str]
    circuit: str  # canonical text of the resolved circuit
    phi: Optional[float]
    engine: str
    witness: str
    variant: str
    eps: Optional[float]
    grid: GridOptions


class RunResult(BaseModel):
    """Everything a run produces, JSON-ready.

    ``spectra`` maps spectrum name ("delta_i", "i_total") to a list of
    ``[frequency_hz, value]`` pairs.  ``weights.classical`` always comes
    from the total-intensity witness; the quad-cell spectrum is reported
    as a spectrum only, since it is the witness shown to be unreliable.
    ``diagnostics`` carries validator warnings such as duplicate mirror
    frequencies (non-separable peaks).
    """

    config: ConfigEcho
    weights: WeightsSection
    spectra: dict[str, list[tuple[float, float]]]
    comparison: Optional[ComparisonOut] = None
    diagnostics: list[DiagnosticOut] = Field(default_factory=list)


def _spectrum_points(spectrum: Spectrum) -> list[tuple[float, float]]:
    return [
        (float(f), float(v))
        for f, v in zip(spectrum.frequencies.tolist(), spectrum.values.tolist())
    ]


def _weights_out(table: WeightTable) -> WeightsOut:
    return WeightsOut(
        entries={k: float(v) for k, v in table.entries.items()},
        lost_norm=float(table.lost_norm),
    )


def _comparison_out(report: ComparisonReport) -> ComparisonOut:
    return ComparisonOut(
        per_mirror={
            label: ComparisonEntryOut(
                quantum=e.quantum, classical=e.classical, deviation=e.deviation
            )
            for label, e in report.per_mirror.items()
        },
        max_deviation=report.max_deviation,
    )


def resolve_circuit(request: RunRequest) -> Circuit:
    """The circuit a request refers to, before phi/eps overrides.

    Raises :class:`nestedmzi.errors.CircuitError` on parse failure.
    """
    if request.scenario is not None:
        return builtin_scenario(request.scenario)
    return parse(request.circuit_text or "")


def run_simulation(request: RunRequest) -> RunResult:
    """Execute a run and assemble the full result.

    Raises :class:`nestedmzi.errors.CircuitError` for circuit problems and
    :class:`nestedmzi.errors.ConfigurationError` for grid/override
    problems; callers map these to their transport's failure modes.
    """
    circuit = resolve_circuit(request)
    warnings = [
        DiagnosticOut(
            severity=d.severity, line=d.line, column=d.column, message=d.message
        )
        for d in validate(circuit)
    ]
    if request.eps is not None:
        circuit = circuit.with_mirror_amplitude(request.eps)
    if request.phi is not None:
        circuit = circuit.with_phi(request.phi)

    quantum_table: Optional[WeightTable] = None
    classical_table: Optional[WeightTable] = None
    spectra: dict[str, list[tuple[float, float]]] = {}

    if request.engine in ("quantum", "both"):
        state = propagate(circuit)
        quantum_table = mirror_weights(state, circuit)

    if request.engine in ("classical", "both"):
        grid = SimGrid(
            duration=request.grid.duration,
            sample_rate=request.grid.sample_rate,
            ny=request.grid.ny,
            ylim=request.grid.ylim,
        )
        paths = expand_paths(circuit)
        frames = synthesize_field(paths, grid, circuit.mirrors, request.variant)
        # the total-intensity witness also provides the classical weight
        # table, so it is computed regardless of which spectra are emitted
        i_total = total_intensity_spectrum(frames)
        classical_table = extract_peak_weights(
            i_total, circuit.mirror_frequencies(), window=1
        )
        if request.witness in ("i-total", "both"):
            spectra[SPECTRUM_I_TOTAL] = _spectrum_points(i_total)
        if request.witness in ("delta-i", "both"):
            delta = power_spectrum(quad_cell_signal(frames))
            spectra[SPECTRUM_DELTA_I] = _spectrum_points(delta)

    comparison = None
    if quantum_table is not None and classical_table is not None:
        comparison = _comparison_out(compare_weights(quantum_table, classical_table))

    return RunResult(
        config=ConfigEcho(
            scenario=request.scenario,
            circuit=serialize(circuit),
            phi=request.phi,
            engine=request.engine,
            witness=request.witness,
            variant=request.variant,
            eps=request.eps,
            grid=request.grid,
        ),
        weights=WeightsSection(
            quantum=_weights_out(quantum_table) if quantum_table is not None else None,
            classical=_weights_out(classical_table)
            if classical_table is not None
            else None,
        ),
        spectra=spectra,
        comparison=comparison,
        diagnostics=warnings,
    )
