"""Nested Mach-Zehnder interferometer simulator.

Two engines model the same circuit: a single-photon mode algebra with
frequency tags and post-selection, and a classical paraxial-field model.
Both report per-mirror which-path weights; the classical engine also
produces the quad-cell difference signal and the total-intensity spectrum
so the two witnesses can be compared.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (
    BasisKet,
    BeamSplitter,
    Block,
    Discard,
    Element,
    Mirror,
    PhaseShift,
    PhotonState,
    apply_element,
    postselect,
    state_norm,
)
from .circuit import (
    Circuit,
    Diagnostic,
    analyze,
    builtin_scenario,
    builtin_scenario_text,
    parse,
    parse_real_expr,
    serialize,
    validate,
)
from .classical import (
    ClassicalPath,
    FieldFrames,
    SimGrid,
    TimeSeries,
    expand_paths,
    quad_cell_signal,
    synthesize_field,
    total_intensity_spectrum,
)
from .errors import CircuitError, ConfigurationError, NestedMziError, StructuralError
from .quantum import WeightTable, mirror_weights, propagate
from .service import GridOptions, RunRequest, RunResult, run_simulation
from .spectral import (
    ComparisonEntry,
    ComparisonReport,
    Spectrum,
    compare_weights,
    extract_peak_weights,
    power_spectrum,
)

__all__ = [
    "__version__",
    "BasisKet",
    "BeamSplitter",
    "Block",
    "Circuit",
    "CircuitError",
    "ClassicalPath",
    "ComparisonEntry",
    "ComparisonReport",
    "ConfigurationError",
    "Diagnostic",
    "Discard",
    "Element",
    "FieldFrames",
    "GridOptions",
    "Mirror",
    "NestedMziError",
    "PhaseShift",
    "PhotonState",
    "RunRequest",
    "RunResult",
    "SimGrid",
    "Spectrum",
    "StructuralError",
    "TimeSeries",
    "WeightTable",
    "analyze",
    "apply_element",
    "builtin_scenario",
    "builtin_scenario_text",
    "compare_weights",
    "expand_paths",
    "extract_peak_weights",
    "mirror_weights",
    "parse",
    "parse_real_expr",
    "postselect",
    "power_spectrum",
    "propagate",
    "quad_cell_signal",
    "run_simulation",
    "serialize",
    "state_norm",
    "synthesize_field",
    "total_intensity_spectrum",
    "validate",
]
