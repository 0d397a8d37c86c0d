"""Classical paraxial-field engine.

The circuit is flattened into source-to-detector paths, each carrying a
complex amplitude and the set of mirrors met along the way.  Every mirror
X deflects the beam transversely by ``d_X(t) = amp * sin(2*pi*f*t + phase)``
in waist units, so the detected field is a sum of transversely shifted
unit-waist Gaussians:

    exact:     Psi(y, t) = sum_p A_p * exp(-(y - s_p(t))**2)
    paraxial:  Psi(y, t) = exp(-y**2) * sum_p A_p * (1 + 2*y*s_p(t))

with ``s_p`` the summed deflection of the path's mirrors.  Two detector
signals are derived: the quad-cell difference ``upper minus lower lobe``
of ``|Psi|**2`` and the spectrum of the total field intensity, which is
the reliable which-path witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .algebra import BeamSplitter, Block, Discard, Mirror, PhaseShift
from .circuit import Circuit, validate
from .errors import ConfigurationError, StructuralError
from .spectral import Spectrum

VARIANTS = ("exact", "paraxial")


@dataclass(frozen=True)
class ClassicalPath:
    """One source-to-detector route: accumulated amplitude (beam-splitter
    factors and phase shifts) and the mirror labels encountered."""

    amplitude: complex
    mirrors: frozenset[str]


@dataclass(frozen=True)
class SimGrid:
    """Uniform sampling of the transverse coordinate and of time.

    ``ny`` must be odd so the grid is symmetric about y = 0; time covers
    ``duration`` seconds at ``sample_rate`` Hz, giving a spectral
    resolution of ``1/duration``.
    """

    duration: float = 1.0
    sample_rate: float = 4096.0
    ny: int = 513
    ylim: float = 6.0

    def __post_init__(self):
        if self.ny < 3 or self.ny % 2 == 0:
            raise ConfigurationError(f"ny must be odd and >= 3, got {self.ny}")
        if self.ylim <= 0.0:
            raise ConfigurationError(f"ylim must be positive, got {self.ylim}")
        if self.duration <= 0.0 or self.sample_rate <= 0.0:
            raise ConfigurationError("duration and sample_rate must be positive")
        nt = self.duration * self.sample_rate
        if abs(nt - round(nt)) > 1e-9 or round(nt) < 2:
            raise ConfigurationError(
                f"duration * sample_rate must be an integer >= 2, got {nt!r}"
            )

    @property
    def nt(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def dy(self) -> float:
        return 2.0 * self.ylim / (self.ny - 1)

    @cached_property
    def y(self) -> np.ndarray:
        return np.linspace(-self.ylim, self.ylim, self.ny)

    @cached_property
    def times(self) -> np.ndarray:
        return np.arange(self.nt) / self.sample_rate

    def check_mirrors(self, mirrors: Iterable[Mirror]) -> None:
        """Reject mirrors the grid cannot represent cleanly: frequencies
        must stay well below Nyquist and sit on exact spectral bins."""
        for m in mirrors:
            if self.sample_rate < 4.0 * m.frequency:
                raise ConfigurationError(
                    f"sample_rate {self.sample_rate!r} below 4x mirror "
                    f"frequency {m.frequency!r} ({m.label})"
                )
            cycles = m.frequency * self.duration
            if abs(cycles - round(cycles)) > 1e-9:
                raise ConfigurationError(
                    f"mirror {m.label} frequency {m.frequency!r} is not an "
                    f"integer multiple of 1/duration = {1.0 / self.duration!r}"
                )


@dataclass(frozen=True)
class FieldFrames:
    """Complex field samples, indexed ``values[time, y]``."""

    values: np.ndarray
    grid: SimGrid
    variant: str

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown field variant {self.variant!r}")
        if self.values.shape != (self.grid.nt, self.grid.ny):
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.nt}, {self.grid.ny})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("field contains non-finite values")


@dataclass(frozen=True)
class TimeSeries:
    """A real detector signal sampled on the grid's time axis."""

    samples: np.ndarray
    sample_rate: float


def expand_paths(circuit: Circuit, phi: Optional[float] = None) -> list[ClassicalPath]:
    """Enumerate all source-to-detector paths with their amplitudes.

    Each beam splitter forks every ray on its input ports (transmit with
    ``t``, reflect with ``i*sqrt(1-t**2)``); blocks and discards terminate
    rays.  A blocked route simply disappears from the list.
    """
    errors = [d for d in validate(circuit) if d.severity == "error"]
    if errors:
        raise StructuralError("invalid circuit: " + "; ".join(d.message for d in errors))
    if phi is not None:
        circuit = circuit.with_phi(phi)
    rays: list[tuple[str, complex, frozenset[str]]] = [
        (circuit.source, 1.0 + 0.0j, frozenset())
    ]
    for el in circuit.elements:
        if isinstance(el, BeamSplitter):
            in0, in1 = el.in_ports
            t, ir = el.t, 1j * el.r
            forked: list[tuple[str, complex, frozenset[str]]] = []
            for label, amp, mirrors in rays:
                if label == in0:
                    forked.append((el.out_ports[0], t * amp, mirrors))
                    forked.append((el.out_ports[1], ir * amp, mirrors))
                elif label == in1:
                    forked.append((el.out_ports[1], t * amp, mirrors))
                    forked.append((el.out_ports[0], ir * amp, mirrors))
                else:
                    forked.append((label, amp, mirrors))
            rays = forked
        elif isinstance(el, Mirror):
            rays = [
                (lbl, amp, ms | {el.label} if lbl == el.path else ms)
                for lbl, amp, ms in rays
            ]
        elif isinstance(el, PhaseShift):
            factor = complex(math.cos(el.phi), math.sin(el.phi))
            rays = [
                (lbl, amp * factor if lbl == el.path else amp, ms)
                for lbl, amp, ms in rays
            ]
        elif isinstance(el, (Block, Discard)):
            rays = [r for r in rays if r[0] != el.path]
    return [
        ClassicalPath(amp, ms) for lbl, amp, ms in rays if lbl == circuit.detector
    ]


def _deflections(grid: SimGrid, mirrors: Sequence[Mirror]) -> dict[str, np.ndarray]:
    t = grid.times
    return {
        m.label: m.amplitude * np.sin(2.0 * math.pi * m.frequency * t + m.phase)
        for m in mirrors
    }


def synthesize_field(
    paths: Sequence[ClassicalPath],
    grid: SimGrid,
    mirrors: Sequence[Mirror],
    variant: str = "paraxial",
) -> FieldFrames:
    """Superpose the per-path Gaussians on the grid.

    ``variant="exact"`` evaluates the shifted Gaussians directly;
    ``"paraxial"`` uses their first-order expansion in the deflections,
    which is the regime the witnesses are defined in (deflections must be
    small against the unit waist).
    """
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown field variant {variant!r}")
    grid.check_mirrors(mirrors)
    known = {m.label for m in mirrors}
    for p in paths:
        missing = p.mirrors - known
        if missing:
            raise StructuralError(f"path references unknown mirrors {sorted(missing)}")
    d = _deflections(grid, mirrors)
    y = grid.y
    nt = grid.nt
    values = np.zeros((nt, grid.ny), dtype=np.complex128)
    if variant == "exact":
        for p in paths:
            shift = np.zeros(nt)
            for label in sorted(p.mirrors):
                shift += d[label]
            values += p.amplitude * np.exp(-((y[None, :] - shift[:, None]) ** 2))
    else:
        carrier = 0.0 + 0.0j
        modulation = np.zeros(nt, dtype=np.complex128)
        for p in paths:
            carrier += p.amplitude
            shift = np.zeros(nt)
            for label in sorted(p.mirrors):
                shift += d[label]
            modulation += p.amplitude * shift
        gaussian = np.exp(-(y**2))
        values = gaussian[None, :] * (carrier + 2.0 * modulation[:, None] * y[None, :])
    return FieldFrames(values, grid, variant)


def _trapezoid_weights(grid: SimGrid) -> np.ndarray:
    w = np.full(grid.ny, grid.dy)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def quad_cell_signal(frames: FieldFrames) -> TimeSeries:
    """Upper-minus-lower intensity difference of a split detector.

    Integrates ``|Psi|**2`` over y > 0 minus y < 0 with the trapezoid
    rule; the y = 0 sample is split evenly between the halves and so
    cancels.
    """
    grid = frames.grid
    signed = _trapezoid_weights(grid) * np.sign(grid.y)
    intensity = np.abs(frames.values) ** 2
    return TimeSeries((intensity * signed[None, :]).sum(axis=1), grid.sample_rate)


def total_intensity_spectrum(frames: FieldFrames) -> Spectrum:
    """Spectrum of the total field intensity.

    Fourier-transforms the complex field along time for every y, then
    integrates ``|Psi(y, f)|**2`` over y.  Negative-frequency content is
    folded onto the one-sided axis so the discrete Parseval identity holds
    exactly: ``sum_f I_T(f) df == sum_t sum_y |Psi|**2 dy dt``.  The zero
    frequency bin is the unmodulated carrier; it is reported but excluded
    from mirror-weight extraction.
    """
    grid = frames.grid
    nt = grid.nt
    transform = np.fft.fft(frames.values, axis=0) * grid.dt
    wy = _trapezoid_weights(grid)
    two_sided = (np.abs(transform) ** 2 * wy[None, :]).sum(axis=1)
    nbins = nt // 2 + 1
    values = np.empty(nbins)
    values[0] = two_sided[0]
    if nt % 2 == 0:
        values[-1] = two_sided[nt // 2]
        values[1:-1] = two_sided[1 : nt // 2] + two_sided[nt - 1 : nt // 2 : -1]
    else:
        values[1:] = two_sided[1:nbins] + two_sided[nt - 1 : nbins - 1 : -1]
    resolution = 1.0 / grid.duration
    frequencies = np.arange(nbins) * resolution
    return Spectrum(frequencies, values, resolution)
