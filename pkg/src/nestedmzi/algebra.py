"""Sparse single-photon mode algebra.

A state assigns a complex amplitude to each occupied ``(spatial mode, tag)``
ket.  The tag carries one bit per declared mirror and records which
vibrating mirrors have marked the path so far; bits are only ever set,
never cleared.  Optical elements act linearly on the amplitude map:

* beam splitter -- transmits into the same-side output with a real factor
  ``t`` and reflects into the opposite output with ``i*sqrt(1 - t**2)``
* mirror       -- sets its tag bit on every term travelling its path
* phase shift  -- multiplies its path by ``exp(i*phi)``
* block        -- removes its path (a closed shutter)
* discard      -- removes a never-detected output port

All values are immutable after construction and every operation returns a
new state, so independent states may be evaluated concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .errors import StructuralError

#: amplitudes below this modulus are pruned from the sparse map
PRUNE_TOL = 1e-15

Tag = tuple[int, ...]


class BasisKet(NamedTuple):
    spatial: str
    tag: Tag


@dataclass(frozen=True)
class BeamSplitter:
    """Two-port splitter; one input may be vacuum (``None``).

    ``t`` is the transmission *amplitude*; a 1:2 intensity split is
    ``t = 1/sqrt(3)``.  Reflection amplitude is ``i*sqrt(1 - t**2)``.
    """

    name: str
    in_ports: tuple[Optional[str], Optional[str]]
    out_ports: tuple[str, str]
    t: float

    @property
    def r(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.t * self.t))


@dataclass(frozen=True)
class Mirror:
    """A vibrating, frequency-tagging mirror on one spatial path.

    ``index`` is the position of this mirror's bit inside every tag.
    ``amplitude`` is the transverse deflection in beam-waist units and
    ``phase`` the deflection phase in radians; both only matter to the
    classical field model, the tag bit is what the mode algebra tracks.
    """

    label: str
    path: str
    index: int
    frequency: float
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class PhaseShift:
    path: str
    phi: float


@dataclass(frozen=True)
class Block:
    path: str


@dataclass(frozen=True)
class Discard:
    path: str


Element = Union[BeamSplitter, Mirror, PhaseShift, Block, Discard]


@dataclass(frozen=True)
class PhotonState:
    """Amplitude map over ``(spatial, tag)`` kets for one photon.

    ``labels`` is the universe of spatial modes and ``n_tags`` the fixed
    tag length; both are checked against every element that is applied.
    Construction prunes amplitudes below :data:`PRUNE_TOL` and rejects
    non-finite values.
    """

    labels: frozenset[str]
    n_tags: int
    terms: dict[BasisKet, complex]

    def __post_init__(self):
        kept: dict[BasisKet, complex] = {}
        for ket, amp in self.terms.items():
            amp = complex(amp)
            if not cmath.isfinite(amp):
                raise StructuralError(f"non-finite amplitude on {ket}")
            if abs(amp) >= PRUNE_TOL:
                kept[ket] = amp
        object.__setattr__(self, "terms", kept)

    @classmethod
    def initial(cls, labels, n_tags: int, source: str) -> PhotonState:
        """Unit amplitude on ``source`` with an all-zero tag."""
        ket = BasisKet(source, (0,) * n_tags)
        return cls(frozenset(labels), n_tags, {ket: 1.0 + 0.0j})


def state_norm(state: PhotonState) -> float:
    """Squared norm, i.e. the total detection weight of the state."""
    return math.fsum(abs(a) ** 2 for a in state.terms.values())


def _require_label(state: PhotonState, label: str) -> None:
    if label not in state.labels:
        raise StructuralError(f"unknown spatial label {label!r}")


def _add(terms: dict[BasisKet, complex], ket: BasisKet, amp: complex) -> None:
    terms[ket] = terms.get(ket, 0.0 + 0.0j) + amp


def apply_element(state: PhotonState, element: Element) -> PhotonState:
    """Apply one optical element, returning the transformed state."""
    if isinstance(element, BeamSplitter):
        return _apply_beam_splitter(state, element)
    if isinstance(element, Mirror):
        return _apply_mirror(state, element)
    if isinstance(element, PhaseShift):
        return _apply_phase(state, element)
    if isinstance(element, (Block, Discard)):
        _require_label(state, element.path)
        kept = {k: v for k, v in state.terms.items() if k.spatial != element.path}
        return PhotonState(state.labels, state.n_tags, kept)
    raise StructuralError(f"unknown element kind {type(element).__name__}")


def _apply_beam_splitter(state: PhotonState, bs: BeamSplitter) -> PhotonState:
    in0, in1 = bs.in_ports
    for port in (in0, in1, *bs.out_ports):
        if port is not None:
            _require_label(state, port)
    t = bs.t
    ir = 1j * bs.r
    new: dict[BasisKet, complex] = {}
    # terms away from the input ports pass through untouched
    for ket, amp in state.terms.items():
        if ket.spatial != in0 and ket.spatial != in1:
            _add(new, ket, amp)
    for ket, amp in state.terms.items():
        if ket.spatial == in0:
            _add(new, BasisKet(bs.out_ports[0], ket.tag), t * amp)
            _add(new, BasisKet(bs.out_ports[1], ket.tag), ir * amp)
        elif ket.spatial == in1:
            _add(new, BasisKet(bs.out_ports[1], ket.tag), t * amp)
            _add(new, BasisKet(bs.out_ports[0], ket.tag), ir * amp)
    return PhotonState(state.labels, state.n_tags, new)


def _apply_mirror(state: PhotonState, mirror: Mirror) -> PhotonState:
    _require_label(state, mirror.path)
    if not 0 <= mirror.index < state.n_tags:
        raise StructuralError(
            f"tag index {mirror.index} out of range for tag length {state.n_tags}"
        )
    new: dict[BasisKet, complex] = {}
    for ket, amp in state.terms.items():
        if ket.spatial == mirror.path and ket.tag[mirror.index] == 0:
            tag = ket.tag[: mirror.index] + (1,) + ket.tag[mirror.index + 1 :]
            _add(new, BasisKet(ket.spatial, tag), amp)
        else:
            _add(new, ket, amp)
    return PhotonState(state.labels, state.n_tags, new)


def _apply_phase(state: PhotonState, shift: PhaseShift) -> PhotonState:
    _require_label(state, shift.path)
    factor = cmath.exp(1j * shift.phi)
    new = {
        ket: (amp * factor if ket.spatial == shift.path else amp)
        for ket, amp in state.terms.items()
    }
    return PhotonState(state.labels, state.n_tags, new)


def postselect(state: PhotonState, mirror_index: int) -> tuple[complex, float]:
    """Project onto "this mirror marked the photon".

    Returns the coherent sum of amplitudes over all terms whose tag bit at
    ``mirror_index`` is set, together with its squared modulus.  The sum is
    an inner product with the unnormalized projector ket, so the second
    value is a detection *weight*, not a normalized probability.
    """
    if not 0 <= mirror_index < state.n_tags:
        raise StructuralError(
            f"tag index {mirror_index} out of range for tag length {state.n_tags}"
        )
    amp = 0.0 + 0.0j
    for ket, value in state.terms.items():
        if ket.tag[mirror_index] == 1:
            amp += value
    return amp, abs(amp) ** 2
