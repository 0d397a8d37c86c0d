"""Single-photon engine: propagate a state through a circuit and read out
per-mirror which-path weights by post-selecting on each tag bit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .algebra import PhotonState, apply_element, postselect, state_norm
from .circuit import Circuit, validate
from .errors import StructuralError


@dataclass(frozen=True)
class WeightTable:
    """Nonnegative weight per mirror label plus the squared norm removed by
    blocks/discards along the way."""

    entries: dict[str, float]
    lost_norm: float = 0.0


def _require_valid(circuit: Circuit) -> None:
    errors = [d for d in validate(circuit) if d.severity == "error"]
    if errors:
        raise StructuralError(
            "invalid circuit: " + "; ".join(d.message for d in errors)
        )


def propagate(circuit: Circuit, phi_override: Optional[float] = None) -> PhotonState:
    """Send one photon through the circuit and keep the detector port.

    Applies every element in order starting from unit amplitude on the
    source, then drops all terminal ports other than the detector.  With
    ``phi_override`` the circuit's named phase parameter is substituted
    without re-parsing.
    """
    _require_valid(circuit)
    if phi_override is not None:
        circuit = circuit.with_phi(phi_override)
    state = PhotonState.initial(circuit.labels, len(circuit.mirrors), circuit.source)
    for element in circuit.elements:
        state = apply_element(state, element)
    kept = {k: v for k, v in state.terms.items() if k.spatial == circuit.detector}
    return PhotonState(state.labels, state.n_tags, kept)


def mirror_weights(state: PhotonState, circuit: Circuit) -> WeightTable:
    """Post-selection weight for every declared mirror.

    ``state`` must come from :func:`propagate` on the same circuit, so the
    weight removed by blocks, discards and terminal ports is simply the
    deficit from unit norm.
    """
    entries = {m.label: postselect(state, m.index)[1] for m in circuit.mirrors}
    return WeightTable(entries, lost_norm=max(0.0, 1.0 - state_norm(state)))
