"""Exception types shared across the package."""

from __future__ import annotations


class NestedMziError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(NestedMziError):
    """Something refers to a thing that does not exist or cannot hold:
    unknown spatial label, tag index out of range, broken circuit."""


class ConfigurationError(NestedMziError):
    """A run or grid configuration violates its invariants
    (sampling rate, bin alignment, Nyquist, ambiguous phase override)."""


class CircuitError(NestedMziError):
    """Parsing or validating a circuit produced error diagnostics.

    The positioned diagnostics are kept on ``self.diagnostics``;
    ``str()`` renders one per line.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
