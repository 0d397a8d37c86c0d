"""Circuit description language (".mzi") and its compiled form.

The language is line oriented, one element per line, ``#`` starts a
comment.  Accepted lines::

    source  LABEL
    detect  LABEL
    bs      NAME in=(LABEL?,LABEL?) out=(LABEL,LABEL) t=EXPR
    mirror  NAME path=LABEL freq=REAL amp=REAL [phase=REAL]
    phase   path=LABEL phi=EXPR
    block   path=LABEL
    discard LABEL

``EXPR`` admits decimal literals, ``pi``, ``sqrt(...)``, unary minus and
``*`` ``/`` so beam-splitter amplitudes can be written ``1/sqrt(3)`` and
phases ``pi/2``.  A beam splitter may leave one input empty (vacuum),
e.g. ``in=(c,)``.

Elements take effect in file order, which must be a valid forward pass
from the single ``source`` to the single ``detect`` label.  Tag bits are
assigned by *sorted mirror label*, so the built-in circuit's mirrors
A, B, C, E, F occupy bits 0..4 regardless of where the beam meets them.

Parsing is total: any input string yields either a :class:`Circuit` or at
least one positioned :class:`Diagnostic`.  ``serialize`` emits a canonical
form (LF line endings, ``repr`` floats) whose re-parse is structurally
identical to the original circuit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .algebra import BeamSplitter, Block, Discard, Element, Mirror, PhaseShift
from .errors import CircuitError, ConfigurationError

FILE_EXTENSION = ".mzi"


@dataclass(frozen=True)
class Diagnostic:
    """A positioned parse/validation message (1-based line and column).

    Diagnostics produced by :func:`validate` on a hand-built circuit point
    into that circuit's canonical serialization.
    """

    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Circuit:
    """Validated element list compiled from the DSL.

    ``mirrors`` is ordered by label and defines the tag bit layout;
    ``elements`` keeps the physical (file) order.  The spatial label set
    is derived, not stored, so structural equality is exactly equality of
    the four declared fields.
    """

    source: str
    detector: str
    mirrors: tuple[Mirror, ...]
    elements: tuple[Element, ...]

    @property
    def labels(self) -> frozenset[str]:
        found = {self.source, self.detector}
        for el in self.elements:
            if isinstance(el, BeamSplitter):
                found.update(p for p in el.in_ports if p is not None)
                found.update(el.out_ports)
            else:
                found.add(el.path)
        return frozenset(found)

    @property
    def phi(self) -> Optional[float]:
        """Value of the single named phase parameter, if there is one."""
        phases = [el for el in self.elements if isinstance(el, PhaseShift)]
        if len(phases) == 1:
            return phases[0].phi
        return None

    def mirror_frequencies(self) -> dict[str, float]:
        return {m.label: m.frequency for m in self.mirrors}

    def with_phi(self, phi: float) -> Circuit:
        """Substitute the circuit's named phase parameter without re-parsing."""
        phases = [el for el in self.elements if isinstance(el, PhaseShift)]
        if len(phases) != 1:
            raise ConfigurationError(
                f"phase override needs exactly one phase element, circuit has {len(phases)}"
            )
        elements = tuple(
            replace(el, phi=float(phi)) if isinstance(el, PhaseShift) else el
            for el in self.elements
        )
        return replace(self, elements=elements)

    def with_mirror_amplitude(self, amplitude: float) -> Circuit:
        """Return a copy with every mirror's deflection amplitude replaced."""
        swapped = {m.label: replace(m, amplitude=float(amplitude)) for m in self.mirrors}
        mirrors = tuple(swapped[m.label] for m in self.mirrors)
        elements = tuple(
            swapped[el.label] if isinstance(el, Mirror) else el for el in self.elements
        )
        return replace(self, mirrors=mirrors, elements=elements)


# --------------------------------------------------------------------------
# lexer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<punct>[=(),*/-])"
)


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


class _LineError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


def _lex_line(text: str, line_no: int) -> list[_Token]:
    body = text.split("#", 1)[0]
    tokens: list[_Token] = []
    pos = 0
    while pos < len(body):
        ch = body[pos]
        if ch in " \t\r":
            pos += 1
            continue
        m = _TOKEN_RE.match(body, pos)
        if m is None:
            raise _LineError(f"unexpected character {ch!r}", line_no, pos + 1)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), line_no, pos + 1))
        pos = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token], line_no: int, line_len: int):
        self.tokens = tokens
        self.i = 0
        self.line_no = line_no
        self.end_col = line_len + 1

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Optional[_Token]:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def fail(self, message: str, tok: Optional[_Token] = None):
        if tok is None:
            tok = self.peek()
        if tok is None:
            raise _LineError(message, self.line_no, self.end_col)
        raise _LineError(message, tok.line, tok.col)

    def expect_name(self, what: str = "identifier") -> _Token:
        tok = self.next()
        if tok is None or tok.kind != "name":
            self.fail(f"expected {what}", tok)
        return tok

    def expect_keyword(self, word: str) -> None:
        tok = self.next()
        if tok is None or tok.kind != "name" or tok.text != word:
            self.fail(f"expected {word!r}", tok)

    def expect_punct(self, symbol: str) -> None:
        tok = self.next()
        if tok is None or tok.kind != "punct" or tok.text != symbol:
            self.fail(f"expected {symbol!r}", tok)

    def expect_number(self, what: str = "number") -> float:
        tok = self.next()
        sign = 1.0
        if tok is not None and tok.kind == "punct" and tok.text == "-":
            sign = -1.0
            tok = self.next()
        if tok is None or tok.kind != "number":
            self.fail(f"expected {what}", tok)
        return sign * float(tok.text)

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            self.fail("unexpected trailing input", tok)


def _parse_expr(cur: _Cursor) -> float:
    value = _parse_expr_term(cur)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind != "punct" or tok.text not in "*/":
            return value
        cur.next()
        rhs = _parse_expr_term(cur)
        if tok.text == "*":
            value *= rhs
        else:
            if rhs == 0.0:
                cur.fail("division by zero in expression", tok)
            value /= rhs


def _parse_expr_term(cur: _Cursor) -> float:
    tok = cur.next()
    if tok is None:
        cur.fail("expected expression")
    if tok.kind == "number":
        return float(tok.text)
    if tok.kind == "name" and tok.text == "pi":
        return math.pi
    if tok.kind == "name" and tok.text == "sqrt":
        cur.expect_punct("(")
        inner = _parse_expr(cur)
        cur.expect_punct(")")
        if inner < 0.0:
            cur.fail("sqrt of negative value", tok)
        return math.sqrt(inner)
    if tok.kind == "punct" and tok.text == "-":
        return -_parse_expr_term(cur)
    if tok.kind == "punct" and tok.text == "(":
        inner = _parse_expr(cur)
        cur.expect_punct(")")
        return inner
    cur.fail("expected number, 'pi' or 'sqrt(...)'", tok)


def parse_real_expr(text: str) -> float:
    """Evaluate a standalone EXPR string such as ``pi/2`` or ``1/sqrt(3)``."""
    try:
        tokens = _lex_line(text, 1)
        cur = _Cursor(tokens, 1, len(text))
        value = _parse_expr(cur)
        cur.expect_end()
    except _LineError as exc:
        raise ValueError(f"bad expression {text!r}: {exc.message}") from None
    return value


# --------------------------------------------------------------------------
# statements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Stmt:
    line: int
    col: int


@dataclass(frozen=True)
class _SourceStmt(_Stmt):
    label: str


@dataclass(frozen=True)
class _DetectStmt(_Stmt):
    label: str


@dataclass(frozen=True)
class _BsStmt(_Stmt):
    name: str
    in0: Optional[str]
    in1: Optional[str]
    out0: str
    out1: str
    t: float


@dataclass(frozen=True)
class _MirrorStmt(_Stmt):
    label: str
    path: str
    freq: float
    amp: float
    phase: float


@dataclass(frozen=True)
class _PhaseStmt(_Stmt):
    path: str
    phi: float


@dataclass(frozen=True)
class _BlockStmt(_Stmt):
    path: str


@dataclass(frozen=True)
class _DiscardStmt(_Stmt):
    path: str


def _parse_statement(cur: _Cursor) -> _Stmt:
    head = cur.expect_name("directive")
    line, col = head.line, head.col
    word = head.text
    if word == "source":
        label = cur.expect_name("source label").text
        cur.expect_end()
        return _SourceStmt(line, col, label)
    if word == "detect":
        label = cur.expect_name("detector label").text
        cur.expect_end()
        return _DetectStmt(line, col, label)
    if word == "discard":
        label = cur.expect_name("path label").text
        cur.expect_end()
        return _DiscardStmt(line, col, label)
    if word == "block":
        cur.expect_keyword("path")
        cur.expect_punct("=")
        label = cur.expect_name("path label").text
        cur.expect_end()
        return _BlockStmt(line, col, label)
    if word == "phase":
        cur.expect_keyword("path")
        cur.expect_punct("=")
        path = cur.expect_name("path label").text
        cur.expect_keyword("phi")
        cur.expect_punct("=")
        phi = _parse_expr(cur)
        cur.expect_end()
        return _PhaseStmt(line, col, path, phi)
    if word == "mirror":
        name = cur.expect_name("mirror name").text
        cur.expect_keyword("path")
        cur.expect_punct("=")
        path = cur.expect_name("path label").text
        cur.expect_keyword("freq")
        cur.expect_punct("=")
        freq = cur.expect_number("frequency")
        cur.expect_keyword("amp")
        cur.expect_punct("=")
        amp = cur.expect_number("deflection amplitude")
        phase = 0.0
        if cur.peek() is not None:
            cur.expect_keyword("phase")
            cur.expect_punct("=")
            phase = cur.expect_number("deflection phase")
        cur.expect_end()
        return _MirrorStmt(line, col, name, path, freq, amp, phase)
    if word == "bs":
        name = cur.expect_name("beam splitter name").text
        cur.expect_keyword("in")
        cur.expect_punct("=")
        cur.expect_punct("(")
        in0 = in1 = None
        tok = cur.peek()
        if tok is not None and tok.kind == "name":
            in0 = cur.next().text
        cur.expect_punct(",")
        tok = cur.peek()
        if tok is not None and tok.kind == "name":
            in1 = cur.next().text
        cur.expect_punct(")")
        cur.expect_keyword("out")
        cur.expect_punct("=")
        cur.expect_punct("(")
        out0 = cur.expect_name("output label").text
        cur.expect_punct(",")
        out1 = cur.expect_name("output label").text
        cur.expect_punct(")")
        cur.expect_keyword("t")
        cur.expect_punct("=")
        t = _parse_expr(cur)
        cur.expect_end()
        return _BsStmt(line, col, name, in0, in1, out0, out1, t)
    raise _LineError(f"unknown directive {word!r}", line, col)


def _scan(text: str) -> tuple[list[_Stmt], list[Diagnostic]]:
    stmts: list[_Stmt] = []
    diags: list[Diagnostic] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        try:
            tokens = _lex_line(raw, line_no)
            if not tokens:
                continue
            stmts.append(_parse_statement(_Cursor(tokens, line_no, len(raw))))
        except _LineError as exc:
            diags.append(Diagnostic("error", exc.line, exc.col, exc.message))
    return stmts, diags


# --------------------------------------------------------------------------
# semantic checks (shared between parse and validate)
# --------------------------------------------------------------------------

# forward-pass status of a spatial label
_LIVE, _EMPTY, _REMOVED = "live", "empty", "removed"


def _semantic_diagnostics(stmts: list[_Stmt]) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def error(stmt: _Stmt, message: str) -> None:
        diags.append(Diagnostic("error", stmt.line, stmt.col, message))

    def warning(stmt: _Stmt, message: str) -> None:
        diags.append(Diagnostic("warning", stmt.line, stmt.col, message))

    sources = [s for s in stmts if isinstance(s, _SourceStmt)]
    detects = [s for s in stmts if isinstance(s, _DetectStmt)]
    if not sources:
        diags.append(Diagnostic("error", 1, 1, "missing 'source' line"))
    for extra in sources[1:]:
        error(extra, "more than one 'source' line")
    if not detects:
        diags.append(Diagnostic("error", 1, 1, "missing 'detect' line"))
    for extra in detects[1:]:
        error(extra, "more than one 'detect' line")

    mirror_labels: dict[str, _MirrorStmt] = {}
    freq_seen: dict[float, str] = {}
    for s in stmts:
        if not isinstance(s, _MirrorStmt):
            continue
        if s.label in mirror_labels:
            error(s, f"duplicate mirror label {s.label!r}")
        else:
            mirror_labels[s.label] = s
        if s.freq <= 0.0:
            error(s, f"mirror frequency must be positive, got {s.freq!r}")
        elif s.freq in freq_seen:
            warning(
                s,
                f"mirror frequency {s.freq!r} duplicates mirror "
                f"{freq_seen[s.freq]!r}: indistinguishable spectral peaks",
            )
        else:
            freq_seen[s.freq] = s.label
        if s.amp < 0.0:
            error(s, f"mirror deflection amplitude must be nonnegative, got {s.amp!r}")

    # forward pass over the element sequence
    status: dict[str, str] = {}

    def use_path(stmt: _Stmt, label: str) -> None:
        st = status.get(label)
        if st is None:
            error(stmt, f"undeclared path {label!r}")
            status[label] = _EMPTY
        elif st == _REMOVED:
            error(stmt, f"path {label!r} used after block/discard")
        elif st == _EMPTY:
            warning(stmt, f"path {label!r} carries no amplitude here")

    for s in stmts:
        if isinstance(s, _SourceStmt):
            status[s.label] = _LIVE
        elif isinstance(s, (_MirrorStmt, _PhaseStmt)):
            use_path(s, s.path)
        elif isinstance(s, (_BlockStmt, _DiscardStmt)):
            use_path(s, s.path)
            status[s.path] = _REMOVED
        elif isinstance(s, _BsStmt):
            if not 0.0 < s.t <= 1.0:
                error(s, f"beam splitter amplitude t must lie in (0, 1], got {s.t!r}")
            ins = [p for p in (s.in0, s.in1) if p is not None]
            if not ins:
                error(s, "beam splitter with both input ports vacuum")
            if s.in0 is not None and s.in0 == s.in1:
                error(s, f"beam splitter input ports must differ, got {s.in0!r} twice")
            if s.out0 == s.out1:
                error(s, f"beam splitter output ports must differ, got {s.out0!r} twice")
            any_live = False
            for p in ins:
                # a dark input port is legitimate (vacuum in), but the
                # label itself must exist
                if p not in status:
                    error(s, f"undeclared path {p!r}")
                    status[p] = _EMPTY
                elif status[p] == _LIVE:
                    any_live = True
            for p in ins:
                status[p] = _EMPTY
            for out in (s.out0, s.out1):
                if status.get(out) == _LIVE and out not in ins:
                    error(s, f"output port {out!r} would overwrite a populated path")
                status[out] = _LIVE if any_live else _EMPTY
            if not any_live:
                warning(s, "beam splitter has no populated input")

    for d in detects[:1]:
        st = status.get(d.label)
        if st is None:
            error(d, f"detector on undeclared label {d.label!r}")
        elif st != _LIVE:
            error(d, f"detector path {d.label!r} carries no amplitude")

    return diags


def _build_circuit(stmts: list[_Stmt]) -> Circuit:
    mirror_stmts = [s for s in stmts if isinstance(s, _MirrorStmt)]
    ordered = sorted(mirror_stmts, key=lambda s: s.label)
    mirrors = tuple(
        Mirror(s.label, s.path, i, s.freq, s.amp, s.phase)
        for i, s in enumerate(ordered)
    )
    by_label = {m.label: m for m in mirrors}
    elements: list[Element] = []
    source = detector = ""
    for s in stmts:
        if isinstance(s, _SourceStmt):
            source = s.label
        elif isinstance(s, _DetectStmt):
            detector = s.label
        elif isinstance(s, _BsStmt):
            elements.append(BeamSplitter(s.name, (s.in0, s.in1), (s.out0, s.out1), s.t))
        elif isinstance(s, _MirrorStmt):
            elements.append(by_label[s.label])
        elif isinstance(s, _PhaseStmt):
            elements.append(PhaseShift(s.path, s.phi))
        elif isinstance(s, _BlockStmt):
            elements.append(Block(s.path))
        elif isinstance(s, _DiscardStmt):
            elements.append(Discard(s.path))
    return Circuit(source, detector, mirrors, tuple(elements))


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


def analyze(text: str) -> tuple[Optional[Circuit], list[Diagnostic]]:
    """Parse ``text`` leniently.

    Returns ``(circuit, diagnostics)``; the circuit is ``None`` exactly
    when at least one error diagnostic is present.  Warnings may accompany
    a successful parse.
    """
    stmts, diags = _scan(text)
    if diags:
        return None, diags
    diags = _semantic_diagnostics(stmts)
    if any(d.severity == "error" for d in diags):
        return None, diags
    return _build_circuit(stmts), diags


def parse(text: str) -> Circuit:
    """Parse ``text`` or raise :class:`CircuitError` with the diagnostics."""
    circuit, diags = analyze(text)
    if circuit is None:
        raise CircuitError(diags)
    return circuit


def validate(circuit: Circuit) -> list[Diagnostic]:
    """Re-check a circuit's invariants; empty list means all hold.

    Positions in the returned diagnostics refer to the circuit's canonical
    serialization.
    """
    diags: list[Diagnostic] = []
    for i, m in enumerate(circuit.mirrors):
        if m.index != i:
            diags.append(
                Diagnostic(
                    "error", 0, 0, f"mirror {m.label!r} carries tag index {m.index}, expected {i}"
                )
            )
    labels = [m.label for m in circuit.mirrors]
    if labels != sorted(labels):
        diags.append(Diagnostic("error", 0, 0, "mirror list not ordered by label"))
    declared = set(labels)
    for el in circuit.elements:
        if isinstance(el, Mirror) and el.label not in declared:
            diags.append(
                Diagnostic("error", 0, 0, f"mirror element {el.label!r} missing from mirror list")
            )
    stmts, scan_diags = _scan(serialize(circuit))
    diags.extend(scan_diags)
    diags.extend(_semantic_diagnostics(stmts))
    return diags


def serialize(circuit: Circuit) -> str:
    """Canonical text form; ``parse(serialize(c))`` equals ``c``."""
    lines = [f"source {circuit.source}"]
    for el in circuit.elements:
        if isinstance(el, BeamSplitter):
            i0 = el.in_ports[0] or ""
            i1 = el.in_ports[1] or ""
            lines.append(
                f"bs {el.name} in=({i0},{i1}) out=({el.out_ports[0]},{el.out_ports[1]}) t={el.t!r}"
            )
        elif isinstance(el, Mirror):
            lines.append(
                f"mirror {el.label} path={el.path} freq={el.frequency!r} "
                f"amp={el.amplitude!r} phase={el.phase!r}"
            )
        elif isinstance(el, PhaseShift):
            lines.append(f"phase path={el.path} phi={el.phi!r}")
        elif isinstance(el, Block):
            lines.append(f"block path={el.path}")
        elif isinstance(el, Discard):
            lines.append(f"discard {el.path}")
    lines.append(f"detect {circuit.detector}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# built-in circuit
# --------------------------------------------------------------------------

# Two nested loops: an outer 1:2 interferometer (paths c and b) enclosing a
# balanced inner one (paths b and a).  Mirrors C and E sit on the outer
# arms, A and B inside the inner loop, F on the inner loop's output; the
# phase shifter rides the inner arm that carries mirror A.  Default mirror
# frequencies are distinct and land on exact 1 Hz bins of the default
# one-second window; the deflection amplitude is not a measured value.
_BUILTIN_TEMPLATE = """\
source c
bs BS1 in=(c,) out=(c,b) t=1/sqrt(3)
mirror C path=c freq=270 amp=0.001
{block}mirror E path=b freq=290 amp=0.001
bs BS2 in=(b,) out=(b,a) t=1/sqrt(2)
mirror B path=b freq=250 amp=0.001
mirror A path=a freq=230 amp=0.001
phase path=a phi={phi}
bs BS3 in=(b,a) out=(b,a) t=1/sqrt(2)
discard a
mirror F path=b freq=310 amp=0.001
bs BS4 in=(c,b) out=(c,b) t=1/sqrt(3)
discard b
detect c
"""

SCENARIOS = ("a", "b", "c")


def builtin_scenario(which: str) -> Circuit:
    """The built-in nested circuit in one of its three configurations.

    ``a``: phase pi, all paths open.  ``b``: phase 0, all paths open.
    ``c``: phase 0 with the lower path ``c`` blocked after its mirror.
    """
    if which == "a":
        text = _BUILTIN_TEMPLATE.format(phi="pi", block="")
    elif which == "b":
        text = _BUILTIN_TEMPLATE.format(phi="0.0", block="")
    elif which == "c":
        text = _BUILTIN_TEMPLATE.format(phi="0.0", block="block path=c\n")
    else:
        raise ValueError(f"unknown scenario {which!r}, expected one of {SCENARIOS}")
    return parse(text)


def builtin_scenario_text(which: str) -> str:
    """Canonical source text of a built-in scenario."""
    return serialize(builtin_scenario(which))
