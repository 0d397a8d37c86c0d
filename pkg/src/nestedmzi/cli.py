"""Command line front end.

Thin client over the service layer: builds a :class:`RunRequest`, runs it
in-process and writes the artifacts.  ``serve`` starts the HTTP API for
multi-client use.

Exit codes: 0 success, 1 circuit diagnostics, 2 configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .artifacts import write_outputs
from .circuit import SCENARIOS, analyze, builtin_scenario_text, parse_real_expr
from .errors import CircuitError, ConfigurationError
from .service import GridOptions, RunRequest, RunResult, run_simulation

EXIT_OK = 0
EXIT_CIRCUIT = 1
EXIT_CONFIG = 2


def _print_diagnostics(origin: str, diags, stream=None) -> None:
    stream = stream or sys.stderr
    for d in diags:
        print(f"{origin}:{d.line}:{d.column}: {d.severity}: {d.message}", file=stream)


def _read_circuit_file(path: str) -> tuple[str | None, int]:
    """Returns (text, exit_code); a decode failure is a circuit diagnostic."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_CONFIG
    try:
        return raw.decode("utf-8"), EXIT_OK
    except UnicodeDecodeError as exc:
        print(f"{path}:1:1: error: not valid UTF-8 ({exc.reason})", file=sys.stderr)
        return None, EXIT_CIRCUIT


def _summarize(result: RunResult) -> None:
    if result.weights.quantum is not None:
        entries = " ".join(
            f"{k}={v:.6g}" for k, v in result.weights.quantum.entries.items()
        )
        print(f"quantum weights: {entries} (lost norm {result.weights.quantum.lost_norm:.6g})")
    if result.weights.classical is not None:
        entries = " ".join(
            f"{k}={v:.6g}" for k, v in result.weights.classical.entries.items()
        )
        print(f"classical weights (total-intensity): {entries}")
    if result.comparison is not None:
        print(f"quantum/classical max deviation: {result.comparison.max_deviation:.3g}")


def _cmd_run(ns: argparse.Namespace) -> int:
    circuit_text = None
    origin = f"<scenario {ns.scenario}>"
    if ns.circuit is not None:
        origin = ns.circuit
        circuit_text, code = _read_circuit_file(ns.circuit)
        if circuit_text is None:
            return code

    phi = None
    if ns.phi is not None:
        try:
            phi = parse_real_expr(ns.phi)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG

    try:
        request = RunRequest(
            scenario=ns.scenario,
            circuit_text=circuit_text,
            phi=phi,
            engine=ns.engine,
            witness=ns.witness,
            variant=ns.variant,
            eps=ns.eps,
            grid=GridOptions(
                duration=ns.duration,
                sample_rate=ns.rate,
                ny=ns.ny,
                ylim=ns.ylim,
            ),
        )
    except ValidationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run_simulation(request)
    except CircuitError as exc:
        _print_diagnostics(origin, exc.diagnostics)
        return EXIT_CIRCUIT
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    _print_diagnostics(origin, result.diagnostics)

    try:
        written = write_outputs(result, Path(ns.out), ns.formats, svg_log=ns.svg_log)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    _summarize(result)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_check(ns: argparse.Namespace) -> int:
    worst = EXIT_OK
    for path in ns.files:
        text, code = _read_circuit_file(path)
        if text is None:
            worst = max(worst, code)
            continue
        circuit, diags = analyze(text)
        _print_diagnostics(path, diags)
        if circuit is None:
            worst = max(worst, EXIT_CIRCUIT)
        else:
            print(f"{path}: ok")
    return worst


def _cmd_scenario(ns: argparse.Namespace) -> int:
    sys.stdout.write(builtin_scenario_text(ns.which))
    return EXIT_OK


def _cmd_serve(ns: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("nestedmzi.api:app", host=ns.host, port=ns.port)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nestedmzi",
        description="Nested interferometer simulator with which-path witnesses.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    rp = sub.add_parser("run", help="Simulate a scenario or an .mzi circuit file.")
    src = rp.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", choices=SCENARIOS, help="Built-in configuration.")
    src.add_argument("--circuit", metavar="FILE", help="Circuit description file (.mzi).")
    rp.add_argument("--phi", metavar="EXPR", help="Phase override, e.g. pi/2 or 0.7.")
    rp.add_argument("--engine", choices=("quantum", "classical", "both"), default="both")
    rp.add_argument("--witness", choices=("delta-i", "i-total", "both"), default="both")
    rp.add_argument("--variant", choices=("paraxial", "exact"), default="paraxial",
                    help="Classical field model (default: paraxial).")
    rp.add_argument("--duration", type=float, default=1.0, help="Time window [s].")
    rp.add_argument("--rate", type=float, default=4096.0, help="Sample rate [Hz].")
    rp.add_argument("--ny", type=int, default=513, help="Transverse samples (odd).")
    rp.add_argument("--ylim", type=float, default=6.0, help="Transverse half-range [waists].")
    rp.add_argument("--eps", type=float, help="Override all mirror deflection amplitudes.")
    rp.add_argument("--out", default=".", help="Output directory.")
    rp.add_argument("--format", dest="formats", action="append",
                    choices=("csv", "json", "svg"),
                    help="Output format; repeatable (default: csv and json).")
    rp.add_argument("--svg-log", action="store_true", help="Log-scale SVG ordinate.")
    rp.set_defaults(func=_cmd_run)

    cp = sub.add_parser("check", help="Parse and validate .mzi files.")
    cp.add_argument("files", nargs="+", metavar="FILE")
    cp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("scenario", help="Print a built-in scenario's canonical text.")
    sp.add_argument("which", choices=SCENARIOS)
    sp.set_defaults(func=_cmd_scenario)

    vp = sub.add_parser("serve", help="Start the HTTP API.")
    vp.add_argument("--host", default="127.0.0.1")
    vp.add_argument("--port", type=int, default=8000)
    vp.set_defaults(func=_cmd_serve)

    return p


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    if getattr(ns, "formats", None) is None and ns.cmd == "run":
        ns.formats = ["csv", "json"]
    return ns.func(ns)


if __name__ == "__main__":
    raise SystemExit(main())
