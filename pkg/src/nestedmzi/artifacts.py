"""File artifacts for a run: CSV, JSON and SVG renderings of a RunResult.

Everything is rendered to strings before any file is touched, and partial
outputs are deleted if a write fails, so an output directory never holds a
half-written run.  Float formatting uses ``repr`` throughout, which makes
repeated runs byte-identical and keeps CSV and JSON numerically equal.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .service import RunResult

CSV_SPECTRUM_HEADER = "frequency_hz,value"
CSV_WEIGHTS_HEADER = "mirror,weight_quantum,weight_classical,deviation"


def render_result_json(result: RunResult) -> str:
    payload = result.model_dump(mode="json")
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_spectrum_csv(points: list) -> str:
    lines = [CSV_SPECTRUM_HEADER]
    lines.extend(f"{f!r},{v!r}" for f, v in points)
    return "\n".join(lines) + "\n"


def render_weights_csv(result: RunResult) -> str:
    quantum = result.weights.quantum.entries if result.weights.quantum else {}
    classical = result.weights.classical.entries if result.weights.classical else {}
    deviations = (
        {m: e.deviation for m, e in result.comparison.per_mirror.items()}
        if result.comparison
        else {}
    )
    lines = [CSV_WEIGHTS_HEADER]
    for mirror in sorted(set(quantum) | set(classical)):
        q = repr(quantum[mirror]) if mirror in quantum else ""
        c = repr(classical[mirror]) if mirror in classical else ""
        d = repr(deviations[mirror]) if mirror in deviations else ""
        lines.append(f"{mirror},{q},{c},{d}")
    return "\n".join(lines) + "\n"


def render_spectrum_svg(name: str, points: list, log_scale: bool = False) -> str:
    """Self-contained stem plot of a spectrum, no external assets."""
    width, height = 720.0, 360.0
    left, right, top, bottom = 64.0, 16.0, 32.0, 48.0
    plot_w = width - left - right
    plot_h = height - top - bottom
    fmax = max((f for f, _ in points), default=1.0) or 1.0
    vmax = max((v for _, v in points), default=0.0)
    if log_scale:
        floor = vmax * 1e-12 if vmax > 0.0 else 1e-12
        lo = math.log10(floor)
        hi = math.log10(vmax) if vmax > 0.0 else 0.0
        span = (hi - lo) or 1.0

        def y_of(v: float) -> float:
            clipped = max(v, floor)
            return top + plot_h * (1.0 - (math.log10(clipped) - lo) / span)

    else:
        scale = vmax or 1.0

        def y_of(v: float) -> float:
            return top + plot_h * (1.0 - v / scale)

    def x_of(f: float) -> float:
        return left + plot_w * f / fmax

    base = top + plot_h
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:g} {height:g}">',
        f'  <desc>{name} spectrum; ordinate {"log" if log_scale else "linear"}</desc>',
        f'  <rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
        f'  <text x="{left:g}" y="{top - 10:g}" font-family="monospace" font-size="14">{name}</text>',
        f'  <line x1="{left:g}" y1="{base:g}" x2="{left + plot_w:g}" y2="{base:g}" stroke="black"/>',
        f'  <line x1="{left:g}" y1="{top:g}" x2="{left:g}" y2="{base:g}" stroke="black"/>',
    ]
    for i in range(5):
        f = fmax * i / 4.0
        x = x_of(f)
        parts.append(
            f'  <line x1="{x:.3f}" y1="{base:g}" x2="{x:.3f}" y2="{base + 5:g}" stroke="black"/>'
        )
        parts.append(
            f'  <text x="{x:.3f}" y="{base + 20:g}" font-family="monospace" '
            f'font-size="11" text-anchor="middle">{f:g}</text>'
        )
    parts.append(
        f'  <text x="{left + plot_w / 2:.3f}" y="{height - 8:g}" font-family="monospace" '
        f'font-size="12" text-anchor="middle">frequency [Hz]</text>'
    )
    parts.append(
        f'  <text x="{left - 8:g}" y="{top + 12:g}" font-family="monospace" '
        f'font-size="11" text-anchor="end">{vmax:.6g}</text>'
    )
    threshold = vmax * 1e-15
    for f, v in points:
        if v > threshold:
            x = x_of(f)
            parts.append(
                f'  <line x1="{x:.3f}" y1="{base:g}" x2="{x:.3f}" y2="{y_of(v):.3f}" '
                f'stroke="#1f4e8c" stroke-width="1.5"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_outputs(
    result: RunResult,
    out_dir: Path,
    formats: list[str],
    svg_log: bool = False,
) -> list[Path]:
    """Write the requested artifacts, returning the paths written.

    All content is rendered first; if any write fails, files written so
    far are removed before the error propagates.
    """
    rendered: dict[str, str] = {}
    if "json" in formats:
        rendered["result.json"] = render_result_json(result)
    if "csv" in formats:
        if result.weights.quantum or result.weights.classical:
            rendered["weights.csv"] = render_weights_csv(result)
        for name, points in result.spectra.items():
            rendered[f"spectrum_{name}.csv"] = render_spectrum_csv(points)
    if "svg" in formats:
        for name, points in result.spectra.items():
            rendered[f"spectrum_{name}.svg"] = render_spectrum_svg(name, points, svg_log)

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name in sorted(rendered):
            path = out_dir / name
            path.write_text(rendered[name], encoding="utf-8")
            written.append(path)
    except OSError:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise
    return written
