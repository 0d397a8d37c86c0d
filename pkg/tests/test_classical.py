from __future__ import annotations

import math

import numpy as np
import pytest

from nestedmzi.circuit import parse
from nestedmzi.classical import (
    FieldFrames,
    SimGrid,
    expand_paths,
    quad_cell_signal,
    synthesize_field,
    total_intensity_spectrum,
)
from nestedmzi.errors import ConfigurationError
from nestedmzi.quantum import propagate
from nestedmzi.spectral import power_spectrum

# coarser grid than the default, still bin aligned; keeps tests quick
FAST_GRID = SimGrid(duration=1.0, sample_rate=2048.0, ny=129, ylim=6.0)


def deflections(circuit, grid):
    t = grid.times
    return {
        m.label: m.amplitude * np.sin(2 * math.pi * m.frequency * t + m.phase)
        for m in circuit.mirrors
    }


def path_map(paths):
    return {frozenset(p.mirrors): p.amplitude for p in paths}


def test_builtin_path_census(scenario_a, scenario_c):
    open_paths = path_map(expand_paths(scenario_a))
    assert set(open_paths) == {
        frozenset({"C"}),
        frozenset({"B", "E", "F"}),
        frozenset({"A", "E", "F"}),
    }
    assert open_paths[frozenset({"C"})] == pytest.approx(1 / 3, abs=1e-12)
    assert open_paths[frozenset({"B", "E", "F"})] == pytest.approx(-1 / 3, abs=1e-12)
    # the phase shifter rides the mirror-A arm
    assert open_paths[frozenset({"A", "E", "F"})] == pytest.approx(
        math.cos(math.pi) / 3, abs=1e-12
    )

    blocked = path_map(expand_paths(scenario_c))
    assert set(blocked) == {frozenset({"B", "E", "F"}), frozenset({"A", "E", "F"})}


@pytest.mark.parametrize("phi", [0.0, 0.9, math.pi])
def test_paths_match_quantum_amplitudes(phi):
    circuit = parse(
        "source a\n"
        "bs S1 in=(a,) out=(a,b) t=1/sqrt(2)\n"
        "mirror P path=a freq=100 amp=0.001\n"
        "mirror Q path=b freq=110 amp=0.001\n"
        "phase path=b phi=0.0\n"
        "bs S2 in=(a,b) out=(a,b) t=1/sqrt(2)\n"
        "detect a\n"
    )
    paths = path_map(expand_paths(circuit, phi))
    assert len(paths) == 2
    by_mirrors = {}
    for ket, amp in propagate(circuit, phi).terms.items():
        mirrors = frozenset(
            m.label for m in circuit.mirrors if ket.tag[m.index] == 1
        )
        by_mirrors[mirrors] = amp
    assert set(paths) == set(by_mirrors)
    for mirrors, amp in by_mirrors.items():
        assert paths[mirrors] == pytest.approx(amp, abs=1e-12)


def test_zero_deflection_field_is_static_and_variant_free(scenario_a):
    circuit = scenario_a.with_mirror_amplitude(0.0)
    paths = expand_paths(circuit)
    exact = synthesize_field(paths, FAST_GRID, circuit.mirrors, "exact")
    paraxial = synthesize_field(paths, FAST_GRID, circuit.mirrors, "paraxial")
    assert np.allclose(exact.values, paraxial.values, atol=1e-15)
    assert np.all(exact.values == exact.values[0])
    assert np.all(paraxial.values == paraxial.values[0])


def test_paraxial_field_formula_scenario_b(scenario_b):
    d = deflections(scenario_b, FAST_GRID)
    y = FAST_GRID.y
    frames = synthesize_field(
        expand_paths(scenario_b), FAST_GRID, scenario_b.mirrors, "paraxial"
    )
    mod = d["C"] + d["A"] - d["B"]
    expected = (1 / 3) * np.exp(-(y**2))[None, :] * (1.0 + 2.0 * mod[:, None] * y[None, :])
    assert np.allclose(frames.values, expected, atol=1e-12)


def test_paraxial_field_formula_scenario_a(scenario_a):
    d = deflections(scenario_a, FAST_GRID)
    y = FAST_GRID.y
    frames = synthesize_field(
        expand_paths(scenario_a), FAST_GRID, scenario_a.mirrors, "paraxial"
    )
    mod = d["A"] + d["B"] - d["C"] + 2 * d["E"] + 2 * d["F"]
    expected = (
        -(1 / 3) * np.exp(-(y**2))[None, :] * (1.0 + 2.0 * mod[:, None] * y[None, :])
    )
    assert np.allclose(frames.values, expected, atol=1e-12)


def test_paraxial_field_formula_scenario_c(scenario_c):
    d = deflections(scenario_c, FAST_GRID)
    y = FAST_GRID.y
    frames = synthesize_field(
        expand_paths(scenario_c), FAST_GRID, scenario_c.mirrors, "paraxial"
    )
    expected = (
        (1 / 3) * np.exp(-(y**2))[None, :] * 2.0 * (d["A"] - d["B"])[:, None] * y[None, :]
    )
    assert np.allclose(frames.values, expected, atol=1e-12)


def test_quad_cell_spectrum_ratios(scenario_a, scenario_b):
    frames = synthesize_field(
        expand_paths(scenario_a), FAST_GRID, scenario_a.mirrors, "paraxial"
    )
    spectrum = power_spectrum(quad_cell_signal(frames))
    k = {
        label: int(round(f / spectrum.resolution))
        for label, f in scenario_a.mirror_frequencies().items()
    }
    peak = {label: spectrum.values[idx] for label, idx in k.items()}
    for hi in "EF":
        for lo in "ABC":
            assert peak[hi] / peak[lo] == pytest.approx(4.0, rel=1e-9)

    frames_b = synthesize_field(
        expand_paths(scenario_b), FAST_GRID, scenario_b.mirrors, "paraxial"
    )
    spec_b = power_spectrum(quad_cell_signal(frames_b))
    peaks_b = [spec_b.values[k[label]] for label in "ABC"]
    assert max(peaks_b) / min(peaks_b) == pytest.approx(1.0, rel=1e-9)
    for label in "EF":
        assert spec_b.values[k[label]] <= 1e-12 * peaks_b[0]


def test_quad_cell_null_for_even_intensity(default_grid):
    profile = np.exp(-(default_grid.y**2)).astype(complex)
    values = np.tile(profile, (default_grid.nt, 1))
    frames = FieldFrames(values, default_grid, "exact")
    signal = quad_cell_signal(frames)
    assert np.abs(signal.samples).max() < 1e-15


def test_blocked_scenario_quad_cell_vanishes(scenario_a, scenario_c):
    frames_a = synthesize_field(
        expand_paths(scenario_a), FAST_GRID, scenario_a.mirrors, "paraxial"
    )
    frames_c = synthesize_field(
        expand_paths(scenario_c), FAST_GRID, scenario_c.mirrors, "paraxial"
    )
    peak_a = np.abs(quad_cell_signal(frames_a).samples).max()
    peak_c = np.abs(quad_cell_signal(frames_c).samples).max()
    assert peak_c <= 1e-6 * peak_a


def test_total_intensity_weights(scenario_a, scenario_b, scenario_c):
    from nestedmzi.spectral import extract_peak_weights

    for circuit, expected in (
        (scenario_a, {"A": 1, "B": 1, "C": 1, "E": 4, "F": 4}),
        (scenario_b, {"A": 1, "B": 1, "C": 1, "E": 0, "F": 0}),
        (scenario_c, {"A": 1, "B": 1, "C": 0, "E": 0, "F": 0}),
    ):
        frames = synthesize_field(
            expand_paths(circuit), FAST_GRID, circuit.mirrors, "paraxial"
        )
        spectrum = total_intensity_spectrum(frames)
        weights = extract_peak_weights(
            spectrum, circuit.mirror_frequencies()
        ).entries
        unit = weights["A"]
        for label, ratio in expected.items():
            if ratio == 0:
                assert weights[label] <= 1e-6 * unit
            else:
                assert weights[label] / unit == pytest.approx(ratio, rel=1e-9)


def test_total_intensity_carrier_reported(scenario_b):
    frames = synthesize_field(
        expand_paths(scenario_b), FAST_GRID, scenario_b.mirrors, "paraxial"
    )
    spectrum = total_intensity_spectrum(frames)
    assert spectrum.frequencies[0] == 0.0
    assert spectrum.values[0] > spectrum.values[1:].sum()  # carrier dominates


@pytest.mark.parametrize("variant", ["paraxial", "exact"])
def test_parseval_identity(scenario_a, variant):
    frames = synthesize_field(
        expand_paths(scenario_a), FAST_GRID, scenario_a.mirrors, variant
    )
    grid = frames.grid
    wy = np.full(grid.ny, grid.dy)
    wy[0] *= 0.5
    wy[-1] *= 0.5
    time_energy = float(
        ((np.abs(frames.values) ** 2) * wy[None, :]).sum() * grid.dt
    )
    spectrum = total_intensity_spectrum(frames)
    spectral_energy = float(spectrum.values.sum() * spectrum.resolution)
    assert abs(time_energy - spectral_energy) <= 1e-9 * abs(time_energy)


def test_paraxial_error_shrinks_linearly_without_carrier(scenario_c):
    deviations = []
    for eps in (1e-2, 1e-3):
        circuit = scenario_c.with_mirror_amplitude(eps)
        paths = expand_paths(circuit)
        exact = synthesize_field(paths, FAST_GRID, circuit.mirrors, "exact").values
        paraxial = synthesize_field(
            paths, FAST_GRID, circuit.mirrors, "paraxial"
        ).values
        rel = math.sqrt(
            float((np.abs(exact - paraxial) ** 2).sum())
            / float((np.abs(exact) ** 2).sum())
        )
        assert rel <= 10.0 * eps
        deviations.append(rel)
    assert deviations[0] / deviations[1] == pytest.approx(10.0, rel=0.05)


def test_grid_invariants():
    with pytest.raises(ConfigurationError):
        SimGrid(ny=128)  # even
    with pytest.raises(ConfigurationError):
        SimGrid(ny=1)
    with pytest.raises(ConfigurationError):
        SimGrid(ylim=0.0)
    with pytest.raises(ConfigurationError):
        SimGrid(duration=1.0, sample_rate=1000.5)


def test_synthesize_configuration_errors(scenario_a):
    paths = expand_paths(scenario_a)
    low_rate = SimGrid(duration=1.0, sample_rate=1024.0, ny=65, ylim=6.0)
    with pytest.raises(ConfigurationError):
        synthesize_field(paths, low_rate, scenario_a.mirrors)  # 1024 < 4*310
    misaligned = SimGrid(duration=0.5, sample_rate=4096.0, ny=65, ylim=6.0)
    with pytest.raises(ConfigurationError):
        # 230 Hz is not a multiple of 1/0.5 s
        synthesize_field(paths, misaligned, scenario_a.mirrors)
    with pytest.raises(ConfigurationError):
        synthesize_field(paths, FAST_GRID, scenario_a.mirrors, variant="wavelet")
