from __future__ import annotations

import cmath
import math
import random

import pytest

from nestedmzi.algebra import (
    BasisKet,
    BeamSplitter,
    Block,
    Discard,
    Mirror,
    PhaseShift,
    PhotonState,
    apply_element,
    postselect,
    state_norm,
)
from nestedmzi.errors import StructuralError

LABELS = frozenset({"a", "b", "c"})


def make_state(terms, n_tags=5):
    return PhotonState(LABELS, n_tags, dict(terms))


def ket(spatial, bits="00000"):
    return BasisKet(spatial, tuple(int(b) for b in bits))


def test_unbalanced_splitter_splits_one_to_two():
    state = make_state({ket("c"): 1.0})
    bs = BeamSplitter("BS1", ("c", None), ("c", "b"), 1.0 / math.sqrt(3.0))
    out = apply_element(state, bs)
    assert out.terms[ket("c")] == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-15)
    assert out.terms[ket("b")] == pytest.approx(1j * math.sqrt(2.0 / 3.0), abs=1e-15)
    # intensity ratio 1:2 between the kept and reflected ports
    ratio = abs(out.terms[ket("b")]) ** 2 / abs(out.terms[ket("c")]) ** 2
    assert ratio == pytest.approx(2.0, abs=1e-12)


def test_mirror_sets_its_tag_bit_only():
    state = make_state({ket("a"): 0.5, ket("b"): 0.5})
    out = apply_element(state, Mirror("A", "a", 0, 230.0, 1e-3))
    assert out.terms[ket("a", "10000")] == 0.5
    assert out.terms[ket("b")] == 0.5
    assert ket("a") not in out.terms


def test_phase_zero_is_identity():
    state = make_state({ket("a"): 0.3 + 0.4j, ket("b"): -0.5})
    out = apply_element(state, PhaseShift("a", 0.0))
    assert out.terms == state.terms


def test_block_removes_path_and_reports_lost_norm():
    state = make_state(
        {ket("c"): 1.0 / math.sqrt(3.0), ket("b"): 1j * math.sqrt(2.0 / 3.0)}
    )
    out = apply_element(state, Block("c"))
    assert set(out.terms) == {ket("b")}
    lost = state_norm(state) - state_norm(out)
    assert lost == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_discard_behaves_like_block():
    state = make_state({ket("a"): 0.6, ket("b"): 0.8})
    out = apply_element(state, Discard("a"))
    assert set(out.terms) == {ket("b")}


def test_double_balanced_splitter_convention():
    # two balanced splitters with no intermediate phase: the kept port
    # interferes away completely and the crossed port has unit modulus
    bs = BeamSplitter("S", ("a", "b"), ("a", "b"), 1.0 / math.sqrt(2.0))
    state = make_state({ket("a"): 1.0})
    out = apply_element(apply_element(state, bs), bs)
    assert abs(out.terms.get(ket("a"), 0.0)) < 1e-15
    assert abs(out.terms[ket("b")]) == pytest.approx(1.0, abs=1e-12)


def test_unitarity_on_random_states():
    rng = random.Random(7)
    bs = BeamSplitter("S", ("a", "b"), ("a", "b"), 0.8)
    shift = PhaseShift("b", 1.1)
    mirror = Mirror("C", "c", 2, 270.0, 1e-3)
    for _ in range(25):
        terms = {}
        for spatial in "abc":
            for _ in range(3):
                tag = tuple(rng.randint(0, 1) for _ in range(5))
                terms[BasisKet(spatial, tag)] = complex(
                    rng.uniform(-1, 1), rng.uniform(-1, 1)
                )
        state = make_state(terms)
        before = state_norm(state)
        for element in (bs, shift, mirror, bs):
            state = apply_element(state, element)
        assert state_norm(state) == pytest.approx(before, abs=1e-12)


def test_linearity_on_random_states():
    rng = random.Random(11)
    elements = [
        BeamSplitter("S", ("a", "b"), ("a", "b"), 1.0 / math.sqrt(2.0)),
        Mirror("A", "a", 0, 230.0, 1e-3),
        PhaseShift("a", 0.7),
    ]
    for element in elements:
        t1 = {ket("a", "00000"): 0.4 + 0.1j, ket("b", "01000"): -0.2j}
        t2 = {ket("a", "00000"): -0.3, ket("c", "00100"): 0.5 + 0.5j}
        alpha = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        beta = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        combined = {k: alpha * v for k, v in t1.items()}
        for k, v in t2.items():
            combined[k] = combined.get(k, 0.0) + beta * v
        lhs = apply_element(make_state(combined), element)
        out1 = apply_element(make_state(t1), element)
        out2 = apply_element(make_state(t2), element)
        rhs = {k: alpha * v for k, v in out1.terms.items()}
        for k, v in out2.terms.items():
            rhs[k] = rhs.get(k, 0.0) + beta * v
        for k in set(lhs.terms) | set(rhs):
            assert lhs.terms.get(k, 0.0) == pytest.approx(rhs.get(k, 0.0), abs=1e-12)


def test_tag_popcount_never_decreases():
    rng = random.Random(3)
    elements = [
        BeamSplitter("S", ("a", "b"), ("b", "c"), 0.6),
        Mirror("B", "b", 1, 250.0, 1e-3),
        PhaseShift("c", -0.4),
        Block("a"),
    ]
    state = make_state(
        {
            BasisKet(s, tuple(rng.randint(0, 1) for _ in range(5))): 0.3
            for s in "abc"
        }
    )
    min_before = min(sum(k.tag) for k in state.terms)
    for element in elements:
        state = apply_element(state, element)
        if state.terms:
            assert min(sum(k.tag) for k in state.terms) >= min_before


def test_postselect_sums_tagged_amplitudes_coherently():
    state = make_state(
        {
            ket("c", "00100"): 1.0 / 3.0,
            ket("c", "01011"): -1.0 / 3.0,
            ket("c", "10011"): 1.0 / 3.0,
        }
    )
    amp_a, weight_a = postselect(state, 0)
    assert weight_a == pytest.approx(1.0 / 9.0, abs=1e-12)
    amp_e, weight_e = postselect(state, 3)
    assert amp_e == pytest.approx(0.0, abs=1e-15)
    assert weight_e == 0.0


@pytest.mark.parametrize("phi", [0.0, math.pi / 6, math.pi / 2, 2.5, math.pi])
def test_postselect_weight_follows_half_angle_law(phi):
    # coherent sum (1/3) * (-1 + e^(i*phi)) has squared modulus
    # (4/9) * sin(phi/2)**2
    state = make_state(
        {
            ket("c", "01011"): -1.0 / 3.0,
            ket("c", "10011"): cmath.exp(1j * phi) / 3.0,
        }
    )
    _, weight = postselect(state, 3)
    assert weight == pytest.approx((4.0 / 9.0) * math.sin(phi / 2.0) ** 2, abs=1e-12)


def test_state_norm_cases():
    assert state_norm(make_state({})) == 0.0
    thirds = make_state(
        {ket("c", "00100"): 1 / 3, ket("c", "01011"): -1 / 3, ket("c", "10011"): 1 / 3}
    )
    assert state_norm(thirds) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_tiny_amplitudes_are_pruned():
    state = make_state({ket("a"): 1e-16, ket("b"): 0.5})
    assert set(state.terms) == {ket("b")}


def test_non_finite_amplitude_rejected():
    with pytest.raises(StructuralError):
        make_state({ket("a"): complex("inf")})


def test_unknown_label_rejected():
    state = make_state({ket("a"): 1.0})
    with pytest.raises(StructuralError):
        apply_element(state, PhaseShift("z", 0.1))
    with pytest.raises(StructuralError):
        apply_element(state, BeamSplitter("S", ("a", "z"), ("a", "b"), 0.7))


def test_tag_index_out_of_range_rejected():
    state = make_state({ket("a"): 1.0})
    with pytest.raises(StructuralError):
        apply_element(state, Mirror("X", "a", 5, 100.0, 1e-3))
    with pytest.raises(StructuralError):
        postselect(state, 9)
