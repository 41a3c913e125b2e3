import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import ideal_of, unitary_of
from spinchain.chain import ChainConfig
from spinchain.compiler import (
    CN_PHASES,
    CompileError,
    PulseProgram,
    cn_block,
    compile_cn,
    compile_long_range_cn,
    compile_not,
    compile_q_pulse,
    compile_rotation,
    compile_swap,
    long_range_cn_blocks,
    lower,
    not_block,
    parse_gate,
    rotation_block,
    swap_blocks,
)
from spinchain.gates import IdealGate
from spinchain.pulses import composite_params
from spinchain.symbolic import pi, sym


def test_not_interior_and_edge_counts():
    assert len(not_block(1, 4).qpulses) == 3
    assert len(not_block(0, 4).qpulses) == 2
    assert len(not_block(3, 4).qpulses) == 2


def test_edge_not_compiles_to_two_pulses(cfg4):
    assert len(compile_not(0, cfg4).pulses) == 2


def test_composite_q_pulse_lowers_to_main_and_corrector(cfg4):
    prog = compile_q_pulse(1, "11", 0.0, 1.0, 0.0, cfg4)
    p = composite_params(2)
    assert [a.role for a in prog.annotations] == ["main", "corr"]
    assert prog.pulses[1].tau == pytest.approx(2 * p.gamma / p.delta)
    assert prog.pulses[1].t0 == pytest.approx(prog.pulses[0].t_end)
    assert prog.q_pulse_count == 1


@pytest.mark.parametrize("a,b,count", [(1, 2, 12), (2, 1, 12), (2, 3, 9), (1, 0, 9), (0, 1, 10), (3, 2, 10)])
def test_cn_pulse_counts(a, b, count):
    assert len(cn_block(a, b, 4).qpulses) == count


def test_interior_cn_phases():
    seq = cn_block(1, 2, 4).qpulses
    assert [q.qubit for q in seq] == [2, 2, 2, 1, 1, 1, 2, 2, 2, 1, 1, 1]
    assert [q.cls for q in seq] == ["11", "01", "01", "00", "01", "11", "00", "01", "01", "00", "01", "11"]
    assert seq[0].phase.equals_mod_2pi(CN_PHASES[1])
    assert seq[3].phase == pi(Fraction(3, 4)) + 2 * sym("theta") - 4 * sym("Theta") + 2 * sym("gamma")
    assert seq[11].phase == pi(0)


def test_odd_k_adds_pi_to_composite_target_pulses():
    even, odd = cn_block(1, 2, 4, k=2).qpulses, cn_block(1, 2, 4, k=3).qpulses
    assert odd[0].phase == even[0].phase + pi(1)
    assert odd[6].phase == even[6].phase + pi(1)
    assert odd[1].phase == even[1].phase


@pytest.mark.parametrize("i,count", [(0, 29), (1, 36), (2, 28)])
def test_swap_counts(i, count):
    assert sum(len(b.qpulses) for b in swap_blocks(i, 4)) == count


@pytest.mark.parametrize("L", [4, 5, 6, 7])
def test_long_range_count(L):
    blocks = long_range_cn_blocks(0, L - 1, L)
    assert sum(len(b.qpulses) for b in blocks) == 72 * L - 149


def test_long_range_reverse_direction_is_ideal_cn():
    blocks = long_range_cn_blocks(3, 0, 4)
    M = np.eye(16, dtype=complex)
    for b in blocks:
        M = b.ideal.apply(M)
    np.testing.assert_allclose(M, IdealGate("cn", (3, 0)).matrix(4))


def test_swap_orderings_agree():
    L = 3
    fwd = [IdealGate("cn", (0, 1)), IdealGate("cn", (1, 0)), IdealGate("cn", (0, 1))]
    rev = [IdealGate("cn", (1, 0)), IdealGate("cn", (0, 1)), IdealGate("cn", (1, 0))]
    mats = []
    for seq in (fwd, rev):
        M = np.eye(8, dtype=complex)
        for g in seq:
            M = g.apply(M)
        mats.append(M)
    np.testing.assert_allclose(mats[0], mats[1])
    np.testing.assert_allclose(mats[0], IdealGate("swap", (0, 1)).matrix(L))


@pytest.mark.parametrize(
    "gate",
    ["not 0", "not 1", "cn 1 2", "cn 2 1", "cn 2 3", "cn 1 0", "cn 0 1", "cn 3 2", "rot 1 1/2 0.3", "rot 0 1/3 -0.7",
     "rot 2 1 0.0", "rot 3 1/2 1.1"],
)
def test_simulated_gates_match_ideal(cfg4, gate):
    prog = lower(parse_gate(gate, 4), cfg4)
    U = unitary_of(prog, cfg4)
    V = ideal_of(prog, cfg4)
    overlaps = np.einsum("ij,ij->j", V.conj(), U)
    assert np.min(np.abs(overlaps) ** 2) > 1 - 1e-5
    # overall phase included: every column matches, not just up to a phase
    assert np.max(np.abs(overlaps - 1)) < 5e-3


def test_swap_and_long_range_simulate(cfg4):
    for prog in (compile_swap(1, cfg4), compile_long_range_cn(0, 3, cfg4)):
        U, V = unitary_of(prog, cfg4), ideal_of(prog, cfg4)
        overlaps = np.einsum("ij,ij->j", V.conj(), U)
        assert np.min(np.abs(overlaps) ** 2) > 1 - 1e-5
        # phase errors accumulate over many gates
        assert np.max(np.abs(overlaps - 1)) < 5e-2


def test_cn_twice_is_identity_up_to_phase(cfg4):
    prog = lower(parse_gate("cn 1 2", 4) * 2, cfg4)
    U = unitary_of(prog, cfg4)
    np.testing.assert_allclose(U, np.exp(1j * math.pi / 2) * np.eye(16), atol=2e-2)


def test_programs_are_contiguous(cfg4):
    prog = compile_cn(1, 2, cfg4, t_start=3.5)
    assert prog.t_start == pytest.approx(3.5)
    for a, b in zip(prog.pulses, prog.pulses[1:]):
        assert a.t_end == pytest.approx(b.t0)
    assert prog.total_duration == pytest.approx(prog.pulses[-1].t_end - 3.5)
    assert prog.q_pulse_count == 12


def test_rotation_phase_symbol_enters_negated():
    blk = rotation_block(0, Fraction(1, 2), 4)
    assert blk.qpulses[-1].phase == -sym("phi")
    full = rotation_block(1, 1, 4)
    assert all("theta_r" not in q.phase.symbols for q in full.qpulses)
    assert rotation_block(1, 0.5, 4).ideal.rho == Fraction(1, 2)


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_serialization_round_trip(cfg4, fmt):
    prog = compile_rotation(1, Fraction(1, 2), 0.25, cfg4)
    text = prog.to_text() if fmt == "text" else prog.to_json()
    back = PulseProgram.from_text(text) if fmt == "text" else PulseProgram.from_json(text)
    assert back.pulses == prog.pulses
    assert back.annotations == prog.annotations
    assert back.q_pulse_count == prog.q_pulse_count


def test_noncontiguous_program_rejected(cfg4):
    prog = compile_not(0, cfg4)
    with pytest.raises(ValueError):
        PulseProgram([prog.pulses[1], prog.pulses[0]], prog.annotations)
    with pytest.raises(ValueError):
        PulseProgram(prog.pulses, prog.annotations[:1])


@pytest.mark.parametrize(
    "descriptor",
    ["", "nand 1", "not", "not x", "cn 1", "cn 1 1", "cn 0 9", "swap 3", "rot 1 2 0", "rot 1 0 0", "rot 1 1/2"],
)
def test_parse_gate_errors(descriptor):
    with pytest.raises(CompileError):
        parse_gate(descriptor, 4)


def test_parse_gate_forms():
    assert len(parse_gate("CN 0 3", 4)) == 13
    assert len(parse_gate("swap 0", 4)) == 3
    assert parse_gate("rot 2 1/2 0.5", 4)[0].ideal.phi == 0.5


def test_lowering_checks(cfg4):
    with pytest.raises(CompileError):
        compile_q_pulse(0, "01", 0.0, 1.0, 0.0, cfg4)
    with pytest.raises(CompileError):
        compile_q_pulse(1, "edge0", 0.0, 1.0, 0.0, cfg4)
    with pytest.raises(CompileError):
        compile_q_pulse(5, "01", 0.0, 1.0, 0.0, cfg4)
    with pytest.raises(CompileError):
        cn_block(0, 1, 2)
    with pytest.raises(CompileError):
        cn_block(0, 2, 4)
    with pytest.raises(CompileError):
        compile_swap(3, cfg4)
    with pytest.raises(CompileError):
        compile_long_range_cn(0, 1, ChainConfig(L=2, delta_omega=1e4))
