import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinchain.chain import ChainConfig
from spinchain.experiments import (
    SweepConfig,
    compile_gate,
    error_metrics,
    ideal_apply,
    program_mu,
    random_superposition,
    run_program,
    run_protocol_experiment,
    series_csv,
    states_csv,
    summary_csv,
    sweep,
)
from spinchain.gates import IdealGate


def test_random_superposition_pinned():
    amps = random_superposition(2, 1).amplitudes
    np.testing.assert_allclose(
        amps.real, [0.4941766190085666, 0.050144955832589495, 0.8663560911265461, 0.05198149668623973], rtol=1e-15
    )
    assert np.all(amps.imag == 0)


@settings(max_examples=20)
@given(st.integers(2, 8), st.integers(0, 2**31))
def test_random_superposition_properties(L, seed):
    a = random_superposition(L, seed).amplitudes
    assert a.size == 2**L
    assert np.all(a.real > 0)
    assert np.linalg.norm(a) == pytest.approx(1)
    np.testing.assert_array_equal(a, random_superposition(L, seed).amplitudes)


def test_random_superposition_rejects_short_chain():
    with pytest.raises(ValueError):
        random_superposition(1, 0)


def test_identical_states_give_zero_errors():
    b = random_superposition(4, 3)
    rep = error_metrics(b, b)
    assert rep.max_phase_error == 0 and rep.phase_spread == 0
    assert np.all(rep.prob_errors == 0)
    assert rep.undefined == ()


@given(st.floats(-math.pi, math.pi))
def test_global_phase_absorbed(alpha):
    b = random_superposition(3, 5).amplitudes
    rep = error_metrics(np.exp(1j * alpha) * b, b)
    assert rep.max_phase_error < 1e-12
    assert math.cos(rep.global_phase - alpha) == pytest.approx(1)


def test_single_phase_error_detected():
    b = random_superposition(3, 2).amplitudes
    sim = b.copy()
    sim[5] *= np.exp(0.1j)
    rep = error_metrics(sim, b)
    assert rep.phase_spread == pytest.approx(0.1, rel=1e-9)
    assert np.argmax(rep.per_state_phase_dev) == 5


def test_min_weight_excludes_small_states():
    b = np.array([0.7, 0.7, 0.01, math.sqrt(1 - 0.98 - 1e-4)], dtype=complex)
    sim = b.copy()
    sim[2] *= np.exp(1j)
    assert error_metrics(sim, b).max_phase_error > 0.5
    rep = error_metrics(sim, b, min_weight=0.1)
    assert 2 in rep.undefined
    assert rep.max_phase_error < 0.1
    assert np.isnan(rep.relative_prob_errors[2])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        error_metrics(np.ones(4), np.ones(8))


def test_ideal_apply():
    s = random_superposition(3, 0)
    out = ideal_apply(IdealGate("not", (0,)), s)
    np.testing.assert_allclose(out.amplitudes[1], s.amplitudes[0])


def test_run_program_reports(cfg4):
    prog = compile_gate(cfg4, "cn 1 2")
    res = run_program(prog, cfg4, random_superposition(4, 1))
    rep = res.report
    assert rep.q_pulse_count == 12
    assert len(rep.phase_error_series) == 1
    assert rep.norm_drift < 1e-12
    assert rep.mu == pytest.approx(program_mu(prog, cfg4))
    assert rep.max_phase_error < 0.05
    assert rep.prob_errors.max() < 1e-4
    assert "q_pulses=12" in rep.summary()


def test_experiment_is_deterministic(cfg4):
    a = run_protocol_experiment(cfg4, "cn 0 3", 7)
    b = run_protocol_experiment(cfg4, "cn 0 3", 7)
    np.testing.assert_array_equal(a.per_state_phase_dev, b.per_state_phase_dev)
    assert a.phase_error_series == b.phase_error_series
    assert len(a.phase_error_series) == 13


def test_sweep_config_parse():
    grid = SweepConfig.parse("L=4,5; delta_omega=1e4; seed=1,2; gate=cn 0 {last}")
    assert grid.L == (4, 5) and grid.seed == (1, 2)
    assert grid.points()[0] == (4, 1e4, 2, 1, "cn 0 3")
    assert len(grid.points()) == 4
    with pytest.raises(ValueError):
        SweepConfig.parse("bogus=1")
    with pytest.raises(ValueError):
        SweepConfig.parse("L=")


def test_sweep_matches_single_runs_and_records_errors():
    grid = SweepConfig(L=(3, 4), seed=(1,), gate=("cn 0 {last}", "swap 9"))
    rows = sweep(grid)
    assert [r.error is None for r in rows] == [True, False, True, False]
    single = run_protocol_experiment(ChainConfig(L=4), "cn 0 3", 1)
    assert rows[2].report.max_phase_error == pytest.approx(single.max_phase_error, rel=1e-12)
    assert "swap" in rows[1].error


def test_csv_outputs():
    rows = sweep(SweepConfig(L=(3,), gate=("cn 0 {last}", "not 9")))
    states = states_csv(rows).splitlines()
    assert states[0].startswith("# units")
    assert states[1].split(",")[:5] == ["L", "delta_omega", "k", "seed", "j"]
    assert len(states) == 2 + 8
    summary = summary_csv(rows).splitlines()
    assert len(summary) == 4 and summary[3].endswith("out of range for L=3")
    series = series_csv(rows).splitlines()
    assert len(series) == 2 + 3 * 2 + 1


def test_probability_leak_bound_l7():
    cfg = ChainConfig(L=7, delta_omega=1e4)
    res = run_program(compile_gate(cfg, "cn 0 6"), cfg, random_superposition(7, 1))
    rep = res.report
    assert rep.prob_errors.sum() <= 1e3 * rep.mu**2 * len(res.program.pulses)


@pytest.mark.parametrize("L", [4, 5, 6, 7])
def test_mu_scaling(L):
    scaled = []
    for dw in (1e4, 2e4, 4e4):
        cfg = ChainConfig(L=L, delta_omega=dw)
        scaled.append(run_protocol_experiment(cfg, f"cn 0 {L - 1}", 1).max_phase_error * dw)
    mean = np.mean(scaled)
    assert all(abs(x - mean) <= 0.25 * mean for x in scaled)


def test_series_sampled_at_gate_boundaries(cfg4):
    prog = compile_gate(cfg4, "cn 0 3")
    bounds = prog.gate_boundaries()
    assert len(bounds) == len(prog.gates) and bounds[-1] == len(prog.pulses)
    # a boundary never separates a main pulse from its corrector
    assert all(prog.annotations[b - 1].role != "main" for b in bounds)


def test_empty_grid_axis_is_an_error():
    with pytest.raises(ValueError):
        SweepConfig(L=())
    with pytest.raises(ValueError):
        SweepConfig.parse("seed=")
