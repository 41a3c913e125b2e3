import numpy as np
import pytest

from spinchain.chain import ChainConfig


@pytest.fixture
def cfg3():
    return ChainConfig(L=3, w=0.0, delta_omega=1e5, k=2)


@pytest.fixture
def cfg4():
    return ChainConfig(L=4, w=0.0, delta_omega=1e4, k=2)


def unitary_of(program, config):
    """Columns are the simulated images of the basis states."""
    from spinchain.dynamics import propagate

    amps = np.eye(config.dim, dtype=complex)
    for pulse in program.pulses:
        amps = propagate(amps, config, pulse)
    return amps


def ideal_of(program, config, with_phase=True):
    ideal = np.eye(config.dim, dtype=complex)
    for block in program.gates:
        ideal = block.ideal.apply(ideal, with_overall_phase=with_phase)
    return ideal


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
