import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinchain.gates import IdealGate
from spinchain.symbolic import pi, sym


@pytest.mark.parametrize(
    "gate,index,out",
    [
        (IdealGate("not", (1,)), 0b000, 0b010),
        (IdealGate("cn", (0, 1)), 0b001, 0b011),
        (IdealGate("cn", (0, 1)), 0b010, 0b010),
        (IdealGate("cn", (2, 1)), 0b110, 0b100),
        (IdealGate("lrcn", (0, 3)), 0b0001, 0b1001),
        (IdealGate("swap", (0, 1)), 0b01, 0b10),
        (IdealGate("swap", (0, 1)), 0b11, 0b11),
    ],
)
def test_permutations(gate, index, out):
    assert gate.permute(index) == out


def test_rotation_is_not_a_permutation():
    with pytest.raises(ValueError):
        IdealGate("rot", (0,), Fraction(1, 2)).permute(0)


@given(st.integers(0, 3), st.fractions(Fraction(1, 20), 1, max_denominator=20), st.floats(-3, 3))
def test_rotation_unitary(j, rho, phi):
    U = IdealGate("rot", (j,), rho, phi).matrix(4)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(16), atol=1e-12)


def test_rotation_action():
    phi = 0.4
    U = IdealGate("rot", (0,), Fraction(1, 2), phi).matrix(1)
    c = s = math.sqrt(0.5)
    np.testing.assert_allclose(U[:, 0], [c, 1j * s * np.exp(1j * phi)])
    np.testing.assert_allclose(U[:, 1], [1j * s * np.exp(-1j * phi), c])


def test_full_rotation_is_not_up_to_phases():
    U = IdealGate("rot", (1,), Fraction(1), 0.0).matrix(2)
    P = IdealGate("not", (1,)).matrix(2)
    np.testing.assert_allclose(U, 1j * P, atol=1e-15)


def test_symbolic_outputs():
    assert IdealGate("cn", (0, 1)).symbolic_outputs(1) == [(3, pi(0), 0, 0)]
    half = IdealGate("rot", (0,), Fraction(1, 2))
    assert half.symbolic_outputs(0) == [(0, pi(0), 1, 0), (1, pi(Fraction(1, 2)) + sym("phi"), 0, 1)]
    full = IdealGate("rot", (0,), Fraction(1))
    assert full.symbolic_outputs(1) == [(0, pi(Fraction(1, 2)) - sym("phi"), 0, 0)]


def test_overall_phase_applied():
    g = IdealGate("cn", (0, 1), overall_phase=pi(Fraction(1, 4)))
    out = g.apply(np.array([1, 0, 0, 0]), with_overall_phase=True)
    assert out[0] == pytest.approx(np.exp(1j * math.pi / 4))


def test_batch_apply_matches_columns():
    g = IdealGate("swap", (1, 2))
    M = g.matrix(3)
    for j in range(8):
        np.testing.assert_allclose(M[:, j], g.apply(np.eye(8)[:, j]))


@pytest.mark.parametrize(
    "gate,name",
    [
        (IdealGate("cn", (0, 1)), "CN(0,1)"),
        (IdealGate("not", (3,)), "Not(3)"),
        (IdealGate("rot", (2,), Fraction(1, 2)), "U2(rho=1/2)"),
    ],
)
def test_names(gate, name):
    assert gate.name == name
