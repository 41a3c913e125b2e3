import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinchain.symbolic import SymbolicPhase, as_phase, pi, sym

NAMES = ["theta", "Theta", "gamma", "phi1"]
fractions = st.fractions(min_value=-8, max_value=8, max_denominator=12)
phases = st.builds(
    SymbolicPhase,
    fractions,
    st.dictionaries(st.sampled_from(NAMES), fractions, max_size=3),
)
values = st.fixed_dictionaries({n: st.floats(-10, 10) for n in NAMES})


@given(phases, phases, phases)
def test_addition_is_associative_and_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a


@given(phases)
def test_additive_inverse(a):
    assert (a - a) == SymbolicPhase()
    assert -(-a) == a
    assert a + 0 == a


@given(phases, fractions, fractions)
def test_scalar_distributes(a, x, y):
    assert a * (x + y) == a * x + a * y
    assert (x * a) == a * x


@given(phases, phases, values)
def test_evaluation_is_linear(a, b, vals):
    assert math.isclose((a + 2 * b).evaluate(vals), a.evaluate(vals) + 2 * b.evaluate(vals), abs_tol=1e-9)


@given(phases, st.integers(-5, 5))
def test_equality_mod_two_pi(a, n):
    assert a.equals_mod_2pi(a + pi(2 * n))
    assert not a.equals_mod_2pi(a + pi(1))
    assert a.reduced().equals_mod_2pi(a)
    assert 0 <= a.reduced().pi_coeff < 2


@given(phases)
def test_hash_consistent_with_equality(a):
    b = SymbolicPhase(a.pi_coeff, a.terms)
    assert a == b and hash(a) == hash(b)


def test_zero_coefficients_dropped():
    assert sym("theta", 0) == SymbolicPhase()
    assert (sym("theta") - sym("theta")).symbols == frozenset()


def test_floats_rejected():
    with pytest.raises(TypeError):
        SymbolicPhase(0.5)
    with pytest.raises(TypeError):
        sym("theta") * 0.5
    with pytest.raises(TypeError):
        as_phase(1.0)


def test_substitute():
    expr = 2 * sym("theta_r") - sym("gamma") + pi(Fraction(1, 3))
    out = expr.substitute({"theta_r": sym("theta") + pi(1)})
    assert out == 2 * sym("theta") - sym("gamma") + pi(Fraction(7, 3))


def test_evaluate_needs_all_symbols():
    with pytest.raises(KeyError):
        sym("theta").evaluate({})
    assert pi(Fraction(1, 2)).evaluate() == pytest.approx(math.pi / 2)


@pytest.mark.parametrize(
    "expr,text",
    [
        (SymbolicPhase(), "0"),
        (pi(Fraction(1, 4)), "π/4"),
        (pi(Fraction(-3, 4)), "-3π/4"),
        (pi(1) + sym("theta"), "π + θ"),
        (Fraction(5, 2) * sym("theta") - sym("Theta"), "-Θ + (5/2)θ"),
        (sym("gamma_r", 2), "2γ_ρ"),
    ],
)
def test_string_form(expr, text):
    assert str(expr) == text


def test_as_phase():
    assert as_phase("theta") == sym("theta")
    assert as_phase(0) == SymbolicPhase()
