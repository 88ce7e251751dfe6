import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_laguerre

from mpaacs.special import DerivativeOrder, QuadraticExponent, extract_derivative, laguerre, log_factorial


@pytest.mark.parametrize("m, x, expected", [(0, 7.3, 1.0), (1, -1.0, 2.0), (2, -4.0, 17.0)])
def test_laguerre_examples(m, x, expected):
    assert laguerre(m, x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("m", range(13))
def test_laguerre_matches_scipy(m):
    xs = np.linspace(-25, 25, 51)
    ref = eval_laguerre(m, xs)
    got = np.array([laguerre(m, x) for x in xs])
    assert np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))) <= 1e-12


def test_laguerre_rejects_negative_order():
    with pytest.raises(ValueError):
        laguerre(-1, 0.0)


def test_log_factorial_values():
    assert log_factorial(0) == 0.0
    assert log_factorial(1) == 0.0
    assert log_factorial(5) == pytest.approx(math.log(120), abs=1e-15)
    assert log_factorial(30) == pytest.approx(math.log(math.factorial(30)), rel=1e-14)


def test_log_factorial_monotone_across_table_edge():
    vals = [log_factorial(n) for n in range(40)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_log_factorial_rejects_negative():
    with pytest.raises(ValueError):
        log_factorial(-1)


def test_extract_trivial_cases():
    assert extract_derivative(QuadraticExponent(("s",)), {"s": 0}) == 1
    c = 0.3 - 1.2j
    assert extract_derivative(QuadraticExponent(("s",), linear={"s": c}), {"s": 1}) == pytest.approx(c)


@pytest.mark.parametrize("m", range(7))
@pytest.mark.parametrize("x", [0.3, 1.0, 2.0])
@pytest.mark.parametrize("y", [0.3, 1.0, 2.0])
def test_extract_laguerre_generating_identity(m, x, y):
    q = QuadraticExponent(("s", "t"), linear={"s": x, "t": y}, quadratic={("s", "t"): -1.0})
    got = extract_derivative(q, {"s": m, "t": m})
    ref = (-1) ** m * math.factorial(m) * eval_laguerre(m, x * y)
    assert abs(got - ref) <= 1e-10 * max(math.factorial(m), abs(ref))


def test_extract_constant_scaling_by_ln2():
    q = QuadraticExponent(("s", "t"), linear={"s": 0.5, "t": 1j}, quadratic={("s", "s"): 0.25, ("s", "t"): -0.7})
    base = extract_derivative(q, {"s": 2, "t": 3})
    assert extract_derivative(q.with_constant(math.log(2)), {"s": 2, "t": 3}) == pytest.approx(2 * base, rel=1e-14)


def test_extract_square_term_matches_hermite():
    # d^n/ds^n exp(2 x s - s^2) at 0 is the physicists' Hermite polynomial H_n(x)
    x = 0.7
    q = QuadraticExponent(("s",), linear={"s": 2 * x}, quadratic={("s", "s"): -1.0})
    herm = np.polynomial.hermite.hermval(x, [0] * 6 + [1])
    assert extract_derivative(q, {"s": 6}).real == pytest.approx(herm, rel=1e-13)


def test_extract_rejects_unknown_variable():
    with pytest.raises(ValueError, match="unknown"):
        extract_derivative(QuadraticExponent(("s",)), {"z": 1})


def test_derivative_order_rejects_negative():
    with pytest.raises(ValueError):
        DerivativeOrder({"s": -1})
    assert DerivativeOrder({"s": 2, "t": 3}).total == 5


def test_exponent_drops_zero_and_merges_pairs():
    q = QuadraticExponent(("s", "t"), linear={"s": 0.0, "t": 1.0}, quadratic={("t", "s"): 1.0, ("s", "t"): 2.0})
    assert q.linear == {"t": 1.0}
    assert q.quadratic == {("s", "t"): 3.0}
    assert all(v != 0 for v in q.quadratic.values())


def test_exponent_rejects_unknown_names():
    with pytest.raises(ValueError):
        QuadraticExponent(("s",), linear={"t": 1.0})
    with pytest.raises(ValueError):
        QuadraticExponent(("s",), quadratic={("s", "t"): 1.0})
    with pytest.raises(ValueError):
        QuadraticExponent(("s", "s"))


coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(cs=st.lists(coef, min_size=3, max_size=3), ds=st.lists(st.integers(0, 4), min_size=3, max_size=3),
       c0=st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False))
def test_product_rule_without_quadratic_terms(cs, ds, c0):
    q = QuadraticExponent(("u", "v", "w"), constant=c0, linear=dict(zip("uvw", cs)))
    got = extract_derivative(q, dict(zip("uvw", ds)))
    ref = np.exp(c0) * np.prod([c ** d for c, d in zip(cs, ds)])
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=60, deadline=None)
@given(a=coef, b=coef, k=st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
       ds=st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_variable_order_does_not_matter(a, b, k, ds):
    q1 = QuadraticExponent(("s", "t"), linear={"s": a, "t": b}, quadratic={("s", "t"): k})
    q2 = QuadraticExponent(("t", "s"), linear={"s": a, "t": b}, quadratic={("t", "s"): k})
    order = {"s": ds[0], "t": ds[1]}
    assert extract_derivative(q1, order) == pytest.approx(extract_derivative(q2, order), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(m=st.integers(0, 12), x=st.floats(-25, 0))
def test_laguerre_positive_on_negative_axis(m, x):
    assert laguerre(m, x) >= 1.0
