import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thinfilm import expr
from thinfilm.errors import ParseError, UnknownVariable


def value(text, point=(0.3, 0.7)):
    tree = expr.parse(text, len(point))
    return float(expr.evaluate(tree, np.array([point]))[0][0])


@pytest.mark.parametrize("text, expected", [
    ("1 - 2 - 3", -4.0),
    ("8 / 4 / 2", 1.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("2 * 3 + 4", 10.0),
    ("2 * (3 + 4)", 14.0),
    ("pi", math.pi),
    ("exp(0) + cos(0) + sin(0)", 2.0),
    ("1.5e1", 15.0),
    ("--1", 1.0),
])
def test_precedence_and_associativity(text, expected):
    assert value(text) == pytest.approx(expected, rel=1e-15)


def test_variables_are_one_based():
    assert value("x1 - x2", (0.25, 1.0)) == -0.75


@pytest.mark.parametrize("text, pos", [("x1 +", 4), ("(x1", 3), ("x1 $ 2", 3), ("2 3", 2), ("", 0)])
def test_error_positions(text, pos):
    with pytest.raises(ParseError) as info:
        expr.parse(text, 2)
    assert info.value.position == pos


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        expr.parse("x3", 2)
    with pytest.raises(UnknownVariable):
        expr.parse("y + 1", 2)


def test_linear_form():
    coeffs, const = expr.linear_form(expr.parse("2*x1 - x2/4 + 3", 2), 2)
    assert coeffs.tolist() == [2.0, -0.25]
    assert const == 3.0
    assert expr.linear_form(expr.parse("x1*x2", 2), 2) is None
    assert expr.linear_form(expr.parse("sin(x1)", 2), 2) is None
    assert expr.linear_form(expr.parse("sin(0) + x1", 2), 2)[0].tolist() == [1.0, 0.0]


# random expressions compared against Python's own evaluation
_leaf = st.one_of(st.sampled_from(["x1", "x2", "pi"]),
                  st.floats(0.1, 3.0).map(lambda v: repr(round(v, 3))))


def _extend(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})")
    call = st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: f"{t[0]}({t[1]})")
    return st.one_of(binary, call)


expressions = st.recursive(_leaf, _extend, max_leaves=8)


def _python(text, x1, x2):
    return eval(text.replace("^", "**"), {"sin": math.sin, "cos": math.cos, "exp": math.exp, "pi": math.pi,
                                          "x1": x1, "x2": x2})


@given(expressions, st.floats(-1, 1), st.floats(-1, 1))
def test_matches_python_evaluation(text, x1, x2):
    assert value(text, (x1, x2)) == pytest.approx(_python(text, x1, x2), rel=1e-12, abs=1e-12)


@given(expressions, st.floats(-1, 1), st.floats(-1, 1))
def test_forward_gradient_matches_differences(text, x1, x2):
    tree = expr.parse(text, 2)
    X = np.array([[x1, x2]])
    _, g = expr.evaluate(tree, X, grad=True)
    h = 1e-6
    for j in range(2):
        e = np.zeros((1, 2))
        e[0, j] = h
        fd = (expr.evaluate(tree, X + e)[0] - expr.evaluate(tree, X - e)[0]) / (2 * h)
        assert g[0, j] == pytest.approx(fd[0], rel=1e-5, abs=1e-5)
