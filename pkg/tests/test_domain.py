import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fd_gradient
from thinfilm.domain import (Box, catalog, constant, estimate_lipschitz, linear_horizontal, make_thin_film,
                             parse_expression, parse_function, quadratic_horizontal, rescale_from_unit,
                             rescale_to_unit, resolve_function, sine_horizontal, vertical_linear)
from thinfilm.errors import EmptyBox, GradientUnavailable, InvalidDimension, NonpositiveThickness, ParseError


def test_thin_film_construction():
    dom = make_thin_film(2, [0], [1], 0.1)
    assert dom.box == Box((0.0, 0.0), (1.0, 0.1))
    assert dom.volume == pytest.approx(0.1)


def test_thin_film_volume_3d():
    assert make_thin_film(3, [0, 0], [1, 2], 0.05).volume == pytest.approx(0.1, rel=1e-15)


@pytest.mark.parametrize("args, exc", [
    ((2, [0], [0], 0.1), EmptyBox),
    ((1, [], [], 0.1), InvalidDimension),
    ((2, [0], [1], 0.0), NonpositiveThickness),
    ((2, [0], [1], -1.0), NonpositiveThickness),
    ((3, [0], [1], 0.1), InvalidDimension),
])
def test_thin_film_errors(args, exc):
    with pytest.raises(exc):
        make_thin_film(*args)


def test_unit_rescaling_of_domain():
    dom = make_thin_film(3, [0, -1], [2, 1], 0.01)
    assert dom.unit().eps == 1.0
    assert dom.unit().omega_box == dom.omega_box


def test_catalog_gradients_match_central_differences():
    rng = np.random.default_rng(5)
    for d in (2, 3):
        X = rng.random((1000, d)) * 0.8 + 0.1
        for name, u in catalog(d).items():
            g = u.gradient(X)
            fd = fd_gradient(u, X, 1e-5)
            tol = 1e-6 * (1.0 + np.linalg.norm(g, axis=1))
            assert np.all(np.linalg.norm(g - fd, axis=1) <= tol), name


def test_horizontal_flags_agree_with_sampling():
    rng = np.random.default_rng(1)
    X = rng.random((200, 2))
    Y = X.copy()
    Y[:, 1] = rng.random(200)
    for name, u in catalog(2).items():
        same = np.array_equal(u(X), u(Y))
        assert same == u.horizontal, name


def test_parse_linear_is_recognised():
    u = parse_expression("x1", 2)
    assert u.kind == "LinearHorizontal"
    assert u.params["a"] == [1.0]


def test_parse_vertical_dependence():
    u = parse_expression("sin(3.0*x1) + x2", 2)
    assert u.kind == "Expression"
    assert not u.horizontal
    X = np.array([[0.3, 0.1], [0.3, 0.7]])
    assert u(X)[0] != u(X)[1]


def test_parse_error_offset():
    with pytest.raises(ParseError) as info:
        parse_expression("x1 +", 2)
    assert info.value.position == 4
    assert "offset 4" in str(info.value)


def test_expression_lipschitz_is_flagged_estimated():
    u = parse_expression("x1*x1 + sin(x1)", 2)
    assert u.meta["lipschitz_estimated"]
    box = Box.of([0, 0], [1, 1])
    # max |u'| = 2 + cos(0) = 3 at x1 = 1 is at most the 1.5x safety factor above the sampled max
    assert 3.0 <= u.lipschitz_on(box) <= 4.5


def test_analytic_lipschitz_for_catalog():
    box = Box.of([0, 0], [1, 1])
    assert linear_horizontal([3.0]).lipschitz_on(box) == 3.0
    assert quadratic_horizontal([1.0]).lipschitz_on(box) == 2.0
    assert sine_horizontal(1.0).lipschitz_on(box) == pytest.approx(2 * math.pi)


def test_parse_function_ids():
    assert parse_function("const:2.5", 2)(np.zeros((1, 2)))[0] == 2.5
    assert parse_function("linear:1,2", 3).params["a"] == [1.0, 2.0]
    assert parse_function("quad", 2).kind == "QuadraticHorizontal"
    assert parse_function("sine:2", 2).params["frequency"] == 2.0
    assert parse_function("vertical:3", 2).kind == "VerticalLinear"
    with pytest.raises(InvalidDimension):
        parse_function("linear:1", 3)


def test_resolve_catalog_names():
    assert resolve_function("sin(2pi x1)", 2).kind == "SineHorizontal"
    assert resolve_function("x1 + 1", 2).kind == "Expression"


def test_rescale_vertical_linear():
    dom = make_thin_film(2, [0], [1], 0.1)
    v = rescale_to_unit(vertical_linear(1.0), dom)
    X = np.array([[0.2, 0.5], [0.9, 1.0]])
    assert np.allclose(v(X), 0.1 * X[:, 1], rtol=0, atol=1e-15)


def test_rescale_keeps_horizontal_fields():
    dom = make_thin_film(2, [0], [1], 0.1)
    u = linear_horizontal([1.0])
    assert rescale_to_unit(u, dom) is u


def test_rescale_oscillating_field():
    dom = make_thin_film(2, [0], [1], 0.25)
    u = parse_expression("sin(x2/0.25)", 2)
    v = rescale_to_unit(u, dom)
    rng = np.random.default_rng(0)
    X = rng.random((100, 2))
    direct = u(X * [1.0, 0.25])
    assert np.max(np.abs(v(X) - direct)) <= 1e-12
    # u(x', eps t) = sin(eps t / eps) = sin(t)
    assert np.max(np.abs(v(X) - np.sin(X[:, 1]))) <= 1e-12


@given(st.floats(1e-3, 1.0), st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_rescale_round_trip(eps, point):
    dom = make_thin_film(2, [0], [1], eps)
    u = parse_expression("exp(x1) * cos(3*x2) + x2", 2)
    back = rescale_from_unit(rescale_to_unit(u, dom), dom)
    X = np.array([point])
    assert abs(back(X)[0] - u(X)[0]) <= 1e-14 * (1 + abs(u(X)[0]))


def test_rescaled_gradient_is_chain_rule():
    dom = make_thin_film(2, [0], [1], 0.1)
    u = parse_expression("x1 * x2^2", 2)
    v = rescale_to_unit(u, dom)
    X = np.array([[0.3, 0.6]])
    assert np.allclose(v.gradient(X), fd_gradient(v, X), atol=1e-8)


@given(st.floats(-5, 5, allow_nan=False), st.floats(0.1, 4))
def test_shift_and_scale(c, lam):
    u = quadratic_horizontal([1.0])
    X = np.array([[0.4, 0.2], [0.1, 0.9]])
    assert np.allclose(u.shifted(c)(X), u(X) + c)
    assert np.allclose(u.scaled(lam)(X), lam * u(X))
    assert np.array_equal(u.shifted(c).increments(X[:1], X[1:]), u.increments(X[:1], X[1:]))


def test_gradient_unavailable():
    from thinfilm.domain import from_callable
    u = from_callable(lambda X: X[:, 0] ** 3, 2)
    with pytest.raises(GradientUnavailable):
        u.gradient(np.zeros((1, 2)))
    assert np.allclose(u.fd_gradient(np.array([[1.0, 0.0]])), [[3.0, 0.0]], atol=1e-8)


def test_estimate_lipschitz_safety_factor():
    u = linear_horizontal([2.0])
    assert estimate_lipschitz(u, Box.of([0, 0], [1, 1])) == pytest.approx(3.0)


def test_constant_is_constant():
    assert constant(3.0).is_constant
    assert not linear_horizontal([1.0]).is_constant
    assert linear_horizontal([1.0]).scaled(0.0).is_constant
