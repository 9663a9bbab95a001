import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import mean_abs_sine
from thinfilm.domain import Box, constant, linear_horizontal, make_thin_film, parse_expression, vertical_linear
from thinfilm.errors import NotHorizontal, PathViolatesThickness
from thinfilm.extension import (dr_distance, dr_distance_scaled, reflect_periodize, remark_ratio, thick_regime_check,
                                thickness_margin)
from thinfilm.scaling import ParamPath, PathKind
from thinfilm.seminorm import SplitConfig, raw_seminorm_sq

CFG = SplitConfig(0.25, 50_000, 50_000)
OMEGA = Box.of([0], [1])
INNER = Box.of([0.1], [0.9])


@given(st.floats(0.01, 2.0), st.floats(-10, 10), st.floats(-10, 10))
def test_reflection_and_periodicity(eps, x1, t):
    u = parse_expression("x1 + sin(3*x2) + x2^2")
    ext = reflect_periodize(u, make_thin_film(2, [0], [1], eps))
    P = np.array([[x1, t]])
    assert ext(P) == pytest.approx(ext(np.array([[x1, -t]])), abs=1e-12)
    assert ext(P) == pytest.approx(ext(np.array([[x1, t + 2 * eps]])), abs=1e-12)


def test_extension_examples():
    ext = reflect_periodize(vertical_linear(1.0), make_thin_film(2, [0], [1], 1.0))
    assert ext(np.array([[0.3, 1.5]]))[0] == pytest.approx(0.5)
    assert ext(np.array([[0.3, 2.25]]))[0] == pytest.approx(0.25)
    u = parse_expression("x1^2")
    ext = reflect_periodize(u, make_thin_film(2, [0], [1], 0.1))
    X = np.random.default_rng(0).uniform(-5, 5, (100, 2))
    assert np.array_equal(ext(X), u(X))


def test_extension_gradient():
    ext = reflect_periodize(vertical_linear(1.0), make_thin_film(2, [0], [1], 1.0))
    g = ext.gradient(np.array([[0.0, 0.5], [0.0, 1.5]]))
    assert g[:, 1].tolist() == [1.0, -1.0]


def test_dr_distance_examples():
    dom = make_thin_film(2, [0], [1], 0.05)
    lim = linear_horizontal([1.0])
    assert dr_distance(lim, dom, lim, INNER) == 0.0
    wiggle = parse_expression("x1 + 0.05*sin(2*pi*x2/0.05)")
    assert dr_distance(wiggle, dom, lim, INNER) <= 0.05 * 0.8
    osc = parse_expression("x1 + 0.5*sin(2*pi*x2/0.05)")
    errs = [abs(dr_distance(osc, dom, lim, INNER, g) - 0.8 * mean_abs_sine() * 0.5) for g in (200, 800, 2000)]
    assert errs[0] > errs[1] > errs[2] and errs[2] <= 1e-3 * 0.2546


def test_dr_distance_requires_horizontal_limit():
    dom = make_thin_film(2, [0], [1], 0.1)
    with pytest.raises(NotHorizontal):
        dr_distance(linear_horizontal([1.0]), dom, vertical_linear(1.0), INNER)


@pytest.mark.parametrize("template", ["x1 + e*sin(2*pi*x2/e)", "x1 + x2", "x1 + x2^2/e"])
def test_both_metrics_vanish_together(template):
    lim = linear_horizontal([1.0])
    pairs = []
    for eps in (0.1, 0.05, 0.025):
        u = parse_expression(template.replace("e", repr(eps)).replace(repr(eps) + "xp", "exp"))
        dom = make_thin_film(2, [0], [1], eps)
        pairs.append((dr_distance(u, dom, lim, INNER, 200), dr_distance_scaled(u, dom, lim, INNER, 200)))
    a, b = np.array(pairs).T
    assert np.all(np.diff(a) < 0) and np.all(np.diff(b) < 0)
    assert np.all(np.abs(a / b - 1) <= 0.1)


def test_thickness_helpers():
    path = ParamPath(PathKind.ThickFilm, (0.3, 0.2, 0.1), 1.0)
    assert thickness_margin(path, 1.0) == pytest.approx([0, 0, 0], abs=1e-15)
    assert remark_ratio(path) == pytest.approx([e ** (2 * e * e) for e in (0.3, 0.2, 0.1)])


def test_thick_check_constant_is_zero():
    pts = thick_regime_check(constant(1.0), ParamPath(PathKind.ThickFilm, (0.3, 0.2), 1.0), CFG)
    assert [v for _, v in pts] == [0.0, 0.0]


def test_thick_check_linear_is_bounded():
    pts = thick_regime_check(linear_horizontal([1.0]), ParamPath(PathKind.ThickFilm, (0.3, 0.2, 0.1), 1.0), CFG)
    vals = [v for _, v in pts]
    assert max(vals) / min(vals) < 2


def test_thick_check_violation():
    path = ParamPath(PathKind.Custom, (0.3, 0.2, 0.1), s_table=(0.7, 0.8, 0.9))
    with pytest.raises(PathViolatesThickness):
        thick_regime_check(linear_horizontal([1.0]), path, CFG, M=1.0)


def test_extension_of_horizontal_field_changes_nothing():
    u = parse_expression("sin(2*pi*x1)")
    (pt,) = thick_regime_check(u, ParamPath(PathKind.ThickFilm, (0.2,), 1.0), CFG, seed=3)
    direct = raw_seminorm_sq(u, Box.of([0, 0], [1, 1]), pt.s, CFG, seed=3)
    assert pt.value == pytest.approx((1 - pt.s) * direct.value, rel=1e-12)


def test_thick_check_accepts_families():
    family = lambda eps: parse_expression(f"x1 + {eps}*x2")
    pts = thick_regime_check(family, ParamPath(PathKind.ThickFilm, (0.3, 0.2), 1.0), CFG)
    assert all(v > 0 for _, v in pts)
