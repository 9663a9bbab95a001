import numpy as np
import pytest

from oracles import constant_diagnostic_linear, seminorm_linear_2d
from thinfilm.domain import Box, linear_horizontal
from thinfilm.quadrature import default_orders, pair_integral


@pytest.mark.parametrize("eps, s", [(0.1, 0.6), (0.1, 0.95), (0.02, 0.8), (0.3, 0.51)])
def test_linear_field_against_closed_form(eps, s):
    u = linear_horizontal([1.0])
    box = Box.of([0, 0], [1, eps])
    got = pair_integral(u.increments, box, s, **default_orders(48))
    assert got == pytest.approx(seminorm_linear_2d(eps, s), rel=1e-9)


def test_wide_film_against_closed_form():
    u = linear_horizontal([2.0])
    box = Box.of([0, 0], [3, 0.1])
    got = pair_integral(u.increments, box, 0.7, **default_orders(48))
    assert got == pytest.approx(seminorm_linear_2d(0.1, 0.7, L=3.0, a=2.0), rel=1e-8)


@pytest.mark.parametrize("delta", [0.1, 0.05, 0.0125, 0.001])
def test_cutoff_integral_in_one_dimension(delta):
    def incr(X, Y):
        return X[:, 0] - Y[:, 0]

    got = pair_integral(incr, Box.of([0], [1]), 1.0, delta=delta, **default_orders(48))
    assert got == pytest.approx(constant_diagnostic_linear(delta), rel=1e-10)


def test_zero_increment_gives_zero():
    got = pair_integral(lambda X, Y: np.zeros(len(X)), Box.of([0, 0], [1, 0.1]), 0.8)
    assert got == 0.0


def test_converges_with_resolution():
    u = linear_horizontal([1.0])
    box = Box.of([0, 0], [1, 0.05])
    exact = seminorm_linear_2d(0.05, 0.9)
    errs = [abs(pair_integral(u.increments, box, 0.9, **default_orders(g)) - exact) for g in (12, 24, 48)]
    assert errs[2] < errs[0]
    assert errs[2] < 1e-8 * exact
