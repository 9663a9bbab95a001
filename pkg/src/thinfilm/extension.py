"""Reflection plus periodic extension of thin-film fields and related checks.

A field on omega x (0, eps) is extended to omega x R by reflecting across
x_d = 0 and repeating with period 2 eps.  The extension lets fields on
different films be compared on the fixed set omega x (0, 1) without
rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from .domain import Box, FieldFunction, ThinDomain, _points, as_box, make_thin_film, rescale_to_unit
from .errors import NotHorizontal, PathViolatesThickness
from .scaling import ParamPath, PathKind
from .seminorm import EnergyEstimate, SplitConfig, _chunked_midpoints, raw_seminorm_sq


def fold_height(t: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Map heights into [0, eps]; also returns the derivative sign (+1 or -1)."""
    t = np.mod(t, 2.0 * eps)
    flip = t >= eps
    return np.where(flip, 2.0 * eps - t, t), np.where(flip, -1.0, 1.0)


@dataclass(frozen=True)
class ExtendedField:
    base: FieldFunction
    eps: float

    def _fold(self, X):
        X = np.array(_points(X, self.base.d), dtype=float)
        X[:, -1], sign = fold_height(X[:, -1], self.eps)
        return X, sign

    def __call__(self, X) -> np.ndarray:
        return self.base(self._fold(X)[0])

    def gradient(self, X) -> np.ndarray:
        Y, sign = self._fold(X)
        g = self.base.gradient(Y)
        g[:, -1] *= sign
        return g

    def as_field(self) -> FieldFunction:
        u = self.base

        def base(X):
            return u.base(self._fold(X)[0])

        grad = None
        if u.base_grad is not None:
            def grad(X):
                Y, sign = self._fold(X)
                g = u.base_grad(Y)
                g[:, -1] *= sign
                return g

        return replace(u, kind="Extended", base=base, base_grad=grad, analytic_lipschitz=None,
                       params={"source": u.kind, "eps": self.eps, **u.params}, spec=None)


def reflect_periodize(u: FieldFunction, dom: ThinDomain) -> ExtendedField:
    return ExtendedField(u, dom.eps)


def _unit_region(omega_inner, d: int) -> Box:
    om = as_box(omega_inner)
    if om.dim != d - 1:
        raise ValueError(f"omega_inner must have dimension {d - 1}, got {om.dim}")
    return Box.of(list(om.lo) + [0.0], list(om.hi) + [1.0])


def _l1_midpoint(fn, region: Box, grid_n: int) -> float:
    cell = region.volume / grid_n**region.dim
    total = 0.0
    for pts in _chunked_midpoints(region, grid_n):
        total += float(np.sum(np.abs(fn(pts))))
    return total * cell


def _require_horizontal(u: FieldFunction, name: str = "limit") -> None:
    if not u.horizontal:
        raise NotHorizontal(f"{name} field must not depend on x_d")


def dr_distance(u_eps: FieldFunction, dom: ThinDomain, u_limit: FieldFunction, omega_inner, grid_n: int = 128) -> float:
    """L1 distance on omega' x (0,1) between the extension of u_eps and v(x) = u_limit(x')."""
    _require_horizontal(u_limit)
    ext = reflect_periodize(u_eps, dom)
    return _l1_midpoint(lambda X: ext(X) - u_limit(X), _unit_region(omega_inner, dom.d), grid_n)


def dr_distance_scaled(u_eps: FieldFunction, dom: ThinDomain, u_limit: FieldFunction, omega_inner,
                       grid_n: int = 128) -> float:
    """Same distance for the rescaled field v_eps(x', t) = u_eps(x', eps t)."""
    _require_horizontal(u_limit)
    v = rescale_to_unit(u_eps, dom)
    return _l1_midpoint(lambda X: v(X) - u_limit(X), _unit_region(omega_inner, dom.d), grid_n)


@dataclass(frozen=True)
class ThickPoint:
    eps: float
    s: float
    estimate: EnergyEstimate

    @property
    def value(self) -> float:
        return self.estimate.value

    def __iter__(self):
        yield self.eps
        yield self.value


FieldFamily = Union[FieldFunction, Callable[[float], FieldFunction]]


def thickness_margin(path: ParamPath, M: float) -> list[float]:
    """eps - sqrt(1-s)/M along the path; negative entries violate the thickness condition."""
    return [e - math.sqrt(1.0 - s) / M for e, s in path.points()]


def remark_ratio(path: ParamPath) -> list[float]:
    """eps^(2(1-s)) along the path; tends to 1 on thick-film paths."""
    return [e ** (2.0 * (1.0 - s)) for e, s in path.points()]


def thick_regime_check(u_family: FieldFamily, path: ParamPath, cfg: SplitConfig = SplitConfig(), seed: int = 0,
                       M: float | None = None, omega: Box | None = None) -> list[ThickPoint]:
    """(1-s) [extension]^2 over omega x (0,1) for each (eps, s) on a thick-film path."""
    if M is None:
        M = path.param if path.kind is PathKind.ThickFilm else 1.0
    bad = [(e, m) for e, m in zip(path.eps_list, thickness_margin(path, M)) if m < -1e-12]
    if bad:
        e, m = bad[0]
        raise PathViolatesThickness(f"eps={e:g} is below sqrt(1-s)/M by {-m:.3g} (M={M:g})")
    out = []
    for eps, s in path.points():
        u = u_family(eps) if callable(u_family) and not isinstance(u_family, FieldFunction) else u_family
        omega_box = omega if omega is not None else Box.of([0.0] * (u.d - 1), [1.0] * (u.d - 1))
        dom = make_thin_film(u.d, list(omega_box.lo), list(omega_box.hi), eps)
        ext = reflect_periodize(u, dom).as_field()
        unit = Box.of(list(omega_box.lo) + [0.0], list(omega_box.hi) + [1.0])
        raw = raw_seminorm_sq(ext, unit, s, cfg, seed)
        out.append(ThickPoint(eps, s, raw.scaled(1.0 - s, prefactor=1.0 - s)))
    return out
