"""Thin-film geometry and the catalog of test functions.

A film is ``omega x (0, eps)`` with ``omega`` an axis-aligned box in R^(d-1).
Test functions are vectorised: they take an (n, d) array of points and return
an (n,) array, and every catalog entry carries its exact gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from .errors import EmptyBox, GradientUnavailable, InvalidDimension, NonpositiveThickness
from .rng import substream


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or len(self.lo) == 0:
            raise InvalidDimension("box bounds must be nonempty and of equal length")
        if any(not (a < b) for a, b in zip(self.lo, self.hi)):
            raise EmptyBox(f"empty box {self.lo} x {self.hi}")

    @classmethod
    def of(cls, lo, hi) -> "Box":
        return cls(tuple(float(v) for v in lo), tuple(float(v) for v in hi))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lo_arr(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=float)

    @property
    def hi_arr(self) -> np.ndarray:
        return np.asarray(self.hi, dtype=float)

    @property
    def widths(self) -> np.ndarray:
        return self.hi_arr - self.lo_arr

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    def contains(self, X: np.ndarray, strict: bool = False) -> np.ndarray:
        X = np.atleast_2d(X)
        if strict:
            return np.all((X > self.lo_arr) & (X < self.hi_arr), axis=1)
        return np.all((X >= self.lo_arr) & (X <= self.hi_arr), axis=1)

    def contains_box(self, other: "Box") -> bool:
        return bool(np.all(other.lo_arr >= self.lo_arr) and np.all(other.hi_arr <= self.hi_arr))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lo_arr + rng.random((n, self.dim)) * self.widths

    def midpoints(self, n_per_axis: int | Sequence[int]) -> tuple[np.ndarray, float]:
        """Tensor midpoint-rule nodes and the common cell volume."""
        ns = [n_per_axis] * self.dim if np.isscalar(n_per_axis) else list(n_per_axis)
        axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi, n in zip(self.lo, self.hi, ns)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return pts, self.volume / float(np.prod(ns))

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class ThinDomain:
    """The film ``omega x (0, eps)`` in R^d."""

    d: int
    omega_lo: tuple[float, ...]
    omega_hi: tuple[float, ...]
    eps: float

    @property
    def box(self) -> Box:
        return Box(self.omega_lo + (0.0,), self.omega_hi + (float(self.eps),))

    @property
    def omega_box(self) -> Box:
        return Box(self.omega_lo, self.omega_hi)

    @property
    def omega_area(self) -> float:
        return float(np.prod(np.subtract(self.omega_hi, self.omega_lo)))

    @property
    def volume(self) -> float:
        return self.eps * self.omega_area

    def with_eps(self, eps: float) -> "ThinDomain":
        return make_thin_film(self.d, self.omega_lo, self.omega_hi, eps)

    def unit(self) -> "ThinDomain":
        return self.with_eps(1.0)

    def to_dict(self) -> dict:
        return {"d": self.d, "omega_lo": list(self.omega_lo), "omega_hi": list(self.omega_hi), "eps": self.eps}


def make_thin_film(d: int, omega_lo, omega_hi, eps: float) -> ThinDomain:
    if int(d) != d or d < 2:
        raise InvalidDimension(f"d must be an integer >= 2, got {d}")
    lo = tuple(float(v) for v in np.atleast_1d(omega_lo))
    hi = tuple(float(v) for v in np.atleast_1d(omega_hi))
    if len(lo) != d - 1 or len(hi) != d - 1:
        raise InvalidDimension(f"omega extents must have d-1 = {d - 1} entries")
    if any(not (a < b) for a, b in zip(lo, hi)):
        raise EmptyBox(f"omega box {lo} x {hi} is empty")
    if not (eps > 0) or not math.isfinite(eps):
        raise NonpositiveThickness(f"eps must be positive, got {eps}")
    return ThinDomain(int(d), lo, hi, float(eps))


def as_box(dom) -> Box:
    if isinstance(dom, Box):
        return dom
    if isinstance(dom, ThinDomain):
        return dom.box
    raise TypeError(f"expected Box or ThinDomain, got {type(dom).__name__}")


def _points(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != d:
        raise InvalidDimension(f"points have dimension {X.shape[1]}, expected {d}")
    return X


@dataclass(frozen=True, eq=False)
class FieldFunction:
    """Scalar field ``scale * base(x) + offset`` on R^d.

    ``increments`` returns ``u(x) - u(y)`` without ever adding ``offset``, so
    energies are exactly invariant under adding constants.
    """

    kind: str
    d: int
    base: Callable[[np.ndarray], np.ndarray]
    base_grad: Callable[[np.ndarray], np.ndarray] | None = None
    horizontal: bool = False
    params: dict = field(default_factory=dict)
    lipschitz_bound: float | None = None
    scale: float = 1.0
    offset: float = 0.0
    analytic_lipschitz: Callable[[Box], float] | None = None
    spec: str | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, X) -> np.ndarray:
        pts = _points(X, self.d)
        out = self.base(pts)
        if self.scale != 1.0:
            out = self.scale * out
        if self.offset != 0.0:
            out = out + self.offset
        return out

    def increments(self, X, Y) -> np.ndarray:
        diff = self.base(_points(X, self.d)) - self.base(_points(Y, self.d))
        return diff if self.scale == 1.0 else self.scale * diff

    @property
    def has_gradient(self) -> bool:
        return self.base_grad is not None

    def gradient(self, X) -> np.ndarray:
        if self.base_grad is None:
            raise GradientUnavailable(f"{self.kind} field has no exact gradient")
        g = self.base_grad(_points(X, self.d))
        return g if self.scale == 1.0 else self.scale * g

    def fd_gradient(self, X, h: float = 1e-5) -> np.ndarray:
        pts = _points(X, self.d)
        g = np.empty_like(pts)
        for i in range(self.d):
            e = np.zeros(self.d)
            e[i] = h
            g[:, i] = (self(pts + e) - self(pts - e)) / (2 * h)
        return g

    def scaled(self, lam: float) -> "FieldFunction":
        lip = None if self.lipschitz_bound is None else abs(lam) * self.lipschitz_bound
        return replace(self, scale=self.scale * lam, offset=self.offset * lam, lipschitz_bound=lip)

    def shifted(self, c: float) -> "FieldFunction":
        return replace(self, offset=self.offset + c)

    def lipschitz_on(self, box: Box) -> float:
        if self.lipschitz_bound is not None:
            return self.lipschitz_bound
        if self.analytic_lipschitz is not None:
            return abs(self.scale) * self.analytic_lipschitz(box)
        return estimate_lipschitz(self, box)

    @property
    def is_constant(self) -> bool:
        return self.kind == "Constant" or self.scale == 0.0


def estimate_lipschitz(u: FieldFunction, box: Box, n: int = 10_000, seed: int = 0) -> float:
    """Sampled max |grad u| times a 1.5 safety factor."""
    pts = box.sample(substream(seed, "lipschitz"), n)
    g = u.gradient(pts) if u.has_gradient else u.fd_gradient(pts)
    return 1.5 * float(np.max(np.linalg.norm(g, axis=1)))


# -- catalog -----------------------------------------------------------------


def constant(c: float, d: int = 2) -> FieldFunction:
    return FieldFunction(
        "Constant",
        d,
        lambda X: np.full(X.shape[0], float(c)),
        lambda X: np.zeros_like(X),
        horizontal=True,
        params={"c": float(c)},
        analytic_lipschitz=lambda box: 0.0,
        spec=f"const:{float(c)!r}",
    )


def linear_horizontal(a: Sequence[float]) -> FieldFunction:
    a = np.asarray(a, dtype=float)
    d = a.size + 1
    full = np.append(a, 0.0)
    norm = float(np.linalg.norm(a))
    return FieldFunction(
        "LinearHorizontal",
        d,
        lambda X: X @ full,
        lambda X: np.broadcast_to(full, X.shape).copy(),
        horizontal=True,
        params={"a": a.tolist()},
        analytic_lipschitz=lambda box: norm,
        spec="linear:" + ",".join(repr(float(v)) for v in a),
    )


def quadratic_horizontal(b: Sequence[float]) -> FieldFunction:
    """u(x) = sum_i b_i x_i^2 over the horizontal coordinates."""
    b = np.asarray(b, dtype=float)
    d = b.size + 1
    full = np.append(b, 0.0)

    def lip(box: Box) -> float:
        far = np.maximum(np.abs(box.lo_arr), np.abs(box.hi_arr))
        return 2.0 * float(np.linalg.norm(full * far))

    return FieldFunction(
        "QuadraticHorizontal",
        d,
        lambda X: (X * X) @ full,
        lambda X: 2.0 * X * full,
        horizontal=True,
        params={"b": b.tolist()},
        analytic_lipschitz=lip,
        spec="quad:" + ",".join(repr(float(v)) for v in b),
    )


def sine_horizontal(frequency: float, d: int = 2, axis: int = 0) -> FieldFunction:
    """u(x) = sin(2 pi f x_axis)."""
    k = 2.0 * math.pi * float(frequency)

    def grad(X):
        g = np.zeros_like(X)
        g[:, axis] = k * np.cos(k * X[:, axis])
        return g

    return FieldFunction(
        "SineHorizontal",
        d,
        lambda X: np.sin(k * X[:, axis]),
        grad,
        horizontal=True,
        params={"frequency": float(frequency), "axis": axis},
        analytic_lipschitz=lambda box: abs(k),
        spec=f"sine:{float(frequency)!r}" + (f",{axis + 1}" if axis else ""),
    )


def vertical_linear(b: float, d: int = 2) -> FieldFunction:
    e = np.zeros(d)
    e[-1] = float(b)
    return FieldFunction(
        "VerticalLinear",
        d,
        lambda X: float(b) * X[:, -1],
        lambda X: np.broadcast_to(e, X.shape).copy(),
        horizontal=(b == 0.0),
        params={"b": float(b)},
        analytic_lipschitz=lambda box: abs(float(b)),
        spec=f"vertical:{float(b)!r}",
    )


def from_callable(fn: Callable, d: int, grad: Callable | None = None, horizontal: bool = False,
                  kind: str = "Callable") -> FieldFunction:
    return FieldFunction(kind, d, fn, grad, horizontal=horizontal)


def parse_expression(text: str, d: int = 2) -> FieldFunction:
    """Parse an arithmetic expression over x1..xd into a field.

    Affine expressions are recognised and returned as the matching catalog kind
    (``"x1"`` becomes ``LinearHorizontal``); everything else is ``Expression``.
    """
    tree = _expr.parse(text, d)
    lin = _expr.linear_form(tree, d)
    if lin is not None:
        coeffs, const = lin
        if not coeffs.any():
            return replace(constant(const, d), spec=text)
        if const == 0.0 and coeffs[-1] == 0.0:
            return replace(linear_horizontal(coeffs[:-1]), spec=text)
        if const == 0.0 and not coeffs[:-1].any():
            return replace(vertical_linear(coeffs[-1], d), spec=text)
    horizontal = (d - 1) not in _expr.variables(tree)
    return FieldFunction(
        "Expression",
        d,
        lambda X: _expr.evaluate(tree, X)[0],
        lambda X: _expr.evaluate(tree, X, grad=True)[1],
        horizontal=horizontal,
        params={"text": text},
        spec=text,
        meta={"lipschitz_estimated": True},
    )


def parse_function(spec: str, d: int) -> FieldFunction:
    """Catalog id (``const:c``, ``linear:a..``, ``quad[:b..]``, ``sine:f``,
    ``vertical:b``) or an expression string."""
    spec = spec.strip()
    head, _, tail = spec.partition(":")
    nums = [float(v) for v in tail.split(",")] if tail else []
    if head == "const":
        return constant(nums[0] if nums else 0.0, d)
    if head == "linear":
        if len(nums) != d - 1:
            raise InvalidDimension(f"linear needs {d - 1} coefficients")
        return linear_horizontal(nums)
    if head == "quad":
        b = nums or [1.0] + [0.0] * (d - 2)
        if len(b) != d - 1:
            raise InvalidDimension(f"quad needs {d - 1} coefficients")
        return quadratic_horizontal(b)
    if head == "sine":
        axis = int(nums[1]) - 1 if len(nums) > 1 else 0
        return sine_horizontal(nums[0] if nums else 1.0, d, axis)
    if head == "vertical":
        return vertical_linear(nums[0] if nums else 1.0, d)
    return parse_expression(spec, d)


def catalog(d: int = 2) -> dict[str, FieldFunction]:
    """Named test functions used across the test-suite and the checks."""
    e1 = [1.0] + [0.0] * (d - 2)
    return {
        "const": constant(1.0, d),
        "x1": linear_horizontal(e1),
        "x1^2": quadratic_horizontal(e1),
        "sin(2pi x1)": sine_horizontal(1.0, d),
        "xd": vertical_linear(1.0, d),
    }


# -- rescaling ---------------------------------------------------------------


def _stretch_last(u: FieldFunction, factor: float, kind: str) -> FieldFunction:
    col = np.ones(u.d)
    col[-1] = factor

    def value(X):
        return u.base(X * col)

    grad = None
    if u.base_grad is not None:
        def grad(X):
            return u.base_grad(X * col) * col

    lip = None
    if u.lipschitz_bound is not None:
        lip = u.lipschitz_bound * max(1.0, abs(factor))
    return replace(
        u,
        kind=kind,
        base=value,
        base_grad=grad,
        lipschitz_bound=lip,
        analytic_lipschitz=None,
        params={"source": u.kind, "factor": factor, **u.params},
        spec=None,
    )


def rescale_to_unit(u_eps: FieldFunction, dom: ThinDomain) -> FieldFunction:
    """v(x', t) = u_eps(x', eps t), defined on omega x (0, 1)."""
    if u_eps.horizontal:
        return u_eps
    return _stretch_last(u_eps, dom.eps, "Rescaled")


def rescale_from_unit(v: FieldFunction, dom: ThinDomain) -> FieldFunction:
    """Inverse of :func:`rescale_to_unit`: u(x', x_d) = v(x', x_d / eps)."""
    if v.horizontal:
        return v
    return _stretch_last(v, 1.0 / dom.eps, "Unrescaled")


def resolve_function(spec: str, d: int) -> FieldFunction:
    """Catalog name (see :func:`catalog`) or anything :func:`parse_function` accepts."""
    named = catalog(d)
    if spec.strip() in named:
        return replace(named[spec.strip()], spec=spec.strip())
    return parse_function(spec, d)
