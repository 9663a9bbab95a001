"""Estimators for squared Gagliardo seminorms and related energies.

The Monte Carlo estimator splits pairs at |x - y| = r * l, where l is the
thinnest box width (the film thickness for a thin film).  Both halves sample
x uniformly and an offset xi = t * theta with uniform direction theta and a
radial density chosen so that, for Lipschitz u, every weighted sample is
bounded:

* near field, t in (0, r l]:   density ~ t^(1-2s)
* far field,  t in (r l, l]:   density ~ t^(1-2s);  t in (l, diam]: ~ l t^(-2s)

The far tail density accounts for the fraction ~ l / t of directions that stay
inside a slab of width l.  Offsets landing outside the box contribute zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .domain import Box, FieldFunction, as_box
from .errors import (BudgetExceeded, DegenerateSampling, GradientUnavailable, InvalidDimension,
                     InvalidS, NonFiniteSample, NotHorizontal)
from .quadrature import default_orders, pair_integral
from .rng import Moments, batch_sizes, map_ordered, substream

log = logging.getLogger(__name__)

ORACLE_PAIR_BUDGET = 10**8


class Method(str, Enum):
    MonteCarloPairs = "MonteCarloPairs"
    SplitNearFar = "SplitNearFar"
    DenseGrid = "DenseGrid"
    Analytic = "Analytic"


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    std_error: float
    n_samples: int
    method: Method
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def scaled(self, factor: float, **meta) -> "EnergyEstimate":
        return replace(self, value=self.value * factor, std_error=self.std_error * abs(factor),
                       meta={**self.meta, **meta})

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyEstimate":
        return cls(float(data["value"]), float(data["std_error"]), int(data["n_samples"]),
                   Method(data["method"]), data.get("seed"), dict(data.get("meta", {})))


@dataclass(frozen=True)
class SplitConfig:
    r: float = 0.25
    n_near: int = 1_000_000
    n_far: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.r < 0.5:
            raise ValueError(f"cutoff r must lie in (0, 1/2), got {self.r}")
        if self.n_near < 0 or self.n_far < 0:
            raise ValueError("sample counts must be nonnegative")

    def scaled_budget(self, factor: float) -> "SplitConfig":
        return replace(self, n_near=int(math.ceil(self.n_near * factor)),
                       n_far=int(math.ceil(self.n_far * factor)))


def check_s(s: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if not (lo < s < hi):
        if lo == 0.0:
            raise InvalidS(f"s must lie in (0,1), got {s}")
        raise InvalidS(f"s must lie in ({lo:g},{hi:g}), got {s}")


def sphere_area(d: int) -> float:
    """H^{d-1}(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def c_d(d: int) -> float:
    if int(d) != d or d < 1:
        raise InvalidDimension(f"d must be a positive integer, got {d}")
    return sphere_area(int(d)) / (2.0 * d)


# -- Monte Carlo -------------------------------------------------------------


def _power_sample(rng, n, a, lo, hi):
    """Draw from density ~ t^a on [lo, hi]; returns samples and the mass."""
    e = a + 1.0
    U = rng.random(n)
    if abs(e) < 1e-12:
        return lo * (hi / lo) ** U, math.log(hi / lo)
    le, he = lo**e, hi**e
    return (le + U * (he - le)) ** (1.0 / e), (he - le) / e


def _power_mass(a, lo, hi):
    e = a + 1.0
    if abs(e) < 1e-12:
        return math.log(hi / lo)
    return (hi**e - lo**e) / e


def _directions(rng, n, d):
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _quotient_sq(u, X, theta, t, tiny):
    """((u(x + t theta) - u(x)) / t)^2, switching to the midpoint gradient for tiny t."""
    Y = X + t[:, None] * theta
    q = u.increments(Y, X) / t
    if u.has_gradient:
        small = t < tiny
        if np.any(small):
            mid = X[small] + 0.5 * t[small, None] * theta[small]
            q[small] = np.einsum("ij,ij->i", u.gradient(mid), theta[small])
    return q * q, Y


@dataclass
class _Geometry:
    box: Box
    s: float
    r: float

    def __post_init__(self):
        self.d = self.box.dim
        self.vol = self.box.volume
        self.area = sphere_area(self.d)
        self.thin = float(np.min(self.box.widths))
        self.cut = self.r * self.thin
        self.diam = self.box.diameter
        self.k_near = self.vol * self.area * self.cut ** (2 - 2 * self.s) / (2 - 2 * self.s)
        self.m1 = _power_mass(1 - 2 * self.s, self.cut, self.thin)
        self.m2 = self.thin * _power_mass(-2 * self.s, self.thin, self.diam) if self.diam > self.thin else 0.0
        self.z = self.m1 + self.m2


def _near_batch(u, geo, rng, n, swap):
    X = geo.box.sample(rng, n)
    theta = _directions(rng, n, geo.d)
    if swap:
        theta = -theta
    U = rng.random(n)
    t = geo.cut * U ** (1.0 / (2.0 - 2.0 * geo.s))
    t = np.maximum(t, np.finfo(float).tiny)
    q2, Y = _quotient_sq(u, X, theta, t, 1e-7 * geo.thin)
    inside = geo.box.contains(Y)
    w = np.where(inside, geo.k_near * q2, 0.0)
    return w, int(inside.sum())


def _far_batch(u, geo, rng, n, swap):
    X = geo.box.sample(rng, n)
    theta = _directions(rng, n, geo.d)
    if swap:
        theta = -theta
    pick = rng.random(n) < geo.m1 / geo.z
    n1 = int(pick.sum())
    t = np.empty(n)
    t[pick], _ = _power_sample(rng, n1, 1 - 2 * geo.s, geo.cut, geo.thin)
    if n - n1:
        t[~pick], _ = _power_sample(rng, n - n1, -2 * geo.s, geo.thin, geo.diam)
    q2, Y = _quotient_sq(u, X, theta, t, 0.0)
    factor = np.where(pick, 1.0, t / geo.thin)
    inside = geo.box.contains(Y)
    w = np.where(inside, geo.vol * geo.area * geo.z * q2 * factor, 0.0)
    return w, int(inside.sum())


def raw_seminorm_sq(u: FieldFunction, dom, s: float, cfg: SplitConfig = SplitConfig(),
                    seed: int = 0, swap_roles: bool = False) -> EnergyEstimate:
    """Monte Carlo estimate of the double integral of |u(x)-u(y)|^2 / |x-y|^(d+2s)."""
    check_s(s)
    box = as_box(dom)
    if box.dim != u.d:
        raise InvalidDimension(f"field has d={u.d}, domain has d={box.dim}")
    geo = _Geometry(box, s, cfg.r)
    tasks = [("near", i, n) for i, n in enumerate(batch_sizes(cfg.n_near))]
    tasks += [("far", i, n) for i, n in enumerate(batch_sizes(cfg.n_far))]

    def run(j):
        part, idx, n = tasks[j]
        rng = substream(seed, part, idx)
        fn = _near_batch if part == "near" else _far_batch
        w, acc = fn(u, geo, rng, n, swap_roles)
        if not np.all(np.isfinite(w)):
            raise NonFiniteSample(f"non-finite {part}-field sample; field too singular for the sampler")
        return part, Moments.of(w), acc

    results = map_ordered(run, len(tasks))
    near = Moments.combine([m for p, m, _ in results if p == "near"])
    far = Moments.combine([m for p, m, _ in results if p == "far"])
    acc_near = sum(a for p, _, a in results if p == "near")
    acc_far = sum(a for p, _, a in results if p == "far")
    rate_near = acc_near / cfg.n_near if cfg.n_near else float("nan")
    rate_far = acc_far / cfg.n_far if cfg.n_far else float("nan")
    if cfg.n_far and rate_far < 1e-4:
        raise DegenerateSampling(f"far-field acceptance rate {rate_far:.2e} below 1e-4")
    log.debug("acceptance near=%.4f far=%.4f", rate_near, rate_far)
    value = near.mean + far.mean
    se = math.hypot(near.std_error, far.std_error)
    meta = {
        "s": s, "r": cfg.r, "cutoff": geo.cut,
        "near_value": near.mean, "near_std_error": near.std_error,
        "far_value": far.mean, "far_std_error": far.std_error,
        "acceptance_near": rate_near, "acceptance_far": rate_far,
    }
    return EnergyEstimate(value, se, cfg.n_near + cfg.n_far, Method.SplitNearFar, seed, meta)


def F_energy(u, dom, s, cfg: SplitConfig = SplitConfig(), seed: int = 0) -> EnergyEstimate:
    """(1 - s) times the squared seminorm."""
    raw = raw_seminorm_sq(u, dom, s, cfg, seed)
    return raw.scaled(1.0 - s, prefactor=1.0 - s, functional="F")


def G_energy(u, dom, s, cfg: SplitConfig = SplitConfig(), seed: int = 0) -> EnergyEstimate:
    """Unweighted squared seminorm, restricted to the fixed-s range (1/2, 1)."""
    check_s(s, 0.5, 1.0)
    raw = raw_seminorm_sq(u, dom, s, cfg, seed)
    return raw.scaled(1.0, prefactor=1.0, functional="G")


# -- deterministic integrals -------------------------------------------------


def _chunked_midpoints(region: Box, grid_n: int):
    """Yield midpoint-rule nodes one first-axis slab at a time."""
    h = region.widths / grid_n
    axes = [lo + (np.arange(grid_n) + 0.5) * hh for lo, hh in zip(region.lo, h)]
    rest = np.meshgrid(*axes[1:], indexing="ij")
    rest = np.stack([g.ravel() for g in rest], axis=1) if rest else np.zeros((1, 0))
    for x0 in axes[0]:
        yield np.column_stack([np.full(rest.shape[0], x0), rest])


def dirichlet(u: FieldFunction, region, grid_n: int = 128, allow_fd: bool = True) -> float:
    """Midpoint-rule value of the integral of |grad u|^2 over a box."""
    region = as_box(region)
    if not u.has_gradient and not allow_fd:
        raise GradientUnavailable("field has no exact gradient and finite differences are disabled")
    cell = region.volume / grid_n**region.dim
    total = 0.0
    for pts in _chunked_midpoints(region, grid_n):
        g = u.gradient(pts) if u.has_gradient else u.fd_gradient(pts)
        total += float(np.sum(g * g))
    return total * cell


def _require_horizontal(u: FieldFunction):
    if not u.horizontal:
        raise NotHorizontal(f"{u.kind} field depends on x_d")


def _pad(Xp: np.ndarray) -> np.ndarray:
    return np.column_stack([Xp, np.zeros(Xp.shape[0])])


def reduced_dirichlet(u: FieldFunction, omega_box: Box, grid_n: int = 128) -> float:
    """Integral over omega of |grad' u|^2 for a field independent of x_d."""
    _require_horizontal(u)
    omega_box = as_box(omega_box)
    cell = omega_box.volume / grid_n**omega_box.dim
    total = 0.0
    for pts in _chunked_midpoints(omega_box, grid_n):
        full = _pad(pts)
        g = u.gradient(full) if u.has_gradient else u.fd_gradient(full)
        total += float(np.sum(g[:, :-1] ** 2))
    return total * cell


def oracle_dense(u: FieldFunction, dom, s: float, grid_n: int = 48) -> EnergyEstimate:
    """Deterministic product-quadrature value of the squared seminorm.

    The reported ``std_error`` is the half-width |I(grid_n) - I(coarser grid)|,
    a conservative error bracket for the spectrally convergent rule.
    """
    check_s(s)
    box = as_box(dom)
    if (grid_n**box.dim) ** 2 > ORACLE_PAIR_BUDGET:
        raise BudgetExceeded(f"grid_n={grid_n} in d={box.dim} exceeds the 1e8 pair budget")
    fine = pair_integral(u.increments, box, s, **default_orders(grid_n))
    coarse_n = max(8, (2 * grid_n) // 3)
    coarse = pair_integral(u.increments, box, s, **default_orders(coarse_n))
    half = abs(fine - coarse)
    return EnergyEstimate(fine, half, (grid_n**box.dim) ** 2, Method.DenseGrid, None,
                          {"s": s, "grid_n": grid_n, "coarse_value": coarse,
                           "bracket": [fine - half, fine + half]})


def constant_diagnostic(u: FieldFunction, omega_box: Box, cutoffs, grid_n: int = 48) -> list[float]:
    """I(delta) = double integral over omega of |u(x')-u(y')|^2 / |x'-y'|^(k+2), |x'-y'| > delta.

    Stays bounded as delta -> 0 only for constant u.
    """
    _require_horizontal(u)
    cutoffs = [float(c) for c in cutoffs]
    if any(c <= 0 for c in cutoffs):
        raise ValueError("cutoffs must be positive")
    if any(b >= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly decreasing")
    omega_box = as_box(omega_box)

    def incr(X, Y):
        return u.increments(_pad(X), _pad(Y))

    orders = default_orders(grid_n)
    return [pair_integral(incr, omega_box, 1.0, delta=c, **orders) for c in cutoffs]
