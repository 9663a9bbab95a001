"""Rotated-lattice discretization with Kuhn (Freudenthal) interpolation.

A frame (nu, rho, r) defines the lattice x_k = anchor + h N k with h = r rho and
N the orthonormal matrix whose columns are nu_1..nu_d.  The anchor is the lower
corner of the domain box.  Node k carries the average of u over the cube of
side h centred on it, x_k + h N [-1/2,1/2)^d, so affine fields are reproduced
exactly.  A node is *interior* when the doubled cube x_k + h N [-1/2,3/2]^d,
the union of the averaging cubes of all 2^d corners of cell k, lies strictly
inside the box.

Inside a cell with local coordinates t in [0,1)^d the interpolant is affine on
the simplex selected by sorting t in decreasing order.  Node values are
computed on demand, so very fine lattices (small rho) cost only what is
actually evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .domain import Box, FieldFunction, as_box
from .errors import (BudgetExceeded, EmptyInterior, InvalidDimension, InvalidSigma,
                     OutsideInterior, RegionNotInterior)
from .rng import map_ordered, substream
from .seminorm import EnergyEstimate, Method, SplitConfig, c_d, check_s, raw_seminorm_sq, sphere_area

EXACT_CELL_LIMIT = 20_000
ENUM_LIMIT = 5_000_000
TINY_H = 1e-7


# -- frames ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Frame:
    nu: np.ndarray
    rho: float = 1.0
    r: float = 1.0

    def __post_init__(self):
        nu = np.array(self.nu, dtype=float)
        if nu.ndim != 2 or nu.shape[0] != nu.shape[1] or nu.shape[0] < 1:
            raise InvalidDimension(f"frame must be a square matrix, got shape {nu.shape}")
        if np.max(np.abs(nu.T @ nu - np.eye(nu.shape[0]))) > 1e-10:
            raise ValueError("frame columns are not orthonormal")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0,1], got {self.rho}")
        if not self.r > 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        nu.setflags(write=False)
        object.__setattr__(self, "nu", nu)

    @property
    def d(self) -> int:
        return self.nu.shape[0]

    @property
    def h(self) -> float:
        return self.r * self.rho

    @property
    def k_d(self) -> int:
        return self.d * (self.d - 1) // 2

    def with_scale(self, rho: float | None = None, r: float | None = None) -> "Frame":
        return Frame(self.nu, self.rho if rho is None else rho, self.r if r is None else r)

    def to_dict(self) -> dict:
        return {"nu": self.nu.tolist(), "rho": self.rho, "r": self.r}

    @classmethod
    def identity(cls, d: int, rho: float = 1.0, r: float = 1.0) -> "Frame":
        return cls(np.eye(d), rho, r)

    @classmethod
    def rotation2d(cls, theta: float, rho: float = 1.0, r: float = 1.0) -> "Frame":
        c, s = math.cos(theta), math.sin(theta)
        return cls(np.array([[c, -s], [s, c]]), rho, r)


def haar_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with diag(R) > 0."""
    while True:
        A = rng.standard_normal((d, d))
        Q, R = np.linalg.qr(A)
        diag = np.diag(R)
        if np.min(np.abs(diag)) > 1e-12:
            return Q * np.sign(diag)


def random_frame(d: int, seed: int, rho: float = 1.0, r: float = 1.0, index: int = 0) -> Frame:
    if d < 2:
        raise InvalidDimension(f"d must be at least 2, got {d}")
    return Frame(haar_matrix(substream(seed, "frame", index), d), rho, r)


def sample_mu(seed: int, index: int, d: int, s: float, r: float) -> Frame:
    """Draw (rho, nu) from 2(1-s) rho^(1-2s) d rho x Haar via rho = U^(1/(2-2s))."""
    rng = substream(seed, "mu", index)
    nu = haar_matrix(rng, d)
    rho = (1.0 - rng.random()) ** (1.0 / (2.0 - 2.0 * s))
    return Frame(nu, rho, r)


# -- lattice fields ----------------------------------------------------------


class LatticeField:
    """Lazy u^{r, rho nu}: node values are cell averages computed on request."""

    def __init__(self, u: FieldFunction, dom, frame: Frame, m: int = 4):
        self.u = u
        self.box = as_box(dom)
        if frame.d != self.box.dim or u.d != self.box.dim:
            raise InvalidDimension("frame, field and domain dimensions differ")
        self.frame = frame
        self.m = m
        self.h = frame.h
        self.N = frame.nu
        self.anchor = self.box.lo_arr
        self.d = frame.d
        self._neg = self.h * np.minimum(-0.5 * self.N, 1.5 * self.N).sum(axis=1)
        self._pos = self.h * np.maximum(-0.5 * self.N, 1.5 * self.N).sum(axis=1)
        grid = (np.stack(np.meshgrid(*[np.arange(m)] * self.d, indexing="ij"), -1).reshape(-1, self.d) + 0.5) / m - 0.5
        self._sub = self.h * grid @ self.N.T
        self._perms = np.array(list(permutations(range(self.d))))
        self.tiny = self.h < TINY_H * float(np.min(self.box.widths))

    # geometry
    def node_position(self, K) -> np.ndarray:
        return self.anchor + self.h * np.asarray(K, dtype=float) @ self.N.T

    def is_interior(self, K) -> np.ndarray:
        base = self.node_position(np.atleast_2d(K))
        return np.all(base + self._neg > self.box.lo_arr, axis=1) & np.all(base + self._pos < self.box.hi_arr, axis=1)

    def locate(self, X) -> tuple[np.ndarray, np.ndarray]:
        t = (np.atleast_2d(X) - self.anchor) @ self.N / self.h
        k = np.floor(t)
        return k.astype(np.int64), t - k

    def interior_mask(self, X) -> np.ndarray:
        if self.tiny:
            X = np.atleast_2d(X)
            pad = 3.0 * self.h * math.sqrt(self.d)
            return np.all(X > self.box.lo_arr + pad, axis=1) & np.all(X < self.box.hi_arr - pad, axis=1)
        return self.is_interior(self.locate(X)[0])

    def _interior_node_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis box that contains the position of every interior node."""
        return self.box.lo_arr - self._neg, self.box.hi_arr - self._pos

    def _lattice_range(self, lo, hi):
        corners = np.array(list(product(*zip(lo, hi))))
        t = (corners - self.anchor) @ self.N / self.h
        return np.floor(t.min(axis=0)) - 1.0, np.ceil(t.max(axis=0)) + 1.0

    def candidate_count(self) -> float:
        lo, hi = self._interior_node_box()
        if np.any(hi <= lo):
            return 0.0
        kmin, kmax = self._lattice_range(lo, hi)
        return float(np.prod(kmax - kmin + 1.0))

    def _iter_candidates(self, lo, hi, limit=ENUM_LIMIT):
        kmin, kmax = self._lattice_range(lo, hi)
        total = float(np.prod(kmax - kmin + 1.0))
        if total > limit:
            raise BudgetExceeded(f"{total:.3g} candidate lattice nodes exceed the enumeration limit {limit}")
        kmin, kmax = kmin.astype(np.int64), kmax.astype(np.int64)
        rest = [np.arange(a, b + 1) for a, b in zip(kmin[1:], kmax[1:])]
        rest = np.stack(np.meshgrid(*rest, indexing="ij"), -1).reshape(-1, self.d - 1)
        for k0 in range(kmin[0], kmax[0] + 1):
            yield np.column_stack([np.full(len(rest), k0), rest])

    def interior_indices(self, limit: int = ENUM_LIMIT) -> np.ndarray:
        lo, hi = self._interior_node_box()
        if np.any(hi <= lo):
            return np.zeros((0, self.d), dtype=np.int64)
        found = [K[self.is_interior(K)] for K in self._iter_candidates(lo, hi, limit)]
        return np.concatenate(found) if found else np.zeros((0, self.d), dtype=np.int64)

    def has_interior(self) -> bool:
        lo, hi = self._interior_node_box()
        if np.any(hi <= lo):
            return False
        if np.all(hi - lo > self.h * math.sqrt(self.d)):
            return True  # the box holds a ball wider than the lattice covering radius
        return any(self.is_interior(K).any() for K in self._iter_candidates(lo, hi))

    # values
    def node_values(self, K) -> np.ndarray:
        """Cell averages at lattice nodes K (midpoint rule with m^d subsamples)."""
        K = np.atleast_2d(np.asarray(K, dtype=np.int64))
        uniq, inv = np.unique(K, axis=0, return_inverse=True)
        vals = np.empty(len(uniq))
        chunk = max(1, 1_000_000 // len(self._sub))
        for a in range(0, len(uniq), chunk):
            pts = self.node_position(uniq[a:a + chunk])[:, None, :] + self._sub[None]
            vals[a:a + chunk] = self.u(pts.reshape(-1, self.d)).reshape(-1, len(self._sub)).mean(axis=1)
        return vals[inv.reshape(-1)]

    def node_table(self, K) -> dict:
        K = np.atleast_2d(K)
        return {tuple(int(x) for x in k): float(v) for k, v in zip(K, self.node_values(K))}

    def evaluate(self, X, grad: bool = True):
        """Kuhn interpolant (and its gradient) at points lying in interior cells."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.tiny:
            # spacing below rounding resolution: the interpolant equals u to O(h)
            if not np.all(self.interior_mask(X)):
                raise OutsideInterior("point outside the interior cells of the lattice")
            g = (self.u.gradient(X) if self.u.has_gradient else self.u.fd_gradient(X)) if grad else None
            return self.u(X), g
        k, t = self.locate(X)
        if not np.all(self.is_interior(k)):
            raise OutsideInterior("point outside the interior cells of the lattice")
        n, d = X.shape
        order = np.argsort(-t, axis=1, kind="stable")
        steps = np.zeros((n, d + 1, d), dtype=np.int64)
        rows = np.arange(n)
        for i in range(d):
            steps[:, i + 1] = steps[:, i]
            steps[rows, i + 1, order[:, i]] += 1
        V = self.node_values((k[:, None, :] + steps).reshape(-1, d)).reshape(n, d + 1)
        delta = np.diff(V, axis=1)
        tt = np.take_along_axis(t, order, axis=1)
        value = V[:, 0] + np.sum(tt * delta, axis=1)
        if not grad:
            return value, None
        g = np.zeros((n, d))
        np.put_along_axis(g, order, delta / self.h, axis=1)
        return value, g @ self.N.T

    def cell_energy(self, K) -> np.ndarray:
        """Exact integral of |grad u^{r,rho nu}|^2 over the cells with lower corner K."""
        K = np.atleast_2d(np.asarray(K, dtype=np.int64))
        n, d = K.shape
        corners = np.array(list(product((0, 1), repeat=d)))
        V = self.node_values((K[:, None, :] + corners[None]).reshape(-1, d)).reshape(n, -1)
        weights = 1 << np.arange(d)[::-1]  # corner index of a 0/1 offset vector
        total = np.zeros(n)
        for perm in self._perms:
            idx = 0
            prev = V[:, 0]
            for ax in perm:
                idx += weights[ax]
                cur = V[:, idx]
                total += (cur - prev) ** 2
                prev = cur
        return total * self.h ** (d - 2) / math.factorial(d)

    def simplex_gradients(self, k) -> list[tuple[np.ndarray, np.ndarray]]:
        """(vertices, gradient) for each Kuhn simplex of cell k."""
        k = np.asarray(k, dtype=np.int64)
        out = []
        for perm in self._perms:
            steps = [np.zeros(self.d, dtype=np.int64)]
            for ax in perm:
                nxt = steps[-1].copy()
                nxt[ax] += 1
                steps.append(nxt)
            Ks = k + np.array(steps)
            vals = self.node_values(Ks)
            g = np.zeros(self.d)
            g[list(perm)] = np.diff(vals) / self.h
            out.append((self.node_position(Ks), self.N @ g))
        return out

    def to_dict(self, max_nodes: int = 10_000) -> dict:
        """Debug dump: frame and the node table of interior nodes."""
        K = self.interior_indices()
        if len(K) > max_nodes:
            raise BudgetExceeded(f"{len(K)} interior nodes exceed the dump limit {max_nodes}")
        vals = self.node_values(K) if len(K) else np.zeros(0)
        return {"frame": self.frame.to_dict(), "anchor": self.anchor.tolist(), "m": self.m,
                "nodes": [{"k": [int(x) for x in kk], "value": float(v)} for kk, v in zip(K, vals)]}


def discretize(u: FieldFunction, dom, frame: Frame, m: int = 4) -> LatticeField:
    lf = LatticeField(u, dom, frame, m)
    if not lf.has_interior():
        raise EmptyInterior(f"no interior lattice cell at h={frame.h:g}; reduce r")
    return lf


def kuhn_eval(lf: LatticeField, point) -> float:
    return float(lf.evaluate(np.atleast_2d(point), grad=False)[0][0])


# -- energies of the interpolant --------------------------------------------


def _clip_polygon(poly: np.ndarray, lo, hi) -> np.ndarray:
    for axis in range(2):
        for bound, sign in ((lo[axis], 1.0), (hi[axis], -1.0)):
            if len(poly) == 0:
                return poly
            out = []
            n = len(poly)
            for i in range(n):
                p, q = poly[i], poly[(i + 1) % n]
                fp, fq = sign * (p[axis] - bound), sign * (q[axis] - bound)
                if fp >= 0:
                    out.append(p)
                if fp * fq < 0:
                    out.append(p + (q - p) * (fp / (fp - fq)))
            poly = np.array(out)
    return poly


def _polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _clipped_simplex_volume(verts: np.ndarray, lo, hi) -> float:
    d = verts.shape[1]
    if d == 2:
        return _polygon_area(_clip_polygon(verts, lo, hi))
    from scipy.optimize import linprog
    from scipy.spatial import ConvexHull, HalfspaceIntersection

    M = (verts[1:] - verts[0]).T
    Minv = np.linalg.inv(M)
    A = np.vstack([-Minv, Minv.sum(axis=0, keepdims=True), np.eye(d), -np.eye(d)])
    b = np.concatenate([Minv @ verts[0], [-1.0 - Minv.sum(axis=0) @ verts[0]], -np.asarray(hi), np.asarray(lo)])
    norms = np.linalg.norm(A, axis=1)
    res = linprog(np.r_[np.zeros(d), -1.0], A_ub=np.column_stack([A, norms]), b_ub=-b,
                  bounds=[(None, None)] * d + [(0, None)])
    if not res.success or res.x[-1] < 1e-12 * (hi[0] - lo[0] + 1.0):
        return 0.0
    hs = HalfspaceIntersection(np.column_stack([A, b]), res.x[:d])
    return float(ConvexHull(hs.intersections).volume)


def discrete_gradient_energy(lf: LatticeField, region) -> float:
    """Integral of |grad u^{r,rho nu}|^2 over a box covered by interior cells.

    Cells fully inside the region use the closed-form cell energy; straddling
    cells are clipped simplex by simplex, exactly.
    """
    region = as_box(region)
    lo, hi = region.lo_arr, region.hi_arr
    d = lf.d
    corners = np.array(list(product((0, 1), repeat=d)))
    tol = 1e-12 * lf.h
    total = 0.0
    for K in lf._iter_candidates(lo - lf.h * math.sqrt(d), hi):
        P = lf.node_position((K[:, None, :] + corners[None]).reshape(-1, d)).reshape(len(K), -1, d)
        cmin, cmax = P.min(axis=1), P.max(axis=1)
        overlap = np.all(cmax > lo + tol, axis=1) & np.all(cmin < hi - tol, axis=1)
        inside = np.all(cmin >= lo - tol, axis=1) & np.all(cmax <= hi + tol, axis=1)
        interior = lf.is_interior(K)
        full = overlap & inside
        if np.any(full & ~interior):
            raise RegionNotInterior("region meets a cell outside the interior set")
        if np.any(full):
            total += float(np.sum(lf.cell_energy(K[full])))
        for k, ok in zip(K[overlap & ~inside], interior[overlap & ~inside]):
            part = 0.0
            covered = 0.0
            for verts, g in lf.simplex_gradients(k):
                vol = _clipped_simplex_volume(verts, lo, hi)
                covered += vol
                part += vol * float(g @ g)
            if covered > 1e-12 * lf.h**d:
                if not ok:
                    raise RegionNotInterior("region meets a cell outside the interior set")
                total += part
    return total


def _stratified_points(rng, box: Box, n: int) -> np.ndarray:
    spacing = (box.volume / n) ** (1.0 / box.dim)
    counts = np.maximum(1, np.round(box.widths / spacing)).astype(int)
    idx = np.stack(np.meshgrid(*[np.arange(c) for c in counts], indexing="ij"), -1).reshape(-1, box.dim)
    return box.lo_arr + (idx + rng.random(idx.shape)) / counts * box.widths


def interior_energy(lf: LatticeField, rng: np.random.Generator | None = None,
                    exact_limit: int = EXACT_CELL_LIMIT, n_points: int = 8192) -> tuple[float, bool]:
    """Integral of |grad u^{r,rho nu}|^2 over the union of interior cells.

    Exact cell sum when the lattice is small enough; otherwise an unbiased
    jittered-stratified estimate.  Below a spacing of TINY_H times the box
    width, node differences drown in rounding error while the interpolant is
    indistinguishable from u, so the continuum value of |grad u|^2 is used.
    Returns (value, exact).
    """
    if lf.tiny:
        X = _stratified_points(rng, lf.box, n_points)
        g = lf.u.gradient(X) if lf.u.has_gradient else lf.u.fd_gradient(X)
        return lf.box.volume * float(np.mean(np.sum(g * g, axis=1))), False
    if lf.candidate_count() <= exact_limit:
        K = lf.interior_indices()
        return (float(np.sum(lf.cell_energy(K))) if len(K) else 0.0), True
    X = _stratified_points(rng, lf.box, n_points)
    k, _ = lf.locate(X)
    mask = lf.is_interior(k)
    dens = np.zeros(len(X))
    if mask.any():
        dens[mask] = lf.cell_energy(k[mask]) / lf.h**lf.d
    return lf.box.volume * float(np.mean(dens)), False


# -- lattice lower bound and averaged-field estimate ----------------------


@dataclass(frozen=True)
class InequalityCheck:
    lhs: EnergyEstimate | float
    rhs: EnergyEstimate
    holds: bool
    meta: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.lhs
        yield self.rhs


def lemma1_rhs(u: FieldFunction, dom, r: float, s: float, n_mu_samples: int = 64, seed: int = 0,
               exact_limit: int = EXACT_CELL_LIMIT) -> EnergyEstimate:
    """Monte Carlo value of r^(2-2s)/d |S^{d-1}| E_V int_0^1 rho^(1-2s) E(rho, nu) d rho.

    E(rho, nu) is the gradient energy of the interpolant over its own union of
    interior cells.
    """
    check_s(s)
    box = as_box(dom)
    d = box.dim

    def one(i):
        frame = sample_mu(seed, i, d, s, r)
        lf = LatticeField(u, box, frame)
        val, exact = interior_energy(lf, substream(seed, "lemma1-cells", i), exact_limit)
        return val, exact, lf.has_interior()

    out = map_ordered(one, n_mu_samples)
    E = np.array([v for v, _, _ in out])
    if not any(has for _, _, has in out):
        raise EmptyInterior(f"no sampled frame has interior cells at r={r:g}")
    factor = r ** (2 - 2 * s) / d * sphere_area(d) / (2 - 2 * s)
    se = float(np.std(E, ddof=1) / math.sqrt(len(E))) if len(E) > 1 else 0.0
    return EnergyEstimate(factor * float(np.mean(E)), factor * se, n_mu_samples, Method.MonteCarloPairs, seed,
                          {"r": r, "s": s, "exact_frames": int(sum(e for _, e, _ in out)),
                           "empty_frames": int(sum(not h for _, _, h in out))})


def lemma1_check(u: FieldFunction, dom, r: float, s: float, n_mu_samples: int = 64, seed: int = 0,
                 cfg: SplitConfig = SplitConfig(), n_sigma: float = 3.0) -> InequalityCheck:
    """Seminorm versus the lattice lower bound: holds when lhs >= rhs - n_sigma * combined se."""
    rhs = lemma1_rhs(u, dom, r, s, n_mu_samples, seed)
    lhs = raw_seminorm_sq(u, dom, s, cfg, seed)
    tol = n_sigma * math.hypot(lhs.std_error, rhs.std_error)
    return InequalityCheck(lhs, rhs, lhs.value >= rhs.value - tol, {"tolerance": tol})


class SigmaField:
    """mu-average of lattice interpolants at scale r = sigma * eps on a common region."""

    def __init__(self, fields: list[LatticeField], region: Box):
        self.fields = fields
        self.region = region

    def support(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        mask = self.region.contains(X)
        for lf in self.fields:
            mask &= lf.interior_mask(X)
        return mask

    def evaluate(self, X, grad: bool = True):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not np.all(self.support(X)):
            raise OutsideInterior("point outside the common interior of the averaged lattices")
        val = np.zeros(len(X))
        g = np.zeros(X.shape) if grad else None
        for lf in self.fields:
            v, gg = lf.evaluate(X, grad)
            val += v
            if grad:
                g += gg
        n = len(self.fields)
        return val / n, (g / n if grad else None)


def _check_sigma(sigma: float) -> None:
    if not 0.0 < sigma < 0.5:
        raise InvalidSigma("sigma must lie in (0, 1/2)")


def sigma_field(u: FieldFunction, dom, s: float, sigma: float, n_mu_samples: int = 32,
                seed: int = 0) -> SigmaField:
    _check_sigma(sigma)
    check_s(s)
    box = as_box(dom)
    eps = float(box.widths[-1])
    r = sigma * eps
    fields = []
    for i in range(n_mu_samples):
        lf = LatticeField(u, box, sample_mu(seed, i, box.dim, s, r))
        if not lf.has_interior():
            raise EmptyInterior(f"frame {i} has no interior cell at r={r:g}")
        fields.append(lf)
    lo = box.lo_arr.copy()
    hi = box.hi_arr.copy()
    lo[-1] = box.lo_arr[-1] + sigma * eps
    hi[-1] = box.lo_arr[-1] + (1.0 - sigma) * eps
    return SigmaField(fields, Box.of(lo, hi))


def u_sigma(u: FieldFunction, dom, s: float, sigma: float, n_mu_samples: int = 32, seed: int = 0) -> FieldFunction:
    """The averaged field as a FieldFunction; evaluation outside its support raises OutsideInterior."""
    sf = sigma_field(u, dom, s, sigma, n_mu_samples, seed)
    return FieldFunction(kind="SigmaAverage", d=u.d, base=lambda X: sf.evaluate(X, grad=False)[0],
                         base_grad=lambda X: sf.evaluate(X)[1], horizontal=False,
                         params={"sigma": sigma, "s": s, "n_mu_samples": n_mu_samples, "seed": seed},
                         meta={"sigma_field": sf, "support": sf.support})


def sigma_gradient_energy(sf: SigmaField, n_points: int = 65_536, seed: int = 0) -> tuple[float, float]:
    """Jittered-stratified integral of |grad u^sigma|^2 over the common support.

    Returns (energy, covered volume fraction of the region).
    """
    X = _stratified_points(substream(seed, "prop4-grid", 0), sf.region, n_points)
    mask = sf.support(X)
    if not mask.any():
        raise EmptyInterior("the averaged lattices have no common interior point")
    _, g = sf.evaluate(X[mask])
    dens = np.zeros(len(X))
    dens[mask] = np.sum(g * g, axis=1)
    return sf.region.volume * float(np.mean(dens)), float(np.mean(mask))


def prop4_check(u: FieldFunction, dom, s: float, sigma: float, cfg: SplitConfig = SplitConfig(), seed: int = 0,
                n_mu_samples: int = 32, n_points: int = 65_536, n_sigma: float = 3.0) -> InequalityCheck:
    """c_d sigma^(2-2s) (1/eps) int |grad u^sigma|^2 against eps^(2s-3) F, within n_sigma."""
    _check_sigma(sigma)
    check_s(s)
    box = as_box(dom)
    eps = float(box.widths[-1])
    sf = sigma_field(u, box, s, sigma, n_mu_samples, seed)
    energy, covered = sigma_gradient_energy(sf, n_points, seed)
    lhs = c_d(box.dim) * sigma ** (2 - 2 * s) / eps * energy
    lam = eps ** (2 * s - 3)
    rhs = raw_seminorm_sq(u, box, s, cfg, seed).scaled((1 - s) * lam, prefactor=(1 - s) * lam, functional="native F")
    tol = n_sigma * rhs.std_error
    return InequalityCheck(lhs, rhs, lhs <= rhs.value + tol,
                           {"tolerance": tol, "covered_fraction": covered, "ratio": lhs / rhs.value if rhs.value else float("nan")})
