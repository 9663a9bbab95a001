"""Deterministic product quadrature for difference-kernel double integrals.

Computes

    J = int_{B x B, |x - y| > delta} |u(x) - u(y)|^2 / |x - y|^(k + 2s) dx dy

over a box B in R^k by writing y = x + xi.  The offset xi ranges over the box
W = prod [-w_j, w_j]; each direction is parametrised by the point p where the
ray leaves W, so xi = tau * p with tau in (0, 1).  On every face of W the
radial integrand tau^(1-2s) D(tau, p) is smooth, where

    D(tau, p) = int_{B cap (B - tau p)} ((u(x + tau p) - u(x)) / tau)^2 dx,

which lets Gauss-Jacobi absorb the kernel singularity exactly.  Faces are
split at p_j = 0 (where the overlap box has a kink) and graded geometrically
toward it, since the face integrand varies on the scale of the face offset.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .domain import Box

_CHUNK = 1 << 21


@lru_cache(maxsize=None)
def _legendre01(n: int):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _jacobi01(n: int, beta: float):
    # int_0^1 t^beta f(t) dt
    x, w = roots_jacobi(n, 0.0, beta)
    return 0.5 * (x + 1.0), w * 0.5 ** (beta + 1.0)


def _graded_axis(half_width: float, scale: float, n_panel: int):
    """Composite Gauss nodes on [-half_width, half_width], panels graded toward 0."""
    cuts = [0.0]
    edge = scale
    while edge < half_width:
        cuts.append(edge)
        edge *= 3.0
    cuts.append(half_width)
    g, gw = _legendre01(n_panel)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        nodes.append(a + (b - a) * g)
        weights.append((b - a) * gw)
    pos, wpos = np.concatenate(nodes), np.concatenate(weights)
    return np.concatenate([-pos[::-1], pos]), np.concatenate([wpos[::-1], wpos])


def pair_integral(incr, box: Box, s: float, delta: float = 0.0, n_tau: int = 24,
                  n_x: int = 24, n_face: int = 12) -> float:
    """Quadrature value of J; ``incr(X, Y)`` must return u(X) - u(Y) row-wise."""
    k = box.dim
    w = box.widths
    lo, hi = box.lo_arr, box.hi_arr
    beta = 1.0 - 2.0 * s
    if delta <= 0.0 and beta <= -1.0:
        raise ValueError("kernel is not integrable at the diagonal for s >= 1")
    gx, gwx = _legendre01(n_x)
    xg = np.stack([g.ravel() for g in np.meshgrid(*([gx] * k), indexing="ij")], axis=1)
    xw = np.prod(np.stack([g.ravel() for g in np.meshgrid(*([gwx] * k), indexing="ij")], axis=1), axis=1)

    total = 0.0
    for i in range(k):
        axes, axw = [], []
        for j in range(k):
            if j == i:
                axes.append(np.array([w[i]]))
                axw.append(np.array([1.0]))
            else:
                a, aw = _graded_axis(w[j], w[i], n_face)
                axes.append(a)
                axw.append(aw)
        P = np.array(list(itertools.product(*axes)))
        PW = np.prod(np.array(list(itertools.product(*axw))), axis=1)
        pnorm = np.linalg.norm(P, axis=1)
        face_total = 0.0
        for p, pw, pn in zip(P, PW, pnorm):
            if delta > 0.0:
                t0 = delta / pn
                if t0 >= 1.0:
                    continue
                z, zw = _legendre01(n_tau)
                z = np.log(t0) * (1.0 - z)
                zw = zw * (-np.log(t0))
                tau = np.exp(z)
                tw = zw * np.exp((2.0 - 2.0 * s) * z)
            else:
                tau, tw = _jacobi01(n_tau, beta)
            xi = tau[:, None] * p[None, :]
            olo = lo + np.maximum(0.0, -xi)
            ohi = hi - np.maximum(0.0, xi)
            ovol = np.prod(ohi - olo, axis=1)
            X = olo[:, None, :] + (ohi - olo)[:, None, :] * xg[None, :, :]
            Y = X + xi[:, None, :]
            m = X.shape[0] * X.shape[1]
            diff = incr(Y.reshape(m, k), X.reshape(m, k)).reshape(X.shape[0], X.shape[1])
            D = ovol * ((diff / tau[:, None]) ** 2 @ xw)
            face_total += pw * float(tw @ D) * pn ** (-k - 2.0 * s)
        total += w[i] * face_total
    return 2.0 * total


def default_orders(grid_n: int) -> dict:
    return {"n_tau": max(6, grid_n // 2), "n_x": max(6, grid_n // 2), "n_face": max(6, grid_n // 4)}
