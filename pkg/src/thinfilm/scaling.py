"""Scaling factors, parameter paths (eps, s_eps) and regime classification.

Under the membrane scaling 1/eps the limit depends on kappa = lim eps^(1-s):
kappa = 1 (subcritical), kappa in (0,1) (critical), kappa = 0 (supercritical).
The native scaling eps^(2s-3) always has coefficient 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidPath, InvalidS, NonpositiveEps, PathTooShort
from .seminorm import check_s

KAPPA_TOL = 1e-9


class PathKind(str, Enum):
    FixedS = "FixedS"
    PowerLaw = "PowerLaw"          # 1 - s = eps^beta
    LogCritical = "LogCritical"    # eps^(1-s) = kappa
    Subcritical = "Subcritical"    # 1 - s = |log eps|^(-gamma), gamma > 1
    LogPower = "LogPower"          # 1 - s = |log eps|^(-gamma), any gamma > 0
    ThickFilm = "ThickFilm"        # eps = sqrt(1 - s) / M
    Custom = "Custom"


class Regime(str, Enum):
    Subcritical = "Subcritical"
    Critical = "Critical"
    Supercritical = "Supercritical"


class Outcome(str, Enum):
    Zero = "Zero"
    Infinity = "Infinity"
    Unknown = "Unknown"


def lambda_native(eps: float, s: float) -> float:
    """eps^(2s-3)."""
    _check_eps(eps)
    check_s(s)
    return eps ** (2.0 * s - 3.0)


def lambda_membrane(eps: float) -> float:
    _check_eps(eps)
    return 1.0 / eps


def lambda_power(eps: float, alpha: float) -> float:
    """eps^(-alpha), the scaling for the fixed-s functionals."""
    _check_eps(eps)
    return eps ** (-alpha)


def _check_eps(eps: float) -> None:
    if not eps > 0.0 or not math.isfinite(eps):
        raise NonpositiveEps(f"eps must be positive, got {eps}")


@dataclass(frozen=True)
class ParamPath:
    """A family of (eps, s_eps) pairs.

    ``param`` is s for FixedS, beta for PowerLaw, kappa for LogCritical,
    gamma for Subcritical/LogPower and M for ThickFilm.  Custom paths carry
    their s values in ``s_table``.
    """

    kind: PathKind
    eps_list: tuple[float, ...]
    param: float | None = None
    s_table: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PathKind(self.kind))
        eps = tuple(float(e) for e in self.eps_list)
        object.__setattr__(self, "eps_list", eps)
        if any(not e > 0 for e in eps):
            raise InvalidPath("eps_list must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise InvalidPath("eps_list must be strictly decreasing")
        k, p = self.kind, self.param
        if k is PathKind.Custom:
            if self.s_table is None or len(self.s_table) != len(eps):
                raise InvalidPath("Custom path needs one s value per eps")
            object.__setattr__(self, "s_table", tuple(float(s) for s in self.s_table))
        elif p is None:
            raise InvalidPath(f"{k.value} path needs a parameter")
        elif k is PathKind.FixedS:
            check_s(p)
        elif k is PathKind.LogCritical and not 0.0 < p < 1.0:
            raise InvalidPath(f"kappa must lie in (0,1), got {p}")
        elif k is PathKind.Subcritical and not p > 1.0:
            raise InvalidPath(f"Subcritical path needs gamma > 1, got {p}")
        elif k in (PathKind.PowerLaw, PathKind.LogPower, PathKind.ThickFilm) and not p > 0.0:
            raise InvalidPath(f"{k.value} parameter must be positive, got {p}")
        if k in (PathKind.LogCritical, PathKind.Subcritical, PathKind.LogPower) and eps and eps[0] >= 1.0:
            raise InvalidPath("logarithmic paths need eps < 1")
        for e in eps:
            s = self.s_at(e) if k is not PathKind.Custom else None
            if s is not None and not 0.0 < s < 1.0:
                raise InvalidS(f"path gives s={s} at eps={e}, outside (0,1)")
        if k is PathKind.Custom:
            for s in self.s_table:
                check_s(s)

    def s_at(self, eps: float) -> float:
        k, p = self.kind, self.param
        if k is PathKind.FixedS:
            return p
        if k is PathKind.PowerLaw:
            return 1.0 - eps**p
        if k is PathKind.LogCritical:
            return 1.0 - math.log(p) / math.log(eps)
        if k in (PathKind.Subcritical, PathKind.LogPower):
            return 1.0 - abs(math.log(eps)) ** (-p)
        if k is PathKind.ThickFilm:
            return 1.0 - (p * eps) ** 2
        return self.s_table[self.eps_list.index(eps)]

    def points(self) -> list[tuple[float, float]]:
        if self.kind is PathKind.Custom:
            return list(zip(self.eps_list, self.s_table))
        return [(e, self.s_at(e)) for e in self.eps_list]

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "eps_list": list(self.eps_list)}
        if self.param is not None:
            out["param"] = self.param
        if self.s_table is not None:
            out["s_table"] = list(self.s_table)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ParamPath":
        st = data.get("s_table")
        return cls(PathKind(data["kind"]), tuple(data["eps_list"]), data.get("param"),
                   None if st is None else tuple(st))


@dataclass(frozen=True)
class KappaEstimate:
    kappa: float
    converged: bool
    method: str


def _aitken(seq: Sequence[float]) -> tuple[float, bool]:
    """Aitken delta-squared extrapolation of the tail of ``seq``."""
    x0, x1, x2 = seq[-3], seq[-2], seq[-1]
    denom = x2 - 2.0 * x1 + x0
    if abs(denom) < 1e-15 * max(1.0, abs(x2)):
        return x2, abs(x2 - x1) < 1e-6
    acc = x2 - (x2 - x1) ** 2 / denom
    if not math.isfinite(acc):
        return x2, False
    # trust the acceleration only if it stays near the raw tail
    converged = abs(acc - x2) <= max(0.05, 2.0 * abs(x2 - x1))
    return (acc if converged else x2), converged


def estimate_kappa(path: ParamPath) -> KappaEstimate:
    k, p = path.kind, path.param
    if k is PathKind.LogCritical:
        return KappaEstimate(p, True, "analytic")
    if k in (PathKind.PowerLaw, PathKind.ThickFilm):
        return KappaEstimate(1.0, True, "analytic")
    if k is PathKind.FixedS:
        return KappaEstimate(0.0, True, "analytic")
    if k in (PathKind.Subcritical, PathKind.LogPower):
        # eps^(1-s) = exp(-|log eps|^(1-gamma))
        if p > 1.0:
            return KappaEstimate(1.0, True, "analytic")
        if p == 1.0:
            return KappaEstimate(math.exp(-1.0), True, "analytic")
        return KappaEstimate(0.0, True, "analytic")
    if len(path.eps_list) < 3:
        raise PathTooShort(f"Custom path needs at least 3 points, got {len(path.eps_list)}")
    seq = [e ** (1.0 - s) for e, s in path.points()]
    kap, ok = _aitken(seq)
    return KappaEstimate(float(np.clip(kap, 0.0, 1.0)), ok, "aitken")


def kappa_of_path(path: ParamPath) -> float:
    return estimate_kappa(path).kappa


@dataclass(frozen=True)
class RegimeReport:
    kappa_estimate: float
    regime: Regime
    predicted_limit_membrane: float
    predicted_limit_native: float
    converged: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def membrane_coefficient(self) -> float:
        return self.kappa_estimate**2


def regime_of_kappa(kappa: float) -> Regime:
    if kappa >= 1.0 - KAPPA_TOL:
        return Regime.Subcritical
    if kappa <= KAPPA_TOL:
        return Regime.Supercritical
    return Regime.Critical


def classify_regime(path: ParamPath, native_limit: float = 1.0) -> RegimeReport:
    """Regime of ``path``; ``native_limit`` is c_d times the reduced Dirichlet integral."""
    est = estimate_kappa(path)
    kappa = est.kappa
    return RegimeReport(kappa, regime_of_kappa(kappa), kappa**2 * native_limit, native_limit,
                        est.converged, {"kappa_method": est.method})


@dataclass(frozen=True)
class FtfPrediction:
    outcome: Outcome
    critical: bool


def ftf_prediction(alpha: float, s: float, u_is_constant: bool, tol: float = 1e-12) -> FtfPrediction:
    """Limit of eps^(-alpha) G for fixed s in (1/2, 1); critical exponent alpha = 3 - 2s."""
    check_s(s, 0.5, 1.0)
    crit = 3.0 - 2.0 * s
    critical = abs(alpha - crit) <= tol
    if u_is_constant or (alpha < crit and not critical):
        return FtfPrediction(Outcome.Zero, critical)
    if critical:
        return FtfPrediction(Outcome.Unknown, True)
    return FtfPrediction(Outcome.Infinity, False)
