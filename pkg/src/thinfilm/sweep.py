"""Experiment harness: scaled-energy sweeps, rate fits and result files."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ExperimentConfig, ScalingKind
from .errors import NonPositiveValues, NotHorizontal, PartialResults, SchemaVersionMismatch, ThinFilmError, TooFewPoints
from .scaling import Outcome, classify_regime, ftf_prediction, lambda_membrane, lambda_native, lambda_power
from .seminorm import EnergyEstimate, F_energy, G_energy, c_d, reduced_dirichlet
from .svgplot import loglog

log = logging.getLogger(__name__)

RESULTS_SCHEMA_VERSION = 1
CSV_COLUMNS = ("eps", "s", "scaled_value", "std_error", "predicted", "ratio")


@dataclass(frozen=True)
class SweepRecord:
    eps: float
    s: float
    scaling_kind: ScalingKind
    energy: EnergyEstimate
    scaled_value: float
    predicted_limit: float
    ratio: float | None
    wall_time_ms: int = 0
    alpha: float | None = None
    exact: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def scale_factor(self) -> float:
        return self.scaled_value / self.energy.value if self.energy.value else float("nan")

    @property
    def scaled_std_error(self) -> float:
        return self.meta.get("scale", 1.0) * self.energy.std_error

    def to_dict(self) -> dict:
        return {
            "eps": self.eps, "s": self.s, "scaling_kind": self.scaling_kind.value, "alpha": self.alpha,
            "energy": self.energy.to_dict(), "scaled_value": self.scaled_value,
            "predicted_limit": self.predicted_limit, "ratio": self.ratio, "wall_time_ms": self.wall_time_ms,
            "exact": self.exact, "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepRecord":
        return cls(float(data["eps"]), float(data["s"]), ScalingKind(data["scaling_kind"]),
                   EnergyEstimate.from_dict(data["energy"]), float(data["scaled_value"]),
                   float(data["predicted_limit"]), None if data["ratio"] is None else float(data["ratio"]),
                   int(data["wall_time_ms"]), data.get("alpha"), bool(data.get("exact", False)),
                   dict(data.get("meta", {})))


@dataclass(frozen=True)
class RateFit:
    exponent: float
    intercept: float
    r_squared: float
    n_points: int


# -- running ---------------------------------------------------------------


def _coefficient(cfg: ExperimentConfig, s: float, u_const: bool) -> float:
    kind = cfg.scaling.kind
    if kind is ScalingKind.Native:
        return 1.0
    if kind is ScalingKind.Membrane:
        return classify_regime(cfg.path).membrane_coefficient
    pred = ftf_prediction(cfg.scaling.alpha, s, u_const)
    return {Outcome.Zero: 0.0, Outcome.Infinity: math.inf, Outcome.Unknown: math.nan}[pred.outcome]


def _scale(cfg: ExperimentConfig, eps: float, s: float) -> float:
    kind = cfg.scaling.kind
    if kind is ScalingKind.Native:
        return lambda_native(eps, s)
    if kind is ScalingKind.Membrane:
        return lambda_membrane(eps)
    return lambda_power(eps, cfg.scaling.alpha)


def budget_factor(cfg: ExperimentConfig, eps: float) -> float:
    """Sample-count multiplier (eps_ref / eps)^(1/2), eps_ref the largest eps of the path."""
    if not cfg.sampler.autoscale:
        return 1.0
    return math.sqrt(cfg.path.eps_list[0] / eps)


def native_limit(cfg: ExperimentConfig, u=None) -> float:
    """c_d times the reduced Dirichlet integral, or NaN for fields depending on x_d."""
    u = cfg.make_field() if u is None else u
    omega = cfg.domain.film(cfg.path.eps_list[0]).omega_box
    try:
        return c_d(cfg.domain.d) * reduced_dirichlet(u, omega, cfg.sampler.grid_n)
    except NotHorizontal:
        return math.nan


def run_point(cfg: ExperimentConfig, eps: float, s: float, u=None, base_limit: float | None = None) -> SweepRecord:
    u = cfg.make_field() if u is None else u
    base_limit = native_limit(cfg, u) if base_limit is None else base_limit
    dom = cfg.domain.film(eps)
    split = cfg.sampler.split().scaled_budget(budget_factor(cfg, eps))
    t0 = time.perf_counter()
    if cfg.scaling.kind is ScalingKind.PowerAlpha:
        energy = G_energy(u, dom, s, split, cfg.seed)
    else:
        energy = F_energy(u, dom, s, split, cfg.seed)
    elapsed = int(round((time.perf_counter() - t0) * 1000)) if cfg.record_timing else 0
    factor = _scale(cfg, eps, s)
    coef = _coefficient(cfg, s, u.is_constant)
    predicted = coef * base_limit if coef != 0.0 else 0.0
    scaled = factor * energy.value
    ratio = scaled / predicted if predicted > 0 and math.isfinite(predicted) else None
    return SweepRecord(eps, s, cfg.scaling.kind, energy, scaled, predicted, ratio, elapsed, cfg.scaling.alpha,
                       u.is_constant, {"scale": factor, "coefficient": coef, "n_samples": energy.n_samples})


def run_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """One record per eps of the path, in path order.

    Every point reuses the configured seed, so neighbouring points share
    random numbers and their differences are less noisy than the values.
    """
    u = cfg.make_field()
    base_limit = native_limit(cfg, u)
    records: list[SweepRecord] = []
    for eps, s in cfg.path.points():
        try:
            records.append(run_point(cfg, eps, s, u, base_limit))
        except ThinFilmError as exc:
            raise PartialResults(records, eps, exc) from exc
        log.info("eps=%g s=%.6g scaled=%.6g", eps, s, records[-1].scaled_value)
    return records


# -- fitting ---------------------------------------------------------------


def fit_power(x: Sequence[float], y: Sequence[float]) -> RateFit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        raise TooFewPoints(f"rate fit needs at least 3 points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise NonPositiveValues("rate fit needs positive finite values")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + icpt)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return RateFit(float(slope), float(icpt), r2, len(x))


def fit_rate(records: Sequence[SweepRecord], y: str = "scaled") -> RateFit:
    """Exponent of ``y`` ("scaled" or "raw") against eps."""
    if y not in ("scaled", "raw"):
        raise ValueError("y must be 'scaled' or 'raw'")
    ys = [r.scaled_value if y == "scaled" else r.energy.value for r in records]
    return fit_power([r.eps for r in records], ys)


# -- persistence -----------------------------------------------------------


def _encode(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "NaN" if math.isnan(v) else ("Infinity" if v > 0 else "-Infinity")
    if isinstance(v, dict):
        return {k: _encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    if isinstance(v, np.generic):
        return _encode(v.item())
    return v


_SPECIAL = {"NaN": math.nan, "Infinity": math.inf, "-Infinity": -math.inf}


def _decode(v):
    if isinstance(v, str) and v in _SPECIAL:
        return _SPECIAL[v]
    if isinstance(v, dict):
        return {k: _decode(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def dumps_record(rec: SweepRecord) -> str:
    body = {"schema_version": RESULTS_SCHEMA_VERSION, **_encode(rec.to_dict())}
    return json.dumps(body, sort_keys=True, allow_nan=False)


def write_results(records: Iterable[SweepRecord], path: str | Path) -> None:
    """Newline-delimited JSON; floats use the shortest round-trip repr."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec) + "\n")


def read_results(path: str | Path) -> list[SweepRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            data = json.loads(line)
            version = data.pop("schema_version", None)
            if version != RESULTS_SCHEMA_VERSION:
                raise SchemaVersionMismatch(
                    f"line {lineno}: schema_version {version!r}, expected {RESULTS_SCHEMA_VERSION}")
            out.append(SweepRecord.from_dict(_decode(data)))
    return out


def _csv_value(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def write_csv(records: Sequence[SweepRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_csv_value(r.eps), _csv_value(r.s), _csv_value(r.scaled_value),
                        _csv_value(r.scaled_std_error), _csv_value(r.predicted_limit), _csv_value(r.ratio)])


def write_svg(records: Sequence[SweepRecord], path: str | Path, title: str = "") -> None:
    eps = [r.eps for r in records]
    svg = loglog(eps, [r.scaled_value for r in records], [r.predicted_limit for r in records],
                 title=title, ylabel="scaled energy")
    Path(path).write_text(svg, encoding="utf-8")
