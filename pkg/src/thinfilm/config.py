"""Experiment configuration: JSON schema validation plus semantic checks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path

import jsonschema

from .domain import FieldFunction, ThinDomain, make_thin_film, resolve_function
from .errors import ConfigError, InvalidSigma, ThinFilmError
from .scaling import ParamPath
from .seminorm import SplitConfig, check_s

CONFIG_SCHEMA_VERSION = 1


class ScalingKind(str, Enum):
    Native = "Native"
    Membrane = "Membrane"
    PowerAlpha = "PowerAlpha"


@dataclass(frozen=True)
class DomainSpec:
    d: int
    omega_lo: tuple[float, ...]
    omega_hi: tuple[float, ...]

    def film(self, eps: float) -> ThinDomain:
        return make_thin_film(self.d, list(self.omega_lo), list(self.omega_hi), eps)


@dataclass(frozen=True)
class ScalingSpec:
    kind: ScalingKind = ScalingKind.Native
    alpha: float | None = None


@dataclass(frozen=True)
class SamplerSpec:
    r: float = 0.25
    n_near: int = 1_000_000
    n_far: int = 1_000_000
    n_mu_samples: int = 32
    autoscale: bool = True
    grid_n: int = 256

    def split(self) -> SplitConfig:
        return SplitConfig(self.r, self.n_near, self.n_far)


@dataclass(frozen=True)
class OutputSpec:
    ndjson: str = "results.ndjson"
    csv: str = "summary.csv"
    svg: str = "plot.svg"


@dataclass(frozen=True)
class CheckSpec:
    functions: tuple[str, ...] = ("const", "x1", "x1^2", "sin(2pi x1)")
    s_list: tuple[float, ...] = (0.6, 0.8, 0.95)
    seeds: tuple[int, ...] = (0, 1, 2)
    eps: float = 0.2
    r: float = 0.05
    cutoffs: tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    M: float = 1.0
    n_sigma: float = 3.0


@dataclass(frozen=True)
class ExperimentConfig:
    function: str
    domain: DomainSpec
    path: ParamPath
    scaling: ScalingSpec = ScalingSpec()
    sampler: SamplerSpec = SamplerSpec()
    sigma: float = 0.2
    seed: int = 0
    output: OutputSpec = OutputSpec()
    checks: CheckSpec = CheckSpec()
    record_timing: bool = False
    name: str = ""
    schema_version: int = CONFIG_SCHEMA_VERSION
    base_dir: Path = field(default=Path("."), compare=False)

    def make_field(self, function: str | None = None) -> FieldFunction:
        return resolve_function(function or self.function, self.domain.d)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=int(seed))

    def output_path(self, key: str) -> Path:
        p = Path(getattr(self.output, key))
        return p if p.is_absolute() else self.base_dir / p

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "function": self.function,
            "domain": {"d": self.domain.d, "omega_lo": list(self.domain.omega_lo),
                       "omega_hi": list(self.domain.omega_hi)},
            "path": self.path.to_dict(),
            "scaling": {"kind": self.scaling.kind.value, **({"alpha": self.scaling.alpha}
                                                             if self.scaling.alpha is not None else {})},
            "sampler": asdict(self.sampler),
            "sigma": self.sigma,
            "seed": self.seed,
            "record_timing": self.record_timing,
            "output": asdict(self.output),
            "checks": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.checks).items()},
        }
        if self.name:
            out["name"] = self.name
        return out


def schema() -> dict:
    return json.loads(resources.files("thinfilm").joinpath("schema/config.schema.json").read_text())


def _tuple(v):
    return tuple(v) if isinstance(v, list) else v


def from_dict(data: dict, base_dir: Path | str = ".") -> ExperimentConfig:
    """Validate ``data`` against the schema and the estimator preconditions."""
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    try:
        dom = data["domain"]
        domain = DomainSpec(dom["d"], tuple(dom["omega_lo"]), tuple(dom["omega_hi"]))
        if len(domain.omega_lo) != domain.d - 1 or len(domain.omega_hi) != domain.d - 1:
            raise ConfigError(f"omega extents must have {domain.d - 1} entries")
        path = ParamPath.from_dict(data["path"])
        domain.film(path.eps_list[0])
        sc = data.get("scaling", {})
        scaling = ScalingSpec(ScalingKind(sc.get("kind", "Native")), sc.get("alpha"))
        if scaling.kind is ScalingKind.PowerAlpha:
            if scaling.alpha is None:
                raise ConfigError("PowerAlpha scaling needs alpha")
            for _, s in path.points():
                check_s(s, 0.5, 1.0)
        sampler = SamplerSpec(**data.get("sampler", {}))
        sampler.split()
        sigma = float(data.get("sigma", 0.2))
        if not 0.0 < sigma < 0.5:
            raise InvalidSigma("sigma must lie in (0, 1/2)")
        checks = CheckSpec(**{k: _tuple(v) for k, v in data.get("checks", {}).items()})
        for s in checks.s_list:
            check_s(s)
        if any(b >= a for a, b in zip(checks.cutoffs, checks.cutoffs[1:])):
            raise ConfigError("checks.cutoffs must be strictly decreasing")
        cfg = ExperimentConfig(
            function=data["function"], domain=domain, path=path, scaling=scaling, sampler=sampler,
            sigma=sigma, seed=int(data.get("seed", 0)), output=OutputSpec(**data.get("output", {})),
            checks=checks, record_timing=bool(data.get("record_timing", False)), name=data.get("name", ""),
            base_dir=Path(base_dir))
        cfg.make_field()
        for fn in checks.functions:
            cfg.make_field(fn)
    except ConfigError:
        raise
    except (ThinFilmError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    if not all(math.isfinite(e) for e in path.eps_list):
        raise ConfigError("eps_list must be finite")
    return cfg


def load(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return from_dict(data, path.parent)
