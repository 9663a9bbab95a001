"""Command-line front end.

Exit codes: 0 success, 2 invalid input or config, 3 estimator error,
4 sweep finished only partially, 5 a check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import config as config_mod
from .domain import Box, make_thin_film, resolve_function
from .errors import (ConfigError, InvalidDimension, InvalidS, InvalidSigma, NotHorizontal, PartialResults,
                     ThinFilmError, EmptyBox, NonpositiveThickness, ParseError)
from .extension import remark_ratio, thick_regime_check
from .lattice import lemma1_check, prop4_check
from .scaling import ParamPath, PathKind
from .seminorm import SplitConfig, check_s, constant_diagnostic, oracle_dense, raw_seminorm_sq
from .sweep import run_sweep, write_csv, write_results, write_svg

EXIT_OK, EXIT_CONFIG, EXIT_ESTIMATOR, EXIT_PARTIAL, EXIT_CHECK = 0, 2, 3, 4, 5

INPUT_ERRORS = (ConfigError, InvalidDimension, InvalidS, InvalidSigma, EmptyBox, NonpositiveThickness, ParseError)


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


# -- energy ----------------------------------------------------------------


def _parse_omega(text: str, d: int) -> tuple[list[float], list[float]]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--omega must be comma-separated numbers, got {text!r}") from None
    if len(vals) != 2 * (d - 1):
        raise ConfigError(f"--omega needs {2 * (d - 1)} numbers (lo,hi per horizontal axis) for d={d}")
    return vals[0::2], vals[1::2]


def cmd_energy(args) -> int:
    try:
        if args.d < 2:
            raise InvalidDimension(f"d must be at least 2, got {args.d}")
        check_s(args.s)
        if args.functional == "G":
            check_s(args.s, 0.5, 1.0)
        lo, hi = _parse_omega(args.omega, args.d)
        dom = make_thin_film(args.d, lo, hi, args.eps)
        u = resolve_function(args.fn, args.d)
        split = SplitConfig(args.r, args.n, args.n)
    except INPUT_ERRORS as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        if args.method == "dense":
            est = oracle_dense(u, dom, args.s, args.grid)
        else:
            est = raw_seminorm_sq(u, dom, args.s, split, args.seed)
    except ThinFilmError as exc:
        return _fail(EXIT_ESTIMATOR, f"{type(exc).__name__}: {exc}")
    factor = {"F": 1.0 - args.s, "G": 1.0, "raw": 1.0}[args.functional]
    est = est.scaled(factor)
    out = {"value": est.value, "std_error": est.std_error, "method": est.method.value, "seed": est.seed,
           "functional": args.functional, "n_samples": est.n_samples}
    print(json.dumps(out))
    return EXIT_OK


# -- sweep -----------------------------------------------------------------


def _load(path: str, seed: int | None):
    cfg = config_mod.load(path)
    return cfg.with_seed(seed) if seed is not None else cfg


def _write_outputs(cfg, records, out_dir: str | None) -> None:
    if out_dir:
        cfg = replace(cfg, base_dir=Path(out_dir))
    for key in ("ndjson", "csv", "svg"):
        cfg.output_path(key).parent.mkdir(parents=True, exist_ok=True)
    write_results(records, cfg.output_path("ndjson"))
    write_csv(records, cfg.output_path("csv"))
    write_svg(records, cfg.output_path("svg"), title=cfg.name or f"{cfg.function}: {cfg.scaling.kind.value} scaling")


def cmd_sweep(args) -> int:
    try:
        cfg = _load(args.config, args.seed)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        records = run_sweep(cfg)
    except PartialResults as exc:
        _write_outputs(cfg, exc.records, args.out_dir)
        return _fail(EXIT_PARTIAL, f"{exc} ({len(exc.records)} records written)")
    except ThinFilmError as exc:
        return _fail(EXIT_ESTIMATOR, f"{type(exc).__name__}: {exc}")
    _write_outputs(cfg, records, args.out_dir)
    for r in records:
        ratio = "-" if r.ratio is None else f"{r.ratio:.4f}"
        print(f"eps={r.eps:<8g} s={r.s:<10.6g} scaled={r.scaled_value:<12.6g} "
              f"se={r.scaled_std_error:<10.3g} predicted={r.predicted_limit:<10.6g} ratio={ratio}")
    return EXIT_OK


# -- checks ----------------------------------------------------------------


def _table(rows: list[tuple[str, bool | None, str]]) -> bool:
    ok = True
    width = max((len(name) for name, _, _ in rows), default=4)
    for name, passed, detail in rows:
        tag = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        ok &= passed is not False
        print(f"{tag}  {name:<{width}}  {detail}")
    failed = [name for name, passed, _ in rows if passed is False]
    print(f"{len(rows) - len(failed)}/{len(rows)} passed" if not failed else "failing: " + ", ".join(failed))
    return ok


def _check_lemma1(cfg) -> list:
    ch = cfg.checks
    dom = cfg.domain.film(ch.eps)
    rows = []
    for fn in ch.functions:
        u = cfg.make_field(fn)
        for s in ch.s_list:
            for seed in ch.seeds:
                res = lemma1_check(u, dom, ch.r, s, cfg.sampler.n_mu_samples, seed, cfg.sampler.split(), ch.n_sigma)
                rows.append((f"{fn} s={s:g} seed={seed}", res.holds,
                             f"lhs={res.lhs.value:.6g}+-{res.lhs.std_error:.2g} "
                             f"rhs={res.rhs.value:.6g}+-{res.rhs.std_error:.2g}"))
    return rows


def _check_prop4(cfg) -> list:
    ch = cfg.checks
    dom = cfg.domain.film(ch.eps)
    rows = []
    for fn in ch.functions:
        u = cfg.make_field(fn)
        for s in ch.s_list:
            for seed in ch.seeds:
                res = prop4_check(u, dom, s, cfg.sigma, cfg.sampler.split(), seed, cfg.sampler.n_mu_samples,
                                  n_sigma=ch.n_sigma)
                rows.append((f"{fn} s={s:g} seed={seed}", res.holds,
                             f"lhs={res.lhs:.6g} rhs={res.rhs.value:.6g}+-{res.rhs.std_error:.2g}"))
    return rows


def _check_constant(cfg) -> list:
    ch = cfg.checks
    omega = Box.of(cfg.domain.omega_lo, cfg.domain.omega_hi)
    rows = []
    for fn in ch.functions:
        u = cfg.make_field(fn)
        try:
            vals = constant_diagnostic(u, omega, ch.cutoffs)
        except NotHorizontal:
            rows.append((fn, None, "depends on x_d; diagnostic not defined"))
            continue
        if all(v == 0.0 for v in vals):
            verdict = "constant"
        elif all(v > 0 for v in vals) and all(b >= 1.2 * a for a, b in zip(vals, vals[1:])):
            verdict = "non-constant"
        else:
            verdict = "inconclusive"
        expected = "constant" if u.is_constant else "non-constant"
        rows.append((fn, verdict == expected, f"{verdict}; I = " + ", ".join(f"{v:.5g}" for v in vals)))
    return rows


def _check_thickfilm(cfg) -> list:
    ch = cfg.checks
    path = cfg.path
    if path.kind is not PathKind.ThickFilm:
        path = ParamPath(PathKind.ThickFilm, path.eps_list, ch.M)
    omega = Box.of(cfg.domain.omega_lo, cfg.domain.omega_hi)
    rows = []
    for fn in ch.functions:
        u = cfg.make_field(fn)
        pts = thick_regime_check(u, path, cfg.sampler.split(), cfg.seed, ch.M, omega)
        vals = [p.value for p in pts]
        if all(v == 0.0 for v in vals):
            ok, spread = True, 1.0
        else:
            ok = min(vals) > 0 and max(vals) / min(vals) < 2.0
            spread = max(vals) / min(vals) if min(vals) > 0 else math.inf
        rows.append((fn, ok, f"max/min={spread:.4g}; values " + ", ".join(f"{v:.5g}" for v in vals)))
    rr = remark_ratio(path)
    rows.append(("eps^(2(1-s)) at finest eps", rr[-1] >= 0.9, f"{rr[-1]:.6g}"))
    return rows


CHECKS = {"lemma1": _check_lemma1, "prop4": _check_prop4, "constant": _check_constant, "thickfilm": _check_thickfilm}


def cmd_check(args) -> int:
    try:
        cfg = _load(args.config, args.seed)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        rows = CHECKS[args.suite](cfg)
    except INPUT_ERRORS as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except ThinFilmError as exc:
        return _fail(EXIT_ESTIMATOR, f"{type(exc).__name__}: {exc}")
    return EXIT_OK if _table(rows) else EXIT_CHECK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thinfilm", description="Fractional energies on thin films.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("energy", help="evaluate one energy", description="Evaluate F, G or the raw seminorm once.")
    e.add_argument("--fn", required=True, help="catalog name, catalog id (const:c, linear:a, ...) or expression")
    e.add_argument("--d", type=int, required=True, help="ambient dimension (>= 2)")
    e.add_argument("--omega", required=True, help="lo,hi pairs for each horizontal axis, e.g. 0,1 or 0,1,0,2")
    e.add_argument("--eps", type=float, required=True, help="film thickness")
    e.add_argument("--s", type=float, required=True, help="fractional order in (0,1)")
    e.add_argument("--r", type=float, default=0.25, help="near/far cutoff as a fraction of the thickness (default 0.25)")
    e.add_argument("--n", type=int, default=1_000_000, help="samples for each of the near and far parts")
    e.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    e.add_argument("--method", choices=("mc", "dense"), default="mc", help="Monte Carlo or dense quadrature")
    e.add_argument("--grid", type=int, default=48, help="resolution of the dense method (default 48)")
    e.add_argument("--functional", choices=("F", "G", "raw"), default="F",
                   help="F = (1-s) * seminorm, G = seminorm with s in (1/2,1), raw = seminorm")
    e.set_defaults(func=cmd_energy)

    s = sub.add_parser("sweep", help="run an eps sweep from a config",
                       description="Run a sweep and write NDJSON, CSV and SVG outputs.")
    s.add_argument("config", help="path to a JSON experiment config")
    s.add_argument("--seed", type=int, default=None, help="override the config seed")
    s.add_argument("--out-dir", default=None, help="directory for outputs (default: next to the config)")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="run an inequality or diagnostic suite",
                       description="Run a check suite and print a PASS/FAIL table.")
    c.add_argument("suite", choices=sorted(CHECKS), help="which suite to run")
    c.add_argument("config", help="path to a JSON experiment config")
    c.add_argument("--seed", type=int, default=None, help="override the config seed")
    c.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
