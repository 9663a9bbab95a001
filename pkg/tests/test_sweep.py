import math

import numpy as np
import pytest

from helpers import config_dict
from thinfilm.config import from_dict
from thinfilm.domain import linear_horizontal, make_thin_film
from thinfilm.errors import NonPositiveValues, PartialResults, SchemaVersionMismatch, TooFewPoints
from thinfilm.seminorm import F_energy, SplitConfig
from thinfilm.sweep import (CSV_COLUMNS, SweepRecord, dumps_record, fit_power, fit_rate, read_results, run_sweep,
                            write_csv, write_results, write_svg)


@pytest.fixture(scope="module")
def native_records():
    return run_sweep(from_dict(config_dict()))


def test_one_record_per_eps(native_records):
    assert [r.eps for r in native_records] == [0.2, 0.1, 0.05]
    for r in native_records:
        assert r.s == pytest.approx(1 - math.sqrt(r.eps))
        assert r.scaled_value == r.meta["scale"] * r.energy.value
        assert r.predicted_limit == pytest.approx(math.pi / 2, rel=1e-12)
        assert r.ratio == r.scaled_value / r.predicted_limit
        assert r.wall_time_ms == 0


def test_constant_records_are_exact():
    recs = run_sweep(from_dict(config_dict(function="const")))
    assert all(r.scaled_value == 0.0 and r.ratio is None and r.exact for r in recs)


def test_membrane_prediction():
    cfg = from_dict(config_dict(path={"kind": "LogCritical", "param": 0.5, "eps_list": [0.1, 0.05, 0.02]},
                                scaling={"kind": "Membrane"}))
    recs = run_sweep(cfg)
    assert all(r.predicted_limit == pytest.approx(0.25 * math.pi / 2, rel=1e-12) for r in recs)
    assert all(r.meta["scale"] == pytest.approx(1 / r.eps) for r in recs)


def test_supercritical_prediction_is_zero():
    cfg = from_dict(config_dict(path={"kind": "FixedS", "param": 0.75, "eps_list": [0.1, 0.05, 0.02]},
                                scaling={"kind": "Membrane"}))
    assert all(r.predicted_limit == 0.0 and r.ratio is None for r in run_sweep(cfg))


def test_power_alpha_uses_G():
    cfg = from_dict(config_dict(path={"kind": "FixedS", "param": 0.75, "eps_list": [0.2, 0.1, 0.05]},
                                scaling={"kind": "PowerAlpha", "alpha": 1.0}))
    recs = run_sweep(cfg)
    assert all(r.energy.meta["functional"] == "G" for r in recs)
    assert all(r.predicted_limit == 0.0 for r in recs)


def test_vertical_field_has_no_native_limit():
    recs = run_sweep(from_dict(config_dict(function="x2")))
    assert all(math.isnan(r.predicted_limit) and r.ratio is None for r in recs)


def test_partial_results(monkeypatch):
    import thinfilm.sweep as sweep_mod
    from thinfilm.errors import DegenerateSampling

    real = sweep_mod.F_energy

    def flaky(u, dom, s, cfg, seed):
        if dom.eps < 0.15:
            raise DegenerateSampling("forced failure")
        return real(u, dom, s, cfg, seed)

    monkeypatch.setattr(sweep_mod, "F_energy", flaky)
    with pytest.raises(PartialResults) as info:
        run_sweep(from_dict(config_dict()))
    assert [r.eps for r in info.value.records] == [0.2]


def test_deterministic(native_records, monkeypatch):
    monkeypatch.setenv("THINFILM_THREADS", "3")
    again = run_sweep(from_dict(config_dict()))
    assert [dumps_record(r) for r in again] == [dumps_record(r) for r in native_records]


def test_results_round_trip(native_records, tmp_path):
    p = tmp_path / "r.ndjson"
    write_results(native_records, p)
    assert read_results(p) == native_records
    lines = p.read_text().splitlines()
    assert all('"schema_version": 1' in ln for ln in lines)


def test_non_finite_round_trip(tmp_path):
    cfg = from_dict(config_dict(function="x2"))
    recs = run_sweep(cfg)
    p = tmp_path / "r.ndjson"
    write_results(recs, p)
    back = read_results(p)
    assert all(math.isnan(r.predicted_limit) for r in back)


def test_empty_results(tmp_path):
    p = tmp_path / "e.ndjson"
    write_results([], p)
    assert p.read_text() == ""
    assert read_results(p) == []


def test_schema_mismatch(native_records, tmp_path):
    p = tmp_path / "r.ndjson"
    p.write_text(dumps_record(native_records[0]).replace('"schema_version": 1', '"schema_version": 7') + "\n")
    with pytest.raises(SchemaVersionMismatch):
        read_results(p)


def test_csv(native_records, tmp_path):
    p = tmp_path / "s.csv"
    write_csv(native_records, p)
    rows = [ln.split(",") for ln in p.read_text().splitlines()]
    assert tuple(rows[0]) == CSV_COLUMNS == ("eps", "s", "scaled_value", "std_error", "predicted", "ratio")
    assert [float(r[0]) for r in rows[1:]] == [0.2, 0.1, 0.05]
    assert float(rows[1][5]) == native_records[0].ratio


def test_svg_is_deterministic(native_records, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    write_svg(native_records, a, "t")
    write_svg(native_records, b, "t")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("<svg") or a.read_text().startswith("<?xml")


def test_fit_power_exact():
    x = np.array([0.2, 0.1, 0.05, 0.02])
    fit = fit_power(x, x**1.5)
    assert fit.exponent == pytest.approx(1.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 4


def test_fit_errors(native_records):
    with pytest.raises(TooFewPoints):
        fit_rate(native_records[:2])
    with pytest.raises(NonPositiveValues):
        fit_power([0.1, 0.2, 0.3], [1.0, 0.0, 2.0])
    assert fit_rate(native_records, y="raw").n_points == 3


def test_doubling_budget_reduces_std_error():
    dom = make_thin_film(2, [0], [1], 0.1)
    u = linear_horizontal([1.0])
    small = [F_energy(u, dom, 0.8, SplitConfig(0.25, 10_000, 10_000), seed).std_error for seed in range(10)]
    large = [F_energy(u, dom, 0.8, SplitConfig(0.25, 20_000, 20_000), seed).std_error for seed in range(10)]
    assert np.mean(small) / np.mean(large) >= 1.2


def test_record_round_trip_dict(native_records):
    r = native_records[0]
    assert SweepRecord.from_dict(r.to_dict()) == r
