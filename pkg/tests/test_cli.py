import json
import subprocess
import sys

import pytest

from helpers import config_dict
from thinfilm.cli import build_parser, main

SMALL_CHECKS = {"functions": ["const", "x1"], "s_list": [0.8], "seeds": [0], "eps": 0.2, "r": 0.05}


def write_cfg(tmp_path, **changes):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(config_dict(**changes)))
    return str(p)


@pytest.mark.parametrize("argv", [["--help"], ["energy", "--help"], ["sweep", "--help"], ["check", "--help"]])
def test_help_exits_zero(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_help_documents_every_flag():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        for action in p._actions:
            assert action.help, (name, action.dest)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "thinfilm", "--help"], capture_output=True, text=True)
    assert out.returncode == 0


def energy(capsys, *extra):
    code = main(["energy", "--d", "2", "--omega", "0,1", "--eps", "0.1", *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_energy_constant(capsys):
    code, out, _ = energy(capsys, "--fn", "const:1", "--s", "0.8", "--n", "1000")
    assert code == 0
    assert json.loads(out)["value"] == 0.0


def test_energy_dense_matches_mc(capsys):
    _, out, _ = energy(capsys, "--fn", "x1", "--s", "0.8", "--n", "200000", "--seed", "1")
    mc = json.loads(out)
    _, out, _ = energy(capsys, "--fn", "x1", "--s", "0.8", "--method", "dense", "--grid", "48")
    dense = json.loads(out)
    assert set(mc) >= {"value", "std_error", "method", "seed"}
    assert abs(mc["value"] - dense["value"]) <= 3 * (mc["std_error"] ** 2 + dense["std_error"] ** 2) ** 0.5


@pytest.mark.parametrize("extra, fragment", [
    (["--fn", "x1", "--s", "1.2"], "s must lie in (0,1)"),
    (["--fn", "x1+", "--s", "0.8"], "expected operand"),
    (["--fn", "x1", "--s", "0.4", "--functional", "G"], "s must lie in"),
])
def test_energy_invalid(capsys, extra, fragment):
    code, _, err = energy(capsys, *extra)
    assert code == 2
    assert fragment in err


def test_energy_estimator_error(capsys):
    code, _, err = energy(capsys, "--fn", "x1", "--s", "0.8", "--method", "dense", "--grid", "200")
    assert code == 3
    assert "BudgetExceeded" in err


def test_sweep_writes_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["sweep", cfg]) == 0
    for name in ("out.ndjson", "out.csv", "out.svg"):
        assert (tmp_path / name).stat().st_size > 0
    first = {n: (tmp_path / n).read_bytes() for n in ("out.ndjson", "out.csv", "out.svg")}
    out_dir = tmp_path / "again"
    assert main(["sweep", cfg, "--out-dir", str(out_dir)]) == 0
    assert all((out_dir / n).read_bytes() == b for n, b in first.items())
    assert "ratio=" in capsys.readouterr().out


def test_sweep_seed_override(tmp_path):
    cfg = write_cfg(tmp_path)
    main(["sweep", cfg, "--out-dir", str(tmp_path / "a")])
    main(["sweep", cfg, "--seed", "5", "--out-dir", str(tmp_path / "b")])
    assert (tmp_path / "a/out.ndjson").read_bytes() != (tmp_path / "b/out.ndjson").read_bytes()


def test_sweep_missing_file(tmp_path, capsys):
    assert main(["sweep", str(tmp_path / "nope.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_sweep_partial(tmp_path, monkeypatch):
    import thinfilm.sweep as sweep_mod
    from thinfilm.errors import DegenerateSampling

    real = sweep_mod.F_energy

    def flaky(u, dom, s, cfg, seed):
        if dom.eps < 0.15:
            raise DegenerateSampling("forced failure")
        return real(u, dom, s, cfg, seed)

    monkeypatch.setattr(sweep_mod, "F_energy", flaky)
    assert main(["sweep", write_cfg(tmp_path)]) == 4
    assert len((tmp_path / "out.ndjson").read_text().splitlines()) == 1


def test_check_constant(tmp_path, capsys):
    cfg = write_cfg(tmp_path, checks={"functions": ["const", "x1", "x1^2", "sin(2pi x1)"]})
    assert main(["check", "constant", cfg]) == 0
    out = capsys.readouterr().out
    assert "non-constant" in out and "FAIL" not in out


def test_check_lemma1(tmp_path, capsys):
    assert main(["check", "lemma1", write_cfg(tmp_path, checks=SMALL_CHECKS)]) == 0
    assert capsys.readouterr().out.count("PASS") == 2


def test_check_prop4(tmp_path, capsys):
    assert main(["check", "prop4", write_cfg(tmp_path, checks=SMALL_CHECKS)]) == 0


def test_check_prop4_bad_sigma(tmp_path, capsys):
    assert main(["check", "prop4", write_cfg(tmp_path, sigma=0.6)]) == 2
    assert "sigma must lie in (0, 1/2)" in capsys.readouterr().err


def test_check_thickfilm(tmp_path, capsys):
    cfg = write_cfg(tmp_path, path={"kind": "ThickFilm", "param": 1.0, "eps_list": [0.3, 0.2, 0.1]},
                    checks={"functions": ["x1"]})
    assert main(["check", "thickfilm", cfg]) == 0


def test_check_failure_exit_code(tmp_path, capsys):
    # a diagnostic that cannot separate the cases: the cutoffs barely shrink
    cfg = write_cfg(tmp_path, checks={"functions": ["x1"], "cutoffs": [0.1, 0.099]})
    assert main(["check", "constant", cfg]) == 5
    assert "FAIL" in capsys.readouterr().out
