import csv
import json
import math

import pytest

from subwave import __version__
from subwave.cli import run
from subwave.experiment import ConfigError, load_config

C1 = {"spec": {"variant": "stable", "alpha": 0.5}, "profile": {"kind": "logistic"},
      "v": 1.0, "eps": 0.05, "beta": 0.5,
      "t_grid": {"t_min": 1e2, "t_max": 1e6, "points": 9}}


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def data_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_density_tau_zero_row(tmp_path):
    assert run(["density", "--alpha", "0.5", "--t", "1", "--tau-max", "5",
                "--out", str(tmp_path)]) == 0
    rows = data_rows(tmp_path / "density.csv")
    assert list(rows[0]) == ["t", "tau", "G"]
    assert float(rows[0]["tau"]) == 0.0
    assert float(rows[0]["G"]) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-6)
    assert float(rows[0]["G"]) == pytest.approx(0.564190, abs=5e-7)


def test_every_output_has_header(tmp_path):
    cfg = load_config(None, {"spec": {"variant": "stable", "alpha": 0.5}})
    for cmd in ("density", "subordinate", "gfd-check"):
        out = tmp_path / cmd
        assert run([cmd, "--t", "1", "2", "--out", str(out)]) == 0
        for f in out.iterdir():
            text = f.read_text()
            if f.suffix == ".csv":
                first = text.splitlines()[0]
                assert first.startswith(f"# subwave {__version__} config=")
            else:
                prov = json.loads(text)["provenance"]
                assert prov["version"] == __version__
                assert len(prov["config_sha256"]) == 64
    assert len(cfg.digest) == 64


def test_schemas(tmp_path):
    assert run(["subordinate", "--t", "1", "--out", str(tmp_path)]) == 0
    assert list(data_rows(tmp_path / "wave.csv")[0]) == ["t", "x", "psiE"]
    assert run(["front", "--t", "10", "100", "--out", str(tmp_path)]) == 0
    rows = data_rows(tmp_path / "front.csv")
    assert list(rows[0]) == ["t", "x_beta", "beta", "side"]
    assert {r["side"] for r in rows} == {"lower", "upper", "exact"}


def test_idempotent_and_thread_independent(tmp_path):
    cfg = write(tmp_path, "mc.json", {"mc": {"points": 3, "samples": 2000}, "seed": 11})
    for i, threads in enumerate(("1", "1", "4")):
        assert run(["mc-check", "--config", cfg, "--threads", threads,
                    "--out", str(tmp_path / f"mc{i}")]) == 0
        assert run(["front", "--t", "10", "100", "1000", "--threads", threads,
                    "--out", str(tmp_path / f"fr{i}")]) == 0
    for stem in ("mc", "fr"):
        runs = [outputs(tmp_path / f"{stem}{i}") for i in range(3)]
        assert runs[0] == runs[1] == runs[2]
    assert run(["mc-check", "--config", cfg, "--seed", "12", "--out", str(tmp_path / "mc9")]) == 0
    assert outputs(tmp_path / "mc9") != outputs(tmp_path / "mc0")


def test_mc_check_reports_step_gate(tmp_path):
    cfg = write(tmp_path, "mc.json", {"mc": {"points": 2, "samples": 5000}})
    assert run(["mc-check", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "mc.json").read_text())
    assert rep["step_gate"]["pass"] and len(rep["points"]) == 2
    assert data_rows(tmp_path / "mc_hist.csv")[0].keys() == {"bin_lo", "bin_hi", "count"}


def test_bad_configs_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", {**C1, "beta": 0.01})
    assert run(["verify", "--config", bad, "--out", str(tmp_path)]) == 2
    assert "bad config" in capsys.readouterr().err
    assert run(["front", "--config", write(tmp_path, "u.json", {"bogus": 1})]) == 2
    assert run(["verify", "--config", write(tmp_path, "g.json",
                                            {"spec": {"variant": "gamma", "a": 1, "b": 1}})]) == 2
    assert run(["density", "--config", str(tmp_path / "missing.json")]) == 2
    assert run(["density", "--alpha", "1.5"]) == 2
    assert not list(tmp_path.glob("*.csv"))


def test_numerical_failure_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, "g.json", {"spec": {"variant": "gamma", "a": 1, "b": 1}})
    code = run(["density", "--config", cfg, "--t", "1e6", "--tau-max", "2e6",
                "--out", str(tmp_path / "o")])
    assert code == 3
    assert "stage 'density'" in capsys.readouterr().err


def test_verify_c1_reports_honestly(tmp_path):
    # step fits pass; the smooth front sits below the lower law (see the ledger)
    code = run(["verify", "--config", write(tmp_path, "c1.json", C1), "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "report.json").read_text())
    assert [f["pass"] for f in rep["fits"]] == [True, True]
    for f in rep["fits"]:
        assert f["fitted"] == pytest.approx(0.5, abs=0.05)
    assert code == (0 if rep["pass"] else 1)
    assert rep["pass"] == rep["bound"]["pass"]


def test_gfd_check_passes(tmp_path):
    assert run(["gfd-check", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "gfd.json").read_text())
    assert all(c["pass"] for c in rep["checks"])


def test_config_validation():
    with pytest.raises(ConfigError):
        load_config('{"eps": 0.6}')
    with pytest.raises(ConfigError):
        load_config("not json")
    a = load_config(json.dumps(C1))
    b = load_config(json.dumps(dict(reversed(list(C1.items())))))
    assert a.digest == b.digest
    assert len(a.t_values) == 9 and a.t_values[0] == pytest.approx(100.0)
