import json
import math
import os

import numpy as np
import pytest

from bandkern.cli import emit_plot_data, main, run, validate_summary


def write_config(tmp_path, name, **overrides):
    base = {
        "roots": {"angles": ["0", "1/2"]},
        "weights": {"kind": "powerlaw", "p": 2.0},
        "experiment": "divergence-example",
        "truncations": [256, 512, 1024],
        "tolerance": 1e-8,
        "seed": 7,
    }
    base.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(base))
    return str(path)


def read_summary(prefix):
    with open(prefix + ".summary.json") as fh:
        return json.load(fh)


def test_divergence_example_run(tmp_path):
    cfgp = write_config(tmp_path, "div.json")
    prefix = str(tmp_path / "out")
    assert run(cfgp, out=prefix) == 0
    summary = read_summary(prefix)
    validate_summary(summary)
    assert summary["verdicts"]["column_growth"] == "likely-unbounded"
    assert summary["measurements"]["c_2_0"] == pytest.approx(-7.0 / 16.0, abs=1e-12)
    lines = open(prefix + ".series.csv").read().splitlines()
    assert lines[0] == "experiment,index,quantity,value"
    c2m = [float(l.split(",")[3]) for l in lines[1:]
           if l.split(",")[2] == "c_2m_0_abs"]
    assert len(c2m) == 200
    assert all(b < a for a, b in zip(c2m, c2m[1:]))     # monotone convergence
    assert c2m[-1] >= 0.3                               # nonzero limit


def test_kernel_eval_run(tmp_path):
    cfgp = write_config(
        tmp_path, "kern.json",
        roots={"angles": ["0"]},
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        experiment="kernel-eval",
        points=[["z1", "z1"]],
        tolerance=1e-8,
    )
    prefix = str(tmp_path / "kern_out")
    assert run(cfgp, out=prefix) == 0
    lines = open(prefix + ".series.csv").read().splitlines()[1:]
    values = {l.split(",")[2]: float(l.split(",")[3]) for l in lines}
    assert values["kernel_re"] == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-8)
    assert values["tail_bound"] <= 1e-8


def test_empty_truncations_is_config_error(tmp_path):
    cfgp = write_config(tmp_path, "bad.json", truncations=[])
    assert run(cfgp, out=str(tmp_path / "bad_out")) == 2


def test_unsorted_truncations_is_config_error(tmp_path):
    cfgp = write_config(tmp_path, "bad2.json", truncations=[512, 256])
    assert run(cfgp, out=str(tmp_path / "bad2_out")) == 2


def test_unknown_experiment_is_config_error(tmp_path):
    cfgp = write_config(tmp_path, "bad3.json", experiment="nope")
    assert run(cfgp, out=str(tmp_path / "bad3_out")) == 2


def test_missing_config_file():
    assert run("/nonexistent/config.json") == 2


def test_numerical_failure_exit_code(tmp_path):
    # boundary kernel value diverges for powerlaw p <= 1/2
    cfgp = write_config(
        tmp_path, "num.json",
        weights={"kind": "powerlaw", "p": 0.4},
        experiment="kernel-eval",
        points=[["z1", "z1"]],
    )
    prefix = str(tmp_path / "num_out")
    assert run(cfgp, out=prefix) == 3
    diag = read_summary(prefix)
    assert diag["status"] == "error"


def test_expect_verdict_unaffirmed(tmp_path):
    cfgp = write_config(tmp_path, "exp.json", expect_verdict="likely-bounded")
    assert run(cfgp, out=str(tmp_path / "exp_out")) == 4


def test_expect_verdict_affirmed(tmp_path):
    cfgp = write_config(
        tmp_path, "exp2.json",
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        experiment="containment",
        truncations=[128, 256, 512],
        expect_verdict="likely-bounded",
    )
    assert run(cfgp, out=str(tmp_path / "exp2_out")) == 0


def test_determinism_byte_identical(tmp_path):
    cfgp = write_config(
        tmp_path, "det.json",
        experiment="decomposition",
        roots={"angles": ["0", "1/2"]},
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        truncations=[128, 256],
        seed=123,
        trials=3,
    )
    p1, p2 = str(tmp_path / "det1"), str(tmp_path / "det2")
    assert run(cfgp, out=p1) == 0
    assert run(cfgp, out=p2) == 0
    csv1 = open(p1 + ".series.csv", "rb").read()
    csv2 = open(p2 + ".series.csv", "rb").read()
    assert csv1 == csv2


def test_identities_run(tmp_path):
    cfgp = write_config(
        tmp_path, "ids.json",
        roots={"angles": ["0", "1/3", "2/3"]},
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        experiment="identities",
        truncations=[64],
        seed=5,
    )
    prefix = str(tmp_path / "ids_out")
    assert run(cfgp, out=prefix) == 0
    summary = read_summary(prefix)
    assert summary["verdicts"]["identities"] == "pass"
    assert summary["measurements"]["max_louck_residual"] <= 1e-9


def test_domain_run(tmp_path):
    cfgp = write_config(
        tmp_path, "dom.json",
        roots={"angles": ["0"]},
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        experiment="domain",
        truncations=[1 << 22],
        points=["z1", {"re": 0.0}],
    )
    prefix = str(tmp_path / "dom_out")
    assert run(cfgp, out=prefix) == 0
    summary = read_summary(prefix)
    assert summary["verdicts"]["point_0"] == "converging"
    assert summary["verdicts"]["point_1"] == "converging"


def test_multiplier_run(tmp_path):
    cfgp = write_config(
        tmp_path, "mul.json",
        roots={"angles": ["0"]},
        weights={"kind": "harmonic", "p": 1.0, "offset": 2.0},
        experiment="multiplier",
        truncations=[128, 256, 512],
    )
    prefix = str(tmp_path / "mul_out")
    assert run(cfgp, out=prefix) == 0
    summary = read_summary(prefix)
    assert summary["verdicts"]["mz_growth"] == "likely-bounded"
    assert summary["measurements"]["constant_sup_error"] <= 1e-6


def test_plot_emission(tmp_path):
    cfgp = write_config(tmp_path, "plot.json", truncations=[128, 256])
    prefix = str(tmp_path / "plot_out")
    assert run(cfgp, out=prefix) == 0
    series = prefix + ".series.csv"
    assert emit_plot_data(series) == 0
    dat = prefix + ".series.c_2m_0_abs.dat"
    assert os.path.exists(dat)
    for line in open(dat).read().splitlines():
        x, y = line.split(" ")
        float(x), float(y)
    assert os.path.exists(prefix + ".series.column0_l2.dat")


def test_plot_missing_series():
    assert emit_plot_data("/nonexistent/series.csv") == 2


def test_main_entrypoint(tmp_path):
    cfgp = write_config(tmp_path, "m.json", truncations=[64, 128])
    assert main(["run", cfgp, "--out", str(tmp_path / "m_out")]) == 0
    assert main(["plot", str(tmp_path / "m_out.series.csv")]) == 0


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("BANDKERN_THREADS", "2")
    cfgp = write_config(tmp_path, "t.json", truncations=[64, 128])
    prefix = str(tmp_path / "t_out")
    assert run(cfgp, out=prefix) == 0
    assert read_summary(prefix)["threads"] == 2
