"""Command-line harness: config parsing, outputs, exit codes."""

import json

import numpy as np
import pytest

from shockmesh import SchemeKind, evolution_constant
from shockmesh.cli import ConfigError, build_run_config, main, parse_config

BASE_CONFIG = """\
# short smoke run
problem = transport
scheme = richtmyer
n = 40
cfl = 0.5

t_final = 0.02
"""


def write_config(tmp_path, text=BASE_CONFIG, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_config_defaults_and_comments():
    settings = parse_config(BASE_CONFIG)
    assert settings["problem"] == "transport"
    assert settings["scheme"] == "richtmyer"
    assert settings["n"] == 40
    assert settings["cfl"] == 0.5
    assert settings["t_final"] == 0.02
    assert settings["adaptive"] is True
    assert settings["epsilon"] == 1e-15
    assert settings["pw"] == 0.9
    assert settings["eps_corr"] == 0.2
    assert settings["remesh_reps"] == 1
    assert settings["x0"] == 0.5


@pytest.mark.parametrize(
    "bad",
    [
        BASE_CONFIG + "n = 50\n",  # duplicate
        BASE_CONFIG + "mystery = 1\n",  # unknown key
        BASE_CONFIG + "just a line\n",  # not key=value
        BASE_CONFIG.replace("n = 40", "n = forty"),
        BASE_CONFIG.replace("cfl = 0.5", "cfl = fast"),
        BASE_CONFIG.replace("scheme = richtmyer", "scheme = upwind"),
        BASE_CONFIG.replace("problem = transport", "problem = traffic"),
        BASE_CONFIG + "adaptive = maybe\n",
        BASE_CONFIG.replace("t_final = 0.02\n", ""),  # missing required
    ],
)
def test_parse_config_rejections(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_build_run_config_maps_every_knob():
    settings = parse_config(
        BASE_CONFIG
        + "epsilon = 1e-12\npw = 0.8\neps_corr = 0.3\nremesh_reps = 2\nx0 = 0.4\n"
        + "adaptive = false\n"
    )
    cfg = build_run_config(settings)
    assert cfg.scheme is SchemeKind.RICHTMYER
    assert cfg.n == 40
    assert cfg.cfl_target == 0.5
    assert cfg.final_time == 0.02
    assert cfg.adaptive is False
    assert cfg.estimator.floor == 1e-12
    assert cfg.estimator.power == 0.8
    assert cfg.guard is not None
    assert cfg.guard.nudge_factor == 0.3
    assert cfg.guard.growth_constant == evolution_constant(SchemeKind.RICHTMYER, 0.5)
    assert cfg.remesh_repetitions == 2
    assert cfg.jump_position == 0.4


def test_build_run_config_wraps_validation_errors():
    settings = parse_config(BASE_CONFIG.replace("cfl = 0.5", "cfl = 1.5"))
    with pytest.raises(ConfigError):
        build_run_config(settings)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def test_simulate_writes_outputs_and_exits_zero(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", str(cfg), str(out)]) == 0

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert manifest["config"]["problem"] == "transport"
    assert "blow_up_step" not in manifest

    header, rows = read_rows(out / "tv_series.csv")
    assert header == "step,time,tv,tvi,evolution_ratio,max_A,avg_A,a_n,E1"
    assert len(rows) == manifest["steps"]
    steps = [int(r[0]) for r in rows]
    assert steps == list(range(1, len(rows) + 1))
    times = [float(r[1]) for r in rows]
    assert all(b > a for a, b in zip(times, times[1:]))
    assert times[-1] == pytest.approx(0.02, rel=1e-12)

    header, rows = read_rows(out / "snapshots.csv")
    assert header == "step,time,node_index,x,u"
    snap_steps = sorted({int(r[0]) for r in rows})
    assert snap_steps[0] == 0
    assert snap_steps[-1] == manifest["steps"]
    first = [r for r in rows if int(r[0]) == 0]
    assert [int(r[2]) for r in first] == list(range(40))
    assert float(first[0][3]) == 0.0 and float(first[-1][3]) == 1.0
    xs = np.array([float(r[3]) for r in first])
    assert np.array_equal(xs, np.linspace(0.0, 1.0, 40))


def test_simulate_parse_error_exits_two_without_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path, BASE_CONFIG + "mystery = 1\n")
    out = tmp_path / "never"
    assert main(["simulate", str(cfg), str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_simulate_missing_config_exits_two(tmp_path, capsys):
    out = tmp_path / "never"
    assert main(["simulate", str(tmp_path / "absent.cfg"), str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_simulate_blow_up_exits_three_with_partial_outputs(tmp_path, capsys):
    text = BASE_CONFIG.replace("problem = transport", "problem = burgers")
    text = text.replace("scheme = richtmyer", "scheme = ftcs")
    text = text.replace("n = 40", "n = 100")
    text = text.replace("t_final = 0.02", "t_final = 0.3")
    text += "adaptive = false\n"
    cfg = write_config(tmp_path, text)
    out = tmp_path / "out"
    assert main(["simulate", str(cfg), str(out)]) == 3
    assert "blew up" in capsys.readouterr().err

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "blow_up"
    assert manifest["blow_up_step"] == manifest["steps"] + 1
    _, rows = read_rows(out / "tv_series.csv")
    assert len(rows) == manifest["steps"] > 0
    assert (out / "snapshots.csv").exists()


def test_simulate_is_deterministic(tmp_path):
    cfg = write_config(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", str(cfg), str(out_a)]) == 0
    assert main(["simulate", str(cfg), str(out_b)]) == 0
    for name in ("snapshots.csv", "tv_series.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_theory_writes_full_triangle(tmp_path):
    out = tmp_path / "bounds.csv"
    argv = ["theory", "--lambda", "0.1", "--c", "1.0", "--m", "1.0",
            "--kmax", "10", str(out)]
    assert main(argv) == 0
    header, rows = read_rows(out)
    assert header == (
        "m,k,E_recursion,E_closed_form,uniform_bound,contribution,"
        "partial_sum,B1,B2"
    )
    assert len(rows) == 10 * 11 // 2
    pairs = [(int(r[0]), int(r[1])) for r in rows]
    assert pairs == [(m, k) for k in range(1, 11) for m in range(1, k + 1)]

    first = [float(v) for v in rows[0][2:]]
    # k=1: E = lambda * a_1 with a_1 = c*m = 1; contribution likewise
    assert first[0] == pytest.approx(0.1, rel=1e-15)
    assert first[1] == pytest.approx(0.1, rel=1e-15)
    assert first[2] == pytest.approx(1.0 / 7.0, rel=1e-14)
    assert first[3] == pytest.approx(0.1, rel=1e-15)
    assert first[4] == first[0]  # partial sum of a single entry
    assert first[5] == pytest.approx(7.0 / 3.0, rel=1e-14)
    assert first[6] == pytest.approx(1.0 / 3.0, rel=1e-14)

    # partial sums within a column are running and end at the column sum
    col10 = [r for r in rows if int(r[1]) == 10]
    running = 0.0
    for r in col10:
        running += float(r[2])
        assert float(r[6]) == pytest.approx(running, rel=1e-12)


def test_theory_is_deterministic(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    argv = ["theory", "--lambda", "0.17", "--c", "0.9", "--m", "1.3", "--kmax", "25"]
    assert main(argv + [str(out_a)]) == 0
    assert main(argv + [str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["--lambda", "0.1", "--c", "1.0", "--m", "1.0", "--kmax", "0"],
        ["--lambda", "0.1", "--c", "1.0", "--m", "1.0", "--kmax", "61"],
        ["--lambda", "0.3", "--c", "1.0", "--m", "1.0", "--kmax", "10"],  # coupling
        ["--lambda", "0.0", "--c", "1.0", "--m", "1.0", "--kmax", "10"],
        ["--lambda", "0.1", "--c", "-1.0", "--m", "1.0", "--kmax", "10"],
        ["--lambda", "0.1", "--c", "1.0", "--m", "0.0", "--kmax", "10"],
    ],
)
def test_theory_gates_exit_two_without_output(tmp_path, capsys, argv):
    out = tmp_path / "bounds.csv"
    assert main(["theory", *argv, str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_tv_series_round_trips_record_floats(tmp_path):
    from shockmesh import run_simulation

    cfg_path = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", str(cfg_path), str(out)]) == 0
    _, rows = read_rows(out / "tv_series.csv")

    config = build_run_config(parse_config(BASE_CONFIG))
    result = run_simulation(config)
    assert len(rows) == result.steps
    for row, rec in zip(rows, result.records):
        assert float(row[2]) == rec.tv
        assert float(row[4]) == rec.evolution_ratio
        assert float(row[5]) == rec.max_score
        assert float(row[7]) == rec.increase
