import math
from pathlib import Path

import numpy as np
import pytest

from bucklesense import io
from bucklesense.cli import main
from bucklesense.config import RunConfig
from bucklesense.elastica import force_displacement_curve
from bucklesense.errors import ConfigError, TraceParseError
from bucklesense.estimator import StiffnessEstimate

EXAMPLE = Path(__file__).resolve().parents[1] / "configs" / "example.cfg"


def test_example_config_parses():
    cfg = RunConfig.from_file(EXAMPLE)
    assert cfg.lengths == (42e-3, 44e-3, 46e-3, 48e-3, 50e-3)
    assert [t.name for t in cfg.tissues] == ["soft", "hard"]
    assert cfg.seed == 7 and cfg.protocol.noise_pm == 2.0
    assert len(cfg.kappa_grid) == 64


@pytest.mark.parametrize("text,key", [
    ("", "<config>"),
    ("beam.colour = red", "beam.colour"),
    ("beam.r_fbg = abc", "beam.r_fbg"),
    ("beam.lengths = 42e-3, -1", "beam.lengths"),
    ("tissue.a.E_t = 1e5", "tissue.a.nu"),
    ("tissue.a.nu = 0.4\ntissue.a.E_t = 1e5\ntissue.a.stiff = 1", "tissue.a.stiff"),
    ("seed = -3", "seed"),
    ("layout.count = 4", "layout.count"),
    ("beam.lengths = 20e-3", "layout.peaks"),
    ("just text", "<config>:1"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text(text)
    assert info.value.key == key


def test_any_positive_length_accepted():
    cfg = RunConfig.from_text("beam.lengths = 33e-3, 60e-3")
    assert cfg.lengths == (33e-3, 60e-3)


def test_curve_csv_round_trip(tmp_path, beam):
    curve = force_displacement_curve(beam, np.geomspace(2, 500, 8))
    io.write_curve_csv(tmp_path / "c.csv", curve)
    back = io.read_curve_csv(tmp_path / "c.csv", beam)
    np.testing.assert_allclose(back.P, curve.P, rtol=1e-11)
    io.write_curve_csv(tmp_path / "d.csv", back)
    assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "d.csv").read_bytes()


def test_trace_round_trip_is_lossless(tmp_path, stiff_trial):
    noisy = stiff_trial.with_noise(2.0, 3)
    noisy.force[:4] = math.nan
    io.write_trace(tmp_path / "t.csv", noisy)
    back = io.read_trace(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.encoder, noisy.encoder)
    np.testing.assert_array_equal(back.d_lambda, noisy.d_lambda)
    np.testing.assert_array_equal(np.isnan(back.force), np.isnan(noisy.force))
    np.testing.assert_array_equal(back.force[4:], noisy.force[4:])
    assert back.beam_length == noisy.beam_length
    assert float(back.meta["truth.delta_i"]) == noisy.meta["truth.delta_i"]


def test_report_round_trip(tmp_path):
    est = StiffnessEstimate(1.0 / 3.0 * 1e6, 3, 9, 6e-5, 1.36, 0.042, False, 0.0, 0.0)
    io.write_report(tmp_path / "r.csv", [("a", est)])
    (row,) = io.read_report(tmp_path / "r.csv")
    assert row["E_t_Pa"] == est.E_t and row["buckling_idx"] == 9 and row["outlier"] is False


@pytest.mark.parametrize("body,line", [
    ("", 1),
    ("index,encoder_m\n", 1),
    ("index,encoder_m,dl1_pm,dl2_pm,dl3_pm,force_N\n0,0.0,1,2,3,\n1,1e-5,1,2\n", 3),
    ("index,encoder_m,dl1_pm,dl2_pm,dl3_pm,force_N\n0,0.0,1,2,x,\n", 2),
    ("index,encoder_m,dl1_pm,dl2_pm,dl3_pm,force_N\n0,1.0,1,2,3,\n1,0.5,1,2,3,\n", 3),
])
def test_trace_parse_errors_carry_line(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(TraceParseError) as info:
        io.read_trace(p, beam_length=0.042)
    assert info.value.line == line


SMALL = """
beam.lengths = 42e-3
solver.kappa_count = 12
tissue.stiff.E_t = 1e6
tissue.stiff.nu = 0.49
tissue.firm.E_t = 500e3
tissue.firm.nu = 0.49
protocol.travel = 2.4e-3
seed = 1
"""


@pytest.fixture()
def small_cfg(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(SMALL)
    return p


def test_cli_pipeline(tmp_path, small_cfg, capsys):
    out = tmp_path / "o"
    assert main(["curve", "--config", str(small_cfg), "--out", str(out)]) == 0
    assert main(["simulate", "--config", str(small_cfg), "--out", str(out)]) == 0
    traces = sorted(str(p) for p in out.glob("trial_*.csv"))
    assert [Path(t).name for t in traces] == ["trial_firm_42.csv", "trial_stiff_42.csv"]
    assert main(["estimate", "--config", str(small_cfg), "--out", str(out), *traces]) == 0
    rows = io.read_report(out / "estimates.csv")
    for row, truth in zip(rows, (500e3, 1e6)):
        assert row["E_t_Pa"] == pytest.approx(truth, rel=0.05)
    assert "mean RMSE" in (out / "summary.txt").read_text()
    curve = io.read_curve_csv(out / "curve_42.csv", RunConfig.from_file(small_cfg).beam)
    assert curve.P[0] == pytest.approx(1.3530622682234194, rel=5e-3)


def test_cli_exit_codes(tmp_path, small_cfg):
    empty = tmp_path / "empty.cfg"
    empty.write_text("# nothing\n")
    assert main(["curve", "--config", str(empty)]) == 1
    assert main(["curve", "--config", str(tmp_path / "missing.cfg")]) == 1
    assert main(["bogus"]) == 1
    assert main(["simulate", "--config", str(small_cfg), "--seed", "-1"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("")
    assert main(["estimate", "--config", str(small_cfg), "--out", str(tmp_path), str(bad)]) == 1
    short = tmp_path / "short.cfg"
    short.write_text(SMALL.replace("2.4e-3", "1.2e-3"))
    assert main(["simulate", "--config", str(short), "--out", str(tmp_path / "s")]) == 2


def test_cli_estimate_flags_numerical_failure(tmp_path, small_cfg):
    flat = tmp_path / "flat.csv"
    flat.write_text("index,encoder_m,dl1_pm,dl2_pm,dl3_pm,force_N\n0,0.0,0,0,0,0\n1,1e-5,0,0,0,0.1\n")
    (tmp_path / "flat.meta").write_text("beam.length = 0.042\ntissue.nu = 0.49\n")
    assert main(["estimate", "--config", str(small_cfg), "--out", str(tmp_path / "e"), str(flat)]) == 2


def test_simulate_without_tissues_is_noop(tmp_path, caplog):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("beam.lengths = 42e-3\n")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    assert not out.exists()
    assert "no tissues" in caplog.text


def test_sink_depth_ordering_in_meta(tmp_path):
    cfg = tmp_path / "c.cfg"
    lines = ["beam.lengths = 42e-3", "protocol.travel = 3.7e-3", "solver.kappa_count = 8"]
    for E in (100, 300, 500, 1000):
        lines += [f"tissue.t{E}.E_t = {E}e3", f"tissue.t{E}.nu = 0.49"]
    cfg.write_text("\n".join(lines))
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    depths = [float(io.read_kv(out / f"trial_t{E}_42.meta")["truth.delta_i"]) for E in (100, 300, 500, 1000)]
    assert np.all(np.diff(depths) < 0)
