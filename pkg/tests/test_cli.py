import json

import pytest

from irrper import cli
from irrper.report import parse_report


def run_main(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def period_text():
    rep, code = cli.run(cli.RunConfig(mode="period", lam="2+0i", precision="double"))
    return rep, code, rep.to_json(timings=False)


def test_period_lambda_2(period_text):
    rep, code, text = period_text
    assert code == 0
    data = parse_report(text)
    names = {r["name"] for r in data["results"]}
    assert {"theorem_value", "period_assembled", "sigma_det", "rank2_limit_extrapolated"} <= names
    for r in data["results"]:
        assert r["error"] is not None and r["ref"]
    assert data["branch"]["sqrt_branch"] == "principal"
    assert data["passed"]


def test_period_deterministic(period_text):
    _, _, text = period_text
    rep2, _ = cli.run(cli.RunConfig(mode="period", lam="2+0i", precision="double"))
    assert rep2.to_json(timings=False) == text


def test_period_assembled_is_pi_squared_multiple(period_text):
    rep, _, _ = period_text
    r = {x.name: x for x in rep.results}
    ratio = complex(r["assembled_over_pi2"].value)
    assert abs(ratio.imag) < 1e-6 * abs(ratio)


def test_approx_csv(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, err = run_main(["approx", "--lambda", "2+0i", "--m", "20,25,30,35,40,50,60,70,80", "--format", "csv",
                             "--out", str(out)], capsys)
    assert code == 0, err
    text = out.read_text()
    assert text.startswith("# approx")
    assert "limit," in text


def test_approx_coarse_list_is_convergence_failure(capsys):
    code, out, _ = run_main(["approx", "--lambda", "2", "--m", "10,20,40,80", "--no-timings"], capsys)
    assert code == 2
    data = json.loads(out)
    assert data["tables"]["approx"]


@pytest.mark.parametrize("argv", [
    ["approx", "--lambda", "2"],
    ["period"],
    ["period", "--lambda", "1"],
    ["period", "--lambda", "nonsense"],
    ["period", "--lambda", "2", "--tol", "0.5"],
    ["period", "--lambda", "2", "--m", "30,20"],
    ["bogus"],
    ["period", "--lambda", "2", "--config", "/nonexistent/file"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run_main(argv, capsys)
    assert code == 1
    assert err


def test_env_precision(monkeypatch, capsys):
    monkeypatch.setenv("IRRPER_PRECISION", "fancy")
    code, _, _ = run_main(["period", "--lambda", "2"], capsys)
    assert code == 1
    monkeypatch.setenv("IRRPER_PRECISION", "extended")
    cfg, _ = cli.config_from_args(["period", "--lambda", "2"])
    assert cfg.precision == "extended"
    cfg, _ = cli.config_from_args(["period", "--lambda", "2", "--precision", "double"])
    assert cfg.precision == "double"


def test_config_file_flags_win(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# run\nmode = approx\nlambda = 3+1i\nm = 20,30,40\nprecision = extended\nno-timings = true\n")
    cfg, _ = cli.config_from_args(["--config", str(f)])
    assert (cfg.mode, cfg.lam, cfg.m, cfg.precision, cfg.timings) == ("approx", "3+1i", (20, 30, 40), "extended", False)
    cfg, _ = cli.config_from_args(["--config", str(f), "--lambda", "2", "--precision", "double"])
    assert (cfg.lam, cfg.precision, cfg.m) == ("2", "double", (20, 30, 40))


def test_config_file_rejects_unknown(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("colour = blue\n")
    with pytest.raises(cli.UsageError):
        cli.config_from_args(["--config", str(f)])


def test_direct_mode_warns_in_double(capsys, caplog):
    code, out, err = run_main(["direct", "--lambda", "2", "--no-timings"], capsys)
    assert code == 0
    assert "extended" in caplog.text
    data = json.loads(out)
    r = {x["name"]: x for x in data["results"]}
    assert abs(r["det_over_pi2"]["value"]["re"] + 64 / 9) < 1e-6


def test_exceptional_both_roots(capsys):
    code, out, _ = run_main(["exceptional", "--no-timings"], capsys)
    data = json.loads(out)
    assert {"exceptional+", "exceptional-"} <= set(data["branch"])
    r = {x["name"]: x for x in data["results"]}
    assert "+limit" in r and "-limit" in r
    assert code == 0
