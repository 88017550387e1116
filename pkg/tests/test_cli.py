import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from liouvillian.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_darboux_search_recovers_quadratic_pair():
    code, text = run("darboux", "search", "--family", "duffing", "--n", "3", "--deg", "2")
    assert code == 0
    assert "x^2 + 2*y^2 + 4/3*y + 2/9 ; K = -2*y - 4/3" in text


def test_darboux_search_expect_found(capsys):
    code, text = run("darboux", "search", "--family", "duffing", "--n", "3", "--omega0sq", "1/4",
                     "--deg", "2", "--expect-found")
    assert code == 2
    assert "no irreducible" in capsys.readouterr().err
    assert "reducible=true" in text


def test_darboux_conditions_json():
    code, text = run("darboux", "conditions", "--family", "duffing", "--n", "3", "--param", "omega0sq",
                     "--format", "json-lines")
    assert code == 0
    recs = [json.loads(line) for line in text.splitlines()]
    assert "2/9" in {r["value"] for r in recs}


def test_exp_elements():
    code, text = run("exp-elements", "--family", "gen-dvdp", "--n", "3")
    assert code == 0
    assert "exp((x)/(x + 3/2*y + 3/8)) ; K = 2*x" in text


def test_integral_build_gen_dvdp():
    code, text = run("integral", "build", "--family", "gen-dvdp", "--n", "3")
    assert code == 0
    rec = json.loads(text)
    assert rec["kind"] == "Kummer1F1"
    assert rec["hyper_params"] == ["1/3", "4/3"]


def test_integral_eval_is_deterministic():
    a = run("integral", "eval", "--family", "duffing", "--n", "5", "--at", "1,0")
    b = run("integral", "eval", "--family", "duffing", "--n", "5", "--at", "1,0")
    assert a == b and a[0] == 0
    assert "I1" in a[1]
    value = float(a[1].splitlines()[0].split(",")[-1])
    assert value == 3.1595056746316752


def test_integral_eval_on_boundary(capsys):
    code, _ = run("integral", "eval", "--family", "duffing", "--n", "3", "--at", "0.6,-0.2", "--integral", "I1")
    assert code == 2
    assert "boundary" in capsys.readouterr().err


def test_integral_eval_point_without_any_integral(capsys):
    code, text = run("integral", "eval", "--family", "duffing", "--n", "5", "--at", "0.5,0.2", "--at", "0,0")
    assert code == 2
    assert len(text.splitlines()) == 2
    assert "boundary" in capsys.readouterr().err


def test_options_are_not_abbreviated(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("family = dvdp\n")
    with pytest.raises(SystemExit):
        run("--conf", str(cfg), "chebyshev", "check")


def test_integral_eval_time_dependent():
    code, text = run("integral", "eval", "--family", "dvdp", "--n", "3", "--at", "1,0", "--integral", "J")
    assert code == 0
    assert float(text.split(",")[-1]) == pytest.approx(19 / 12, rel=1e-15)


def test_specfun_eval_and_domain():
    assert run("specfun", "eval", "--fn", "2f1", "--params", "1,1,2", "--z", "0.5") == (0, "1.3862943611198901\n")
    assert run("specfun", "eval", "--fn", "2f1", "--params", "1,1,2", "--z", "1.5")[0] == 2
    assert run("specfun", "eval", "--fn", "1f1", "--params", "1,1,2", "--z", "1")[0] == 2


def test_chebyshev_check():
    assert "non-elementary" in run("chebyshev", "check", "--family", "duffing", "--n", "3")[1]
    assert ": elementary" in run("chebyshev", "check", "--family", "dvdp", "--n", "7")[1]
    assert ": elementary" in run("chebyshev", "check", "--p", "0", "--q", "1", "--r", "1")[1]
    assert run("chebyshev", "check", "--p", "0", "--q", "1", "--r", "0")[0] == 2
    assert run("chebyshev", "check", "--p", "0")[0] == 2


def test_verify_zero_time():
    code, text = run("verify", "run", "--families", "dvdp", "--ns", "3", "--trajectories", "2", "--t-end", "0")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["family", "n", "region", "integral", "p0_u", "p0_v", "drift", "pass"]
    assert len(rows) > 1
    assert all(len(r) == 8 and float(r[6]) == 0.0 and r[7] == "true" for r in rows[1:])


def test_verify_reproducible(tmp_path):
    argv = ["verify", "run", "--families", "gen-dvdp", "--ns", "3", "--trajectories", "100", "--seed", "7",
            "--t-end", "1"]
    a = run(*argv)
    b = run(*argv)
    assert a[0] == 0 and a[1] == b[1]
    assert len(a[1].splitlines()) > 100


def test_verify_failure_exit_code():
    code, _ = run("verify", "run", "--families", "dvdp", "--ns", "3", "--trajectories", "2",
                  "--t-end", "2", "--threshold", "1e-30")
    assert code == 3


def test_portrait_outputs(tmp_path):
    prefix = tmp_path / "g"
    code, _ = run("portrait", "emit", "--family", "gen-dvdp", "--n", "3", "--resolution", "21",
                  "--out-prefix", str(prefix))
    assert code == 0
    csv = (tmp_path / "g.csv").read_text().splitlines()
    assert csv[0] == "u,v,value,region,masked" and len(csv) == 21 * 21 + 1
    ET.fromstring((tmp_path / "g.svg").read_text())
    code, text = run("portrait", "emit", "--family", "duffing", "--n", "3", "--resolution", "2", "--format", "csv")
    assert code == 0 and len(text.splitlines()) == 5
    assert run("portrait", "emit", "--resolution", "1")[0] == 2
    assert run("portrait", "emit", "--u-range", "1,-1")[0] == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# exact values\nfamily = dvdp\nn = 3\nintegral = J\nat = 1,0; 0,0\n")
    code, text = run("--config", str(cfg), "integral", "eval")
    values = [float(line.split(",")[-1]) for line in text.splitlines()]
    assert code == 0 and values == [pytest.approx(19 / 12), 0.0]
    # a flag beats the file
    code, text = run("--config", str(cfg), "integral", "eval", "--family", "duffing", "--at", "1,0")
    assert code == 0 and text.splitlines() == ["1,0,J,all,0.30555555555555558"]
    assert run("integral", "eval")[0] == 2


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run("--config", str(bad), "specfun", "eval", "--fn", "2f1", "--z", "0")[0] == 2
    bad.write_text("just a line\n")
    assert run("--config", str(bad), "specfun", "eval", "--fn", "2f1", "--z", "0")[0] == 2


def test_unknown_family_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("integral", "eval", "--family", "pendulum", "--at", "1,0")
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "liouvillian", "chebyshev", "check", "--family", "dvdp"],
                         capture_output=True, text=True, check=True)
    assert "elementary" in res.stdout
