import subprocess
import sys

import pytest

from pseudowell import sweep
from pseudowell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_module_entry_point(tmp_path):
    out = tmp_path / "fig1a.csv"
    subprocess.run([sys.executable, "-m", "pseudowell", "figure", "fig1a", "-o", str(out)], check=True)
    assert out.read_text() == sweep.emit_figure("fig1a")


def test_figure_to_stdout(capsys):
    code, out, _ = run(capsys, "figure", "fig2c")
    assert code == 0
    assert out.startswith("k,abs_rL2,abs_rR2\n")


def test_usage_errors(capsys):
    assert run(capsys, "figure", "fig9z")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "sweep", "--family", "I")[0] == 2
    assert run(capsys, "bound", "--family", "I", "--v0", "1", "--a", "-1")[0] == 2
    code, _, err = run(capsys, "sweep", "missing.conf")
    assert code == 2 and "cannot read config" in err


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0


def test_sweep_config_with_override(tmp_path, capsys):
    conf = tmp_path / "s.conf"
    conf.write_text("family = I\nswept = lam\nstart = 0\nstop = 1.5\ncount = 7\nv0 = 1\na = 1\n"
                    "outputs = beta\n")
    code, out, _ = run(capsys, "sweep", str(conf), "--count", "3")
    assert code == 0
    assert out.splitlines() == ["lam,beta", "0.0,0.4351308590367095", "0.75,0.24146891775445015", "1.5,"]


def test_sweep_to_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", "--family", "II", "--swept", "k", "--start", "0.5", "--stop", "2",
                       "--count", "4", "--v0", "1", "--a", "1", "--lam", "0.5",
                       "--outputs", "tR,dev_L", "--oracle", "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[0] == "k,tR_re,tR_im,dev_L"


def test_bound_and_scatter(capsys):
    code, out, _ = run(capsys, "bound", "--family", "I", "--v0", "1", "--a", "1")
    assert code == 0
    assert out.splitlines()[1].startswith("0.4351308590367095,0.0,")
    code, out, _ = run(capsys, "bound", "--family", "I", "--v0", "1", "--a", "1", "--lam", "2")
    assert code == 0 and out.splitlines() == ["beta_re,beta_im,energy_re,energy_im,residual"]
    code, out, _ = run(capsys, "scatter", "--family", "II", "--v0", "1", "--a", "1", "--lam", "0.5",
                       "--k", "0.5", "1.5")
    assert code == 0 and len(out.splitlines()) == 3


def test_bound_complex(capsys):
    code, out, _ = run(capsys, "bound", "--family", "I", "--v0", "2.4674011002723395", "--a", "1",
                       "--lam", "1.58", "--complex")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert float(rows[0][1]) == -float(rows[1][1]) != 0


def test_nonconvergence_exit_code(capsys):
    code, _, err = run(capsys, "bound", "--family", "I", "--v0", "1", "--a", "1", "--lam", "1.5",
                       "--complex", "--seed", "10+10j")
    assert code == 1 and "search domain" in err


@pytest.mark.parametrize("fault", [None, "flip-jump", "corrupt-t"])
def test_check_exit_codes(capsys, fault):
    argv = ["check", "--perturbative-series", "rederived"] + (["--inject", fault] if fault else [])
    code, out, err = run(capsys, *argv)
    assert out == ""
    assert code == (0 if fault is None else 1)
    assert ("FAIL" in err) == (fault is not None)


def test_default_check_names_failing_item(capsys):
    code, _, err = run(capsys, "check")
    assert code == 1
    assert "FAILED: perturbative-order (printed)" in err
