import csv
import json

import pytest

from hbcalc.cli import fmt, main


def _run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out), "--grid-size", "1024"])
    return code, out


def _report(out):
    with open(out / "report.csv", newline="") as fh:
        return list(csv.reader(fh))


def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_fmt():
    assert fmt(0.5) == "0.5"
    assert fmt(3) == "3"
    assert fmt(True) == "true"
    assert fmt(1 - 2j) == "1-2j"


def test_mate_run(tmp_path):
    code, out = _run(tmp_path, "mate", "--set", "symbol=rz(0.5)")
    assert code == 0
    rows = {r[0]: r[1] for r in _report(out)[1:]}
    assert float(rows["a(0)"]) == pytest.approx(3**0.5 / 2)
    summary = (out / "summary.txt").read_text()
    assert "kind: mate" in summary and "exit: 0" in summary


def test_outputs_are_deterministic(tmp_path):
    _, a = _run(tmp_path, "completeness", "--set", "count=5", name="a")
    _, b = _run(tmp_path, "completeness", "--set", "count=5", name="b")
    for fname in ("report.csv", "summary.txt"):
        assert (a / fname).read_bytes() == (b / fname).read_bytes()
    assert not [p for p in a.iterdir() if p.name.startswith(".")]


def test_config_file_and_debug_dumps(tmp_path):
    conf = tmp_path / "clark.conf"
    conf.write_text("alpha = -1\ndebug = true\n")
    code, out = _run(tmp_path, "clark", "--config", str(conf))
    assert code == 0
    rows = {r[0]: r[1] for r in _report(out)[1:]}
    assert float(rows["total_mass"]) == pytest.approx(1 / 3)
    assert sorted(p.name for p in (out / "debug").iterdir()) == ["a.csv", "b.csv", "density.csv"]


@pytest.mark.parametrize(
    "argv,case",
    [
        (["--set", "c=0"], "modulus_lt_1"),
        (["--set", "c=2"], "modulus_gt_1_not_outer"),
        (["--set", "c=-1"], "unimodular_ac"),
    ],
)
def test_classify(tmp_path, argv, case):
    code, out = _run(tmp_path, "classify", *argv)
    assert code == 0
    assert _report(out)[1][:2] == ["case", case]


@pytest.mark.parametrize("kind", ["lift", "kernel", "cyclicity", "gr"])
def test_other_kinds_run(tmp_path, kind):
    extra = ["--set", "degrees=[4, 8]"] if kind == "cyclicity" else []
    code, out = _run(tmp_path, kind, *extra)
    assert code == 0
    assert len(_report(out)) > 1


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("HBCALC_TRUNCATION", "100")
    out = tmp_path / "env"
    assert main(["mate", "--out", str(out), "--grid-size", "1024"]) == 0
    monkeypatch.setenv("HBCALC_TRUNCATION", "900")
    assert main(["mate", "--out", str(out), "--grid-size", "1024"]) == 3


def test_verify_empty_and_single_preset(tmp_path):
    code, out = _run(tmp_path, "verify", "--no-presets")
    assert code == 0 and len(_report(out)) == 1
    code, out = _run(tmp_path, "verify", "--preset", "rz(0.5)", name="rz")
    rows = _report(out)[1:]
    assert code == 0 and rows and all(r[7] == "pass" for r in rows)


@pytest.mark.parametrize(
    "argv,status,error",
    [
        (["nonsense"], 2, "parse"),
        (["mate", "--set", "oops"], 2, "parse"),
        (["mate", "--set", "symbol=rz(2)"], 3, "validation"),
        (["mate", "--grid-size", "1000"], 3, "validation"),
        (["kernel", "--set", "lam=0.99"], 4, "conditioning"),
        (["gr", "--set", "r_gr=0.9"], 4, "divergence"),
        (["mate", "--config", "/nonexistent/file"], 2, "parse"),
    ],
)
def test_error_exits(tmp_path, capsys, argv, status, error):
    assert main([*argv, "--out", str(tmp_path / "x")]) == status
    err = _error(capsys)
    assert err["exit"] == status and err["reason"]
    assert err["error"] == error
    assert not (tmp_path / "x").exists()
