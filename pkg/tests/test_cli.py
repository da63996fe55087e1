import json
from pathlib import Path

import pytest

from gadgetforge.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gadget_list(capsys):
    code, out, _ = run(capsys, "gadget", "list")
    assert code == 0
    assert "aklt-su3" in out.split() and "sud-coupling" in out.split()


def test_classify_stoquastic_set(capsys, tmp_path):
    out = tmp_path / "s1.json"
    code, text, _ = run(capsys, "classify", "--in", DATA / "s1.json", "--out", out)
    assert code == 0
    assert "LA_STOQUASTIC_UNIVERSAL" in text
    rep = json.loads(out.read_text())
    assert rep["verdict"]["class"] == "LA_STOQUASTIC_UNIVERSAL"


def test_classify_second_set(capsys, tmp_path):
    code, text, _ = run(capsys, "classify", "--in", DATA / "s2.json", "--out", tmp_path / "s2.json")
    assert code == 0
    assert text.strip()


def test_gadget_run_passes(capsys, tmp_path):
    code, _, err = run(capsys, "gadget", "run", "aklt-su3", "--out", tmp_path / "a.json")
    assert code == 0 and not err


def test_failing_gadget_names_checks(capsys, tmp_path):
    code, _, err = run(capsys, "gadget", "run", "sud-coupling", "--d", 2, "--out", tmp_path / "c.json")
    assert code == 1
    assert "FAILED" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("gadget", "run", "no-such-gadget"),
        ("gadget", "run", "aklt-su3", "--d", "2"),
        ("classify", "--in", "/nonexistent/file.json"),
        ("paper-suite", "--only", "x"),
        ("paper-suite", "--only", "99"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_json_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "classify", "--in", bad)
    assert code == 2 and "not valid JSON" in err


def test_reports_are_byte_identical_and_meta_has_timestamp(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "gadget", "run", "aklt-su3", "--out", a)
    run(capsys, "gadget", "run", "aklt-su3", "--out", b)
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads(Path(str(a) + ".meta.json").read_text())
    assert "timestamp" in meta and "version" in meta
    assert "timestamp" not in a.read_text()


def test_gadget_delta_sweep_writes_plot(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _, _ = run(capsys, "gadget", "run", "aklt-su3", "--delta-sweep", "1e2:1e6:5", "--out", out)
    assert code == 0
    png = list(tmp_path.glob("*.png"))
    assert png and png[0].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_sweep_order_one(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, text, _ = run(capsys, "sweep", "--order", 1, "--delta-sweep", "1e2:1e8:7", "--out", out)
    assert code == 0
    assert "order 1" in text
    assert list(tmp_path.glob("*.png"))


def test_maxdcut_cycle(capsys, tmp_path):
    out = tmp_path / "m.json"
    code, _, _ = run(capsys, "maxdcut", "--graph", DATA / "cycle4.json", "--d", 2, "--out", out)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["classical_penalty"] == 0


def test_simcheck_data_files(capsys, tmp_path):
    out = tmp_path / "sim.json"
    code, _, _ = run(
        capsys, "simcheck",
        "--hsim", DATA / "hsim.json", "--htarget", DATA / "htarget.json",
        "--isometry", DATA / "isometry.json", "--delta", 1.0,
        "--eta-max", 1e-9, "--eps-max", 1e-9, "--out", out,
    )
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["rank_match"]


def test_paper_suite_subset(capsys, tmp_path):
    out = tmp_path / "suite.json"
    code, text, _ = run(capsys, "paper-suite", "--only", "1,11", "--out", out)
    assert code == 0
    assert text.count("[PASS]") == 2
    rep = json.loads(out.read_text())
    assert rep["passed"] == rep["total"] == 2
