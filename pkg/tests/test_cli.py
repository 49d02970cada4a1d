from __future__ import annotations

import json
import subprocess
import sys

import pytest

from instab.cli import main
from instab.config import Kind, parse_config
from instab.errors import ConfigError
from instab.presets import list_presets

PRESETS = ["prop-2Dprop", "prop-nil", "prop-Gallprop", "prop-one", "prop-tthree",
           "prop-2dim", "prop-nprop", "prop-exscal", "prop-prodprop"]

QUICK = {"experiments": [
    {"name": "jordan", "kind": "VERIFY_BOUND", "check": "jordan",
     "params": {"grid": 5, "steps": 2000}},
    {"name": "sim", "kind": "SIMULATE",
     "params": {"map": {"tag": "SHIFT_MULT", "p": 1, "weights": {"kind": "log_special"}},
                "delta": 1e-3, "steps": 50, "seeds": 2}},
    {"name": "borderline", "kind": "SANDWICH", "expect": "FAIL",
     "params": {"gamma": 1.0, "deltas": [1e-12], "eta": 0.0031173245422307628, "weights": 50}},
]}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
    return str(p)


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    assert capsys.readouterr().out.split() == PRESETS
    assert list_presets() == PRESETS


def test_empty_config_exits_zero(tmp_path):
    out = tmp_path / "out"
    assert main(["run", _write(tmp_path, {"experiments": []}), "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["exit_code"] == 0


def test_quick_suite_and_expected_failure(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", _write(tmp_path, QUICK), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    verdicts = {e["name"]: e["verdict"] for e in summary["experiments"]}
    assert verdicts == {"jordan": "PASS", "sim": "EVIDENCE_ONLY", "borderline": "FAIL"}
    for name in verdicts:
        assert (out / name / "data.csv").read_text().count("\n") >= 2
        assert json.loads((out / name / "report.json").read_text())["verdict"] == verdicts[name]
    assert "UNMET" not in capsys.readouterr().out


def test_unmet_expectation_exits_two(tmp_path):
    doc = {"experiments": [dict(QUICK["experiments"][2], expect="PASS")]}
    assert main(["run", _write(tmp_path, doc), "--out", str(tmp_path / "o")]) == 2


def test_runtime_error_exits_one(tmp_path):
    # delta too large for any positive step count
    doc = {"experiments": [{"name": "s", "kind": "SANDWICH", "params": {"deltas": [0.5]}}]}
    out = tmp_path / "o"
    assert main(["run", _write(tmp_path, doc), "--out", str(out)]) == 1
    assert "ValueError" in (out / "s" / "error.txt").read_text()


def test_runs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, QUICK)
    for d in ("a", "b"):
        assert main(["run", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("jordan", "sim", "borderline"):
        for f in ("data.csv", "report.json"):
            assert (tmp_path / "a" / name / f).read_bytes() == (tmp_path / "b" / name / f).read_bytes()


def test_jobs_match_serial(tmp_path):
    cfg = _write(tmp_path, QUICK)
    assert main(["run", cfg, "--out", str(tmp_path / "s")]) == 0
    assert main(["run", cfg, "--out", str(tmp_path / "p"), "--jobs", "2"]) == 0
    assert (tmp_path / "s" / "summary.json").read_bytes() == (tmp_path / "p" / "summary.json").read_bytes()


def test_output_dir_precedence(tmp_path, monkeypatch):
    doc = {"experiments": [], "output_dir": str(tmp_path / "cfg")}
    cfg = _write(tmp_path, doc)
    assert main(["run", cfg]) == 0 and (tmp_path / "cfg" / "summary.json").exists()
    monkeypatch.setenv("INSTAB_OUT_DIR", str(tmp_path / "env"))
    assert main(["run", cfg]) == 0 and (tmp_path / "env" / "summary.json").exists()
    assert main(["run", cfg, "--out", str(tmp_path / "arg")]) == 0
    assert (tmp_path / "arg" / "summary.json").exists()


@pytest.mark.parametrize("text,line,needle", [
    ('{\n  "experiments": [\n    {"name": "a", "kind": "CONE",}\n  ]\n}', 3, "malformed JSON"),
    ('{\n  "experiments": [],\n  "outdir": "x"\n}', 3, "unknown key 'outdir'"),
    ('{"experiments": [\n  {"name": "a",\n   "kind": "CONE",\n   "colour": 1}\n]}', 4, "unknown key 'colour'"),
    ('{"experiments": [\n  {"name": "a",\n   "kind": "CONE",\n   "params": {\n     "sedes": 3}}\n]}',
     5, "unknown parameter 'sedes'"),
    ('{"experiments": [\n  {"name": "a",\n   "kind": "CONE",\n   "params": {\n     "seeds": "many"}}\n]}',
     5, "wrong type"),
    ('{"experiments": [\n  {"name": "a",\n   "kind": "MAGIC"}\n]}', 3, "'kind' must be"),
    ('{"experiments": [\n  {"name": "a", "kind": "CONE"},\n  {"name": "a", "kind": "CONE"}\n]}',
     3, "duplicate"),
    ('{"experiments": [\n  {"name": "a", "kind": "CONE",\n   "check": "jordan"}\n]}', 3, "not available"),
    ('{"experiments": [\n  {"name": "a", "kind": "SIMULATE"}\n]}', 2, "missing parameters ['map']"),
    ('{"experiments": [\n  {"name": "a", "kind": "SIMULATE",\n   "params": {\n     "map": {"tag": "NOPE"}}}\n]}',
     4, "invalid map"),
    ('{"experiments": [\n  {"name": "a", "kind": "CONE",\n   "expect": "MAYBE"}\n]}', 3, "'expect'"),
])
def test_config_errors_carry_line(tmp_path, capsys, text, line, needle):
    cfg = _write(tmp_path, text)
    with pytest.raises(ConfigError) as exc:
        parse_config(text, cfg)
    assert str(exc.value).startswith(f"{cfg}:{line}: ")
    assert needle in str(exc.value)
    assert main(["run", cfg, "--out", str(tmp_path / "o")]) == 1
    assert f"{cfg}:{line}:" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_unknown_map_key_rejected():
    with pytest.raises(ConfigError, match="invalid map"):
        parse_config(json.dumps({"experiments": [
            {"name": "a", "kind": "SIMULATE", "params": {"map": {"tag": "JORDAN2D", "rho": 2}}}]}))


def test_missing_file_and_bad_jobs(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == 1
    assert main(["run", _write(tmp_path, {"experiments": []}), "--jobs", "0"]) == 1


def test_unknown_preset_and_kinds():
    assert main(["run", "--preset", "prop-none"]) == 1
    assert {k.value for k in Kind} == {"SIMULATE", "VERIFY_BOUND", "CERTIFY_INSTABILITY",
                                       "CERTIFY_STABILITY", "REMAINDER_PROFILE", "CONE",
                                       "SANDWICH", "CHARSOLVER"}


@pytest.mark.parametrize("name", PRESETS)
def test_each_preset_runs_standalone(tmp_path, name):
    assert main(["run", "--preset", name, "--out", str(tmp_path)]) == 0


def test_bundled_suite_meets_every_expectation(tmp_path):
    assert main(["run", "--suite", "--out", str(tmp_path), "--jobs", "4"]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert len(summary["experiments"]) == 12
    assert {e["name"]: e["verdict"] for e in summary["experiments"]}["sandwich_borderline"] == "FAIL"


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "instab.cli", "presets"], capture_output=True, text=True)
    assert proc.returncode == 0 and "prop-one" in proc.stdout
