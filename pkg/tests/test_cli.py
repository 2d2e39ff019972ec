import json
import subprocess
import sys

import pytest

from ppa.cli import main
from ppa.frontend import parse_model


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_ticket(capsys, models_dir):
    code, out, _ = run(capsys, "check", models_dir / "ticket2.ppa")
    assert code == 0
    assert out.splitlines()[0] == "Verified"


def test_check_inconclusive_exit_code(capsys, models_dir):
    code, out, _ = run(capsys, "check", models_dir / "ticket2.ppa", "--prop", "AG(z <= 0)")
    assert code == 2 and out.startswith("Inconclusive")


def test_missing_file(capsys):
    code, _, err = run(capsys, "check", "missing.ppa")
    assert code >= 64
    assert "missing.ppa" in err


def test_usage_errors(capsys, models_dir):
    assert run(capsys, "frobnicate")[0] >= 64
    assert run(capsys, "check", models_dir / "ticket2.ppa", "--widening-seed", "x")[0] >= 64
    assert run(capsys, "check", models_dir / "ticket2.ppa", "--prop", "AG(")[0] >= 64


def test_precondition_error(capsys, models_dir):
    code, _, err = run(capsys, "cegaar", models_dir / "ticket2.ppa")
    assert code >= 64 and "not covered" in err


def test_cegaar_json(capsys, models_dir):
    code, out, _ = run(capsys, "cegaar", models_dir / "ticket2.ppa",
                       "--preds", models_dir / "ticket2.preds", "--json")
    report = json.loads(out)
    assert code == 0
    assert set(report) == {"verdict", "property", "predicates", "refinements", "iterations",
                           "elapsed_ms"}
    assert report["refinements"] == {"abst": 0, "appr": 0}
    assert report["predicates"] == ["z = 1", "z <= 0"]


def test_cegaar_violation_dumps_witness(capsys, models_dir, tmp_path):
    path = tmp_path / "w.json"
    code, out, _ = run(capsys, "cegaar", models_dir / "overflow.ppa",
                       "--preds", models_dir / "overflow.preds", "--json", "--dump-witness", path)
    assert code == 1
    report = json.loads(out)
    dumped = json.loads(path.read_text())
    assert dumped == report["witness"]
    assert all(set(step) == {"cube", "point", "formula_node"} for step in dumped)


def test_abstract_emits_parsable_model(capsys, models_dir):
    code, out, _ = run(capsys, "abstract", models_dir / "ticket2.ppa",
                       "--preds", models_dir / "ticket2.preds")
    assert code == 0
    m = parse_model(out)
    assert "z" not in m.names and {"b1", "b2"} <= set(m.names)


def test_oracle(capsys, models_dir):
    assert run(capsys, "oracle", models_dir / "overflow.ppa")[0] == 1
    assert run(capsys, "oracle", models_dir / "lasso.ppa", "--box", "x=-1:4")[0] == 0
    assert run(capsys, "oracle", models_dir / "lasso.ppa")[0] >= 64


@pytest.mark.parametrize("flags", [[], ["--widening-seed", "0", "--over-approx-bound", "3"]])
def test_cegaar_flags(capsys, models_dir, flags):
    code, _, _ = run(capsys, "cegaar", models_dir / "step2.ppa",
                     "--preds", models_dir / "step2.preds", *flags)
    assert code == 0


def test_console_script_and_log_level(models_dir):
    proc = subprocess.run([sys.executable, "-m", "ppa.cli", "cegaar", str(models_dir / "step2.ppa"),
                           "--preds", str(models_dir / "step2.preds")],
                          capture_output=True, text=True, env={"PPA_LOG": "info"})
    assert proc.returncode == 0
    assert "divergence ABST" in proc.stderr
