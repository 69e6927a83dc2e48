"""Command-line behaviour: outputs, determinism and exit codes."""

import json
import subprocess
import sys

import pytest

from delayed_csit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "2", "6", "3", "4")
    assert code == 0
    assert out.splitlines()[0] == "S2"


def test_classify_json_swapped(capsys):
    code, out, _ = run(capsys, "classify", "6", "2", "4", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["swapped"] is True
    assert data["normalized"] == [2, 6, 3, 4]
    assert data["derived"]["delta"] == "3/2"


def test_region_json_exact(capsys):
    code, out, _ = run(capsys, "region", "2", "2", "1", "1")
    data = json.loads(out)
    assert code == 0
    assert data["tight"] is True
    assert ["2/3", "2/3"] in data["regions"]["achievable"]["vertices"]
    assert data["sum_dof"]["achievable"] == "4/3"


def test_region_svg(capsys, tmp_path):
    target = tmp_path / "r.svg"
    code, out, _ = run(capsys, "region", "2", "6", "3", "4", "--format", "svg", "--output", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("<svg") and "T9 (9/5, 11/5)" in text


def test_verify_corner_json(capsys):
    code, out, _ = run(capsys, "verify-corner", "2", "6", "3", "4", "T9", "--trials", "3")
    data = json.loads(out)
    assert code == 0
    assert data["verified"] is True and data["dof"] == ["9/5", "11/5"]


def test_verify_corner_csv_deterministic(capsys):
    args = ("verify-corner", "2", "2", "1", "1", "symmetric", "--trials", "4", "--format", "csv", "--seed", "3")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    assert a.splitlines()[1].startswith("3,C4,P3,")


def test_verify_rank_counterexample(capsys):
    code, out, _ = run(capsys, "verify-rank", "2", "6", "3", "4", "--W", "3", "--W1", "3", "--W2", "1", "--trials", "5")
    data = json.loads(out)
    # prediction and replay agree that receiver two fails
    assert code == 0
    assert data["rank_terms"][1]["predicted_rank"] == 11
    assert data["receiver_decode_rates"] == ["1/1", "0/1"]


def test_verify_rank_flags_formula_disagreement(capsys):
    code, out, _ = run(capsys, "verify-rank", "1", "3", "1", "2", "--W", "5", "--W1", "4", "--W2", "2", "--trials", "2")
    assert code == 2
    assert json.loads(out)["formula_matches_replay"] is False


def test_miso(capsys):
    code, out, _ = run(capsys, "miso", "3", "3", "--trials", "3")
    data = json.loads(out)
    assert code == 0
    assert data["upper_sum_dof"] == "15/7" and data["sum_dof"] == "9/7"


@pytest.mark.parametrize(
    "argv",
    [
        ("classify", "0", "1", "1", "1"),
        ("classify", "x", "1", "1", "1"),
        ("verify-corner", "2", "6", "3", "4", "T8"),
        ("miso", "3", "2"),
        ("miso", "1", "2"),
        ("verify-rank", "2", "2", "1", "1", "--W", "2", "--W1", "3", "--W2", "1"),
        ("sweep", "2", "1", "--checks", "nope"),
        ("bogus",),
    ],
)
def test_validation_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


def test_io_error_exit_three(capsys, tmp_path):
    code, _, err = run(capsys, "classify", "1", "1", "1", "1", "--output", str(tmp_path / "missing" / "x.txt"))
    assert code == 3 and "I/O" in err


def test_sweep_small_clean(capsys):
    code, out, _ = run(capsys, "sweep", "3", "2", "--checks", "classify,regions,corners", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["violations"] == 0


def test_sweep_rank_violation_exit_two(capsys):
    code, out, _ = run(capsys, "sweep", "3", "1", "--checks", "rank", "--max-w", "5", "--format", "text")
    assert code == 2
    assert "rank-formula" in out


def test_sweep_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("DELAYED_CSIT_THREADS", "zero")
    code, _, err = run(capsys, "sweep", "2", "1", "--checks", "classify")
    assert code == 1 and "DELAYED_CSIT_THREADS" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "delayed_csit", "classify", "2", "2", "1", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.strip().startswith("C4")
