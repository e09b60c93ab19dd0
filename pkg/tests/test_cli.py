import json
import subprocess
import sys
from pathlib import Path

import pytest

from mehler.cli import dump_json, main

GOLDEN = Path(__file__).parent / "golden"


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_mehler_exit_zero(capsys):
    code, out, _ = run(["verify", "--family", "mehler", "--order", "8", "--workers", "1"], capsys)
    assert code == 0
    assert "mehler N=8: matched [classical]" in out


def test_verify_gcmf_json_golden(capsys):
    code, out, _ = run(["verify", "--family", "gcmf", "--shifts", "1,1,1", "--order", "4",
                        "--format", "json", "--no-timings", "--workers", "1"], capsys)
    assert code == 0
    assert out == (GOLDEN / "verify_gcmf_111.json").read_text()
    report = json.loads(out)
    assert set(report) == {"command", "config", "instances", "summary"}
    inst = report["instances"][0]
    assert {"family", "shifts", "order", "variants", "elapsed_ms", "matched_variant"} <= set(inst)
    assert dump_json(report) == out


def test_verify_text_golden(capsys):
    code, out, _ = run(["verify", "--family", "carlitz-bilinear", "--shifts", "2,1", "--order", "8",
                        "--no-timings", "--workers", "1"], capsys)
    assert code == 0
    assert out == (GOLDEN / "verify_bilinear_21.txt").read_text()


def test_verify_bad_order_is_usage_error(capsys):
    code, _, err = run(["verify", "--family", "gcmf", "--order", "-1"], capsys)
    assert code == 2
    assert "order" in err


@pytest.mark.parametrize("args", [
    ["verify", "--family", "gcmf", "--shifts", "1,1"],
    ["verify", "--family", "nonsense"],
    ["verify", "--family", "gcmf", "--variant", "nonsense"],
    ["verify", "--budget-terms", "0"],
    ["frobnicate"],
])
def test_usage_errors(args, capsys):
    code, _, _ = run(args, capsys)
    assert code == 2


def test_single_wrong_variant_is_mismatch(capsys):
    code, out, _ = run(["verify", "--family", "carlitz-bilinear", "--shifts", "2,1", "--order", "6",
                        "--variant", "denominator=sqrt(1-t^2)", "--workers", "1"], capsys)
    assert code == 1
    assert "NO MATCH" in out


def test_budget_exceeded_exit_code(capsys):
    code, out, _ = run(["verify", "--family", "gcmf", "--shifts", "2,2,2", "--order", "5",
                        "--budget-terms", "10", "--format", "json", "--workers", "1"], capsys)
    assert code == 3
    assert json.loads(out)["summary"]["budget_exceeded"] == 1


def test_worker_count_does_not_change_report(capsys):
    args = ["verify", "--family", "srivastava", "--order", "3", "--format", "json", "--no-timings"]
    _, one, _ = run(args + ["--workers", "1"], capsys)
    _, three, _ = run(args + ["--workers", "3"], capsys)
    assert one == three


def test_theorem_and_cayley_consistent_readings(capsys):
    code, out, _ = run(["verify", "--family", "cayley", "--format", "json", "--workers", "1"], capsys)
    assert code == 0
    assert json.loads(out)["summary"]["consistent_variants"] == {"cayley": ["corner=1-4u3^2"]}


def test_bench_default_and_divergence(capsys):
    code, out, _ = run(["bench", "--shifts", "1,1,1", "--x", "1,1,1", "--u", "0.05,0.05,0.05",
                        "--format", "json", "--no-timings"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["instances"][0]["rel_diff"] < 1e-10
    assert dump_json(report) == out
    code, out, _ = run(["bench", "--u", "0.3,0.3,0.3"], capsys)
    assert code == 0
    assert "warning" in out and "divergence" in out


def test_bargmann_check_default(capsys):
    code, out, _ = run(["bargmann-check", "--format", "json", "--no-timings"], capsys)
    assert code == 0
    report = json.loads(out)
    probe = next(c for c in report["instances"] if c["name"] == "image-constant")
    assert probe["constant"] == pytest.approx(2.0)
    inverse = next(c for c in report["instances"] if c["name"] == "inverse-roundtrip")
    assert inverse["radius"] == 4.0 and "truncation" in inverse
    assert dump_json(report) == out


def test_bargmann_check_too_few_nodes(capsys):
    code, _, _ = run(["bargmann-check", "--nodes", "8"], capsys)
    assert code == 2


def test_bargmann_check_tolerance_floor(capsys):
    code, out, _ = run(["bargmann-check", "--tolerance", "1e-15"], capsys)
    assert code == 1
    assert "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mehler", "verify", "--family", "mehler", "--order", "4",
                           "--workers", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "matched" in proc.stdout
