import io
import json
import os
import sys

import pytest

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from commands.dsl import parse
from core.catalog import macaulay
from main import main

MACAULAY = """
system mac {
  vars x1 x2 x3;
  unknowns y;
  eq: y(3,3) = 0;
  eq: y(2,3) - y(1,1) = 0;
  eq: y(2,2) = 0;
}
"""

VANISHING_PAIR = "system ex { vars x1 x2; unknowns y; eq P: y(2,2) = 0; eq Q: y(1,2) - y = 0; }"
INVOLUTIVE_PAIR = "system inv { vars x1 x2; unknowns y; eq: y(2,2) = 0; eq: y(1,2) = 0; }"


def run(argv, text="", capsys=None):
    code = main(argv, stdin=io.StringIO(text))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, text, capsys):
    code, out, err = run(argv + ["--json"], text, capsys)
    return code, json.loads(out)


# ============================================================================
# REPORTS
# ============================================================================

def test_dims_json(capsys):
    code, report = run_json(["dims"], MACAULAY, capsys)
    assert code == 0
    assert report["schema_version"] == "1.0"
    assert report["system"] == "mac"
    assert report["jet_dims"] == [10, 20, 35, 56]
    assert report["solution_dims"] == [7, 8, 8, 8]
    assert report["symbol_dims"] == [3, 1, 0, 0]
    assert report["parametric_jets"][0] == "y(1,3)"


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(["--json", "--exact", "dims", "--levels", "1"], MACAULAY, capsys)
    assert code == 0
    assert json.loads(out)["solution_dims"] == [7, 8]


def test_dims_text(capsys):
    code, out, _ = run(["dims"], MACAULAY, capsys)
    assert code == 0
    assert "7, 8, 8, 8" in out
    assert out.startswith("system")


def test_symbol_levels(capsys):
    code, report = run_json(["symbol", "--level", "3"], MACAULAY, capsys)
    assert code == 0
    assert report["dim"] == 1
    assert report["ambient_dim"] == 10
    assert report["finite_type_at"] == 4


def test_acyclic(capsys):
    code, report = run_json(["acyclic", "-s", "3", "--start", "3"], MACAULAY, capsys)
    assert code == 0
    assert report["acyclic"] is False
    assert report["failing_level"] == 3


def test_involution(capsys):
    code, report = run_json(["involution"], INVOLUTIVE_PAIR, capsys)
    assert code == 0
    assert report["involutive"] is True
    assert report["cartan"] == "involutive"
    assert report["characters"] == [1, 0]
    assert report["coordinate_change"] is None


def test_delta_on_catalog_document(capsys):
    code, document, _ = run(["catalog", "killing3"], capsys=capsys)
    assert code == 0
    code, report = run_json(["delta"], document, capsys)
    assert code == 0
    assert report["cohomology"]["H^2(g_1)"] == 6


# ============================================================================
# DOCUMENT OUTPUT
# ============================================================================

def test_prolong_prints_document(capsys):
    code, out, _ = run(["prolong"], MACAULAY, capsys)
    assert code == 0
    doc = parse(out)
    assert doc.name == "mac_prolonged1"
    assert doc.unknowns == ("y",)
    S = doc.to_system()
    assert S.order == 3
    assert S.solution_dim == 8


def test_project_below_order(capsys):
    code, out, _ = run(["project", "--to", "1"], VANISHING_PAIR, capsys)
    assert code == 0
    assert parse(out).to_system().order == 1


def test_catalog_listing(capsys):
    code, out, _ = run(["catalog"], capsys=capsys)
    assert code == 0
    assert "macaulay: Macaulay's system R_2" in out


def test_catalog_document_round_trip(capsys):
    code, out, _ = run(["catalog", "macaulay"], capsys=capsys)
    assert code == 0
    assert parse(out).to_system() == macaulay()


def test_complete_emits_system(capsys):
    code, out, _ = run(["complete", "--emit-system"], VANISHING_PAIR, capsys)
    assert code == 0
    assert parse(out).to_system().solution_dim == 0


def test_complete_budget_exit_code(capsys):
    code, report = run_json(["complete", "--max-steps", "1"], MACAULAY, capsys)
    assert code == 3
    assert report["completed"] is False


def test_file_argument(tmp_path, capsys):
    path = tmp_path / "mac.jet"
    path.write_text(MACAULAY, encoding="utf-8")
    code, report = run_json(["dims", str(path), "--levels", "0"], "", capsys)
    assert code == 0
    assert report["equations"] == 3


# ============================================================================
# SEQUENCES
# ============================================================================

def test_cc_of_vanishing_pair(capsys):
    code, report = run_json(["cc"], VANISHING_PAIR, capsys)
    assert code == 0
    assert report["orders"] == [2]
    assert report["total"] == 1


def test_cc_by_substitution(capsys):
    text = "system vd { vars x; unknowns y; eq: y = 0; eq: y(1) = 0; }"
    code, report = run_json(["cc", "--substitute"], text, capsys)
    assert code == 0
    assert report["left_inverse_order"] == 0
    assert report["left_inverse"] == ["u"]
    assert report["cc"] == ["0", "u(1) - v"]


def test_diagram_completes_first(capsys):
    code, report = run_json(["diagram"], MACAULAY, capsys)
    assert code == 0
    assert report["order"] == 4
    assert report["spencer"] == [8, 24, 24, 8]
    assert report["janet"] == [27, 60, 46, 12]
    assert report["euler_poincare"] == {"spencer": 0, "hybrid": 0, "janet": 0}
    assert report["notes"]


def test_janet_needs_involutive_input(capsys):
    code, out, err = run(["janet"], MACAULAY, capsys)
    assert code == 3
    assert "[not_involutive]" in err
    assert out == ""


def test_spencer_row_of_involutive_system(capsys):
    code, report = run_json(["spencer"], INVOLUTIVE_PAIR, capsys)
    assert code == 0
    assert report["euler_poincare"] == 0


def test_resolve_step_budget(capsys):
    code, report = run_json(["resolve", "--max-steps", "0"], VANISHING_PAIR, capsys)
    assert code == 3
    assert report["complete"] is False
    assert report["bundles"] == [1, 2]


def test_resolve_reports_raw_and_completed_targets(capsys):
    code, report = run_json(["resolve", "--max-steps", "1"], VANISHING_PAIR, capsys)
    assert code == 3
    assert report["raw_targets"] == [2, 1]
    assert report["completed_targets"] == [2, 1]
    assert "kernel of operator 1 is not formally integrable" in report["notes"]


@pytest.mark.slow
def test_resolve_from_order_three_completes_second_operator(capsys):
    code, report = run_json(["resolve", "--from-order", "3"], MACAULAY, capsys)
    assert code == 0
    assert report["bundles"] == [1, 12, 21, 46, 72, 48, 12]
    assert report["raw_targets"][2] == 13
    assert report["completed_targets"][2] == 46


# ============================================================================
# ERRORS AND EXIT CODES
# ============================================================================

def test_syntax_error_text(capsys):
    code, out, err = run(["dims"], "system s { vars x; unknowns y; eq: y = 1; }", capsys)
    assert code == 2
    assert "❌" in err
    assert "[syntax]" in err


def test_unknown_identifier_json(capsys):
    code, report = run_json(["dims"], "system s { vars x; unknowns y; eq: z = 0; }", capsys)
    assert code == 2
    assert report["error"]["code"] == "unknown_identifier"
    assert "line 1" in report["error"]["message"]


def test_project_upwards_is_invalid_argument(capsys):
    code, report = run_json(["project", "--to", "5"], MACAULAY, capsys)
    assert code == 3
    assert report["error"]["code"] == "invalid_argument"


def test_unknown_catalog_name(capsys):
    code, out, err = run(["catalog", "nope"], capsys=capsys)
    assert code == 3
    assert "[unknown_system]" in err


def test_missing_file(tmp_path, capsys):
    code, out, err = run(["dims", str(tmp_path / "missing.jet")], capsys=capsys)
    assert code == 1
    assert "[io_error]" in err


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["dims", "--levels", "many"]])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, MACAULAY, capsys)
    assert code == 1


def test_quick_check_passes(capsys):
    code, report = run_json(["check", "--quick"], "", capsys)
    assert code == 0
    assert report["failed"] == 0
    assert report["skipped"] == 5
