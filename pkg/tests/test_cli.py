import csv
import io
import json

import pytest

import qfrac.special

from conftest import run_cli


def parse_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


class TestEval:
    def test_gamma_at_one(self):
        code, out, _ = run_cli(["eval", "gamma", "--q", "0.5", "--alpha", "1"])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["value"]) == pytest.approx(1.0)

    def test_ml_zero_rate(self):
        code, out, _ = run_cli(
            ["eval", "ml", "--q", "0.5", "--alpha", "1", "--beta", "1",
             "--lambda", "0", "--z", "1", "--z0", "0"]
        )
        assert code == 0
        assert float(parse_csv(out)[0]["value"]) == pytest.approx(1.0)

    def test_left_fractional_integral_of_identity(self):
        code, out, _ = run_cli(
            ["eval", "fracint", "--side", "left", "--q", "0.5", "--alpha", "1",
             "--a", "0", "--t", "1", "--f", "s"]
        )
        assert code == 0
        assert float(parse_csv(out)[0]["value"]) == pytest.approx(2.0 / 3.0, rel=1e-9)

    def test_right_fractional_integral(self):
        code, out, _ = run_cli(
            ["eval", "fracint", "--side", "right", "--q", "0.5", "--alpha", "1",
             "--t", "1", "--f", "s^-2"]
        )
        assert code == 0
        assert float(parse_csv(out)[0]["value"]) == pytest.approx(0.5, rel=1e-9)

    def test_multiple_points_one_row_each(self):
        code, out, _ = run_cli(["eval", "eq", "--q", "0.5", "--t", "0.25,0.5"])
        assert code == 0
        rows = parse_csv(out)
        assert [row["t"] for row in rows] == ["0.25", "0.5"]

    def test_verbose_adds_terms_column(self):
        code, out, _ = run_cli(
            ["eval", "eq", "--q", "0.5", "--t", "0.5", "--verbose"]
        )
        assert code == 0
        rows = parse_csv(out)
        assert int(rows[0]["terms"]) > 3

    def test_qfact(self):
        code, out, _ = run_cli(
            ["eval", "qfact", "--q", "0.5", "--t", "1", "--s", "0.5",
             "--alpha", "2"]
        )
        assert code == 0
        assert float(parse_csv(out)[0]["value"]) == pytest.approx(0.375)

    def test_output_file(self, tmp_path):
        target = tmp_path / "row.csv"
        code, out, _ = run_cli(
            ["eval", "gamma", "--q", "0.5", "--alpha", "3", "--out", str(target)]
        )
        assert code == 0 and out == ""
        rows = parse_csv(target.read_text())
        assert float(rows[0]["value"]) == pytest.approx(1.5)

    def test_rel_tol_flag(self):
        code, out, _ = run_cli(
            ["eval", "gamma", "--q", "0.5", "--alpha", "0.5",
             "--rel-tol", "1e-6", "--verbose"]
        )
        assert code == 0
        loose_terms = int(parse_csv(out)[0]["terms"])
        code, out, _ = run_cli(
            ["eval", "gamma", "--q", "0.5", "--alpha", "0.5", "--verbose"]
        )
        tight_terms = int(parse_csv(out)[0]["terms"])
        assert loose_terms < tight_terms


class TestEvalErrors:
    def test_domain_error_is_usage(self):
        code, out, err = run_cli(["eval", "Eq", "--q", "0.5", "--t", "1.5"])
        assert code == 3
        assert "error" in err

    def test_missing_flag(self):
        code, _, err = run_cli(["eval", "fracint", "--q", "0.5", "--alpha", "1",
                                "--t", "1"])
        assert code == 3
        assert "--f" in err

    def test_missing_q(self):
        code, _, _ = run_cli(["eval", "gamma", "--alpha", "1"])
        assert code == 3

    def test_bad_expression(self):
        code, _, _ = run_cli(
            ["eval", "fracint", "--q", "0.5", "--alpha", "1", "--t", "1",
             "--f", "os.system"]
        )
        assert code == 3

    def test_bad_point_list(self):
        code, _, _ = run_cli(["eval", "eq", "--q", "0.5", "--t", "0.5,zebra"])
        assert code == 3

    def test_unknown_target(self):
        code, _, _ = run_cli(["eval", "zeta", "--q", "0.5"])
        assert code == 3

    def test_numeric_failure_is_exit_two(self):
        # e_q diverges outside |t| < 1/(1-q) = 2.
        code, _, err = run_cli(["eval", "eq", "--q", "0.5", "--t", "3"])
        assert code == 2
        assert "numeric" in err

    def test_gamma_pole_is_exit_two(self):
        code, _, _ = run_cli(["eval", "gamma", "--q", "0.5", "--alpha", "0"])
        assert code == 2


class TestEnvironment:
    def test_env_budget_applies(self, monkeypatch):
        monkeypatch.setenv("QFRAC_MAX_TERMS", "5")
        code, _, _ = run_cli(["eval", "eq", "--q", "0.5", "--t", "0.9"])
        assert code == 2

    def test_flag_beats_environment(self, monkeypatch):
        monkeypatch.setenv("QFRAC_MAX_TERMS", "5")
        code, _, _ = run_cli(
            ["eval", "eq", "--q", "0.5", "--t", "0.9", "--max-terms", "200"]
        )
        assert code == 0

    def test_malformed_environment(self, monkeypatch):
        monkeypatch.setenv("QFRAC_REL_TOL", "tiny")
        code, _, _ = run_cli(["eval", "gamma", "--q", "0.5", "--alpha", "1"])
        assert code == 3


class TestCheck:
    def test_suite_report_to_file(self, tmp_path):
        target = tmp_path / "report.json"
        code, _, err = run_cli(
            ["check", "special", "--seed", "7", "--out", str(target)]
        )
        assert code == 0
        report = json.loads(target.read_text())
        assert report["passed"] is True
        assert report["suite"] == "special"
        assert report["n_records"] == len(report["records"]) > 100
        assert "duration" not in report
        assert "suite=special" in err

    def test_unknown_suite(self):
        code, _, _ = run_cli(["check", "bogus"])
        assert code == 3

    def test_deterministic_output(self):
        first = run_cli(["check", "core", "--seed", "7", "--out", "-"])
        second = run_cli(["check", "core", "--seed", "7", "--out", "-"])
        assert first[0] == second[0] == 0
        assert first[1].encode() == second[1].encode()

    def test_seed_changes_sweeps(self):
        a = run_cli(["check", "core", "--seed", "1", "--out", "-"])[1]
        b = run_cli(["check", "core", "--seed", "2", "--out", "-"])[1]
        assert a != b

    def test_verbose_lists_records(self):
        code, _, err = run_cli(
            ["check", "special", "--seed", "7", "--out", "-", "--verbose"]
        )
        assert code == 0
        assert "[pass] gamma_recurrence" in err

    def test_corrupted_gamma_fails_suite(self, monkeypatch):
        true_gamma = qfrac.special.q_gamma

        def corrupted(alpha, p):
            value = true_gamma(alpha, p)
            if alpha != round(alpha):
                value *= 1.0 + 5e-10 * alpha
            return value

        monkeypatch.setattr(qfrac.special, "q_gamma", corrupted)
        code, out, _ = run_cli(["check", "special", "--seed", "7", "--out", "-"])
        assert code == 1
        report = json.loads(out)
        failing = {r["identity"] for r in report["records"] if not r["passed"]}
        assert failing == {"gamma_recurrence"}


class TestExplore:
    def test_default_grid_row_count(self):
        code, out, _ = run_cli(["explore", "--q", "0.5", "--b", "1"])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 36
        assert set(r["identity_id"] for r in rows) == {"right_semigroup_finite"}

    def test_integer_sum_pairs_present(self):
        code, out, _ = run_cli(["explore", "--q", "0.5", "--b", "1"])
        rows = parse_csv(out)
        sums = {round(float(r["alpha"]) + float(r["beta"]), 6) for r in rows}
        assert 1.0 in sums and 2.0 in sums

    def test_empty_grid_emits_header_only(self):
        code, out, _ = run_cli(["explore", "--q", "0.5", "--b", "1", "--grid", ""])
        assert code == 0
        lines = [line for line in out.splitlines() if line]
        assert len(lines) == 1
        assert lines[0].startswith("identity_id,")

    def test_single_pair_has_finite_residual(self):
        code, out, _ = run_cli(
            ["explore", "--q", "0.5", "--b", "1", "--grid", "0.25,0.5", "--f", "1"]
        )
        assert code == 0
        row = parse_csv(out)[0]
        assert row["status"] == "ok"
        assert float(row["rel_err"]) >= 0.0

    def test_error_rows_reported_with_reason(self):
        # Matching orders re-align the shifted grids onto kernel poles; the
        # healthy pair keeps the overall run successful.
        code, out, _ = run_cli(
            ["explore", "--q", "0.5", "--b", "1", "--grid", "0.5,0.5;0.25,0.5"]
        )
        assert code == 0
        rows = parse_csv(out)
        assert rows[0]["status"] == "error"
        assert "PoleError" in rows[0]["error"]
        assert rows[1]["status"] == "ok"

    def test_all_rows_erroring_is_numeric_failure(self):
        code, out, _ = run_cli(
            ["explore", "--q", "0.5", "--b", "1", "--grid", "0.5,0.5"]
        )
        assert code == 2
        assert parse_csv(out)[0]["status"] == "error"

    def test_misaligned_endpoint_rejected(self):
        code, _, _ = run_cli(["explore", "--q", "0.5", "--b", "3"])
        assert code == 3

    def test_point_above_endpoint_rejected(self):
        code, _, _ = run_cli(["explore", "--q", "0.5", "--b", "0.25", "--t", "1"])
        assert code == 3

    def test_rows_roundtrip_through_csv(self, tmp_path):
        target = tmp_path / "explore.csv"
        code, _, _ = run_cli(
            ["explore", "--q", "0.5", "--b", "1", "--grid", "0.25,0.5;0.5,0.5",
             "--out", str(target)]
        )
        assert code == 0
        rows = parse_csv(target.read_text())
        assert len(rows) == 2
        assert rows[0].keys() == rows[1].keys()
