"""Command-line surface: sim, bench, report."""

import pytest

from mutlock.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSim:
    def test_golden_summary(self, capsys):
        code, out, _ = run_cli(
            capsys, "sim", "--threads", "3", "--policy", "hybrid", "--sws", "1",
        )
        assert code == 0
        assert "completion_slot=3" in out
        assert "wasted_spin_slots=1" in out
        assert "wasted_wake_slots=1" in out

    def test_trace_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "sim", "--threads", "3", "--policy", "spin",
            "--trace", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert "slot,t0,t1,t2" in lines
        assert "0,cs,spin,spin" in lines

    def test_trace_text_table(self, capsys):
        code, out, _ = run_cli(
            capsys, "sim", "--threads", "2", "--policy", "sleep", "--trace",
        )
        assert code == 0
        assert "| slot" in out

    def test_invalid_config_reports_error(self, capsys):
        code, _, err = run_cli(capsys, "sim", "--threads", "2", "--policy", "hybrid")
        assert code == 1
        assert "error:" in err

    def test_unknown_policy_rejected_by_argparse(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sim", "--threads", "2", "--policy", "bogus"])
        assert exc.value.code == 2


class TestBench:
    def test_run_and_csv(self, capsys, tmp_path):
        path = tmp_path / "rows.csv"
        code, out, _ = run_cli(
            capsys, "bench", "--lock", "sleep", "--threads", "2",
            "--duration", "0.15", "--runs", "2", "--seed", "3",
            "--csv", str(path),
        )
        assert code == 0
        assert out.count("lock=sleep") == 2
        lines = path.read_text().strip().splitlines()
        assert lines[0].startswith("lock,threads,csl_us")
        assert len(lines) == 3

    def test_invalid_bounds_report_error(self, capsys):
        code, _, err = run_cli(
            capsys, "bench", "--lock", "ttas", "--threads", "1",
            "--csl", "5", "--csu", "1",
        )
        assert code == 1
        assert "error:" in err


class TestReport:
    @pytest.fixture()
    def csv_file(self, tmp_path, capsys):
        path = tmp_path / "bench.csv"
        for lock in ("ttas", "sleep"):
            code = main([
                "bench", "--lock", lock, "--threads", "2",
                "--duration", "0.12", "--seed", "5", "--csv", str(path),
            ])
            assert code == 0
        capsys.readouterr()
        return path

    def test_throughput_markdown(self, capsys, csv_file):
        code, out, _ = run_cli(
            capsys, "report", "--input", str(csv_file),
            "--format", "md", "--metric", "throughput",
        )
        assert code == 0
        assert "| lock" in out
        assert "ttas" in out and "sleep" in out

    def test_ratio_and_ptexp(self, capsys, csv_file):
        code, out, _ = run_cli(
            capsys, "report", "--input", str(csv_file), "--metric", "ratio",
            "--format", "csv",
        )
        assert code == 0
        assert "ratio_to_optimum" in out
        code, out, _ = run_cli(
            capsys, "report", "--input", str(csv_file), "--metric", "ptexp",
            "--format", "csv",
        )
        assert code == 0
        assert "pt_exp_throughput_cs_per_s" in out

    def test_cpu_metric(self, capsys, csv_file):
        code, out, _ = run_cli(
            capsys, "report", "--input", str(csv_file), "--metric", "cpu",
            "--format", "csv",
        )
        assert code == 0
        assert "mean_sync_cpu_s" in out

    def test_empty_input_distinct_exit_code(self, capsys, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("lock,threads,throughput_cs_per_s,sync_cpu_s\n")
        code, _, err = run_cli(capsys, "report", "--input", str(path))
        assert code == 1
        assert "no benchmark rows" in err

    def test_malformed_input_reports_line(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "lock,threads,throughput_cs_per_s,sync_cpu_s\nttas,x,1.0,1.0\n"
        )
        code, _, err = run_cli(capsys, "report", "--input", str(path))
        assert code == 1
        assert "bad.csv:2" in err

    def test_missing_file_reports_error(self, capsys):
        code, _, err = run_cli(capsys, "report", "--input", "/nonexistent.csv")
        assert code == 1
        assert "error:" in err
