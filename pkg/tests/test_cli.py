"""Command-line interface: exit codes, output formats, determinism, and the
--out file sink.  Everything runs in process through cli.main."""

import pytest

from cakecheck.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from cakecheck.verification import SCAN_COLUMNS


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_defaults_pass(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == EXIT_OK
    assert "result: PASS" in out
    assert "published table match" in out


def test_verify_out_of_range_fails_with_named_condition(capsys):
    code, out, _ = run(["verify", "--t", "1.55"], capsys)
    assert code == EXIT_FAIL
    assert "4a" in out
    assert "result: FAIL" in out


def test_verify_domain_error_is_usage(capsys):
    code, _, err = run(["verify", "--t", "1.0"], capsys)
    assert code == EXIT_USAGE
    assert "t > 3/2" in err


def test_verify_structured_deterministic(capsys):
    code, out1, _ = run(["verify", "--format", "structured"], capsys)
    assert code == EXIT_OK
    code, out2, _ = run(["verify", "--format", "structured"], capsys)
    assert code == EXIT_OK
    assert out1 == out2
    assert "invariants.toledo = -8/3" in out1


def test_verify_rigorous_backend(capsys):
    code, out, _ = run(["verify", "--backend", "rigorous"], capsys)
    assert code == EXIT_OK
    assert "certified-positive" in out


def test_scan_csv(capsys):
    code, out, _ = run(["scan", "--lo", "2.15", "--hi", "2.3", "--steps", "4"], capsys)
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(SCAN_COLUMNS)
    assert len(lines) == 5


def test_scan_with_failing_rows_exits_nonzero(capsys):
    code, out, _ = run(["scan", "--lo", "1.9", "--hi", "2.0", "--steps", "3"], capsys)
    assert code == EXIT_FAIL


def test_scan_invalid_range_is_usage(capsys):
    code, _, err = run(["scan", "--lo", "2.3", "--hi", "2.2", "--steps", "4"], capsys)
    assert code == EXIT_USAGE


def test_certify_small_range(capsys):
    code, out, _ = run(["certify", "--lo", "2.219", "--hi", "2.221"], capsys)
    assert code == EXIT_OK
    assert out.startswith("# certificate status=certified")
    assert "certified-positive" in out


def test_certify_counterexample_range(capsys):
    code, out, _ = run(["certify", "--lo", "2.0", "--hi", "2.05", "--max-depth", "12"],
                       capsys)
    assert code == EXIT_FAIL
    assert "status=counterexample" in out


def test_cake_audit(capsys):
    code, out, _ = run(["cake"], capsys)
    assert code == EXIT_OK
    assert "[pairings]" in out
    assert "mapping_tables=ok" in out


def test_out_file_sink(tmp_path, capsys):
    target = tmp_path / "report.txt"
    code, out, _ = run(["verify", "--out", str(target)], capsys)
    assert code == EXIT_OK
    assert target.read_text() == out


def test_usage_errors(capsys):
    assert run([], capsys)[0] == EXIT_USAGE
    assert run(["frobnicate"], capsys)[0] == EXIT_USAGE
    assert run(["verify", "--backend", "exact"], capsys)[0] == EXIT_USAGE
