"""Command-line surface: outputs, files, exit codes."""

import json

import pytest

from incmeter.cli import main
from incmeter.solver import parse_dimacs, solve_internal, SolveStatus


@pytest.fixture
def kb_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_measure_contension_k4(kb_file, capsys):
    path = kb_file("k4.kb", "x&&y\n!y\n")
    code, out, _ = run_cli(
        capsys, "measure", "--measure", "contension", "--method", "sat",
        "--search", "binary", path,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "1"
    payload = json.loads("\n".join(lines[1:]))
    assert payload["value"] == "1"
    assert payload["solverCalls"] >= 1
    assert set(payload["phaseTimes"]) == {
        "encoding", "cnfTransform", "solving", "other",
    }


def test_measure_hs_naive_k6_prints_inf(kb_file, capsys):
    path = kb_file("k6.kb", "x&&!x\ny\nz\n")
    code, out, _ = run_cli(
        capsys, "measure", "--measure", "hitting-set", "--method", "naive", path
    )
    assert code == 0
    assert out.splitlines()[0] == "inf"


def test_measure_deterministic_stdout_modulo_times(kb_file, capsys):
    path = kb_file("k7.kb", "x&&y\nx||y\n!x\n")
    argv = ["measure", "--measure", "sum-distance", "--method", "sat",
            "--search", "linear", "--seed", "5", path]

    def normalized():
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        lines = out.splitlines()
        payload = json.loads("\n".join(lines[1:]))
        payload["phaseTimes"] = None
        payload["totalSeconds"] = None
        return lines[0], payload

    assert normalized() == normalized()


def test_encode_writes_satisfiable_dimacs(kb_file, tmp_path, capsys):
    path = kb_file("k7.kb", "x&&y\nx||y\n!x\n")
    out_path = tmp_path / "out.cnf"
    code, _, _ = run_cli(
        capsys, "encode", "--measure", "hit-distance", "-u", "1", path,
        "-o", str(out_path),
    )
    assert code == 0
    cnf = parse_dimacs(out_path.read_text())
    assert cnf.clauses and cnf.num_vars > 0
    assert solve_internal(cnf).status is SolveStatus.SAT


def test_encode_requires_bound(kb_file, capsys):
    path = kb_file("k4.kb", "x&&y\n!y\n")
    code, _, err = run_cli(capsys, "encode", "--measure", "contension", path)
    assert code == 1


def test_encode_maxsat_wcnf(kb_file, tmp_path, capsys):
    path = kb_file("k4.kb", "x&&y\n!y\n")
    out_path = tmp_path / "out.wcnf"
    code, _, _ = run_cli(
        capsys, "encode", "--measure", "contension", "--maxsat", path,
        "-o", str(out_path),
    )
    assert code == 0
    header = out_path.read_text().splitlines()[0].split()
    assert header[:2] == ["p", "wcnf"]
    assert header[4] == "3"  # top weight = |soft| + 1 = 3


def test_emit_asp_writes_program(kb_file, tmp_path, capsys):
    path = kb_file("k7.kb", "x&&y\nx||y\n!x\n")
    out_path = tmp_path / "k7.lp"
    code, _, _ = run_cli(
        capsys, "emit-asp", "--measure", "hitting-set", path, "-o", str(out_path)
    )
    assert code == 0
    text = out_path.read_text()
    assert "interpretation(1..3)." in text
    assert "#minimize{1,I : interpretationActive(I)}." in text


def test_generate_then_bench(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    reports = tmp_path / "reports"
    code, out, _ = run_cli(
        capsys, "generate", "--out", str(corpus), "--count", "4", "--atoms", "3",
        "--formulas", "2:4", "--seed", "17",
    )
    assert code == 0
    assert len(list(corpus.glob("*.kb"))) == 4
    assert (corpus / "manifest.json").exists()

    code, out, _ = run_cli(
        capsys, "bench", str(corpus), "--measures", "contension,hit-distance",
        "--methods", "sat-binary,naive", "--out", str(reports),
    )
    assert code == 0
    assert (reports / "results.csv").exists()
    assert (reports / "summary.csv").exists()


def test_usage_error_exit_code(capsys):
    assert run_cli(capsys, "measure")[0] == 1
    assert run_cli(capsys, "unknown-command")[0] == 1


def test_missing_file_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "measure", "--measure", "contension", "/nonexistent.kb"
    )
    assert code == 1


def test_syntax_error_exit_code(kb_file, capsys):
    path = kb_file("bad.kb", "x &&\n")
    code, _, err = run_cli(capsys, "measure", "--measure", "contension", path)
    assert code == 1
    assert "error" in err


def test_backend_failure_exit_code(kb_file, capsys, monkeypatch):
    monkeypatch.delenv("INCMETER_ASP_SOLVER", raising=False)
    monkeypatch.setenv("PATH", "")
    path = kb_file("k4.kb", "x&&y\n!y\n")
    code, _, err = run_cli(
        capsys, "measure", "--measure", "contension", "--method", "asp", path
    )
    assert code == 2
    assert "backend" in err


def test_timeout_exit_code(kb_file, capsys):
    path = kb_file("k4.kb", "x&&y\n!y\n")
    code, out, _ = run_cli(
        capsys, "measure", "--measure", "contension", "--timeout", "1e-9", path
    )
    assert code == 3
    assert out.splitlines()[0] == "timeout"


def test_measure_with_external_sat_solver(kb_file, fake_solver, capsys):
    path = kb_file("k7.kb", "x&&y\nx||y\n!x\n")
    code, out, _ = run_cli(
        capsys, "measure", "--measure", "forgetting", "--method", "sat",
        "--search", "linear", "--sat-solver", fake_solver, path,
    )
    assert code == 0
    assert out.splitlines()[0] == "1"
