import json

import pytest

from modules import experiment_cli
from modules.data_structure import ExitCode
from modules.experiment_cli import ExperimentCLI
from modules.ft_gadgets import GadgetResult, cat_state
from src.qlab import main


@pytest.fixture
def cli():
    return ExperimentCLI("configs/configs.yml")


def run_json(cli, capsys, *argv):
    assert cli.run(list(argv)) == ExitCode.success
    return json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("code, header", [("shor9", "n=9, k=1, d=3"), ("css-hamming", "n=7, k=1, d=3"), ("five-qubit", "n=5, k=1, d=3")])
def test_code_info(cli, capsys, code, header):
    assert cli.run(["code-info", code]) == ExitCode.success
    out = capsys.readouterr().out
    assert header in out.splitlines()[0]
    assert "stabilizers:" in out and "logical Z:" in out


def test_code_info_bitflip_notes_x_distance(cli, capsys):
    assert cli.run(["code-info", "bitflip"]) == ExitCode.success
    out = capsys.readouterr().out
    assert "n=3, k=1, d=1" in out
    assert "note: X-distance 3" in out


def test_code_info_json_and_export(cli, capsys, tmp_path):
    target = tmp_path / "steane.stab"
    record = run_json(cli, capsys, "code-info", "css-hamming", "--format", "json", "--export", str(target), "--seed", "5")
    assert (record["n"], record["k"], record["distance"]) == (7, 1, 3)
    assert record["seed"] == 5 and record["version"] == "1.0.0"
    assert len(record["generators"]) == 6
    assert "H" in record["transversal"] and "CNOT" in record["transversal"]
    assert target.is_file()

    again = run_json(cli, capsys, "code-info", str(target), "--format", "json")
    assert (again["n"], again["k"], again["distance"]) == (7, 1, 3)


def test_unknown_code_is_a_usage_error(cli, capsys):
    assert cli.run(["code-info", "toric"]) == ExitCode.usage
    assert capsys.readouterr().out == ""


def test_sweep_to_stdout_is_deterministic(cli, capsys):
    argv = ["sweep", "--code", "bitflip", "--noise-px", "0,0.05", "--trials", "2000", "--seed", "11"]
    assert cli.run(argv) == ExitCode.success
    first = capsys.readouterr().out
    assert cli.run(argv) == ExitCode.success
    assert capsys.readouterr().out == first

    lines = first.splitlines()
    header = lines[0].split(",")
    assert header[:9] == ["code", "p_x", "p_z", "p_depol", "rounds", "trials", "logical_rate", "ci_low", "ci_high"]
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert [float(r["p_x"]) for r in rows] == [0.0, 0.05]
    assert float(rows[0]["logical_rate"]) == 0.0
    assert all(r["seed"] == "11" and r["version"] == "1.0.0" for r in rows)


def test_sweep_file_is_byte_identical(cli, capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        argv = ["sweep", "--code", "bitflip", "--noise-px", "0.05,0.1", "--trials", "1000", "--seed", "3", "--out", str(path)]
        assert cli.run(argv) == ExitCode.success
        record = json.loads(capsys.readouterr().out)
        assert record["rows"] == 2
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_json_format(cli, capsys):
    document = run_json(cli, capsys, "sweep", "--code", "phaseflip", "--noise-pz", "0.1", "--trials", "500", "--format", "json")
    assert document["version"] == "1.0.0"
    assert document["results"][0]["code"] == "phaseflip"


def test_sweep_validation_and_io_errors(cli, tmp_path):
    assert cli.run(["sweep", "--code", "bitflip", "--trials", "50"]) == ExitCode.usage
    assert cli.run(["sweep", "--code", "bitflip", "--noise-px", "1.5", "--trials", "100"]) == ExitCode.usage
    blocker = tmp_path / "not-a-directory"
    blocker.write_text("x")
    out = blocker / "rates.csv"
    assert cli.run(["sweep", "--code", "bitflip", "--trials", "100", "--out", str(out)]) == ExitCode.io


@pytest.mark.parametrize(
    "argv, answer",
    [
        (["run", "factor", "--n", "15"], [3, 5]),
        (["run", "factor", "--n", "21"], [3, 7]),
        (["run", "simon", "--n", "3", "--period", "110"], "110"),
        (["run", "dlog", "--p", "7", "--g", "3", "--y", "4"], 4),
        (["run", "order", "--n", "21", "--a", "2"], 6),
        (["run", "grover", "--n", "3", "--marked", "5"], 5),
        (["run", "phase", "--gate", "S", "--eigenstate", "1", "--t", "2"], 0.25),
    ],
)
def test_run_algorithms(cli, capsys, argv, answer):
    record = run_json(cli, capsys, *argv, "--seed", "7")
    assert record["answer"] == answer
    assert record["verified"] is True
    assert record["seed"] == 7 and record["version"] == "1.0.0"
    assert set(record) == {"algorithm", "instance", "answer", "queries_or_trials", "seed", "verified", "version"}


def test_run_torus(cli, capsys):
    record = run_json(cli, capsys, "run", "torus", "--q", "4", "--period", "2,0")
    assert record["answer"] == [2, 0]


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "factor", "--n", "16"],
        ["run", "factor", "--n", "13"],
        ["run", "dlog", "--p", "7", "--g", "3"],
        ["run", "dlog", "--p", "7", "--g", "2", "--y", "4"],
        ["run", "simon", "--n", "4", "--period", "110"],
        ["run", "phase", "--gate", "H"],
        ["run", "sort"],
    ],
)
def test_run_rejects_bad_instances(cli, argv):
    assert cli.run(argv) == ExitCode.usage


def test_gadget_rus_rotation(cli, capsys):
    summary = run_json(cli, capsys, "gadget", "rus-rotation", "--trials", "2000", "--seed", "1")
    assert summary["mean_rounds"] == pytest.approx(2.0, abs=0.15)
    assert summary["plus_fraction"] == pytest.approx(0.5, abs=0.03)
    assert summary["min_fidelity"] > 1 - 1e-10
    assert summary["incomplete"] == 0


def test_gadget_toffoli_and_cat(cli, capsys):
    toffoli = run_json(cli, capsys, "gadget", "toffoli")
    assert toffoli["inputs"] == 28
    assert toffoli["min_fidelity"] > 1 - 1e-10
    cat = run_json(cli, capsys, "gadget", "cat", "--n", "4")
    assert cat["min_fidelity"] == pytest.approx(1.0)
    assert cat["checks_passed"] is True and cat["mean_attempts"] == 1.0


def test_gadget_cat_reports_unchecked_preparation(cli, capsys, monkeypatch):
    def unchecked_cat(n, noise, rng, max_attempts):
        return GadgetResult(cat_state(n), 1, data={"checks_passed": None})

    monkeypatch.setattr(experiment_cli, "prepare_cat", unchecked_cat)
    cat = run_json(cli, capsys, "gadget", "cat", "--n", "3")
    assert cat["checks_passed"] is False


def test_gadget_density(cli, capsys):
    summary = run_json(cli, capsys, "gadget", "density", "--gates", "H,T", "--depth", "8")
    assert 0 < summary["distance"] < 1
    assert set(summary["sequence"]) <= {"H", "T"}
    assert cli.run(["gadget", "density", "--gates", "H,Q"]) == ExitCode.usage


def test_unknown_gadget(cli):
    assert cli.run(["gadget", "teleport"]) == ExitCode.usage


def test_search_trivial_code(cli, capsys, tmp_path):
    out = tmp_path / "found.stab"
    record = run_json(cli, capsys, "search", "--n", "3", "--k", "1", "--distance", "1", "--budget", "100", "--out", str(out))
    assert record["found"] is True and record["distance"] >= 1
    assert out.is_file()


def test_status(cli, capsys):
    status = run_json(cli, capsys, "status")
    assert status["max_amplitudes"] == 1 << 24
    assert "shor9" in status["codes"]
    assert status["workers"] >= 1


def test_main_entry_point(capsys):
    assert main(["code-info", "bitflip"]) == ExitCode.success
    assert "n=3" in capsys.readouterr().out
    assert main(["--config", "configs/missing.yml", "status"]) == ExitCode.io
