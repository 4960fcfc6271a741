import json

import numpy as np
import pytest

from modules.data_structure import InvalidCodeError
from modules.memory_experiment import (
    CSV_COLUMNS,
    format_csv,
    format_json,
    loglog_slope,
    memory_experiment,
    sweep,
    wilson_interval,
    write_results,
)
from modules.noise import NoiseModel
from modules.qec_codes import bit_flip_code, from_stabilizer_code, phase_flip_code, steane_code
from modules.stabilizer import StabilizerCode


@pytest.fixture(scope="module")
def bitflip():
    return bit_flip_code()


def test_wilson_interval_values():
    low, high = wilson_interval(0, 10)
    assert low == 0.0
    assert high == pytest.approx(0.2775, abs=1e-3)
    low, high = wilson_interval(50, 100)
    assert (low, high) == (pytest.approx(0.4038, abs=1e-3), pytest.approx(0.5962, abs=1e-3))
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_loglog_slope():
    assert loglog_slope({0.01: 1e-4, 0.1: 1e-2}) == pytest.approx(2.0)
    assert loglog_slope({0.001: 0.0, 0.01: 1e-4, 0.1: 1e-2}) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        loglog_slope({0.01: 0.0, 0.1: 1e-2})


def test_noiseless_memory(bitflip):
    result = memory_experiment(bitflip, NoiseModel(), trials=1000, seed=1)
    assert result.failures == 0 and result.logical_rate == 0.0
    assert result.ci_low == 0.0 and result.ci_high > 0.0


def test_seed_fixes_the_result(bitflip):
    noise = NoiseModel(p_x=0.1)
    a = memory_experiment(bitflip, noise, trials=5000, seed=42, chunk_size=512, workers=1)
    b = memory_experiment(bitflip, noise, trials=5000, seed=42, chunk_size=512, workers=4)
    assert a.failures == b.failures
    assert a.seed == 42


def test_master_seed_from_rng(bitflip):
    result = memory_experiment(bitflip, NoiseModel(p_x=0.1), trials=100, rng=np.random.default_rng(3))
    again = memory_experiment(bitflip, NoiseModel(p_x=0.1), trials=100, seed=result.seed)
    assert result.failures == again.failures


def test_bit_flip_rate_is_quadratic(bitflip):
    result = memory_experiment(bitflip, NoiseModel(p_x=0.05), trials=100000, seed=7)
    assert result.logical_rate == pytest.approx(0.00725, abs=0.002)


def test_bit_flip_code_triples_phase_errors(bitflip):
    p = 0.01
    result = memory_experiment(bitflip, NoiseModel(p_z=p), trials=100000, seed=8, basis="X")
    assert result.logical_rate / p == pytest.approx(3.0, abs=0.25)
    # logical Z readout never sees phase flips
    assert memory_experiment(bitflip, NoiseModel(p_z=p), trials=10000, seed=8).failures == 0


def test_phase_flip_code_triples_bit_errors():
    p = 0.01
    result = memory_experiment(phase_flip_code(), NoiseModel(p_x=p), trials=100000, seed=15)
    assert result.logical_rate / p == pytest.approx(3.0, abs=0.25)


@pytest.mark.slow
def test_phase_error_tripling_across_a_grid(bitflip):
    grid = [NoiseModel(p_z=p) for p in (0.001, 0.002, 0.004)]
    results = sweep(bitflip, grid, seed=16, trials=400000, basis="X")
    ps = np.array([r.p_z for r in results])
    rates = np.array([r.logical_rate for r in results])
    slope = float(ps @ rates / (ps @ ps))
    assert slope == pytest.approx(3.0, abs=0.15)


def test_more_rounds_accumulate_errors(bitflip):
    noise = NoiseModel(p_x=0.05)
    one = memory_experiment(bitflip, noise, rounds=1, trials=50000, seed=9)
    three = memory_experiment(bitflip, noise, rounds=3, trials=50000, seed=9)
    assert three.logical_rate > 2 * one.logical_rate


@pytest.mark.slow
def test_steane_depolarizing_slope():
    code = steane_code()
    grid = [NoiseModel.depolarizing(p) for p in (0.01, 0.02, 0.04)]
    results = sweep(code, grid, seed=11, trials=200000)
    slope = loglog_slope({r.p_depol: r.logical_rate for r in results})
    assert slope == pytest.approx(2.0, abs=0.3)


def test_statevector_engine_agrees_with_frames(bitflip):
    noise = NoiseModel(p_x=0.1)
    exact = 3 * 0.1**2 * 0.9 + 0.1**3
    frames = memory_experiment(bitflip, noise, trials=20000, seed=12)
    trajectories = memory_experiment(bitflip, noise, trials=2000, seed=12, engine="statevector")
    assert frames.logical_rate == pytest.approx(exact, abs=0.006)
    assert trajectories.logical_rate == pytest.approx(exact, abs=0.015)
    assert trajectories.engine == "statevector"


def test_argument_checks(bitflip):
    noise = NoiseModel(p_x=0.1)
    with pytest.raises(ValueError):
        memory_experiment(bitflip, noise, trials=0, seed=1)
    with pytest.raises(ValueError):
        memory_experiment(bitflip, noise, rounds=0, seed=1)
    with pytest.raises(ValueError, match="basis"):
        memory_experiment(bitflip, noise, basis="Y", seed=1)
    with pytest.raises(ValueError, match="engine"):
        memory_experiment(bitflip, noise, engine="tableau", seed=1)
    no_logical = from_stabilizer_code(StabilizerCode.from_strings(["ZZ", "XX"]), "bell")
    with pytest.raises(InvalidCodeError):
        memory_experiment(no_logical, noise, seed=1)


def test_sweep_shares_the_seed(bitflip):
    grid = [NoiseModel(p_x=p) for p in (0.0, 0.05, 0.1)]
    results = sweep(bitflip, grid, seed=13, trials=2000)
    assert [r.p_x for r in results] == [0.0, 0.05, 0.1]
    assert {r.seed for r in results} == {13}
    assert results[0].failures == 0
    assert results[1].logical_rate < results[2].logical_rate


def test_csv_and_json_output(bitflip, tmp_path):
    results = sweep(bitflip, [NoiseModel(p_x=0.05), NoiseModel(p_x=0.1)], seed=14, trials=500)
    text = format_csv(results, version="1.0.0")
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    first = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert first["code"] == results[0].code
    assert float(first["p_x"]) == 0.05
    assert first["trials"] == "500" and first["seed"] == "14" and first["version"] == "1.0.0"

    document = json.loads(format_json(results, version="1.0.0"))
    assert document["version"] == "1.0.0"
    assert [row["p_x"] for row in document["results"]] == [0.05, 0.1]

    path = write_results(results, tmp_path / "out" / "rates.csv", version="1.0.0")
    assert path.read_text() == text
    with pytest.raises(ValueError):
        write_results(results, tmp_path / "rates.xml", fmt="xml")
