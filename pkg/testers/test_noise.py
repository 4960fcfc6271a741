import numpy as np
import pytest

from modules.noise import Location, NoiseModel


@pytest.mark.parametrize("kwargs", [{"p_x": -0.1}, {"p_z": 1.5}, {"p_x": 0.6, "p_z": 0.6}, {"p_m": 2.0}])
def test_invalid_probabilities(kwargs):
    with pytest.raises(ValueError):
        NoiseModel(**kwargs)


def test_frame_rates_and_exclusivity():
    noise = NoiseModel(p_x=0.2, p_z=0.3)
    x, z = noise.sample_frames(200000, 3, np.random.default_rng(0))
    assert x.mean() == pytest.approx(0.2, abs=0.005)
    assert z.mean() == pytest.approx(0.3, abs=0.005)
    assert not np.any(x & z)


def test_depolarizing_letters_are_balanced():
    x, z = NoiseModel.depolarizing(0.3).sample_frames(300000, 1, np.random.default_rng(1))
    only_x = np.mean(x & ~z & 1)
    only_z = np.mean(z & ~x & 1)
    both = np.mean(x & z)
    for rate in (only_x, only_z, both):
        assert rate == pytest.approx(0.1, abs=0.004)


def test_noiseless_model():
    noise = NoiseModel()
    assert noise.is_noiseless
    x, z = noise.sample_frames(10, 4, np.random.default_rng(2))
    assert not x.any() and not z.any()
    assert not noise.sample_flips((10, 3), np.random.default_rng(2)).any()


def test_measurement_flips():
    flips = NoiseModel(p_m=0.25).sample_flips((100000,), np.random.default_rng(3))
    assert flips.mean() == pytest.approx(0.25, abs=0.01)


def test_sample_pauli_respects_qubits():
    noise = NoiseModel(p_x=1.0)
    p = noise.sample_pauli(5, np.random.default_rng(4), qubits=[1, 3])
    assert p.letters == "IXIXI"
    assert p.is_hermitian


def test_locations_and_description():
    noise = NoiseModel(p_depol=0.01, locations={"after_gate", "idle"})
    assert noise.applies_at(Location.IDLE)
    assert not noise.applies_at(Location.MEASUREMENT_FLIP)
    assert noise.describe() == ["p_x=0", "p_z=0", "p_depol=0.01", "p_m=0"]
