import math
from types import SimpleNamespace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modules import algorithms, gf2
from modules.algorithms import (
    EXACT,
    POWER_OF_TWO,
    dft_matrix,
    discrete_log,
    factor,
    fourier_gf2n,
    fourier_mod_q,
    grover,
    grover_success_probability,
    marked_oracle,
    order_find,
    order_frequency_distribution,
    phase_estimate,
    simon,
    simon_oracle,
    simon_oracle_from_table,
    torus_period,
)
from modules.data_structure import (
    DimensionMismatchError,
    InvalidInstanceError,
    RetryBudgetExceededError,
    StateTooLargeError,
)
from modules.number_theory import is_generator
from modules.statevector import (
    H,
    I,
    S,
    TDG,
    Z,
    StateVector,
    basis_state,
    fidelity,
    from_bitstring,
    random_state,
    zero_state,
)


def test_fourier_gf2n_on_zero():
    assert_allclose(fourier_gf2n(zero_state(3)).amps, np.full(8, 8**-0.5))


def test_fourier_gf2n_signs():
    n = 3
    for x in range(1 << n):
        amps = fourier_gf2n(basis_state([2] * n, x)).amps
        expected = [(-1) ** gf2.dot(x, y) / math.sqrt(1 << n) for y in range(1 << n)]
        assert_allclose(amps, expected, atol=1e-12)


def test_fourier_gf2n_is_an_involution(rng):
    psi = random_state([2, 2, 2, 2], rng)
    assert fidelity(fourier_gf2n(fourier_gf2n(psi)), psi) == pytest.approx(1.0)
    with pytest.raises(DimensionMismatchError):
        fourier_gf2n(basis_state([3], 0))


def test_dft_two_is_hadamard():
    assert_allclose(dft_matrix(2), H.matrix, atol=1e-12)
    out = fourier_mod_q(basis_state([2], 1))
    assert_allclose(out.amps, H.matrix[:, 1], atol=1e-12)


def test_dft_of_zero_is_uniform():
    assert_allclose(fourier_mod_q(basis_state([12], 0)).amps, np.full(12, 12**-0.5), atol=1e-12)


@pytest.mark.parametrize("q", [2, 5, 12, 64])
def test_dft_is_unitary_and_diagonalizes_shift(q):
    f = dft_matrix(q)
    assert np.max(np.abs(f.conj().T @ f - np.eye(q))) < 1e-12
    shift = np.roll(np.eye(q), 1, axis=0)
    diagonal = f.conj().T @ shift @ f
    assert np.max(np.abs(diagonal - np.diag(np.diag(diagonal)))) < 1e-10
    assert_allclose(np.abs(np.diag(diagonal)), np.ones(q), atol=1e-10)


def test_fourier_mod_q_matches_matrix_and_inverse(rng):
    amps = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi = StateVector([7], amps, normalize=True)
    out = fourier_mod_q(psi)
    assert_allclose(out.amps, dft_matrix(7) @ psi.amps, atol=1e-12)
    assert fidelity(fourier_mod_q(out, inverse=True), psi) == pytest.approx(1.0)
    with pytest.raises(DimensionMismatchError):
        fourier_mod_q(psi, register=1)


def test_simon_finds_the_period_from_the_example():
    result = simon(simon_oracle("110"), np.random.default_rng(1))
    assert result.answer == (1, 1, 0)
    assert result.verified
    assert all(gf2.dot(y, 0b110) == 0 for y in result.data["samples"])


def test_simon_from_a_value_table():
    oracle = simon_oracle_from_table([0, 0, 1, 1])
    assert oracle.secret == 0b01
    assert simon(oracle, np.random.default_rng(2)).answer == (0, 1)


def test_simon_random_periods():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        s = int(rng.integers(1, 1 << n))
        result = simon(simon_oracle(gf2.to_bitstring(s, n)), rng)
        assert result.data["period"] == gf2.to_bitstring(s, n)


def test_simon_oracle_validation():
    with pytest.raises(InvalidInstanceError):
        simon_oracle("000")
    with pytest.raises(InvalidInstanceError):
        simon_oracle("12")
    with pytest.raises(InvalidInstanceError):
        simon_oracle_from_table([0, 1, 2, 3])
    with pytest.raises(InvalidInstanceError):
        simon_oracle_from_table([0, 0, 1])
    with pytest.raises(InvalidInstanceError):
        simon(marked_oracle(2, 1))


@pytest.mark.parametrize("n, a, r", [(15, 7, 4), (15, 2, 4), (21, 2, 6), (35, 3, 12)])
def test_order_find(n, a, r):
    result = order_find(n, a, np.random.default_rng(4))
    assert result.answer == r
    assert pow(a, result.answer, n) == 1
    assert result.instance["Q"] >= n * n


def test_order_find_exact_mode():
    result = order_find(15, 7, np.random.default_rng(5), mode=EXACT)
    assert result.answer == 4
    assert result.instance["Q"] == 4


def test_order_frequency_peaks():
    distribution = order_frequency_distribution(15, 7)
    q = distribution.size
    assert q == 256
    peaks = [0, q // 4, q // 2, 3 * q // 4]
    assert_allclose(distribution[peaks], [0.25] * 4, atol=1e-10)
    assert distribution.sum() == pytest.approx(1.0)


def test_order_find_rejects_bad_instances():
    with pytest.raises(InvalidInstanceError):
        order_find(15, 5)
    with pytest.raises(InvalidInstanceError):
        order_find(65, 2)
    with pytest.raises(InvalidInstanceError):
        order_find(15, 7, mode="fastest")


@pytest.mark.parametrize("n, pair", [(15, (3, 5)), (21, (3, 7)), (33, (3, 11))])
def test_factor(n, pair):
    result = factor(n, np.random.default_rng(6))
    assert result.answer == pair
    assert result.answer[0] * result.answer[1] == n


def test_factor_classical_routes():
    assert factor(16).answer == (2, 8)
    assert factor(16).data["route"] == "even"
    assert factor(27).answer == (3, 9)
    assert factor(27).data["route"] == "perfect-power"
    for bad in (13, 2, 1):
        with pytest.raises(InvalidInstanceError):
            factor(bad)


class ScriptedBases:
    def __init__(self, *values):
        self.values = list(values)

    def integers(self, low, high):
        return self.values.pop(0)


def test_factor_skips_base_when_order_finding_gives_up(monkeypatch):
    calls = []

    def flaky_order_find(n, a, rng, mode, max_trials):
        calls.append(a)
        if len(calls) == 1:
            raise RetryBudgetExceededError(f"order of {a} mod {n} not found")
        return SimpleNamespace(answer=4)

    monkeypatch.setattr(algorithms, "order_find", flaky_order_find)
    result = factor(15, ScriptedBases(7, 2))
    assert calls == [7, 2]
    assert result.answer == (3, 5)
    assert result.queries_or_trials == 2 and result.data["a"] == 2


@pytest.mark.parametrize("p, g, y, x", [(7, 3, 4, 4), (11, 2, 7, 7), (7, 3, 1, 0)])
def test_discrete_log_examples(p, g, y, x):
    assert discrete_log(p, g, y, np.random.default_rng(7)).answer == x


def test_discrete_log_all_small_instances():
    rng = np.random.default_rng(8)
    for p in (7, 11):
        for g in (g for g in range(2, p) if is_generator(g, p)):
            for y in range(1, p):
                x = discrete_log(p, g, y, rng).answer
                assert 0 <= x < p - 1
                assert pow(g, x, p) == y


def test_discrete_log_power_of_two_mode():
    rng = np.random.default_rng(9)
    result = discrete_log(11, 2, 7, rng, mode=POWER_OF_TWO)
    assert result.answer == 7
    assert result.instance["q"] == 128


def test_discrete_log_power_of_two_mode_hits_amplitude_cap():
    with pytest.raises(StateTooLargeError):
        discrete_log(29, 2, pow(2, 11, 29), mode=POWER_OF_TWO)


def test_discrete_log_validation():
    with pytest.raises(InvalidInstanceError, match="generate"):
        discrete_log(7, 2, 4)
    with pytest.raises(InvalidInstanceError):
        discrete_log(9, 2, 4)
    with pytest.raises(InvalidInstanceError):
        discrete_log(7, 3, 0)


@pytest.mark.parametrize("q, period", [(6, (1, 2)), (4, (2, 0)), (5, (1, 3))])
def test_torus_period(q, period):
    result = torus_period(q, period, np.random.default_rng(10))
    u = result.answer

    def generated(v):
        return {(k * v[0] % q, k * v[1] % q) for k in range(q)}

    assert generated(u) == generated(period)


def test_torus_period_validation():
    with pytest.raises(InvalidInstanceError):
        torus_period(4, (0, 4))


@pytest.mark.parametrize(
    "unitary, state, t, phase",
    [(Z, "1", 1, 0.5), (S, "1", 2, 0.25), (I, "0", 3, 0.0), (S, "0", 4, 0.0)],
)
def test_phase_estimate_exact_phases(unitary, state, t, phase):
    rng = np.random.default_rng(11)
    for _ in range(5):
        result = phase_estimate(unitary, from_bitstring(state), t, rng)
        assert result.answer == phase
        assert result.verified


def test_phase_estimate_verifies_across_wraparound():
    # phase 7/8 at t = 2: both 3/4 and 0 are within one step on the circle
    rng = np.random.default_rng(12)
    answers = set()
    for _ in range(40):
        result = phase_estimate(TDG, from_bitstring("1"), 2, rng)
        answers.add(result.answer)
        assert result.verified == (result.answer in (0.0, 0.75))
    assert 0.0 in answers


def test_phase_estimate_rejects_non_eigenstates():
    with pytest.raises(InvalidInstanceError):
        phase_estimate(H, zero_state(1), 3)
    with pytest.raises(InvalidInstanceError):
        phase_estimate(Z, zero_state(1), 0)


def test_grover_success_probabilities():
    result = grover(marked_oracle(3, 5), np.random.default_rng(12))
    assert result.instance["iterations"] == 2
    assert result.data["success_probability"] == pytest.approx(0.9453, abs=1e-4)
    assert result.data["success_probability"] == pytest.approx(result.data["expected_probability"], abs=1e-10)
    for marked in range(4):
        exact = grover(marked_oracle(2, marked), np.random.default_rng(13))
        assert exact.data["success_probability"] == pytest.approx(1.0, abs=1e-10)
        assert exact.answer == marked and exact.verified
    idle = grover(marked_oracle(3, 1), np.random.default_rng(14), iterations=0)
    assert idle.data["success_probability"] == pytest.approx(1 / 8)


def test_grover_closed_form_over_iterations():
    for n in range(1, 7):
        for m in range(5):
            result = grover(marked_oracle(n, 0), np.random.default_rng(m), iterations=m)
            assert result.data["success_probability"] == pytest.approx(grover_success_probability(n, m), abs=1e-10)


def test_grover_validation():
    with pytest.raises(InvalidInstanceError):
        marked_oracle(2, 4)
    with pytest.raises(InvalidInstanceError):
        grover(simon_oracle("11"))
