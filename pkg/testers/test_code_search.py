import numpy as np
import pytest

from modules.code_search import (
    FIVE_QUBIT_GROUP_ORDER,
    equivalent_codes,
    find_equivalence,
    random_symplectic,
    search_code,
)
from modules.data_structure import DimensionMismatchError, SearchLimitError
from modules.stabilizer import CliffordTableau, StabilizerCode, conjugate, min_distance

FIVE_QUBIT = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def five_qubit_code():
    return StabilizerCode.from_strings(FIVE_QUBIT, name="five-qubit")


def test_random_symplectic_preserves_form():
    n = 4
    omega = np.block([[np.zeros((n, n), int), np.eye(n, dtype=int)], [np.eye(n, dtype=int), np.zeros((n, n), int)]])
    for seed in range(5):
        m = random_symplectic(n, np.random.default_rng(seed)).astype(int)
        assert np.array_equal((m @ omega @ m.T) % 2, omega)


def test_trivial_search_succeeds():
    code = search_code(3, 1, 1, np.random.default_rng(1), budget=10, workers=1)
    assert code is not None
    assert (code.n, code.k) == (3, 1)
    assert code.distance is not None and code.distance >= 1


def test_no_four_qubit_distance_three_code():
    assert search_code(4, 1, 3, np.random.default_rng(2), budget=2000, batch_size=250, workers=2) is None


def test_search_limits():
    with pytest.raises(SearchLimitError):
        search_code(9, 1, 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        search_code(4, 4, 1, np.random.default_rng(0))


def test_search_is_reproducible_for_a_seed():
    first = search_code(4, 1, 2, np.random.default_rng(3), budget=2000, workers=2)
    second = search_code(4, 1, 2, np.random.default_rng(3), budget=2000, workers=2)
    assert first is not None
    assert [str(g) for g in first.generators] == [str(g) for g in second.generators]


@pytest.mark.slow
def test_search_finds_the_five_qubit_code():
    code = search_code(5, 1, 3, np.random.default_rng(4), budget=1_000_000, workers=4)
    assert code is not None
    assert code.distance == 3 == min_distance(code)
    assert equivalent_codes(code, five_qubit_code())


def test_code_is_equivalent_to_itself():
    assert equivalent_codes(five_qubit_code(), five_qubit_code())


def test_local_clifford_and_permutation_images_are_equivalent():
    code = five_qubit_code()
    tableau = CliffordTableau.from_circuit([("H", 0), ("S", 2), ("SWAP", 1, 4), ("H", 3), ("S", 3)], 5)
    image = StabilizerCode(
        5,
        1,
        tuple(conjugate(tableau, g) for g in code.generators),
        tuple(conjugate(tableau, p) for p in code.logical_x),
        tuple(conjugate(tableau, p) for p in code.logical_z),
    )
    assert find_equivalence(code, image) is not None


def test_distance_separates_codes():
    trivial = StabilizerCode.from_strings(["ZIIII", "IZIII", "IIZII", "IIIZI"])
    assert not equivalent_codes(five_qubit_code(), trivial)


def test_equivalence_limits():
    with pytest.raises(DimensionMismatchError):
        equivalent_codes(five_qubit_code(), StabilizerCode.from_strings(["ZZI", "IZZ"]))
    big = StabilizerCode.from_strings(["ZZIIIII", "IZZIIII"] + ["IIZZIII", "IIIZZII", "IIIIZZI", "IIIIIZZ"])
    with pytest.raises(SearchLimitError):
        equivalent_codes(big, big)


def test_group_order_constant():
    assert FIVE_QUBIT_GROUP_ORDER == 5160960
