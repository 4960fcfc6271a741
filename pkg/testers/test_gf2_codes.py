import itertools

import numpy as np
import pytest

from modules import gf2
from modules.data_structure import DecodingError, DimensionMismatchError, InvalidCodeError
from modules.gf2_codes import (
    BitVector,
    ClassicalLinearCode,
    contains_dual,
    dual_code,
    dual_violation,
    even_weight_code,
    full_space,
    hamming_7_4,
    load_classical_code,
    repetition_code,
    syndrome_decode,
)

HAMMING_ZERO = ["0000000", "1111000", "1100110", "0011110", "1010101", "0101101", "0110011", "1001011"]


def test_repetition_codewords():
    assert repetition_code(3).codeword_strings() == ["000", "111"]


@pytest.mark.parametrize("word, expected", [("101", "111"), ("110", "111"), ("010", "000")])
def test_repetition_majority(word, expected):
    codeword, error = syndrome_decode(repetition_code(3), word)
    assert str(codeword) == expected
    assert codeword.as_int == BitVector.coerce(word).as_int ^ error.as_int


def test_repetition_decode_error_pattern():
    codeword, error = syndrome_decode(repetition_code(3), "110")
    assert str(error) == "001"


def test_repetition_five():
    codeword, _ = syndrome_decode(repetition_code(5), "00100")
    assert str(codeword) == "00000"


@pytest.mark.parametrize("n", [1, 2, 4])
def test_repetition_rejects_bad_length(n):
    with pytest.raises(ValueError):
        repetition_code(n)


def test_hamming_codewords_match_display():
    words = set(hamming_7_4().codeword_strings())
    assert len(words) == 16
    assert set(HAMMING_ZERO) <= words
    complements = {"".join("1" if c == "0" else "0" for c in w) for w in HAMMING_ZERO}
    assert complements <= words
    assert {"1111111", "0000111"} <= words


def test_hamming_distance():
    assert hamming_7_4().min_distance() == 3


def test_generator_check_orthogonality():
    for code in (repetition_code(3), repetition_code(7), hamming_7_4(), even_weight_code(5), full_space(3)):
        assert not np.any((code.G.astype(int) @ code.H.T.astype(int)) % 2)
        assert len(code.codewords()) == 2**code.k


def test_hamming_single_errors_corrected_exhaustively():
    code = hamming_7_4()
    for codeword in code.codewords():
        for pos in range(7):
            received = BitVector.from_int(codeword ^ (1 << (6 - pos)), 7)
            decoded, error = syndrome_decode(code, received)
            assert decoded.as_int == codeword
            assert error.weight == 1 and error.bits[pos] == 1


def test_hamming_flip_bit_three():
    decoded, error = syndrome_decode(hamming_7_4(), "0001000")
    assert str(decoded) == "0000000"
    assert str(error) == "0001000"


def test_zero_syndrome_gives_zero_error():
    _, error = syndrome_decode(hamming_7_4(), "1111000")
    assert error.weight == 0


def test_repetition_five_corrects_two_errors():
    code = repetition_code(5)
    for codeword in code.codewords():
        for support in itertools.chain(itertools.combinations(range(5), 1), itertools.combinations(range(5), 2)):
            error = sum(1 << (4 - p) for p in support)
            decoded, _ = syndrome_decode(code, BitVector.from_int(codeword ^ error, 5))
            assert decoded.as_int == codeword


def test_partial_table_reports_missing_syndrome():
    with pytest.raises(DecodingError):
        syndrome_decode(repetition_code(5), "11000", max_weight=1)


def test_decode_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        syndrome_decode(hamming_7_4(), "101")


def test_dual_of_repetition_is_even_weight():
    dual = dual_code(repetition_code(3))
    assert (dual.n, dual.k) == (3, 2)
    assert dual.codeword_strings() == ["000", "011", "101", "110"]


def test_dual_is_an_involution():
    code = hamming_7_4()
    assert dual_code(dual_code(code)).codewords() == code.codewords()


def test_hamming_dual_inside_hamming():
    code = hamming_7_4()
    words = set(code.codewords())
    assert all(w in words for w in dual_code(code).codewords())
    assert contains_dual(code, code)
    assert dual_violation(code, code) is None


def test_repetition_does_not_contain_its_dual():
    code = repetition_code(3)
    assert not contains_dual(code, code)
    violation = dual_violation(code, code)
    assert violation is not None and not code.contains(violation)


def test_full_space_contains_dual():
    assert contains_dual(full_space(3), full_space(3))


def test_contains_dual_agrees_with_enumeration():
    codes = [repetition_code(3), even_weight_code(3), full_space(3)]
    for c1, c2 in itertools.product(codes, codes):
        dual_words = dual_code(c2).codewords()
        assert contains_dual(c1, c2) == all(c1.contains(BitVector.from_int(w, 3)) for w in dual_words)


def test_contains_dual_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        contains_dual(repetition_code(3), hamming_7_4())


def test_invalid_matrices_rejected():
    with pytest.raises(InvalidCodeError):
        ClassicalLinearCode(3, 1, [[1, 1, 1]], [[1, 0, 0], [0, 1, 1]])


def test_encode_and_syndrome():
    code = hamming_7_4()
    assert str(code.encode("0001")) == "1111111"
    assert code.syndrome("1111111") == 0


def test_matrix_file_round_trip(tmp_path):
    path = tmp_path / "code.txt"
    hamming_7_4().write(path)
    assert path.read_text().splitlines()[0] == "7 4"
    loaded = load_classical_code(path)
    assert loaded.codewords() == hamming_7_4().codewords()


def test_matrix_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n111\n")
    with pytest.raises(InvalidCodeError):
        load_classical_code(path)
    path.write_text("3 2\n110\n110\n")
    with pytest.raises(InvalidCodeError):
        load_classical_code(path)


def test_bundled_hamming_file_matches_builder():
    loaded = load_classical_code("configs/codes/hamming_7_4.txt")
    assert gf2.rank(loaded.generator_rows + hamming_7_4().generator_rows, 7) == 4
