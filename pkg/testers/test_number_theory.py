from fractions import Fraction

import pytest

from modules.number_theory import (
    carmichael_lambda,
    convergents,
    factorize,
    is_generator,
    is_prime,
    multiplicative_order,
    perfect_power,
    reduce_to_order,
    solve_linear_congruence,
)


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    assert factorize(97) == {97: 1}
    with pytest.raises(ValueError):
        factorize(0)


@pytest.mark.parametrize("n, expected", [(2, True), (7, True), (9, False), (1, False), (31, True), (33, False)])
def test_is_prime(n, expected):
    assert is_prime(n) is expected


@pytest.mark.parametrize("n, expected", [(27, (3, 3)), (64, (2, 6)), (49, (7, 2)), (12, None), (1, None), (15, None)])
def test_perfect_power(n, expected):
    assert perfect_power(n) == expected


def test_multiplicative_order():
    assert multiplicative_order(7, 15) == 4
    assert multiplicative_order(2, 21) == 6
    assert multiplicative_order(4, 15) == 2
    with pytest.raises(ValueError, match="not a unit"):
        multiplicative_order(3, 15)


def test_carmichael_lambda_is_a_multiple_of_every_order():
    assert carmichael_lambda(15) == 4
    assert carmichael_lambda(8) == 2
    assert carmichael_lambda(21) == 6
    for n in range(3, 65):
        lam = carmichael_lambda(n)
        for a in range(1, n):
            if all(a % p for p in factorize(n)):
                assert lam % multiplicative_order(a, n) == 0


def test_is_generator():
    assert is_generator(3, 7) and is_generator(5, 7)
    assert not is_generator(2, 7)
    assert [g for g in range(1, 11) if is_generator(g, 11)] == [2, 6, 7, 8]
    assert not is_generator(2, 9)


def test_convergents():
    assert convergents(3, 8) == [Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(3, 8)]
    assert convergents(64, 256)[-1] == Fraction(1, 4)
    assert convergents(0, 16) == [Fraction(0)]


def test_reduce_to_order():
    assert reduce_to_order(7, 15, 8) == 4
    assert reduce_to_order(2, 21, 12) == 6
    assert reduce_to_order(4, 15, 4) == 2


def test_solve_linear_congruence():
    assert solve_linear_congruence(4, 2, 6) == [2, 5]
    assert solve_linear_congruence(2, 1, 4) == []
    assert solve_linear_congruence(3, 4, 7) == [6]
    assert solve_linear_congruence(0, 0, 5) == [0, 1, 2, 3, 4]
