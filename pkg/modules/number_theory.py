"""Classical number theory for the period-finding algorithms, at desk-scale sizes."""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple
import math


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    factors: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def perfect_power(n: int) -> Optional[Tuple[int, int]]:
    """(b, k) with b**k == n and k >= 2 maximal, or None."""
    for k in range(int(math.log2(n)) if n > 1 else 1, 1, -1):
        b = round(n ** (1 / k))
        for candidate in (b - 1, b, b + 1):
            if candidate > 1 and candidate**k == n:
                return candidate, k
    return None


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    r, value = 1, a % n
    while value != 1 % n:
        value = value * a % n
        r += 1
    return r


def carmichael_lambda(n: int) -> int:
    """Exponent of the unit group mod n: every unit's order divides it."""
    result = 1
    for p, k in factorize(n).items():
        if p == 2 and k >= 3:
            part = 2 ** (k - 2)
        else:
            part = (p - 1) * p ** (k - 1)
        result = result * part // math.gcd(result, part)
    return result


def is_generator(g: int, p: int) -> bool:
    """g generates the multiplicative group mod the prime p."""
    if not is_prime(p) or not 0 < g < p:
        return False
    return all(pow(g, (p - 1) // q, p) != 1 for q in factorize(p - 1))


def convergents(numerator: int, denominator: int) -> List[Fraction]:
    """Continued-fraction convergents of numerator/denominator, in order."""
    out: List[Fraction] = []
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while denominator:
        q, rest = divmod(numerator, denominator)
        h_prev, h = h, q * h + h_prev
        k_prev, k = k, q * k + k_prev
        out.append(Fraction(h, k))
        numerator, denominator = denominator, rest
    return out


def reduce_to_order(a: int, n: int, multiple: int) -> int:
    """Smallest divisor r of multiple with a**r == 1 mod n, given a**multiple == 1 mod n."""
    r = multiple
    for p in factorize(multiple):
        while r % p == 0 and pow(a, r // p, n) == 1:
            r //= p
    return r


def solve_linear_congruence(a: int, b: int, m: int) -> List[int]:
    """Every x in [0, m) with a*x == b (mod m), ascending."""
    a, b = a % m, b % m
    g = math.gcd(a, m)
    if b % g:
        return []
    step = m // g
    x0 = (b // g) * pow(a // g, -1, step) % step if step > 1 else 0
    return [x0 + i * step for i in range(g)]
