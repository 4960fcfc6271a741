"""
Period-finding algorithms on the statevector simulator: Simon's problem,
order finding and factoring, discrete logarithms, hidden periods on a torus,
phase estimation and Grover search.

Oracles are classically computed basis permutations (|x, w> -> |x, w + f(x)>)
applied to the state, not reversible arithmetic circuits. Every returned
answer is checked against its defining relation first.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from modules import gf2
from modules.data_structure import (
    DimensionMismatchError,
    InvalidInstanceError,
    RetryBudgetExceededError,
    StateTooLargeError,
)
from modules.number_theory import (
    carmichael_lambda,
    convergents,
    is_generator,
    is_prime,
    perfect_power,
    reduce_to_order,
    solve_linear_congruence,
)
from modules.statevector import (
    H,
    MAX_AMPLITUDES,
    TOLERANCE,
    Gate,
    StateVector,
    apply_basis_permutation,
    apply_gate,
    apply_phases,
    basis_state,
    controlled,
    measure,
    plus_state,
    probabilities,
    tensor,
    zero_state,
)

logger = logging.getLogger(__name__)

MAX_SIMON_BITS = 10
MAX_GROVER_BITS = 10
MAX_ORDER_MODULUS = 64
MAX_DLOG_PRIME = 32
MAX_PHASE_BITS = 10
POWER_OF_TWO = "power-of-two"
EXACT = "exact"

SIMON = "simon"
MARKED = "marked-item"


@dataclass(frozen=True)
class OracleFunction:
    """
    A function on GF(2)^n given by its value table, with the promise it keeps.
    For Simon oracles secret is the hidden period; for marked-item oracles the
    table is 1 on marked inputs and 0 elsewhere.
    """

    n: int
    table: Tuple[int, ...]
    promise: str
    secret: Optional[int] = None

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def marked(self) -> List[int]:
        return [x for x, v in enumerate(self.table) if v]


def _bits_to_int(bits: Union[str, Sequence[int]]) -> Tuple[int, int]:
    text = bits if isinstance(bits, str) else "".join(str(int(b)) for b in bits)
    if not text or set(text) - {"0", "1"}:
        raise InvalidInstanceError(f"not a bit string: {bits!r}")
    return int(text, 2), len(text)


def simon_oracle(period: Union[str, Sequence[int]]) -> OracleFunction:
    """f(x) = min(x, x xor s): two-to-one with period s."""
    s, n = _bits_to_int(period)
    if s == 0:
        raise InvalidInstanceError("Simon period must be nonzero")
    return OracleFunction(n, tuple(min(x, x ^ s) for x in range(1 << n)), SIMON, s)


def simon_oracle_from_table(table: Sequence[int]) -> OracleFunction:
    """Validates the Simon promise on a value table and finds its period."""
    size = len(table)
    n = size.bit_length() - 1
    if size < 2 or 1 << n != size:
        raise InvalidInstanceError(f"table length {size} is not a power of two >= 2")
    partner = [y for y in range(1, size) if table[0] == table[y]]
    if len(partner) != 1:
        raise InvalidInstanceError("table is not two-to-one")
    s = partner[0]
    for x in range(size):
        for y in range(size):
            if (table[x] == table[y]) != (y in (x, x ^ s)):
                raise InvalidInstanceError(f"Simon promise broken at inputs {x} and {y}")
    return OracleFunction(n, tuple(int(v) for v in table), SIMON, s)


def marked_oracle(n: int, marked: int) -> OracleFunction:
    if not 0 <= marked < 1 << n:
        raise InvalidInstanceError(f"marked item {marked} out of range for {n} bits")
    return OracleFunction(n, tuple(int(x == marked) for x in range(1 << n)), MARKED, marked)


@dataclass
class AlgorithmResult:
    algorithm: str
    instance: Dict[str, Any]
    answer: Any
    queries_or_trials: int
    verified: bool = True
    data: Dict[str, Any] = field(default_factory=dict)

    def as_record(self, seed: Optional[int] = None, version: str = "") -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "instance": self.instance,
            "answer": self.answer,
            "queries_or_trials": self.queries_or_trials,
            "seed": seed,
            "verified": self.verified,
            "version": version,
        }


# Fourier transforms

def fourier_gf2n(state: StateVector, qubits: Optional[Sequence[int]] = None) -> StateVector:
    """H on every listed qubit (all registers by default)."""
    qubits = range(state.num_registers) if qubits is None else qubits
    for q in qubits:
        if state.dims[q] != 2:
            raise DimensionMismatchError(f"register {q} has dimension {state.dims[q]}, not 2")
        state = apply_gate(state, H, [q])
    return state


def dft_matrix(q: int) -> np.ndarray:
    """F[y, x] = exp(2 pi i x y / q) / sqrt(q)."""
    k = np.arange(q)
    return np.exp(2j * np.pi * np.outer(k, k) / q) / math.sqrt(q)


def fourier_mod_q(state: StateVector, register: int = 0, inverse: bool = False) -> StateVector:
    """
    Exact DFT over Z_q on one register, q being that register's dimension:
    |x> -> q^(-1/2) sum_y exp(2 pi i x y / q) |y>.
    """
    if not 0 <= register < state.num_registers:
        raise DimensionMismatchError(f"register {register} out of range for {state.num_registers} registers")
    view = state.tensor_view()
    # the unnormalized inverse FFT carries the +2 pi i sign
    transformed = np.fft.fft(view, axis=register, norm="ortho") if inverse else np.fft.ifft(view, axis=register, norm="ortho")
    return StateVector(state.dims, transformed.reshape(-1))


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    # rounding residue must not be sampled as an outcome
    probs = np.where(probs > 1e-12, probs, 0.0)
    return int(rng.choice(probs.size, p=probs / probs.sum()))


# Simon

def simon(oracle: OracleFunction, rng: Optional[np.random.Generator] = None, max_queries: int = 200) -> AlgorithmResult:
    """
    Hidden period of a Simon oracle.
    Each query prepares the uniform superposition, writes f(x) into an n-qubit
    output register, applies H^n to the input register and measures it; the
    samples y satisfy y.s = 0 and the period spans their null space once they
    reach rank n-1.
    Raises:
        RetryBudgetExceededError: rank n-1 not reached within max_queries.
    """
    n = oracle.n
    if oracle.promise != SIMON:
        raise InvalidInstanceError(f"expected a Simon oracle, got a {oracle.promise} oracle")
    if not 1 <= n <= MAX_SIMON_BITS:
        raise InvalidInstanceError(f"Simon needs 1 <= n <= {MAX_SIMON_BITS}, got {n}")
    rng = rng if rng is not None else np.random.default_rng()

    size = 1 << n
    state = tensor(plus_state(n), zero_state(n))
    x, w = np.divmod(np.arange(size * size), size)
    state = apply_basis_permutation(state, x * size + (w ^ np.asarray(oracle.table)[x]))
    state = fourier_gf2n(state, range(n))
    distribution = probabilities(state, range(n))

    samples: List[int] = []
    rows: List[int] = []
    for query in range(1, max_queries + 1):
        y = _sample(distribution, rng)
        samples.append(y)
        if oracle.secret is not None and gf2.dot(y, oracle.secret):
            raise InvalidInstanceError(f"sample {gf2.to_bitstring(y, n)} is not orthogonal to the period")
        rows = gf2.independent_subset(rows + [y], n)
        if len(rows) == n - 1:
            (s,) = [v for v in gf2.nullspace(rows, n) if v]
            logger.debug(f"simon: rank {n - 1} after {query} queries, period {gf2.to_bitstring(s, n)}")
            verified = oracle(0) == oracle(s)
            if not verified:
                raise InvalidInstanceError("recovered period does not satisfy f(0) = f(s)")
            return AlgorithmResult(
                SIMON,
                {"n": n},
                tuple(gf2.unpack_bits(s, n)),
                query,
                data={"samples": samples, "period": gf2.to_bitstring(s, n)},
            )
    raise RetryBudgetExceededError(f"Simon: rank {len(rows)} < {n - 1} after {max_queries} queries")


# Order finding and factoring

def _fourier_modulus(n: int, mode: str, a: int) -> int:
    if mode == POWER_OF_TWO:
        return 1 << (n * n - 1).bit_length()
    if mode == EXACT:
        return carmichael_lambda(n)
    raise InvalidInstanceError(f"mode must be {POWER_OF_TWO!r} or {EXACT!r}, got {mode!r}")


def _order_finding_state(n: int, a: int, q: int) -> StateVector:
    if q * n > MAX_AMPLITUDES:
        raise StateTooLargeError(f"order finding with Q={q}, N={n} needs {q * n} amplitudes")
    state = tensor(StateVector([q], np.full(q, 1 / math.sqrt(q))), basis_state([n], 0))
    x, w = np.divmod(np.arange(q * n), n)
    powers = np.array([pow(a, int(e), n) for e in range(q)], dtype=np.int64)
    state = apply_basis_permutation(state, x * n + (w + powers[x]) % n)
    return fourier_mod_q(state, 0)


def order_frequency_distribution(n: int, a: int, q: Optional[int] = None, mode: str = POWER_OF_TWO) -> np.ndarray:
    """Exact distribution of the frequency register measured by the order-finding subroutine."""
    _check_order_instance(n, a)
    q = q or _fourier_modulus(n, mode, a)
    return probabilities(_order_finding_state(n, a, q), [0])


def _check_order_instance(n: int, a: int):
    if not 2 < n <= MAX_ORDER_MODULUS:
        raise InvalidInstanceError(f"order finding needs 2 < N <= {MAX_ORDER_MODULUS}, got {n}")
    if not 1 < a < n or math.gcd(a, n) != 1:
        raise InvalidInstanceError(f"base {a} must satisfy 1 < a < {n} and gcd(a, {n}) = 1")


def order_find(
    n: int, a: int, rng: Optional[np.random.Generator] = None, mode: str = POWER_OF_TWO, max_trials: int = 40
) -> AlgorithmResult:
    """
    Multiplicative order of a mod n.
    Args:
        n (int): modulus, at most 64.
        a (int): base coprime to n.
        rng (np.random.Generator): measurement randomness.
        mode (str): "power-of-two" (Q the smallest power of two >= n^2) or "exact" (Q = lambda(n)).
        max_trials (int): measurement budget.
    Returns:
        AlgorithmResult: the order, verified by a^r = 1 mod n.
    Raises:
        RetryBudgetExceededError: no convergent denominator verified within max_trials.
    """
    _check_order_instance(n, a)
    rng = rng if rng is not None else np.random.default_rng()
    q = _fourier_modulus(n, mode, a)
    state = _order_finding_state(n, a, q)
    combined = 1
    for trial in range(1, max_trials + 1):
        c = measure(state, 0, rng=rng).outcome
        denominators = sorted({f.denominator for f in convergents(c, q) if f.denominator <= n})
        verified = [d for d in denominators if pow(a, d, n) == 1]
        if verified:
            r = reduce_to_order(a, n, verified[0])
        else:
            # a reduced s/r only yields a divisor of r; divisors from several samples combine by lcm
            d = denominators[-1]
            combined = combined * d // math.gcd(combined, d)
            if combined > n:
                combined = d
            if pow(a, combined, n) != 1:
                continue
            r = reduce_to_order(a, n, combined)
        logger.debug(f"order_find({n}, {a}): r = {r} after {trial} measurements (Q={q})")
        return AlgorithmResult(
            "order", {"N": n, "a": a, "Q": q, "mode": mode}, r, trial, data={"last_frequency": c}
        )
    raise RetryBudgetExceededError(f"order of {a} mod {n} not found in {max_trials} measurements")


def factor(
    n: int, rng: Optional[np.random.Generator] = None, mode: str = POWER_OF_TWO, max_trials: int = 40
) -> AlgorithmResult:
    """
    A nontrivial factor pair of n.
    Even numbers and perfect powers are split classically; otherwise random
    bases are drawn until gcd(a, n) > 1 or the order r of a is even with
    a^(r/2) != -1 mod n, giving gcd(a^(r/2) - 1, n).
    """
    if n < 4 or is_prime(n):
        raise InvalidInstanceError(f"{n} is not composite")
    instance = {"N": n}
    if n % 2 == 0:
        return AlgorithmResult("factor", instance, (2, n // 2), 0, data={"route": "even"})
    power = perfect_power(n)
    if power is not None:
        base, _ = power
        return AlgorithmResult("factor", instance, tuple(sorted((base, n // base))), 0, data={"route": "perfect-power"})
    if n > MAX_ORDER_MODULUS:
        raise InvalidInstanceError(f"quantum factoring is limited to N <= {MAX_ORDER_MODULUS}, got {n}")
    rng = rng if rng is not None else np.random.default_rng()

    for trial in range(1, max_trials + 1):
        a = int(rng.integers(2, n))
        g = math.gcd(a, n)
        if g > 1:
            pair = tuple(sorted((g, n // g)))
            logger.debug(f"factor({n}): lucky base {a} shares factor {g}")
            return AlgorithmResult("factor", instance, pair, trial, data={"route": "gcd", "a": a})
        try:
            r = order_find(n, a, rng, mode=mode, max_trials=max_trials).answer
        except RetryBudgetExceededError as e:
            logger.debug(f"factor({n}): skipping base {a}: {e}")
            continue
        half = pow(a, r // 2, n)
        if r % 2 or half == n - 1:
            logger.debug(f"factor({n}): base {a} has unusable order {r}")
            continue
        g = math.gcd(half - 1, n)
        if 1 < g < n:
            pair = tuple(sorted((g, n // g)))
            return AlgorithmResult("factor", instance, pair, trial, data={"route": "order", "a": a, "r": r})
    raise RetryBudgetExceededError(f"no factor of {n} found in {max_trials} bases")


# Discrete logarithm

def discrete_log(
    p: int,
    g: int,
    y: int,
    rng: Optional[np.random.Generator] = None,
    mode: str = EXACT,
    max_trials: int = 40,
) -> AlgorithmResult:
    """
    x in [0, p-1) with g^x = y mod p.
    Two exponent registers of dimension q hold alpha and beta, the work
    register receives g^alpha y^(-beta), and both exponent registers are
    Fourier transformed. With q = p-1 the measured pair (c, d) satisfies
    c x + d = 0 mod p-1 exactly; with q a power of two >= (p-1)^2 it does so
    after rounding c (p-1)/q and d (p-1)/q. The power-of-two register pair
    fits the amplitude cap only for P <= 23; larger primes raise
    StateTooLargeError in that mode.
    """
    if not is_prime(p) or p > MAX_DLOG_PRIME:
        raise InvalidInstanceError(f"P must be a prime <= {MAX_DLOG_PRIME}, got {p}")
    if not is_generator(g, p):
        raise InvalidInstanceError(f"{g} does not generate the units mod {p}")
    if not 0 < y < p:
        raise InvalidInstanceError(f"y must be a unit mod {p}, got {y}")
    order = p - 1
    if mode == EXACT:
        q = order
    elif mode == POWER_OF_TWO:
        q = 1 << (order * order - 1).bit_length()
    else:
        raise InvalidInstanceError(f"mode must be {POWER_OF_TWO!r} or {EXACT!r}, got {mode!r}")
    if q * q * p > MAX_AMPLITUDES:
        raise StateTooLargeError(f"discrete log with q={q}, P={p} needs {q * q * p} amplitudes")
    rng = rng if rng is not None else np.random.default_rng()

    y_inverse = pow(y, -1, p)
    uniform = StateVector([q], np.full(q, 1 / math.sqrt(q)))
    state = tensor(uniform, uniform, basis_state([p], 0))
    index = np.arange(q * q * p)
    alpha, rest = np.divmod(index, q * p)
    beta, w = np.divmod(rest, p)
    g_pow = np.array([pow(g, int(e), p) for e in range(q)], dtype=np.int64)
    y_pow = np.array([pow(y_inverse, int(e), p) for e in range(q)], dtype=np.int64)
    value = g_pow[alpha] * y_pow[beta] % p
    state = apply_basis_permutation(state, alpha * q * p + beta * p + (w + value) % p)
    state = fourier_mod_q(fourier_mod_q(state, 0), 1)
    distribution = probabilities(state, [0, 1])

    instance = {"P": p, "g": g, "y": y, "q": q, "mode": mode}
    for trial in range(1, max_trials + 1):
        c, d = divmod(_sample(distribution, rng), q)
        if mode == POWER_OF_TWO:
            c, d = round(c * order / q) % order, round(d * order / q) % order
        if c == 0:
            continue
        for x in solve_linear_congruence(c, -d, order):
            if pow(g, x, p) == y:
                logger.debug(f"discrete_log: {g}^{x} = {y} mod {p} after {trial} samples")
                return AlgorithmResult("dlog", instance, x, trial, data={"frequencies": (c, d)})
    raise RetryBudgetExceededError(f"discrete log of {y} base {g} mod {p} not found in {max_trials} samples")


# Hidden period on a torus

def torus_period(
    q: int, period: Tuple[int, int], rng: Optional[np.random.Generator] = None, max_trials: int = 40
) -> AlgorithmResult:
    """
    Generator of the hidden subgroup <period> of Z_q x Z_q.
    The oracle labels the cosets of the subgroup; measured frequency pairs are
    orthogonal (mod q) to the subgroup, and sampling stops once the vectors
    orthogonal to every sample all lie in the subgroup according to the oracle.
    """
    v = (period[0] % q, period[1] % q)
    if q < 2 or v == (0, 0):
        raise InvalidInstanceError(f"need q >= 2 and a nonzero period, got q={q}, period={period}")
    rng = rng if rng is not None else np.random.default_rng()
    subgroup = sorted({(k * v[0] % q, k * v[1] % q) for k in range(q)})
    labels: Dict[Tuple[int, int], int] = {}
    cosets = 0
    for a in range(q):
        for b in range(q):
            if (a, b) not in labels:
                for s in subgroup:
                    labels[((a + s[0]) % q, (b + s[1]) % q)] = cosets
                cosets += 1
    work = max(cosets, 2)
    if q * q * work > MAX_AMPLITUDES:
        raise StateTooLargeError(f"torus period finding needs {q * q * work} amplitudes")

    uniform = StateVector([q], np.full(q, 1 / math.sqrt(q)))
    state = tensor(uniform, uniform, basis_state([work], 0))
    index = np.arange(q * q * work)
    a, rest = np.divmod(index, q * work)
    b, w = np.divmod(rest, work)
    table = np.array([[labels[(i, j)] for j in range(q)] for i in range(q)], dtype=np.int64)
    state = apply_basis_permutation(state, a * q * work + b * work + (w + table[a, b]) % work)
    state = fourier_mod_q(fourier_mod_q(state, 0), 1)
    distribution = probabilities(state, [0, 1])

    f0 = labels[(0, 0)]
    grid = [(i, j) for i in range(q) for j in range(q)]
    candidates = grid
    for trial in range(1, max_trials + 1):
        c, d = divmod(_sample(distribution, rng), q)
        candidates = [u for u in candidates if (c * u[0] + d * u[1]) % q == 0]
        if all(labels[u] == f0 for u in candidates):
            size = len(candidates)
            for u in candidates:
                if len({(k * u[0] % q, k * u[1] % q) for k in range(size)}) == size:
                    logger.debug(f"torus_period: generator {u} after {trial} samples")
                    return AlgorithmResult("torus", {"q": q, "period": list(period)}, u, trial)
    raise RetryBudgetExceededError(f"hidden subgroup on Z_{q}^2 not pinned down in {max_trials} samples")


# Phase estimation

def phase_estimate(
    unitary: Gate, eigenstate: StateVector, t: int, rng: Optional[np.random.Generator] = None
) -> AlgorithmResult:
    """
    t-bit phase estimate of U on an eigenstate.
    Control qubit j (qubit 0 most significant) drives U^(2^(t-1-j)); the
    inverse DFT on the control register then peaks at phase * 2^t.
    Raises:
        InvalidInstanceError: eigenstate is not an eigenvector of unitary within 1e-10.
    """
    if not 1 <= t <= MAX_PHASE_BITS:
        raise InvalidInstanceError(f"t must be in 1..{MAX_PHASE_BITS}, got {t}")
    if eigenstate.amps.size != unitary.dimension:
        raise DimensionMismatchError(f"{unitary.name} acts on dimension {unitary.dimension}, state has {eigenstate.amps.size}")
    image = unitary.matrix @ eigenstate.amps
    eigenvalue = np.vdot(eigenstate.amps, image)
    if np.max(np.abs(image - eigenvalue * eigenstate.amps)) > TOLERANCE:
        raise InvalidInstanceError(f"state is not an eigenvector of {unitary.name}")
    rng = rng if rng is not None else np.random.default_rng()

    targets = list(range(t, t + eigenstate.num_registers))
    state = tensor(plus_state(t), eigenstate)
    for j in range(t):
        power = unitary.power(2 ** (t - 1 - j))
        state = apply_gate(state, controlled(power), [j] + targets)
    control = 1 << t
    amps = state.amps.reshape(control, -1)
    amps = np.fft.fft(amps, axis=0, norm="ortho")
    state = StateVector(state.dims, amps.reshape(-1))
    distribution = probabilities(state, range(t))
    m = _sample(distribution, rng)
    # distance on the circle: an estimate of 0 is adjacent to 1 - 2^-t
    gap = abs(np.angle(eigenvalue) / (2 * math.pi) % 1.0 - m / control)
    return AlgorithmResult(
        "phase",
        {"unitary": unitary.name, "t": t},
        m / control,
        1,
        verified=bool(min(gap, 1 - gap) <= 1 / control),
        data={"distribution": distribution},
    )


# Grover

def grover_success_probability(n: int, iterations: int) -> float:
    theta = math.asin(2 ** (-n / 2))
    return math.sin((2 * iterations + 1) * theta) ** 2


def grover(
    oracle: OracleFunction, rng: Optional[np.random.Generator] = None, iterations: Optional[int] = None
) -> AlgorithmResult:
    """Single marked item search with floor(pi/4 * 2^(n/2)) oracle-plus-diffusion iterations by default."""
    n = oracle.n
    if oracle.promise != MARKED or len(oracle.marked) != 1:
        raise InvalidInstanceError("grover needs an oracle with exactly one marked item")
    if not 1 <= n <= MAX_GROVER_BITS:
        raise InvalidInstanceError(f"grover needs 1 <= n <= {MAX_GROVER_BITS}, got {n}")
    rng = rng if rng is not None else np.random.default_rng()
    if iterations is None:
        iterations = int(math.floor(math.pi / 4 * 2 ** (n / 2)))
    (target,) = oracle.marked

    phases = 1 - 2 * np.asarray(oracle.table, dtype=np.float64)
    state = plus_state(n)
    for _ in range(iterations):
        state = apply_phases(state, phases)
        amps = state.amps
        state = StateVector(state.dims, 2 * amps.mean() - amps)
    distribution = probabilities(state)
    answer = _sample(distribution, rng)
    return AlgorithmResult(
        "grover",
        {"n": n, "iterations": iterations},
        answer,
        iterations,
        verified=oracle(answer) == 1,
        data={
            "success_probability": float(distribution[target]),
            "expected_probability": grover_success_probability(n, iterations),
        },
    )
