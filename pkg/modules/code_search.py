"""
Randomized search for small stabilizer codes and local-Clifford equivalence
testing between codes.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import permutations
from typing import Optional, Tuple
import logging

import numpy as np

from modules.data_structure import DimensionMismatchError, SearchLimitError
from modules.pauli import PauliOperator, symplectic_matrix_products
from modules.stabilizer import StabilizerCode, min_distance, paulis_of_weight
from modules.utils import default_workers, derive_seeds

logger = logging.getLogger(__name__)

# Order of the symmetry group of the five-qubit code as reported from an
# external group computation. Recorded only; nothing here computes it.
FIVE_QUBIT_GROUP_ORDER = 5160960

MAX_SEARCH_QUBITS = 8
MAX_EQUIVALENCE_QUBITS = 6

# the six invertible 2x2 matrices over GF(2), acting on a qubit's (x, z) bits
LOCAL_CLIFFORD_ACTIONS = (
    ((1, 0), (0, 1)),
    ((0, 1), (1, 0)),
    ((1, 0), (1, 1)),
    ((1, 1), (0, 1)),
    ((0, 1), (1, 1)),
    ((1, 1), (1, 0)),
)


def random_symplectic(n: int, rng: np.random.Generator, depth: int = 0) -> np.ndarray:
    """
    Rows 0..n-1 are the images of X_i, rows n..2n-1 the images of Z_i under a
    random Clifford circuit of H, S and CNOT gates, as symplectic vectors.
    """
    depth = depth or 4 * n * n
    m = np.eye(2 * n, dtype=np.uint8)
    kinds = rng.integers(0, 3, size=depth)
    for kind in kinds:
        if kind == 0 or n == 1:
            q = int(rng.integers(n))
            if rng.integers(2):
                m[:, [q, n + q]] = m[:, [n + q, q]]
            else:
                m[:, n + q] ^= m[:, q]
        else:
            a, b = (int(v) for v in rng.choice(n, size=2, replace=False))
            m[:, b] ^= m[:, a]
            m[:, n + a] ^= m[:, n + b]
    return m


def _code_from_symplectic(m: np.ndarray, n: int, k: int) -> StabilizerCode:
    generators = tuple(PauliOperator.hermitian_from_symplectic(m[n + i]) for i in range(n - k))
    logical_x = tuple(PauliOperator.hermitian_from_symplectic(m[n - k + j]) for j in range(k))
    logical_z = tuple(PauliOperator.hermitian_from_symplectic(m[2 * n - k + j]) for j in range(k))
    return StabilizerCode(n, k, generators, logical_x, logical_z, name=f"searched-{n}-{k}")


def _search_batch(
    n: int, k: int, target_d: int, trials: int, seed: np.random.SeedSequence, depth: int, low_weight: np.ndarray
) -> Tuple[Optional[StabilizerCode], int]:
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        m = random_symplectic(n, rng, depth)
        generators = m[n : 2 * n - k]
        logicals = np.concatenate([m[n - k : n], m[2 * n - k :]])
        if low_weight.size:
            undetected = ~symplectic_matrix_products(low_weight, generators).any(axis=1)
            nontrivial = symplectic_matrix_products(low_weight, logicals).any(axis=1)
            if np.any(undetected & nontrivial):
                continue
        code = _code_from_symplectic(m, n, k)
        return code.with_distance(min_distance(code)), trial + 1
    return None, trials


def search_code(
    n: int,
    k: int,
    target_d: int,
    rng: np.random.Generator,
    budget: int = 1_000_000,
    batch_size: int = 256,
    workers: int = 0,
    depth: int = 0,
) -> Optional[StabilizerCode]:
    """
    Random search for an [[n, k, >= target_d]] stabilizer code.
    Args:
        n (int): physical qubits, at most 8.
        k (int): logical qubits, 1 <= k < n.
        target_d (int): required distance.
        rng (np.random.Generator): supplies the master seed of the search.
        budget (int): total number of random codes tried.
        batch_size (int): trials per independently seeded batch.
        workers (int): thread count, 0 for the host default.
        depth (int): scrambling circuit depth, 0 for 4 n^2.
    Returns:
        StabilizerCode with its distance certificate, or None when the budget runs out.
    """
    if n > MAX_SEARCH_QUBITS:
        raise SearchLimitError(f"code search supports n <= {MAX_SEARCH_QUBITS}, got {n}")
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    if target_d < 1:
        raise ValueError(f"target distance must be positive, got {target_d}")
    low_weight = (
        np.concatenate([paulis_of_weight(n, w) for w in range(1, target_d)])
        if target_d > 1
        else np.zeros((0, 2 * n), dtype=np.uint8)
    )
    num_batches = -(-budget // batch_size)
    seeds = derive_seeds(int(rng.integers(2**63)), num_batches)
    workers = workers or default_workers()
    logger.info(f"searching [[{n},{k},{target_d}]] codes: budget {budget}, {num_batches} batches, {workers} workers")

    tried = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for wave_start in range(0, num_batches, workers):
            wave = range(wave_start, min(wave_start + workers, num_batches))
            sizes = [min(batch_size, budget - b * batch_size) for b in wave]
            results = list(
                pool.map(
                    lambda args: _search_batch(n, k, target_d, args[1], seeds[args[0]], depth, low_weight),
                    zip(wave, sizes),
                )
            )
            for batch, (code, used) in zip(wave, results):
                tried += used
                if code is not None:
                    logger.info(f"found [[{code.n},{code.k},{code.distance}]] in batch {batch}")
                    return code
    logger.warning(f"no [[{n},{k},{target_d}]] code within {tried} trials")
    return None


def _symplectic_rows(paulis) -> np.ndarray:
    return np.array([p.symplectic() for p in paulis], dtype=np.uint8)


def find_equivalence(a: StabilizerCode, b: StabilizerCode) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """
    A qubit permutation and per-qubit local Clifford (index into
    LOCAL_CLIFFORD_ACTIONS) carrying a's stabilizer group onto b's, ignoring
    signs. Qubit i of a lands on qubit perm[i] of b.
    """
    if (a.n, a.k) != (b.n, b.k):
        raise DimensionMismatchError(f"[[{a.n},{a.k}]] and [[{b.n},{b.k}]] codes cannot be compared")
    n = a.n
    if n > MAX_EQUIVALENCE_QUBITS:
        raise SearchLimitError(f"equivalence search supports n <= {MAX_EQUIVALENCE_QUBITS}, got {n}")
    gens = _symplectic_rows(a.generators).astype(np.int64)
    # the stabilizer group of b is the symplectic complement of its normalizer
    normalizer = _symplectic_rows(list(b.generators) + list(b.logical_x) + list(b.logical_z)).astype(np.int64)
    if gens.size == 0:
        return tuple(range(n)), (0,) * n
    num_g, num_v = gens.shape[0], normalizer.shape[0]
    weights = (np.uint64(1) << np.arange(num_g * num_v, dtype=np.uint64)).reshape(num_g, num_v)
    actions = np.array(LOCAL_CLIFFORD_ACTIONS, dtype=np.int64)

    for perm in permutations(range(n)):
        inverse = np.argsort(perm)
        gx = gens[:, :n][:, inverse]
        gz = gens[:, n:][:, inverse]
        acc = np.zeros(1, dtype=np.uint64)
        for p in range(n):
            new_x = (actions[:, 0, 0, None] * gx[None, :, p] + actions[:, 0, 1, None] * gz[None, :, p]) % 2
            new_z = (actions[:, 1, 0, None] * gx[None, :, p] + actions[:, 1, 1, None] * gz[None, :, p]) % 2
            products = (
                new_x[:, :, None] * normalizer[None, None, :, n + p] + new_z[:, :, None] * normalizer[None, None, :, p]
            ) % 2
            contribution = np.bitwise_or.reduce(
                np.where(products.astype(bool), weights[None], np.uint64(0)).reshape(6, -1), axis=1
            )
            acc = (acc[:, None] ^ contribution[None, :]).reshape(-1)
        hits = np.flatnonzero(acc == 0)
        if hits.size:
            index = int(hits[0])
            local = []
            for _ in range(n):
                local.append(index % 6)
                index //= 6
            return tuple(int(v) for v in perm), tuple(reversed(local))
    return None


def equivalent_codes(a: StabilizerCode, b: StabilizerCode) -> bool:
    """True iff a qubit permutation followed by local Cliffords maps a's stabilizer group onto b's."""
    found = find_equivalence(a, b)
    if found is not None:
        logger.debug(f"{a.name or 'code a'} ~ {b.name or 'code b'} via permutation {found[0]}, local {found[1]}")
    return found is not None
