"""
Bit-packed linear algebra over GF(2).

A row of length n is a Python int whose bit (n - 1 - j) holds column j, so
``int("1100110", 2)`` is the row 1100110 and row operations are single XORs.
"""

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


def pack_bits(bits: Sequence[int]) -> int:
    out = 0
    for bit in bits:
        out = (out << 1) | (int(bit) & 1)
    return out


def unpack_bits(value: int, n: int) -> List[int]:
    return [(value >> (n - 1 - j)) & 1 for j in range(n)]


def to_bitstring(value: int, n: int) -> str:
    return format(value, f"0{n}b") if n else ""


def pack_matrix(matrix) -> List[int]:
    return [pack_bits(row) for row in np.asarray(matrix, dtype=np.uint8)]


def unpack_matrix(rows: Sequence[int], n: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, n), dtype=np.uint8)
    return np.array([unpack_bits(r, n) for r in rows], dtype=np.uint8)


def parity(value: int) -> int:
    return bin(value).count("1") & 1


def weight(value: int) -> int:
    return bin(value).count("1")


def dot(a: int, b: int) -> int:
    return parity(a & b)


def row_reduce(rows: Sequence[int], n: int) -> Tuple[List[int], List[int]]:
    """
    Reduced row echelon form.
    Returns:
        (reduced rows without zero rows, pivot columns), pivot column j means bit n-1-j.
    """
    rows = [r for r in rows if r]
    pivots = []
    rank = 0
    for col in range(n):
        bit = 1 << (n - 1 - col)
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


def rank(rows: Sequence[int], n: int) -> int:
    return len(row_reduce(rows, n)[0])


def nullspace(rows: Sequence[int], n: int) -> List[int]:
    """Basis of {v : dot(r, v) = 0 for every row r}."""
    reduced, pivots = row_reduce(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = 1 << (n - 1 - f)
        for row, p in zip(reduced, pivots):
            if row & (1 << (n - 1 - f)):
                v |= 1 << (n - 1 - p)
        basis.append(v)
    return basis


def in_span(vector: int, rows: Sequence[int], n: int) -> bool:
    reduced, pivots = row_reduce(rows, n)
    for row, p in zip(reduced, pivots):
        if vector & (1 << (n - 1 - p)):
            vector ^= row
    return vector == 0


def solve(rows: Sequence[int], rhs: Sequence[int], n: int) -> Optional[int]:
    """One solution x of dot(rows[i], x) = rhs[i], or None when inconsistent."""
    augmented = [(r << 1) | (b & 1) for r, b in zip(rows, rhs)]
    reduced, pivots = row_reduce(augmented, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for row, p in zip(reduced, pivots):
        if row & 1:
            x |= 1 << (n - 1 - p)
    return x


def span(rows: Sequence[int], n: int) -> List[int]:
    """Every element of the row space, in increasing integer order."""
    basis, _ = row_reduce(rows, n)
    elements = [0]
    for row in basis:
        elements += [e ^ row for e in elements]
    return sorted(elements)


def independent_subset(rows: Iterable[int], n: int) -> List[int]:
    """Greedily keeps rows that increase the rank."""
    kept: List[int] = []
    for row in rows:
        if not in_span(row, kept, n):
            kept.append(row)
    return kept
