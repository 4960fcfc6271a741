"""
Classical binary linear codes: repetition and Hamming codes, syndrome
decoding, duals and the weak-duality test used by the CSS construction.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from modules import gf2
from modules.data_structure import DecodingError, DimensionMismatchError, InvalidCodeError, SearchLimitError

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 16


@dataclass(frozen=True)
class BitVector:
    bits: Tuple[int, ...]

    @classmethod
    def coerce(cls, value: Union["BitVector", str, Sequence[int]]) -> "BitVector":
        if isinstance(value, BitVector):
            return value
        if isinstance(value, str):
            return cls(tuple(int(c) for c in value))
        return cls(tuple(int(b) & 1 for b in value))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVector":
        return cls(tuple(gf2.unpack_bits(value, n)))

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(str(b) for b in self.bits)

    @property
    def as_int(self) -> int:
        return gf2.pack_bits(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)


BitLike = Union[BitVector, str, Sequence[int]]


@dataclass(frozen=True)
class ClassicalLinearCode:
    """[n, k] binary code with generator G (k x n) and parity check H ((n-k) x n)."""

    n: int
    k: int
    G: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        G = np.asarray(self.G, dtype=np.uint8).reshape(-1, self.n) % 2
        H = np.asarray(self.H, dtype=np.uint8).reshape(-1, self.n) % 2
        if G.shape[0] != self.k or H.shape[0] != self.n - self.k:
            raise InvalidCodeError(f"G is {G.shape}, H is {H.shape} for an [{self.n},{self.k}] code")
        if np.any((G.astype(int) @ H.T.astype(int)) % 2):
            raise InvalidCodeError("G H^T != 0 over GF(2)")
        if gf2.rank(gf2.pack_matrix(G), self.n) != self.k:
            raise InvalidCodeError("generator matrix is rank deficient")
        if gf2.rank(gf2.pack_matrix(H), self.n) != self.n - self.k:
            raise InvalidCodeError("parity-check matrix is rank deficient")
        G.setflags(write=False)
        H.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)

    @classmethod
    def from_generator(cls, G, name: str = "") -> "ClassicalLinearCode":
        G = np.atleast_2d(np.asarray(G, dtype=np.uint8))
        n = G.shape[1]
        rows = gf2.independent_subset(gf2.pack_matrix(G), n)
        H_rows = gf2.nullspace(rows, n)
        return cls(n, len(rows), gf2.unpack_matrix(rows, n), gf2.unpack_matrix(H_rows, n), name)

    @classmethod
    def from_parity_check(cls, H, n: Optional[int] = None, name: str = "") -> "ClassicalLinearCode":
        H = np.asarray(H, dtype=np.uint8)
        n = n if n is not None else H.shape[1]
        rows = gf2.independent_subset(gf2.pack_matrix(H.reshape(-1, n)), n)
        G_rows = gf2.nullspace(rows, n)
        return cls(n, len(G_rows), gf2.unpack_matrix(G_rows, n), gf2.unpack_matrix(rows, n), name)

    @cached_property
    def generator_rows(self) -> List[int]:
        return gf2.pack_matrix(self.G)

    @cached_property
    def check_rows(self) -> List[int]:
        return gf2.pack_matrix(self.H)

    def codewords(self) -> List[int]:
        if self.k > ENUMERATION_LIMIT:
            raise SearchLimitError(f"refusing to enumerate 2^{self.k} codewords")
        return gf2.span(self.generator_rows, self.n)

    def codeword_strings(self) -> List[str]:
        return [gf2.to_bitstring(c, self.n) for c in self.codewords()]

    def contains(self, word: BitLike) -> bool:
        return self.syndrome(word) == 0

    def encode(self, message: BitLike) -> BitVector:
        message = BitVector.coerce(message)
        if len(message) != self.k:
            raise DimensionMismatchError(f"message length {len(message)} != k = {self.k}")
        word = 0
        for bit, row in zip(message.bits, self.generator_rows):
            if bit:
                word ^= row
        return BitVector.from_int(word, self.n)

    def syndrome(self, word: BitLike) -> int:
        word = BitVector.coerce(word)
        if len(word) != self.n:
            raise DimensionMismatchError(f"word length {len(word)} != n = {self.n}")
        value = word.as_int
        syndrome = 0
        for row in self.check_rows:
            syndrome = (syndrome << 1) | gf2.dot(row, value)
        return syndrome

    def min_distance(self) -> int:
        return min(gf2.weight(c) for c in self.codewords() if c)

    def syndrome_table(self, max_weight: Optional[int] = None) -> Dict[int, int]:
        """
        Coset leaders by increasing weight; within a weight the lexicographically
        smallest pattern wins. Partial when max_weight stops the enumeration early.
        """
        cache = self.__dict__.setdefault("_syndrome_tables", {})
        if max_weight in cache:
            return cache[max_weight]
        if self.n > ENUMERATION_LIMIT and max_weight is None:
            raise SearchLimitError(f"complete syndrome table for n = {self.n} is too large")
        target_size = 1 << (self.n - self.k)
        limit = self.n if max_weight is None else min(max_weight, self.n)
        table: Dict[int, int] = {}
        for w in range(limit + 1):
            patterns = sorted(sum(1 << (self.n - 1 - p) for p in support) for support in combinations(range(self.n), w))
            for error in patterns:
                table.setdefault(self.syndrome(BitVector.from_int(error, self.n)), error)
            if len(table) == target_size:
                break
        cache[max_weight] = table
        return table

    def write(self, path: Union[str, Path]):
        """Plain-text matrix format: 'n k' header, then the generator rows as 0/1 strings."""
        lines = [f"{self.n} {self.k}"] + ["".join(str(b) for b in row) for row in self.G]
        Path(path).write_text("\n".join(lines) + "\n")


def load_classical_code(path: Union[str, Path], name: str = "") -> ClassicalLinearCode:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise InvalidCodeError(f"{path}: empty code file")
    try:
        n, k = (int(v) for v in lines[0].split())
    except ValueError:
        raise InvalidCodeError(f"{path}: first line must be 'n k', got {lines[0]!r}")
    rows = lines[1:]
    if len(rows) != k or any(len(r) != n or set(r) - {"0", "1"} for r in rows):
        raise InvalidCodeError(f"{path}: expected {k} rows of {n} characters 0/1")
    code = ClassicalLinearCode.from_generator([[int(c) for c in r] for r in rows] or np.zeros((0, n)), name or Path(path).stem)
    if code.k != k:
        raise InvalidCodeError(f"{path}: generator rows are dependent (rank {code.k} < {k})")
    return code


def repetition_code(n: int) -> ClassicalLinearCode:
    """[n, 1] repetition code; H checks equality of adjacent bits."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"repetition code length must be odd and >= 3, got {n}")
    G = np.ones((1, n), dtype=np.uint8)
    H = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        H[i, i] = H[i, i + 1] = 1
    return ClassicalLinearCode(n, 1, G, H, f"repetition-{n}")


def hamming_7_4() -> ClassicalLinearCode:
    """
    [7, 4, 3] Hamming code. The parity checks span exactly the eight even-weight
    words 0000000, 1111000, 1100110, 0011110, 1010101, 0101101, 0110011, 1001011,
    so the code contains them and their complements.
    """
    H = [
        [1, 1, 1, 1, 0, 0, 0],
        [1, 1, 0, 0, 1, 1, 0],
        [1, 0, 1, 0, 1, 0, 1],
    ]
    G = H + [[1, 1, 1, 1, 1, 1, 1]]
    return ClassicalLinearCode(7, 4, G, H, "hamming-7-4")


def even_weight_code(n: int) -> ClassicalLinearCode:
    """[n, n-1] code of all even-weight words, the dual of the repetition code."""
    G = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        G[i, i] = G[i, i + 1] = 1
    return ClassicalLinearCode(n, n - 1, G, np.ones((1, n), dtype=np.uint8), f"even-weight-{n}")


def full_space(n: int) -> ClassicalLinearCode:
    return ClassicalLinearCode(n, n, np.eye(n, dtype=np.uint8), np.zeros((0, n), dtype=np.uint8), f"full-{n}")


def syndrome_decode(
    code: ClassicalLinearCode, word: BitLike, max_weight: Optional[int] = None
) -> Tuple[BitVector, BitVector]:
    """
    Nearest-codeword decoding through the syndrome table.
    Args:
        code (ClassicalLinearCode): the code.
        word (BitLike): received word of length n.
        max_weight (int): optional cap on coset-leader weight (partial table).
    Returns:
        (codeword, error) with codeword = word + error.
    Raises:
        DecodingError: the syndrome is not in a partial table.
    """
    word = BitVector.coerce(word)
    syndrome = code.syndrome(word)
    table = code.syndrome_table(max_weight)
    if syndrome not in table:
        raise DecodingError(
            f"syndrome {gf2.to_bitstring(syndrome, code.n - code.k)} of {word} is not in the table"
        )
    error = table[syndrome]
    return BitVector.from_int(word.as_int ^ error, code.n), BitVector.from_int(error, code.n)


def dual_code(code: ClassicalLinearCode) -> ClassicalLinearCode:
    """The [n, n-k] dual: its generator is the input's parity check."""
    name = f"dual({code.name})" if code.name else ""
    return ClassicalLinearCode(code.n, code.n - code.k, code.H, code.G, name)


def dual_violation(c1: ClassicalLinearCode, c2: ClassicalLinearCode) -> Optional[BitVector]:
    """A generator of dual(c2) that is not a codeword of c1, if any."""
    if c1.n != c2.n:
        raise DimensionMismatchError(f"code lengths differ: {c1.n} vs {c2.n}")
    for row in c2.check_rows:
        if not gf2.in_span(row, c1.generator_rows, c1.n):
            return BitVector.from_int(row, c1.n)
    return None


def contains_dual(c1: ClassicalLinearCode, c2: ClassicalLinearCode) -> bool:
    """True iff dual(c2) is a subcode of c1, decided by rank arithmetic."""
    if c1.n != c2.n:
        raise DimensionMismatchError(f"code lengths differ: {c1.n} vs {c2.n}")
    return gf2.rank(c1.generator_rows + c2.check_rows, c1.n) == c1.k
