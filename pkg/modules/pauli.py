"""
n-qubit Pauli operators as a pair of GF(2) vectors plus a phase exponent.

A PauliOperator stands for i^phase * X^x Z^z, with X^x and Z^z the tensor
products over qubits. With this convention Y = i X Z, so the string "Y" has
x = z = 1 and phase 1, and X * Z = -iY.
"""

from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from modules.data_structure import DimensionMismatchError, QLabError
from modules.statevector import MeasurementRecord, StateVector, TOLERANCE

logger = logging.getLogger(__name__)

PAULI_BASIS = "pauli"

_PREFIXES = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PREFIX_OF = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_SINGLE_MATRICES = {
    (0, 0): np.eye(2, dtype=np.complex128),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=np.complex128),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class PauliOperator:
    __slots__ = ("x", "z", "phase")

    def __init__(self, x: Sequence[int], z: Sequence[int], phase: int = 0):
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise DimensionMismatchError(f"x and z parts must be equal-length vectors, got {x.shape}, {z.shape}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(phase) % 4)

    def __setattr__(self, key, value):
        raise AttributeError("PauliOperator is immutable")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        text = text.strip()
        body_start = len(text) - len(text.lstrip("+-i"))
        prefix, body = text[:body_start], text[body_start:]
        if prefix not in _PREFIXES or not body or set(body) - set(_LETTER_BITS):
            raise ValueError(f"not a Pauli string: {text!r}")
        x = [_LETTER_BITS[c][0] for c in body]
        z = [_LETTER_BITS[c][1] for c in body]
        return cls(x, z, _PREFIXES[prefix] + body.count("Y"))

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        if not 0 <= qubit < n:
            raise DimensionMismatchError(f"qubit {qubit} out of range for n = {n}")
        letters = ["I"] * n
        letters[qubit] = letter
        return cls.from_string("".join(letters))

    @classmethod
    def from_symplectic(cls, vector: Sequence[int], phase: int = 0) -> "PauliOperator":
        vector = np.asarray(vector, dtype=np.uint8)
        n = vector.size // 2
        return cls(vector[:n], vector[n:], phase)

    @classmethod
    def hermitian_from_symplectic(cls, vector: Sequence[int], sign: int = 0) -> "PauliOperator":
        """The Pauli with these bits whose string coefficient is +1 (sign 0) or -1 (sign 1)."""
        vector = np.asarray(vector, dtype=np.uint8)
        n = vector.size // 2
        num_y = int(np.sum(vector[:n] & vector[n:]))
        return cls(vector[:n], vector[n:], num_y + 2 * sign)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def letters(self) -> str:
        return "".join("IZXY"[2 * int(a) + int(b)] for a, b in zip(self.x, self.z))

    @property
    def coefficient_exponent(self) -> int:
        """k such that the operator equals i^k times its letter string."""
        return (self.phase - int(np.sum(self.x & self.z))) % 4

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.x | self.z))

    @property
    def is_hermitian(self) -> bool:
        return self.coefficient_exponent % 2 == 0

    @property
    def is_identity(self) -> bool:
        return not self.x.any() and not self.z.any()

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def commutes_with(self, other: "PauliOperator") -> bool:
        return symplectic_product(self.symplectic(), other.symplectic()) == 0

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.x, self.z, self.phase + 2)

    def unsigned(self) -> "PauliOperator":
        """Same letters, coefficient +1."""
        return PauliOperator.hermitian_from_symplectic(self.symplectic())

    def to_matrix(self) -> np.ndarray:
        matrix = np.array([[1.0 + 0j]])
        for a, b in zip(self.x, self.z):
            single = _SINGLE_MATRICES[(int(a), 0)] @ _SINGLE_MATRICES[(0, int(b))]
            matrix = np.kron(matrix, single)
        return (1j**self.phase) * matrix

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self.phase == other.phase and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self):
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    def __str__(self):
        return f"{_PREFIX_OF[self.coefficient_exponent]}{self.letters}"

    def __repr__(self):
        return f"PauliOperator({str(self)!r})"


def symplectic_product(a: np.ndarray, b: np.ndarray) -> int:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = a.size // 2
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) % 2)


def symplectic_matrix_products(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Pairwise symplectic products of two stacks of symplectic vectors."""
    rows_a = np.asarray(rows_a, dtype=np.int64)
    rows_b = np.asarray(rows_b, dtype=np.int64)
    n = rows_a.shape[1] // 2
    return (rows_a[:, :n] @ rows_b[:, n:].T + rows_a[:, n:] @ rows_b[:, :n].T) % 2


def pauli_mul(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product p*q: bits XOR, phase a + b + 2 (z_p . x_q) mod 4."""
    if p.n != q.n:
        raise DimensionMismatchError(f"Pauli lengths differ: {p.n} vs {q.n}")
    swap = int(np.sum(p.z.astype(np.int64) * q.x.astype(np.int64)))
    return PauliOperator(p.x ^ q.x, p.z ^ q.z, p.phase + q.phase + 2 * swap)


def embed(p: PauliOperator, n: int, qubits: Sequence[int]) -> PauliOperator:
    """Places p on the listed qubits of an n-qubit register."""
    if len(qubits) != p.n:
        raise DimensionMismatchError(f"{p.n}-qubit Pauli placed on {len(qubits)} qubits")
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    x[list(qubits)] = p.x
    z[list(qubits)] = p.z
    return PauliOperator(x, z, p.phase)


def _index_parity(indices: np.ndarray, mask_bits: Sequence[int]) -> np.ndarray:
    out = np.zeros(indices.shape, dtype=np.int64)
    for pos in mask_bits:
        out ^= (indices >> pos) & 1
    return out


def pauli_action(amps: np.ndarray, p: PauliOperator) -> np.ndarray:
    """i^phase X^x Z^z |b> = i^phase (-1)^(z.b) |b xor x>, on a raw 2^n amplitude array."""
    n = p.n
    if amps.size != 1 << n:
        raise DimensionMismatchError(f"{p.n}-qubit Pauli on {amps.size} amplitudes")
    indices = np.arange(amps.size, dtype=np.int64)
    x_mask = int(sum(int(b) << (n - 1 - q) for q, b in enumerate(p.x)))
    z_bits = [n - 1 - q for q in range(n) if p.z[q]]
    signs = 1 - 2 * _index_parity(indices, z_bits)
    out = np.empty_like(amps)
    out[indices ^ x_mask] = (1j**p.phase) * signs * amps
    return out


def apply_pauli(state: StateVector, p: PauliOperator) -> StateVector:
    if not state.is_qubits or state.num_registers != p.n:
        raise DimensionMismatchError(f"{p.n}-qubit Pauli on a state with dims {list(state.dims)}")
    return StateVector(state.dims, pauli_action(state.amps, p))


def expectation(state: StateVector, p: PauliOperator) -> complex:
    return complex(np.vdot(state.amps, apply_pauli(state, p).amps))


def measure_pauli(state: StateVector, p: PauliOperator, rng: Optional[np.random.Generator] = None) -> MeasurementRecord:
    """
    Projective measurement of a Hermitian Pauli observable.
    Outcome 0 is the +1 eigenvalue, outcome 1 the -1 eigenvalue.
    """
    if not p.is_hermitian:
        raise QLabError(f"{p} is not Hermitian and cannot be measured")
    rng = rng if rng is not None else np.random.default_rng()
    flipped = apply_pauli(state, p).amps
    plus = (state.amps + flipped) / 2
    prob_plus = float(np.vdot(plus, plus).real)
    prob_plus = min(1.0, max(0.0, prob_plus))
    if prob_plus >= 1.0 - TOLERANCE:
        outcome = 0
    elif prob_plus <= TOLERANCE:
        outcome = 1
    else:
        outcome = 0 if rng.random() < prob_plus else 1
    projected = plus if outcome == 0 else (state.amps - flipped) / 2
    probability = prob_plus if outcome == 0 else 1.0 - prob_plus
    collapsed = StateVector(state.dims, projected / math.sqrt(float(np.vdot(projected, projected).real)))
    return MeasurementRecord(outcome, probability, collapsed, PAULI_BASIS)


def single_qubit_paulis(n: int, letters: str = "XYZ") -> List[PauliOperator]:
    """Every weight-one Pauli, qubit-major then letter order."""
    return [PauliOperator.single(n, q, letter) for q in range(n) for letter in letters]
