"""
Stabilizer formalism: stabilizer codes, Clifford tableaus, a tableau-based
Clifford circuit simulator, codespace checks, exhaustive distance and the
stabilizer text format.
"""

from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from modules import gf2
from modules.data_structure import (
    DimensionMismatchError,
    InvalidCodeError,
    NonCliffordGateError,
    SearchLimitError,
)
from modules.pauli import (
    PauliOperator,
    apply_pauli,
    embed,
    pauli_mul,
    symplectic_matrix_products,
    symplectic_product,
)
from modules.statevector import StateVector, TOLERANCE

logger = logging.getLogger(__name__)

MAX_DISTANCE_QUBITS = 12

GATE_ALIASES = {"CX": "CNOT", "SDG": "S†", "SD": "S†"}
ONE_QUBIT_CLIFFORDS = ("I", "X", "Y", "Z", "H", "S", "S†")
TWO_QUBIT_CLIFFORDS = ("CNOT", "CZ", "SWAP")

Operation = Tuple  # ("H", 0), ("CNOT", 0, 1), ("M", 2)


def _canonical_gate(name: str) -> str:
    upper = name.upper()
    return GATE_ALIASES.get(upper, upper)


# Symplectic helpers

def _pack_symplectic(vectors: Sequence[np.ndarray]) -> List[int]:
    return [gf2.pack_bits(v) for v in vectors]


def _swap_halves(vector: np.ndarray) -> np.ndarray:
    n = vector.size // 2
    return np.concatenate([vector[n:], vector[:n]])


def symplectic_rank(paulis: Sequence[PauliOperator]) -> int:
    if not paulis:
        return 0
    return gf2.rank(_pack_symplectic([p.symplectic() for p in paulis]), 2 * paulis[0].n)


def normalizer_basis(generators: Sequence[PauliOperator], n: int) -> List[np.ndarray]:
    """Basis of every symplectic vector commuting with all generators."""
    rows = _pack_symplectic([_swap_halves(g.symplectic()) for g in generators])
    return [np.array(gf2.unpack_bits(v, 2 * n), dtype=np.uint8) for v in gf2.nullspace(rows, 2 * n)]


def find_logicals(
    generators: Sequence[PauliOperator], n: int
) -> Tuple[List[PauliOperator], List[PauliOperator]]:
    """
    Logical X/Z pairs for a stabilizer group by symplectic Gram-Schmidt on its
    normalizer. Returns (logical_x, logical_z) with coefficient +1.
    """
    pool = normalizer_basis(generators, n)
    pool.sort(key=lambda v: (int(np.count_nonzero(v[:n] | v[n:])), gf2.pack_bits(v)))
    logical_x: List[PauliOperator] = []
    logical_z: List[PauliOperator] = []
    while True:
        pair = next(
            ((i, j) for i, j in combinations(range(len(pool)), 2) if symplectic_product(pool[i], pool[j])),
            None,
        )
        if pair is None:
            break
        v, w = pool[pair[0]], pool[pair[1]]
        rest = [u for idx, u in enumerate(pool) if idx not in pair]
        pool = [
            (u + symplectic_product(u, w) * v + symplectic_product(u, v) * w) % 2
            for u in rest
        ]
        pool = [u.astype(np.uint8) for u in pool]
        logical_x.append(PauliOperator.hermitian_from_symplectic(v))
        logical_z.append(PauliOperator.hermitian_from_symplectic(w))
    return logical_x, logical_z


def destabilizers(code: "StabilizerCode") -> List[PauliOperator]:
    """d_i anticommuting with generator i only and commuting with every logical operator."""
    n = code.n
    constraints = list(code.generators) + list(code.logical_x) + list(code.logical_z)
    rows = _pack_symplectic([_swap_halves(p.symplectic()) for p in constraints])
    out = []
    for i in range(len(code.generators)):
        rhs = [1 if j == i else 0 for j in range(len(constraints))]
        solution = gf2.solve(rows, rhs, 2 * n)
        if solution is None:
            raise InvalidCodeError("generators and logical operators are not independent")
        out.append(PauliOperator.hermitian_from_symplectic(gf2.unpack_bits(solution, 2 * n)))
    return out


# Codes

@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    generators: Tuple[PauliOperator, ...]
    logical_x: Tuple[PauliOperator, ...] = ()
    logical_z: Tuple[PauliOperator, ...] = ()
    distance: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "logical_x", tuple(self.logical_x))
        object.__setattr__(self, "logical_z", tuple(self.logical_z))
        if self.k < 0 or self.n < 1:
            raise InvalidCodeError(f"bad code parameters n={self.n}, k={self.k}")
        if len(self.generators) != self.n - self.k:
            raise InvalidCodeError(f"[[{self.n},{self.k}]] needs {self.n - self.k} generators, got {len(self.generators)}")
        for g in self.generators + self.logical_x + self.logical_z:
            if g.n != self.n:
                raise InvalidCodeError(f"{g} does not act on {self.n} qubits")
            if not g.is_hermitian:
                raise InvalidCodeError(f"{g} is not Hermitian")
        for a, b in combinations(self.generators, 2):
            if not a.commutes_with(b):
                raise InvalidCodeError(f"generators {a} and {b} anticommute")
        if self.generators and symplectic_rank(self.generators) != len(self.generators):
            raise InvalidCodeError("generators are not independent")
        if not self.logical_x and not self.logical_z and self.k:
            lx, lz = find_logicals(self.generators, self.n)
            object.__setattr__(self, "logical_x", tuple(lx))
            object.__setattr__(self, "logical_z", tuple(lz))
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise InvalidCodeError(f"expected {self.k} logical X and Z operators")
        for op in self.logical_x + self.logical_z:
            for g in self.generators:
                if not op.commutes_with(g):
                    raise InvalidCodeError(f"logical {op} anticommutes with generator {g}")
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                if lx.commutes_with(lz) == (i == j):
                    raise InvalidCodeError(f"logical X{i} / Z{j} commutation is wrong")
            for j, other in enumerate(self.logical_x):
                if j != i and not lx.commutes_with(other):
                    raise InvalidCodeError("logical X operators must commute")
        for a, b in combinations(self.logical_z, 2):
            if not a.commutes_with(b):
                raise InvalidCodeError("logical Z operators must commute")

    @classmethod
    def from_strings(
        cls,
        generators: Sequence[str],
        logical_x: Sequence[str] = (),
        logical_z: Sequence[str] = (),
        name: str = "",
    ) -> "StabilizerCode":
        gens = [PauliOperator.from_string(g) for g in generators]
        n = gens[0].n if gens else PauliOperator.from_string(logical_x[0]).n
        return cls(
            n,
            n - len(gens),
            tuple(gens),
            tuple(PauliOperator.from_string(s) for s in logical_x),
            tuple(PauliOperator.from_string(s) for s in logical_z),
            name=name,
        )

    def with_distance(self, distance: int) -> "StabilizerCode":
        return StabilizerCode(self.n, self.k, self.generators, self.logical_x, self.logical_z, distance, self.name)

    def generator_matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, 2 * self.n), dtype=np.uint8)
        return np.array([g.symplectic() for g in self.generators], dtype=np.uint8)

    def logical_matrix(self) -> np.ndarray:
        ops = self.logical_x + self.logical_z
        if not ops:
            return np.zeros((0, 2 * self.n), dtype=np.uint8)
        return np.array([p.symplectic() for p in ops], dtype=np.uint8)

    def syndrome_of(self, error: PauliOperator) -> Tuple[int, ...]:
        return tuple(0 if error.commutes_with(g) else 1 for g in self.generators)

    def in_stabilizer_group(self, p: PauliOperator, ignore_sign: bool = True) -> bool:
        """Membership of p (up to sign unless ignore_sign is False) in the stabilizer group."""
        rows = _pack_symplectic([g.symplectic() for g in self.generators])
        target = gf2.pack_bits(p.symplectic())
        if not gf2.in_span(target, rows, 2 * self.n):
            return False
        if ignore_sign:
            return True
        return self.group_element(p.symplectic()) == p

    def group_element(self, vector: np.ndarray) -> PauliOperator:
        """The signed stabilizer-group element with the given symplectic bits."""
        m = len(self.generators)
        if m == 0:
            if np.any(vector):
                raise InvalidCodeError("vector is not in the stabilizer group")
            return PauliOperator.identity(self.n)
        columns = self.generator_matrix().T
        coefficients = gf2.solve(
            [gf2.pack_bits(col) for col in columns],
            [int(b) for b in np.asarray(vector, dtype=np.uint8)],
            m,
        )
        if coefficients is None:
            raise InvalidCodeError("vector is not in the stabilizer group")
        result = PauliOperator.identity(self.n)
        for bit, g in zip(gf2.unpack_bits(coefficients, m), self.generators):
            if bit:
                result = pauli_mul(result, g)
        return result


# Clifford tableau

_LOCAL_IMAGES: Dict[str, Dict[str, Tuple[str, ...]]] = {
    # images of (X_0, Z_0[, X_1, Z_1]) on the gate's own qubits
    "I": {"X": ("X",), "Z": ("Z",)},
    "X": {"X": ("X",), "Z": ("-Z",)},
    "Y": {"X": ("-X",), "Z": ("-Z",)},
    "Z": {"X": ("-X",), "Z": ("Z",)},
    "H": {"X": ("Z",), "Z": ("X",)},
    "S": {"X": ("Y",), "Z": ("Z",)},
    "S†": {"X": ("-Y",), "Z": ("Z",)},
    "CNOT": {"X": ("XX", "IX"), "Z": ("ZI", "ZZ")},
    "CZ": {"X": ("XZ", "ZX"), "Z": ("ZI", "IZ")},
    "SWAP": {"X": ("IX", "XI"), "Z": ("IZ", "ZI")},
}


def _gate_images(name: str, qubits: Sequence[int], n: int) -> Tuple[Dict[int, PauliOperator], Dict[int, PauliOperator]]:
    name = _canonical_gate(name)
    if name not in _LOCAL_IMAGES:
        raise NonCliffordGateError(f"{name} is not a supported Clifford gate")
    images = _LOCAL_IMAGES[name]
    if len(images["X"]) != len(qubits):
        raise DimensionMismatchError(f"{name} acts on {len(images['X'])} qubits, got {len(qubits)}")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise DimensionMismatchError(f"bad qubits {list(qubits)} for n = {n}")
    x_images = {q: embed(PauliOperator.from_string(s), n, qubits) for q, s in zip(qubits, images["X"])}
    z_images = {q: embed(PauliOperator.from_string(s), n, qubits) for q, s in zip(qubits, images["Z"])}
    return x_images, z_images


def _conjugate_with(p: PauliOperator, x_image, z_image) -> PauliOperator:
    result = PauliOperator(np.zeros(p.n, dtype=np.uint8), np.zeros(p.n, dtype=np.uint8), p.phase)
    for q in np.flatnonzero(p.x):
        result = pauli_mul(result, x_image(int(q)))
    for q in np.flatnonzero(p.z):
        result = pauli_mul(result, z_image(int(q)))
    return result


@dataclass(frozen=True)
class CliffordTableau:
    """Images U X_i U^dagger and U Z_i U^dagger of the 2n generators."""

    x_images: Tuple[PauliOperator, ...]
    z_images: Tuple[PauliOperator, ...]

    @property
    def n(self) -> int:
        return len(self.x_images)

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(
            tuple(PauliOperator.single(n, q, "X") for q in range(n)),
            tuple(PauliOperator.single(n, q, "Z") for q in range(n)),
        )

    @classmethod
    def from_circuit(cls, circuit: Sequence[Operation], n: int) -> "CliffordTableau":
        tableau = cls.identity(n)
        for op in circuit:
            tableau = tableau.then(op[0], op[1:])
        return tableau

    def then(self, gate: str, qubits: Sequence[int]) -> "CliffordTableau":
        """Tableau of the circuit followed by one more gate."""
        x_map, z_map = _gate_images(gate, qubits, self.n)

        def x_image(q):
            return x_map.get(q, PauliOperator.single(self.n, q, "X"))

        def z_image(q):
            return z_map.get(q, PauliOperator.single(self.n, q, "Z"))

        return CliffordTableau(
            tuple(_conjugate_with(p, x_image, z_image) for p in self.x_images),
            tuple(_conjugate_with(p, x_image, z_image) for p in self.z_images),
        )

    def is_valid(self) -> bool:
        images = list(self.x_images) + list(self.z_images)
        for i, a in enumerate(images):
            if not a.is_hermitian:
                return False
            for j, b in enumerate(images):
                anticommute = abs(i - j) == self.n
                if a.commutes_with(b) == anticommute:
                    return False
        return True


def conjugate(tableau: CliffordTableau, p: PauliOperator) -> PauliOperator:
    """U p U^dagger, composed from the generator images with exact sign."""
    if p.n != tableau.n:
        raise DimensionMismatchError(f"{p.n}-qubit Pauli against a {tableau.n}-qubit tableau")
    return _conjugate_with(p, lambda q: tableau.x_images[q], lambda q: tableau.z_images[q])


# Clifford circuit simulation

class StabilizerSimulator:
    """
    Stabilizer/destabilizer tableau over n qubits starting in |0...0>.

    Row signs are affine functions over GF(2) of the random measurement bits
    drawn so far, stored as int bitmasks: bit 0 is the constant, bit j >= 1 is
    random variable j. One pass over a circuit therefore describes the whole
    outcome distribution.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[n + np.arange(n), np.arange(n)] = 1
        self.r = [0] * (2 * n)
        self.num_variables = 0
        self.outcomes: List[int] = []

    def _flip(self, rows: np.ndarray):
        for i in np.flatnonzero(rows):
            self.r[i] ^= 1

    def _check(self, *qubits: int):
        for q in qubits:
            if not 0 <= q < self.n:
                raise DimensionMismatchError(f"qubit {q} out of range for n = {self.n}")
        if len(set(qubits)) != len(qubits):
            raise DimensionMismatchError(f"repeated qubit in {list(qubits)}")

    def h(self, a: int):
        self._check(a)
        self._flip(self.x[:, a] & self.z[:, a])
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int):
        self._check(a)
        self._flip(self.x[:, a] & self.z[:, a])
        self.z[:, a] ^= self.x[:, a]

    def pauli_x(self, a: int):
        self._check(a)
        self._flip(self.z[:, a])

    def pauli_z(self, a: int):
        self._check(a)
        self._flip(self.x[:, a])

    def pauli_y(self, a: int):
        self._check(a)
        self._flip(self.x[:, a] ^ self.z[:, a])

    def cnot(self, a: int, b: int):
        self._check(a, b)
        self._flip(self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1))
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def cz(self, a: int, b: int):
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def swap(self, a: int, b: int):
        self._check(a, b)
        self.x[:, [a, b]] = self.x[:, [b, a]]
        self.z[:, [a, b]] = self.z[:, [b, a]]

    def apply(self, gate: str, *qubits: int):
        name = _canonical_gate(gate)
        if name == "M":
            self.measure(*qubits)
            return
        handlers = {
            "I": lambda a: self._check(a),
            "H": self.h,
            "S": self.s,
            "S†": lambda a: (self.pauli_z(a), self.s(a)),
            "X": self.pauli_x,
            "Y": self.pauli_y,
            "Z": self.pauli_z,
            "CNOT": self.cnot,
            "CZ": self.cz,
            "SWAP": self.swap,
        }
        if name not in handlers:
            raise NonCliffordGateError(f"{gate} is not a Clifford gate")
        handlers[name](*qubits)

    def _row_product_sign(self, h_x, h_z, i: int) -> int:
        """Constant sign bit picked up when row i multiplies the row (h_x, h_z)."""
        x1, z1 = self.x[i].astype(np.int64), self.z[i].astype(np.int64)
        x2, z2 = h_x.astype(np.int64), h_z.astype(np.int64)
        g = np.where(
            (x1 == 1) & (z1 == 1),
            z2 - x2,
            np.where((x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1), np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)),
        )
        return int(g.sum() % 4) // 2

    def _rowsum(self, h: int, i: int):
        constant = self._row_product_sign(self.x[h], self.z[h], i)
        self.r[h] ^= self.r[i] ^ constant
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure(self, a: int) -> int:
        """Z-basis measurement; returns the affine outcome bitmask."""
        self._check(a)
        n = self.n
        random_rows = [p for p in range(n, 2 * n) if self.x[p, a]]
        if random_rows:
            p = random_rows[0]
            for i in range(2 * n):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p].copy(), self.z[p].copy(), self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            self.num_variables += 1
            self.r[p] = 1 << self.num_variables
            outcome = self.r[p]
        else:
            sx = np.zeros(n, dtype=np.uint8)
            sz = np.zeros(n, dtype=np.uint8)
            sign = 0
            for i in range(n):
                if self.x[i, a]:
                    constant = self._row_product_sign(sx, sz, i + n)
                    sign ^= self.r[i + n] ^ constant
                    sx ^= self.x[i + n]
                    sz ^= self.z[i + n]
            outcome = sign
        self.outcomes.append(outcome)
        return outcome

    def stabilizers(self) -> List[str]:
        return [str(self._row_pauli(i)) for i in range(self.n, 2 * self.n)]

    def _row_pauli(self, i: int) -> PauliOperator:
        if self.r[i] >> 1:
            raise ValueError("row sign depends on unsampled measurement bits")
        return PauliOperator.hermitian_from_symplectic(np.concatenate([self.x[i], self.z[i]]), self.r[i] & 1)

    def _affine_system(self) -> Tuple[np.ndarray, np.ndarray]:
        m = len(self.outcomes)
        masks = np.zeros((m, self.num_variables), dtype=np.uint8)
        constants = np.zeros(m, dtype=np.uint8)
        for row, outcome in enumerate(self.outcomes):
            constants[row] = outcome & 1
            for v in range(self.num_variables):
                masks[row, v] = (outcome >> (v + 1)) & 1
        return masks, constants

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """shots x (measurements so far) outcome matrix, vectorized over shots."""
        masks, constants = self._affine_system()
        bits = rng.integers(0, 2, size=(shots, self.num_variables), dtype=np.uint8)
        return ((bits.astype(np.int64) @ masks.T.astype(np.int64) + constants) % 2).astype(np.uint8)

    def distribution(self) -> Dict[Tuple[int, ...], float]:
        """Exact distribution of the recorded outcomes: uniform over an affine subspace."""
        masks, constants = self._affine_system()
        counts: Dict[Tuple[int, ...], int] = {}
        total = 1 << self.num_variables
        for assignment in range(total):
            bits = np.array([(assignment >> v) & 1 for v in range(self.num_variables)], dtype=np.int64)
            key = tuple(int(b) for b in (masks.astype(np.int64) @ bits + constants) % 2)
            counts[key] = counts.get(key, 0) + 1
        return {key: c / total for key, c in counts.items()}


def run_clifford_circuit(circuit: Sequence[Operation], n: int, measurements: Sequence[int] = ()) -> StabilizerSimulator:
    simulator = StabilizerSimulator(n)
    for op in circuit:
        simulator.apply(op[0], *op[1:])
    for q in measurements:
        simulator.measure(q)
    return simulator


def clifford_simulate(
    circuit: Sequence[Operation],
    n: int,
    measurements: Sequence[int] = (),
    rng: Optional[np.random.Generator] = None,
) -> List[int]:
    """
    One shot of a Clifford circuit.
    Args:
        circuit: operations such as ("H", 0), ("CNOT", 0, 1), ("M", 1).
        n (int): number of qubits, all starting in |0>.
        measurements: qubits measured in the Z basis after the circuit.
        rng (np.random.Generator): source of the random outcomes.
    Returns:
        Outcomes of the in-circuit measurements followed by the final ones.
    Raises:
        NonCliffordGateError: the circuit contains a non-Clifford gate.
    """
    rng = rng if rng is not None else np.random.default_rng()
    simulator = run_clifford_circuit(circuit, n, measurements)
    return [int(v) for v in simulator.sample(1, rng)[0]]


# Codespace and distance

def codespace_projector_check(code: StabilizerCode, state: StateVector, tolerance: float = TOLERANCE) -> bool:
    """True iff every generator fixes the state."""
    if not state.is_qubits or state.num_registers != code.n:
        raise DimensionMismatchError(f"state dims {list(state.dims)} do not match a {code.n}-qubit code")
    for g in code.generators:
        if np.max(np.abs(apply_pauli(state, g).amps - state.amps)) > tolerance:
            return False
    return True


_LETTER_VECTORS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def paulis_of_weight(n: int, weight: int, letters: str = "XYZ") -> np.ndarray:
    """All symplectic vectors of the given weight over the allowed letters, support-major order."""
    letter_bits = np.array([_LETTER_VECTORS[c] for c in letters], dtype=np.uint8)
    choices = np.array(list(product(range(len(letters)), repeat=weight)), dtype=np.int64).reshape(-1, weight)
    blocks = []
    for support in combinations(range(n), weight):
        block = np.zeros((choices.shape[0], 2 * n), dtype=np.uint8)
        block[:, list(support)] = letter_bits[choices, 0]
        block[:, [n + s for s in support]] = letter_bits[choices, 1]
        blocks.append(block)
    if not blocks:
        return np.zeros((0, 2 * n), dtype=np.uint8)
    return np.concatenate(blocks)


def min_distance(code: StabilizerCode, error_types: str = "XYZ", max_qubits: int = MAX_DISTANCE_QUBITS) -> Optional[int]:
    """
    Minimum weight of an undetectable Pauli outside the stabilizer group,
    searched exhaustively by increasing weight.
    Args:
        code (StabilizerCode): code with k >= 1.
        error_types (str): allowed single-qubit letters, e.g. "X" for bit flips only.
        max_qubits (int): exhaustion limit.
    Returns:
        int: the distance, or None when no error over the allowed letters is a logical error.
    Raises:
        SearchLimitError: n exceeds the exhaustion limit.
    """
    if code.n > max_qubits:
        raise SearchLimitError(f"exhaustive distance needs n <= {max_qubits}, got {code.n}")
    if code.k == 0:
        raise InvalidCodeError("distance needs at least one logical qubit")
    generators = code.generator_matrix()
    logicals = code.logical_matrix()
    for w in range(1, code.n + 1):
        candidates = paulis_of_weight(code.n, w, error_types)
        if candidates.size == 0:
            continue
        if generators.size:
            undetected = ~symplectic_matrix_products(candidates, generators).any(axis=1)
        else:
            undetected = np.ones(candidates.shape[0], dtype=bool)
        nontrivial = symplectic_matrix_products(candidates, logicals).any(axis=1)
        if np.any(undetected & nontrivial):
            return w
    return None


# Stabilizer text format

def format_stabilizer_code(code: StabilizerCode) -> str:
    """'n k' header, one generator per line (leading '-' for negative signs), then LX/LZ lines."""

    def fmt(p: PauliOperator) -> str:
        text = str(p)
        return text[1:] if text.startswith("+") else text

    lines = [f"{code.n} {code.k}"]
    lines += [fmt(g) for g in code.generators]
    lines += [f"LX {fmt(p)}" for p in code.logical_x]
    lines += [f"LZ {fmt(p)}" for p in code.logical_z]
    return "\n".join(lines) + "\n"


def parse_stabilizer_code(text: str, name: str = "") -> StabilizerCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise InvalidCodeError("empty stabilizer description")
    try:
        n, k = (int(v) for v in lines[0].split())
    except ValueError:
        raise InvalidCodeError(f"first line must be 'n k', got {lines[0]!r}")
    generators, logical_x, logical_z = [], [], []
    for line in lines[1:]:
        if line.startswith("LX "):
            logical_x.append(PauliOperator.from_string(line[3:]))
        elif line.startswith("LZ "):
            logical_z.append(PauliOperator.from_string(line[3:]))
        else:
            generators.append(PauliOperator.from_string(line))
    for p in generators + logical_x + logical_z:
        if p.n != n:
            raise InvalidCodeError(f"{p} has length {p.n}, header says n = {n}")
    return StabilizerCode(n, k, tuple(generators), tuple(logical_x), tuple(logical_z), name=name)


def read_stabilizer_file(path: Union[str, Path]) -> StabilizerCode:
    path = Path(path)
    return parse_stabilizer_code(path.read_text(), name=path.stem)


def write_stabilizer_file(code: StabilizerCode, path: Union[str, Path]):
    Path(path).write_text(format_stabilizer_code(code))
