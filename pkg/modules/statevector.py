"""
Dense statevector simulation of few-qubit and few-qudit registers.

Register 0 is the leftmost ket symbol and the most-significant digit of the
basis index, so ``|01>`` has index 1 and the amplitude array of a
multi-register state is the C-order flattening of a tensor with one axis per
register.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from modules.data_structure import (
    DimensionMismatchError,
    NonUnitaryError,
    QLabError,
    StateTooLargeError,
)
from modules.utils import available_memory_bytes

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
UNITARITY_TOLERANCE = 1e-12
MAX_AMPLITUDES = 1 << 24

COMPUTATIONAL = "computational"
PLUS_MINUS = "plus_minus"


def _check_size(dims: Sequence[int]) -> int:
    size = math.prod(dims)
    if size > MAX_AMPLITUDES:
        raise StateTooLargeError(
            f"state with dims {list(dims)} needs {size} amplitudes, cap is {MAX_AMPLITUDES}"
        )
    needed = size * np.dtype(np.complex128).itemsize
    if size > (1 << 20) and needed > available_memory_bytes():
        raise StateTooLargeError(f"state with {size} amplitudes does not fit in free memory")
    return size


class StateVector:
    """Normalized amplitude array over a list of registers."""

    def __init__(self, dims: Sequence[int], amps, normalize: bool = False):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise DimensionMismatchError(f"register dimensions must all be >= 2, got {list(dims)}")
        size = _check_size(dims)
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if amps.size != size:
            raise DimensionMismatchError(
                f"amplitude array has length {amps.size}, dims {list(dims)} need {size}"
            )
        norm = np.linalg.norm(amps)
        if normalize:
            if norm < TOLERANCE:
                raise QLabError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm**2 - 1.0) > TOLERANCE:
            raise QLabError(f"amplitudes are not normalized (norm^2 = {norm**2:.12f})")
        self.dims = dims
        self.amps = amps

    @property
    def num_registers(self) -> int:
        return len(self.dims)

    @property
    def is_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def copy(self) -> "StateVector":
        return StateVector(self.dims, self.amps.copy())

    def digits(self, index: int) -> Tuple[int, ...]:
        """Per-register digits of a basis index."""
        return tuple(int(v) for v in np.unravel_index(index, self.dims))

    def __repr__(self):
        shown = []
        for index in np.flatnonzero(np.abs(self.amps) > 1e-9)[:8]:
            label = "".join(str(d) if max(self.dims) <= 10 else f"{d}," for d in self.digits(index))
            shown.append(f"{self.amps[index]:.4g}|{label}>")
        more = " + ..." if np.count_nonzero(np.abs(self.amps) > 1e-9) > 8 else ""
        return f"StateVector(dims={list(self.dims)}, {' + '.join(shown)}{more})"


@dataclass(frozen=True)
class Gate:
    name: str
    matrix: np.ndarray
    arity: int = 1

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"gate {self.name} matrix must be square, got {matrix.shape}")
        deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
        if deviation >= UNITARITY_TOLERANCE:
            raise NonUnitaryError(f"gate {self.name} is not unitary (max deviation {deviation:.3e})")
        if self.arity < 1:
            raise DimensionMismatchError(f"gate {self.name} arity must be >= 1")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Gate":
        name = self.name[:-1] if self.name.endswith("†") else f"{self.name}†"
        return Gate(name, self.matrix.conj().T, self.arity)

    def power(self, exponent: int) -> "Gate":
        return Gate(f"{self.name}^{exponent}", np.linalg.matrix_power(self.matrix, exponent), self.arity)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    probability: float
    collapsed: StateVector
    basis: str = COMPUTATIONAL

    @property
    def label(self) -> str:
        if self.basis == PLUS_MINUS:
            return "+" if self.outcome == 0 else "-"
        return str(self.outcome)


Circuit = List[Tuple[Gate, Tuple[int, ...]]]


# Gate library

_SQRT1_2 = 1 / math.sqrt(2)

I = Gate("I", np.eye(2))
X = Gate("X", [[0, 1], [1, 0]])
Y = Gate("Y", [[0, -1j], [1j, 0]])
Z = Gate("Z", [[1, 0], [0, -1]])
H = Gate("H", [[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]])
S = Gate("S", [[1, 0], [0, 1j]])
SDG = Gate("S†", [[1, 0], [0, -1j]])
T = Gate("T", [[1, 0], [0, np.exp(1j * math.pi / 4)]])
TDG = Gate("T†", [[1, 0], [0, np.exp(-1j * math.pi / 4)]])
CNOT = Gate("CNOT", [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], arity=2)
CZ = Gate("CZ", np.diag([1, 1, 1, -1]), arity=2)
SWAP = Gate("SWAP", [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], arity=2)
TOFFOLI = Gate("TOFFOLI", np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]], arity=3)


def rotation(theta: float, name: Optional[str] = None) -> Gate:
    """Real plane rotation [[cos, -sin], [sin, cos]]."""
    c, s = math.cos(theta), math.sin(theta)
    return Gate(name or f"R({theta:.6g})", [[c, -s], [s, c]])


R_2PI_3 = rotation(2 * math.pi / 3, "R_2pi/3")
R_MINUS_2PI_3 = rotation(-2 * math.pi / 3, "R_-2pi/3")


def controlled(gate: Gate) -> Gate:
    """Adds one control qubit in front of the gate's targets."""
    d = gate.dimension
    matrix = np.eye(2 * d, dtype=np.complex128)
    matrix[d:, d:] = gate.matrix
    return Gate(f"C-{gate.name}", matrix, gate.arity + 1)


# States

def basis_state(dims: Sequence[int], index: int) -> StateVector:
    size = _check_size(dims)
    if not 0 <= index < size:
        raise DimensionMismatchError(f"basis index {index} out of range for dims {list(dims)}")
    amps = np.zeros(size, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(dims, amps)


def zero_state(num_qubits: int) -> StateVector:
    return basis_state([2] * num_qubits, 0)


def plus_state(num_qubits: int) -> StateVector:
    """|+>^n, the uniform superposition over all qubit basis states."""
    size = _check_size([2] * num_qubits)
    return StateVector([2] * num_qubits, np.full(size, 1 / math.sqrt(size), dtype=np.complex128))


def from_bitstring(bits: str) -> StateVector:
    return basis_state([2] * len(bits), int(bits, 2))


def from_amplitudes(amps, dims: Optional[Sequence[int]] = None, normalize: bool = False) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
    if dims is None:
        num_qubits = int(round(math.log2(amps.size)))
        if 2**num_qubits != amps.size:
            raise DimensionMismatchError(f"length {amps.size} is not a power of two; pass dims")
        dims = [2] * num_qubits
    return StateVector(dims, amps, normalize=normalize)


def random_state(dims: Sequence[int], rng: np.random.Generator) -> StateVector:
    size = _check_size(dims)
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return StateVector(dims, amps, normalize=True)


# Operations

def _validate_targets(state: StateVector, targets: Sequence[int]) -> Tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise DimensionMismatchError(f"repeated target index in {list(targets)}")
    for t in targets:
        if not 0 <= t < state.num_registers:
            raise DimensionMismatchError(
                f"target {t} out of range for {state.num_registers} registers"
            )
    return targets


def apply_matrix(state: StateVector, matrix: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Applies a (not necessarily unitary) operator to the targeted registers, unnormalized."""
    targets = _validate_targets(state, targets)
    target_dim = math.prod(state.dims[t] for t in targets)
    if matrix.shape != (target_dim, target_dim):
        raise DimensionMismatchError(
            f"operator of shape {matrix.shape} does not match target dimension {target_dim}"
        )
    tensor = np.moveaxis(state.tensor_view(), targets, range(len(targets)))
    moved_shape = tensor.shape
    updated = (matrix @ tensor.reshape(target_dim, -1)).reshape(moved_shape)
    return np.moveaxis(updated, range(len(targets)), targets).reshape(-1)


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    """
    Apply a unitary gate to the targeted registers.
    Args:
        state (StateVector): input state, left untouched.
        gate (Gate): unitary gate whose dimension is the product of the target dims.
        targets (Sequence[int]): register indices, first target is the gate's most-significant factor.
    Returns:
        StateVector: the new state.
    Raises:
        DimensionMismatchError: arity, dimension or target mismatch.
    """
    if len(targets) != gate.arity:
        raise DimensionMismatchError(
            f"gate {gate.name} has arity {gate.arity} but {len(targets)} targets were given"
        )
    return StateVector(state.dims, apply_matrix(state, gate.matrix, targets))


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    for gate, targets in circuit:
        state = apply_gate(state, gate, targets)
    return state


def apply_basis_permutation(state: StateVector, permutation) -> StateVector:
    """Maps |i> to |permutation[i]>."""
    permutation = np.asarray(permutation, dtype=np.int64)
    if permutation.size != state.amps.size:
        raise DimensionMismatchError("permutation length does not match the state size")
    if np.unique(permutation).size != permutation.size:
        raise QLabError("basis map is not a permutation")
    amps = np.empty_like(state.amps)
    amps[permutation] = state.amps
    return StateVector(state.dims, amps)


def apply_phases(state: StateVector, phases) -> StateVector:
    """Multiplies each basis amplitude by a unit-modulus phase."""
    phases = np.asarray(phases, dtype=np.complex128).reshape(-1)
    if phases.size != state.amps.size:
        raise DimensionMismatchError("phase array length does not match the state size")
    if np.max(np.abs(np.abs(phases) - 1.0)) > UNITARITY_TOLERANCE:
        raise NonUnitaryError("diagonal phases must have modulus 1")
    return StateVector(state.dims, state.amps * phases)


def probabilities(state: StateVector, targets: Optional[Sequence[int]] = None) -> np.ndarray:
    """Exact marginal distribution of the targeted registers (all registers by default)."""
    probs = np.abs(state.tensor_view()) ** 2
    if targets is None:
        return probs.reshape(-1)
    targets = _validate_targets(state, targets)
    others = tuple(i for i in range(state.num_registers) if i not in targets)
    marginal = probs.sum(axis=others) if others else probs
    # sum keeps the remaining axes in ascending order; reorder to the requested order
    order = np.argsort(np.argsort(targets))
    return np.transpose(marginal, order).reshape(-1)


def _project(state: StateVector, target: int, outcome: int) -> Tuple[np.ndarray, float]:
    tensor = np.moveaxis(state.tensor_view(), target, 0).copy()
    mask = np.zeros(tensor.shape[0], dtype=bool)
    mask[outcome] = True
    tensor[~mask] = 0
    projected = np.moveaxis(tensor, 0, target).reshape(-1)
    return projected, float(np.vdot(projected, projected).real)


def measure(
    state: StateVector,
    target: int,
    basis: str = COMPUTATIONAL,
    rng: Optional[np.random.Generator] = None,
) -> MeasurementRecord:
    """
    Projective measurement of one register.
    Args:
        state (StateVector): pre-measurement state.
        target (int): register index.
        basis (str): "computational" or "plus_minus" (qubits only; outcome 0 is +, 1 is -).
        rng (np.random.Generator): source of the Born-rule sample.
    Returns:
        MeasurementRecord: sampled outcome, its exact probability and the collapsed state.
    """
    (target,) = _validate_targets(state, [target])
    if basis not in (COMPUTATIONAL, PLUS_MINUS):
        raise ValueError(f"unknown measurement basis: {basis}")
    if basis == PLUS_MINUS:
        if state.dims[target] != 2:
            raise DimensionMismatchError("plus_minus measurement needs a dimension-2 register")
        rotated = apply_gate(state, H, [target])
        record = measure(rotated, target, COMPUTATIONAL, rng)
        collapsed = apply_gate(record.collapsed, H, [target])
        return MeasurementRecord(record.outcome, record.probability, collapsed, PLUS_MINUS)

    rng = rng if rng is not None else np.random.default_rng()
    marginal = probabilities(state, [target])
    cumulative = np.cumsum(marginal)
    outcome = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    outcome = min(outcome, len(marginal) - 1)
    while marginal[outcome] <= 0 and outcome > 0:
        outcome -= 1
    projected, weight = _project(state, target, outcome)
    collapsed = StateVector(state.dims, projected / math.sqrt(weight))
    return MeasurementRecord(outcome, float(marginal[outcome]), collapsed, COMPUTATIONAL)


def measurement_branches(state: StateVector, target: int) -> List[MeasurementRecord]:
    """Every outcome with nonzero probability, for exhaustive branch enumeration."""
    (target,) = _validate_targets(state, [target])
    branches = []
    for outcome in range(state.dims[target]):
        projected, weight = _project(state, target, outcome)
        if weight > TOLERANCE**2:
            branches.append(
                MeasurementRecord(outcome, weight, StateVector(state.dims, projected / math.sqrt(weight)))
            )
    return branches


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, clipped into [0, 1]."""
    if a.dims != b.dims:
        raise DimensionMismatchError(f"fidelity of states with dims {list(a.dims)} and {list(b.dims)}")
    return float(min(1.0, max(0.0, abs(np.vdot(a.amps, b.amps)) ** 2)))


def tensor(a: StateVector, *others: StateVector) -> StateVector:
    dims = list(a.dims)
    amps = a.amps
    for other in others:
        dims.extend(other.dims)
        _check_size(dims)
        amps = np.kron(amps, other.amps)
    return StateVector(dims, amps, normalize=True)


def factor_out(state: StateVector, targets: Sequence[int]) -> StateVector:
    """
    Drops the targeted registers, which must be in a product state with the rest,
    and returns the state of the remaining registers.
    """
    targets = _validate_targets(state, targets)
    rest = tuple(i for i in range(state.num_registers) if i not in targets)
    if not rest:
        raise DimensionMismatchError("cannot factor out every register")
    target_dim = math.prod(state.dims[t] for t in targets)
    matrix = np.moveaxis(state.tensor_view(), targets, range(len(targets))).reshape(target_dim, -1)
    row = int(np.argmax(np.linalg.norm(matrix, axis=1)))
    remaining = matrix[row] / np.linalg.norm(matrix[row])
    target_part = matrix @ remaining.conj()
    residual = np.max(np.abs(matrix - np.outer(target_part, remaining)))
    if residual > 1e-8:
        raise QLabError(f"registers {list(targets)} are entangled with the rest (residual {residual:.2e})")
    return StateVector([state.dims[i] for i in rest], remaining, normalize=True)
