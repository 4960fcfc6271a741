"""
Fault-tolerance gadgets: the repeat-until-success R_{2pi/3} rotation, verified
cat-state preparation, the Toffoli ancilla and its teleportation-style
completion, and a brute-force density check for finite gate sets.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from modules.data_structure import DimensionMismatchError, RetryBudgetExceededError
from modules.noise import Location, NoiseModel
from modules.pauli import PauliOperator, apply_pauli, embed, measure_pauli
from modules.qec_codes import QuantumCode, encode, logical_basis_state, transversal_gate
from modules.statevector import (
    CNOT,
    COMPUTATIONAL,
    CZ,
    PLUS_MINUS,
    Gate,
    H,
    StateVector,
    TOLERANCE,
    X,
    Z,
    apply_gate,
    factor_out,
    from_amplitudes,
    measure,
    tensor,
    zero_state,
)

logger = logging.getLogger(__name__)

MAX_DENSITY_DEPTH = 20


@dataclass
class GadgetResult:
    output: StateVector
    rounds: int
    flags: List[str] = field(default_factory=list)
    complete: bool = True
    outcomes: List[str] = field(default_factory=list)
    data: Dict[str, object] = field(default_factory=dict)


# Repeat-until-success rotation

def rotation_ancilla() -> StateVector:
    """-1/2 |0> + sqrt(3)/2 |1>, the first column of R_{2pi/3}."""
    return from_amplitudes([-0.5, math.sqrt(3) / 2])


def _rus_round(
    state: StateVector, ancilla: StateVector, code: Optional[QuantumCode], rng: np.random.Generator
) -> Tuple[StateVector, int, float]:
    """
    One round on ancilla (first register block) and data (second block).
    Returns the rotated state on the former ancilla block, the X outcome of
    the data block (0 for +) and its probability.
    """
    n = 1 if code is None else code.n
    joint = tensor(ancilla, state)
    if code is None:
        joint = apply_gate(joint, CZ, [0, 1])
        joint = apply_gate(joint, CNOT, [1, 0])
        record = measure(joint, 1, PLUS_MINUS, rng)
    else:
        for gate, targets in transversal_gate(code, "CZ"):
            joint = apply_gate(joint, gate, targets)
        # control on the data block, target on the ancilla block
        for gate, (a, b) in transversal_gate(code, "CNOT"):
            joint = apply_gate(joint, gate, [b, a])
        logical_x = embed(code.stab.logical_x[0], 2 * n, list(range(n, 2 * n)))
        record = measure_pauli(joint, logical_x, rng)
    rotated = factor_out(record.collapsed, list(range(n, 2 * n)))
    if record.outcome == 1:
        # Z R_{-2pi/3} -> R_{-2pi/3}
        if code is None:
            rotated = apply_gate(rotated, Z, [0])
        else:
            rotated = apply_pauli(rotated, code.stab.logical_z[0])
    return rotated, record.outcome, record.probability


def rus_rotation(
    state: StateVector,
    ancilla_supply: Optional[Callable[[], StateVector]] = None,
    rng: Optional[np.random.Generator] = None,
    max_rounds: int = 64,
    code: Optional[QuantumCode] = None,
) -> GadgetResult:
    """
    Repeat-until-success R_{2pi/3} on a bare or encoded qubit.
    Each round applies R_{2pi/3} (outcome +) or R_{-2pi/3} (outcome -), each
    with probability 1/2; the net exponent is tracked mod 3 and the gadget
    stops once it is 1.
    Args:
        state (StateVector): one qubit, or one block of code.
        ancilla_supply (Callable): returns a fresh -1/2|0> + sqrt(3)/2|1> (encoded when code is given).
        rng (np.random.Generator): measurement randomness.
        max_rounds (int): round budget.
        code (QuantumCode): code with transversal CZ and CNOT, or None for a bare qubit.
    Returns:
        GadgetResult: output state, rounds used and the per-round outcomes; complete is False
        when the budget ran out, with the net exponent in data["net_exponent"].
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    n = 1 if code is None else code.n
    if list(state.dims) != [2] * n:
        raise DimensionMismatchError(f"expected {n} qubit registers, got dims {list(state.dims)}")
    rng = rng if rng is not None else np.random.default_rng()
    if ancilla_supply is None:
        ancilla_supply = rotation_ancilla if code is None else (lambda: encode(code, rotation_ancilla()))

    exponent = 0
    outcomes: List[str] = []
    probabilities: List[float] = []
    for round_index in range(1, max_rounds + 1):
        state, outcome, probability = _rus_round(state, ancilla_supply(), code, rng)
        exponent = (exponent + (1 if outcome == 0 else -1)) % 3
        outcomes.append("+" if outcome == 0 else "-")
        probabilities.append(probability)
        logger.debug(f"RUS round {round_index}: outcome {outcomes[-1]}, net exponent {exponent}")
        if exponent == 1:
            return GadgetResult(state, round_index, outcomes=outcomes, data={"probabilities": probabilities})
    logger.warning(f"RUS rotation stopped after {max_rounds} rounds with net exponent {exponent}")
    return GadgetResult(
        state,
        max_rounds,
        flags=[f"incomplete: net rotation R_2pi/3^{exponent}"],
        complete=False,
        outcomes=outcomes,
        data={"probabilities": probabilities, "net_exponent": exponent},
    )


# Cat states

def cat_state(n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return StateVector([2] * n, amps)


def cat_circuit(n: int) -> List[Tuple[Gate, Tuple[int, ...]]]:
    """H on qubit 0, then a CNOT chain 0 -> 1 -> ... -> n-1; gate i is fault location i."""
    return [(H, (0,))] + [(CNOT, (i - 1, i)) for i in range(1, n)]


def _parity_check(state: StateVector, i: int, j: int, rng: np.random.Generator) -> Tuple[int, StateVector]:
    """Z_i Z_j onto a fresh ancilla qubit, measured and discarded."""
    ancilla = state.num_registers
    joint = tensor(state, zero_state(1))
    joint = apply_gate(joint, CNOT, [i, ancilla])
    joint = apply_gate(joint, CNOT, [j, ancilla])
    record = measure(joint, ancilla, COMPUTATIONAL, rng)
    return record.outcome, factor_out(record.collapsed, [ancilla])


def prepare_cat(
    n: int,
    noise: Optional[NoiseModel] = None,
    rng: Optional[np.random.Generator] = None,
    verify: bool = True,
    max_attempts: int = 100,
    forced_faults: Sequence[Tuple[int, int, str]] = (),
) -> GadgetResult:
    """
    (|0...0> + |1...1>)/sqrt(2) from H and a CNOT chain, with pairwise parity verification.
    Args:
        n (int): number of qubits, at least 2.
        noise (NoiseModel): Pauli insertion after every gate on the qubits it touched.
        rng (np.random.Generator): noise and measurement randomness.
        verify (bool): check Z_i Z_j for every pair and retry on any violation.
        max_attempts (int): preparation budget.
        forced_faults: (location, qubit, letter) inserted during the first attempt only;
            location i means after gate i of cat_circuit, -1 before the first gate.
    Returns:
        GadgetResult: rounds is the number of attempts, flags lists the rejections.
    Raises:
        RetryBudgetExceededError: every attempt was rejected.
    """
    if n < 2:
        raise ValueError(f"cat states need n >= 2, got {n}")
    noise = noise or NoiseModel()
    rng = rng if rng is not None else np.random.default_rng()
    circuit = cat_circuit(n)
    flags: List[str] = []

    for attempt in range(1, max_attempts + 1):
        faults = forced_faults if attempt == 1 else ()
        state = zero_state(n)
        state = _insert_faults(state, faults, -1)
        for location, (gate, targets) in enumerate(circuit):
            state = apply_gate(state, gate, targets)
            if not noise.is_noiseless:
                if noise.applies_at(Location.AFTER_GATE):
                    state = apply_pauli(state, noise.sample_pauli(n, rng, targets))
                if noise.applies_at(Location.IDLE):
                    idle = [q for q in range(n) if q not in targets]
                    state = apply_pauli(state, noise.sample_pauli(n, rng, idle))
            state = _insert_faults(state, faults, location)
        if not verify:
            return GadgetResult(state, attempt, flags, data={"checks_passed": None})

        violated = None
        for i in range(n):
            for j in range(i + 1, n):
                outcome, state = _parity_check(state, i, j, rng)
                outcome ^= int(noise.sample_flips(1, rng)[0])
                if outcome == 1 and violated is None:
                    violated = (i, j)
        if violated is None:
            return GadgetResult(state, attempt, flags, data={"checks_passed": True})
        flags.append(f"attempt {attempt}: parity Z{violated[0]}Z{violated[1]} violated")
        logger.warning(f"cat state rejected on attempt {attempt}: Z{violated[0]}Z{violated[1]} = -1")
    raise RetryBudgetExceededError(f"no cat state accepted in {max_attempts} attempts")


def _insert_faults(state: StateVector, faults: Sequence[Tuple[int, int, str]], location: int) -> StateVector:
    for where, qubit, letter in faults:
        if where == location:
            state = apply_pauli(state, PauliOperator.single(state.num_registers, qubit, letter))
    return state


# Toffoli

def toffoli_ancilla(code: Optional[QuantumCode] = None) -> StateVector:
    """1/2 (|000> + |100> + |010> + |111>), encoded blockwise when a code is given."""
    supports = ("000", "100", "010", "111")
    if code is None:
        amps = np.zeros(8, dtype=np.complex128)
        for bits in supports:
            amps[int(bits, 2)] = 0.5
        return StateVector([2, 2, 2], amps)
    logical = {b: logical_basis_state(code, b) for b in "01"}
    amps = sum(0.5 * tensor(logical[s[0]], logical[s[1]], logical[s[2]]).amps for s in supports)
    return StateVector([2] * (3 * code.n), amps)


def gadget_toffoli(
    data: StateVector, ancilla: Optional[StateVector] = None, rng: Optional[np.random.Generator] = None
) -> GadgetResult:
    """
    Toffoli on three qubits by consuming the Toffoli ancilla.
    Registers are (a, b, c) for the ancilla and (x, y, z) for the data. After
    CNOT a->x, CNOT b->y and CNOT z->c, x and y are measured in Z (m1, m2) and
    z in X (m3); the corrections X_a^m1, X_b^m2, CNOT(b->c)^m1, CNOT(a->c)^m2,
    X_c^(m1 m2) and (Z_c CZ_ab)^m3 leave Toffoli|data> on (a, b, c).
    """
    if list(data.dims) != [2, 2, 2]:
        raise DimensionMismatchError(f"Toffoli gadget needs three qubits, got dims {list(data.dims)}")
    rng = rng if rng is not None else np.random.default_rng()
    ancilla = ancilla if ancilla is not None else toffoli_ancilla()
    a, b, c, x, y, z = range(6)
    state = tensor(ancilla, data)
    state = apply_gate(state, CNOT, [a, x])
    state = apply_gate(state, CNOT, [b, y])
    state = apply_gate(state, CNOT, [z, c])

    m1 = measure(state, x, COMPUTATIONAL, rng)
    m2 = measure(m1.collapsed, y, COMPUTATIONAL, rng)
    m3 = measure(m2.collapsed, z, PLUS_MINUS, rng)
    state = factor_out(m3.collapsed, [x, y, z])
    s1, s2, s3 = m1.outcome, m2.outcome, m3.outcome

    # X_a and X_b go first: the conditional CNOTs read the corrected a and b
    corrections: List[Tuple[bool, Gate, List[int]]] = [
        (s1, X, [a]),
        (s2, X, [b]),
        (s1, CNOT, [b, c]),
        (s2, CNOT, [a, c]),
        (s1 and s2, X, [c]),
        (s3, Z, [c]),
        (s3, CZ, [a, b]),
    ]
    for condition, gate, targets in corrections:
        if condition:
            state = apply_gate(state, gate, targets)
    outcomes = [str(s1), str(s2), m3.label]
    logger.debug(f"Toffoli gadget outcomes {outcomes}")
    return GadgetResult(state, 1, outcomes=outcomes)


# Density check

class Approximation(NamedTuple):
    sequence: Tuple[str, ...]
    distance: float


def phase_invariant_distance(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    min over phi of ||u - e^{i phi} v|| in operator norm, for 2x2 unitaries
    (batched over leading axes): 2 sin(delta / 4), delta the eigen-angle gap of v^dagger u.
    """
    w = np.conj(np.swapaxes(v, -1, -2)) @ u
    angles = np.angle(np.linalg.eigvals(w))
    gap = np.abs(angles[..., 0] - angles[..., 1]) % (2 * math.pi)
    gap = np.minimum(gap, 2 * math.pi - gap)
    return 2 * np.sin(gap / 4)


def _phase_key(matrix: np.ndarray) -> bytes:
    flat = matrix.reshape(-1)
    lead = flat[np.flatnonzero(np.abs(flat) > 1e-6)[0]]
    canonical = flat * (abs(lead) / lead)
    # adding zero folds -0.0 into 0.0
    return (np.round(canonical, 9) + (0.0 + 0.0j)).tobytes()


def density_check(
    gateset: Sequence[Gate],
    target: Union[Gate, np.ndarray],
    max_depth: int,
    beam_width: int = 20000,
) -> Approximation:
    """
    Breadth-first search over gate products up to max_depth, deduplicated
    modulo global phase and capped at beam_width products per depth.
    Returns the best sequence (in application order) and its distance; the
    distance never increases with max_depth.
    """
    if not 1 <= max_depth <= MAX_DENSITY_DEPTH:
        raise ValueError(f"max_depth must be in 1..{MAX_DENSITY_DEPTH}, got {max_depth}")
    target = target.matrix if isinstance(target, Gate) else np.asarray(target, dtype=np.complex128)
    for gate in gateset:
        if gate.matrix.shape != (2, 2):
            raise DimensionMismatchError(f"density check needs single-qubit gates, {gate.name} is {gate.matrix.shape}")
    if target.shape != (2, 2):
        raise DimensionMismatchError(f"target must be 2x2, got {target.shape}")

    seen = set()
    frontier_mats: List[np.ndarray] = []
    frontier_seqs: List[Tuple[str, ...]] = []
    for gate in gateset:
        key = _phase_key(gate.matrix)
        if key not in seen:
            seen.add(key)
            frontier_mats.append(gate.matrix)
            frontier_seqs.append((gate.name,))
    best = Approximation((), float("inf"))
    for depth in range(1, max_depth + 1):
        if not frontier_mats:
            break
        stack = np.array(frontier_mats)
        distances = phase_invariant_distance(stack, target[None])
        i = int(np.argmin(distances))
        if distances[i] < best.distance - TOLERANCE:
            best = Approximation(frontier_seqs[i], float(distances[i]))
        if depth == max_depth:
            break
        if len(frontier_mats) > beam_width:
            keep = np.argsort(distances, kind="stable")[:beam_width]
            frontier_mats = [frontier_mats[j] for j in keep]
            frontier_seqs = [frontier_seqs[j] for j in keep]
            stack = stack[keep]
        next_mats, next_seqs = [], []
        for gate in gateset:
            products = gate.matrix[None] @ stack
            for product, seq in zip(products, frontier_seqs):
                key = _phase_key(product)
                if key in seen:
                    continue
                seen.add(key)
                next_mats.append(product)
                next_seqs.append(seq + (gate.name,))
        frontier_mats, frontier_seqs = next_mats, next_seqs
    logger.debug(f"density check: best distance {best.distance:.3e} with {len(best.sequence)} gates")
    return best
