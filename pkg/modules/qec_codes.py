"""
Quantum codes built on the stabilizer layer: the three-qubit bit-flip and
phase-flip codes, concatenation, the CSS construction, synthesized encoders,
lowest-weight decoder tables, ideal syndrome extraction and correction.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from modules import gf2
from modules.data_structure import (
    DecodingError,
    DimensionMismatchError,
    InvalidCodeError,
    SearchLimitError,
    UnsupportedGateError,
)
from modules.gf2_codes import ClassicalLinearCode, dual_violation, hamming_7_4
from modules.pauli import (
    PauliOperator,
    apply_pauli,
    embed,
    measure_pauli,
    pauli_action,
    pauli_mul,
    symplectic_matrix_products,
)
from modules.stabilizer import (
    MAX_DISTANCE_QUBITS,
    CliffordTableau,
    StabilizerCode,
    conjugate,
    destabilizers,
    min_distance,
    paulis_of_weight,
)
from modules.statevector import (
    CNOT,
    CZ,
    Circuit,
    Gate,
    H,
    S,
    StateVector,
    X,
    Z,
    from_bitstring,
    run_circuit,
    tensor,
    zero_state,
)

logger = logging.getLogger(__name__)

MAX_ENCODER_QUBITS = 10
MAX_FULL_TABLE_CHECKS = 12
# I < X < Z < Y: Y is only chosen when no X or Z of the same weight has the syndrome
DECODER_LETTERS = "XZY"

TRANSVERSAL_CANDIDATES = {"X": X, "Z": Z, "H": H, "S": S, "CNOT": CNOT, "CZ": CZ}
_LOGICAL_IMAGES = {
    "X": {"X": "X", "Z": "-Z"},
    "Z": {"X": "-X", "Z": "Z"},
    "H": {"X": "Z", "Z": "X"},
    "S": {"X": "Y", "Z": "Z"},
    "CNOT": {"X": ("XX", "IX"), "Z": ("ZI", "ZZ")},
    "CZ": {"X": ("XZ", "ZX"), "Z": ("ZI", "IZ")},
}


@dataclass(frozen=True)
class Syndrome:
    """Generator measurement outcomes, 0 for the +1 eigenvalue."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"syndrome bits must be 0/1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @property
    def as_int(self) -> int:
        return gf2.pack_bits(self.bits)

    @property
    def is_trivial(self) -> bool:
        return not any(self.bits)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True, eq=False)
class QuantumCode:
    stab: StabilizerCode
    encoder: Circuit = field(repr=False)
    decoder_table: Dict[Tuple[int, ...], PauliOperator] = field(repr=False)
    name: str = ""
    # (outer, inner) for concatenated codes, decoded level by level
    components: Optional[Tuple["QuantumCode", "QuantumCode"]] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.stab.n

    @property
    def k(self) -> int:
        return self.stab.k

    @property
    def distance(self) -> Optional[int]:
        return self.stab.distance

    @property
    def generators(self) -> Tuple[PauliOperator, ...]:
        return self.stab.generators

    def syndrome_of(self, error: PauliOperator) -> Syndrome:
        return Syndrome(self.stab.syndrome_of(error))

    def decode(self, syndrome: Union[Syndrome, Sequence[int]]) -> PauliOperator:
        """
        Correction for a syndrome.
        Raises:
            DecodingError: the syndrome is missing from a partial table.
        """
        bits = syndrome.bits if isinstance(syndrome, Syndrome) else tuple(int(b) for b in syndrome)
        if len(bits) != self.n - self.k:
            raise DimensionMismatchError(f"syndrome of length {len(bits)} for {self.n - self.k} generators")
        if self.components is not None:
            return _decode_concatenated(self, bits)
        if bits not in self.decoder_table:
            raise DecodingError(f"syndrome {''.join(map(str, bits))} is not in the {self.name} decoder table")
        return self.decoder_table[bits]

    def transversal_gates(self) -> FrozenSet[str]:
        """Names of the gates whose bitwise application is the same logical gate."""
        cache = self.__dict__.get("_transversal")
        if cache is None:
            cache = frozenset(name for name in TRANSVERSAL_CANDIDATES if _is_transversal(self.stab, name))
            object.__setattr__(self, "_transversal", cache)
        return cache

    def __str__(self):
        d = "?" if self.distance is None else self.distance
        return f"{self.name} [[{self.n},{self.k},{d}]]"


# Decoder tables

def build_decoder_table(
    stab: StabilizerCode, max_weight: Optional[int] = None
) -> Dict[Tuple[int, ...], PauliOperator]:
    """
    Lowest-weight Pauli per syndrome, enumerating weights upward with supports
    and letters in lexicographic order; the first pattern seen wins.
    """
    m = stab.n - stab.k
    if max_weight is None and m > MAX_FULL_TABLE_CHECKS:
        max_weight = 1
    limit = stab.n if max_weight is None else min(max_weight, stab.n)
    generators = stab.generator_matrix()
    table: Dict[Tuple[int, ...], PauliOperator] = {(0,) * m: PauliOperator.identity(stab.n)}
    target = 1 << m
    for w in range(1, limit + 1):
        if len(table) == target:
            break
        candidates = paulis_of_weight(stab.n, w, DECODER_LETTERS)
        syndromes = symplectic_matrix_products(candidates, generators)
        keys = [tuple(int(b) for b in row) for row in syndromes]
        for key, vector in zip(keys, candidates):
            if key not in table:
                table[key] = PauliOperator.hermitian_from_symplectic(vector)
    logger.debug(f"decoder table for [[{stab.n},{stab.k}]]: {len(table)} of {target} syndromes")
    return table


# Encoders

def _project_onto(amps: np.ndarray, paulis: Sequence[PauliOperator]) -> np.ndarray:
    for p in paulis:
        amps = (amps + pauli_action(amps, p)) / 2
    return amps


def logical_zero_amplitudes(stab: StabilizerCode) -> np.ndarray:
    """|0...0>_L: the projection of a simple seed state onto the code's +1 eigenspaces, phase-fixed."""
    size = 1 << stab.n
    constraints = list(stab.generators) + list(stab.logical_z)
    seeds = [np.eye(1, size, 0, dtype=np.complex128)[0], np.full(size, size**-0.5, dtype=np.complex128)]
    rng = np.random.default_rng(0)
    seeds.append(rng.normal(size=size) + 1j * rng.normal(size=size))
    for seed in seeds:
        projected = _project_onto(seed, constraints)
        norm = np.linalg.norm(projected)
        if norm > 1e-6:
            break
    else:
        raise InvalidCodeError("the code space is empty")
    projected = projected / norm
    lead = projected[np.flatnonzero(np.abs(projected) > 1e-9)[0]]
    return projected * (abs(lead) / lead)


def synthesize_encoder(stab: StabilizerCode, name: str = "") -> Gate:
    """
    Dense Clifford unitary mapping |data>|0...0> to the encoded state.
    Column b is X_L^(data bits) times the destabilizers selected by the ancilla
    bits, applied to |0...0>_L; the data qubits are the first k registers.
    """
    n, k = stab.n, stab.k
    if n > MAX_ENCODER_QUBITS:
        raise SearchLimitError(f"dense encoder synthesis supports n <= {MAX_ENCODER_QUBITS}, got {n}")
    zero = logical_zero_amplitudes(stab)
    flips = list(stab.logical_x) + destabilizers(stab)
    size = 1 << n
    matrix = np.empty((size, size), dtype=np.complex128)
    for column in range(size):
        amps = zero
        for bit, op in zip(gf2.unpack_bits(column, n), flips):
            if bit:
                amps = pauli_action(amps, op)
        matrix[:, column] = amps
    return Gate(f"ENC[{name or stab.name}]", matrix, arity=n)


def _remap(circuit: Circuit, mapping: Sequence[int]) -> Circuit:
    return [(gate, tuple(mapping[t] for t in targets)) for gate, targets in circuit]


def from_stabilizer_code(stab: StabilizerCode, name: str = "", decoder_weight: Optional[int] = None) -> QuantumCode:
    """Wraps a stabilizer code with a synthesized encoder, a decoder table and its distance."""
    name = name or stab.name
    if stab.distance is None and stab.k and stab.n <= MAX_DISTANCE_QUBITS:
        stab = stab.with_distance(min_distance(stab))
    encoder = [(synthesize_encoder(stab, name), tuple(range(stab.n)))]
    return QuantumCode(stab, encoder, build_decoder_table(stab, decoder_weight), name)


# Codes

def bit_flip_code() -> QuantumCode:
    """|0>_L = |000>, |1>_L = |111>; corrects one X error, blind to Z errors."""
    stab = StabilizerCode.from_strings(["ZZI", "IZZ"], ["XXX"], ["ZZZ"], name="bitflip")
    return from_stabilizer_code(stab)


def phase_flip_code() -> QuantumCode:
    """The bit-flip code conjugated by H on every qubit; corrects one Z error."""
    return from_stabilizer_code(transversal_conjugate(bit_flip_code(), "H"), "phaseflip")


def lift_through(outer_pauli: PauliOperator, inner: StabilizerCode, blocks: Optional[int] = None) -> PauliOperator:
    """
    Replaces each outer-level X or Z on block b by the inner logical X or Z on
    that block's qubits, keeping the exact phase.
    """
    if inner.k != 1:
        raise InvalidCodeError("lifting needs an inner code with one logical qubit")
    blocks = blocks or outer_pauli.n
    total = blocks * inner.n
    result = PauliOperator(np.zeros(total, dtype=np.uint8), np.zeros(total, dtype=np.uint8), outer_pauli.phase)
    for b in np.flatnonzero(outer_pauli.x):
        result = pauli_mul(result, embed(inner.logical_x[0], total, _block(int(b), inner.n)))
    for b in np.flatnonzero(outer_pauli.z):
        result = pauli_mul(result, embed(inner.logical_z[0], total, _block(int(b), inner.n)))
    return result


def _block(b: int, size: int) -> List[int]:
    return list(range(b * size, (b + 1) * size))


def concatenate(outer: QuantumCode, inner: QuantumCode, name: str = "") -> QuantumCode:
    """
    [[n1 n2, 1]] code: inner generators on every block plus the outer generators
    lifted through the inner logical operators.
    Args:
        outer (QuantumCode): [[n1, 1]] code.
        inner (QuantumCode): [[n2, 1]] code encoding each outer qubit.
    Returns:
        QuantumCode: encoder = outer encoder on the blocks' first qubits, then the inner encoder per block.
    Raises:
        InvalidCodeError: either code has k != 1.
    """
    if outer.k != 1 or inner.k != 1:
        raise InvalidCodeError(f"concatenation needs k = 1 codes, got k = {outer.k} and {inner.k}")
    n1, n2 = outer.n, inner.n
    total = n1 * n2
    generators = [embed(g, total, _block(b, n2)) for b in range(n1) for g in inner.generators]
    generators += [lift_through(g, inner.stab) for g in outer.generators]
    name = name or f"{outer.name}∘{inner.name}"
    stab = StabilizerCode(
        total,
        1,
        tuple(generators),
        (lift_through(outer.stab.logical_x[0], inner.stab),),
        (lift_through(outer.stab.logical_z[0], inner.stab),),
        name=name,
    )
    if total <= MAX_DISTANCE_QUBITS:
        stab = stab.with_distance(min_distance(stab))
    encoder = _remap(outer.encoder, [b * n2 for b in range(n1)])
    for b in range(n1):
        encoder += _remap(inner.encoder, _block(b, n2))
    code = QuantumCode(stab, encoder, {}, name, components=(outer, inner))
    single_errors = [PauliOperator.identity(total)] + [
        PauliOperator.single(total, q, letter) for q in range(total) for letter in DECODER_LETTERS
    ]
    for error in single_errors:
        bits = stab.syndrome_of(error)
        code.decoder_table.setdefault(bits, code.decode(bits))
    logger.debug(f"concatenated {outer.name} with {inner.name}: {len(generators)} generators")
    return code


def _decode_concatenated(code: QuantumCode, bits: Tuple[int, ...]) -> PauliOperator:
    """Inner decoding on every block, then outer decoding of the residual logical-level syndrome."""
    outer, inner = code.components
    n1, n2 = outer.n, inner.n
    m_inner = n2 - 1
    correction = PauliOperator.identity(code.n)
    for b in range(n1):
        block_bits = bits[b * m_inner : (b + 1) * m_inner]
        try:
            local = inner.decode(block_bits)
        except DecodingError:
            logger.warning(f"block {b}: inner syndrome {''.join(map(str, block_bits))} not decodable")
            local = PauliOperator.identity(n2)
        correction = pauli_mul(correction, embed(local, code.n, _block(b, n2)))
    outer_bits = list(bits[n1 * m_inner :])
    lifted = code.generators[n1 * m_inner :]
    outer_bits = [s ^ (0 if correction.commutes_with(g) else 1) for s, g in zip(outer_bits, lifted)]
    outer_fix = outer.decode(outer_bits)
    return pauli_mul(correction, lift_through(outer_fix, inner.stab, n1)).unsigned()


def shor_code() -> QuantumCode:
    """Nine-qubit code: phase-flip outer code, bit-flip inner code."""
    return concatenate(phase_flip_code(), bit_flip_code(), "shor9")


def _coset_representatives(candidates: Sequence[int], modulo: Sequence[int], count: int, n: int) -> List[int]:
    chosen: List[int] = []
    for vector in candidates:
        if len(chosen) == count:
            break
        if not gf2.in_span(vector, list(modulo) + chosen, n):
            chosen.append(vector)
    return chosen


def _pair_logicals(xs: List[int], zs: List[int]) -> Tuple[List[int], List[int]]:
    """Gram-Schmidt so that dot(xs[i], zs[j]) = [i == j]."""
    xs, zs = list(xs), list(zs)
    for i in range(len(xs)):
        j = next((j for j in range(i, len(zs)) if gf2.dot(xs[i], zs[j])), None)
        if j is None:
            raise InvalidCodeError("logical operators cannot be paired")
        zs[i], zs[j] = zs[j], zs[i]
        for m in range(len(xs)):
            if m != i and gf2.dot(xs[m], zs[i]):
                xs[m] ^= xs[i]
        for m in range(len(zs)):
            if m != i and gf2.dot(xs[i], zs[m]):
                zs[m] ^= zs[i]
    return xs, zs


def css_stabilizer_code(c1: ClassicalLinearCode, c2: ClassicalLinearCode, name: str = "") -> StabilizerCode:
    """
    CSS code of two classical codes with dual(c2) inside c1: X-type generators
    from dual(c2)'s generators, Z-type generators from c1's parity checks.
    Raises:
        InvalidCodeError: weak duality fails; the message names a violating vector.
    """
    if c1.n != c2.n:
        raise DimensionMismatchError(f"code lengths differ: {c1.n} vs {c2.n}")
    violation = dual_violation(c1, c2)
    if violation is not None:
        raise InvalidCodeError(
            f"{violation} is in dual({c2.name or 'c2'}) but not in {c1.name or 'c1'}: codes are not weakly dual"
        )
    n = c1.n
    k = c1.k + c2.k - n
    x_rows = c2.check_rows
    z_rows = c1.check_rows
    zero = [0] * n

    def x_type(row):
        return PauliOperator(gf2.unpack_bits(row, n), zero)

    def z_type(row):
        return PauliOperator(zero, gf2.unpack_bits(row, n))

    all_ones = (1 << n) - 1
    xs = _coset_representatives([all_ones] + c1.generator_rows, x_rows, k, n)
    zs = _coset_representatives([all_ones] + c2.generator_rows, z_rows, k, n)
    xs, zs = _pair_logicals(xs, zs)
    return StabilizerCode(
        n,
        k,
        tuple(x_type(r) for r in x_rows) + tuple(z_type(r) for r in z_rows),
        tuple(x_type(r) for r in xs),
        tuple(z_type(r) for r in zs),
        name=name,
    )


def css_code(c1: ClassicalLinearCode, c2: ClassicalLinearCode, name: str = "") -> QuantumCode:
    name = name or f"css({c1.name},{c2.name})"
    return from_stabilizer_code(css_stabilizer_code(c1, c2, name), name)


def steane_code() -> QuantumCode:
    """Seven-qubit CSS code from two copies of the Hamming code."""
    hamming = hamming_7_4()
    return css_code(hamming, hamming, "css-hamming")


# Ideal syndrome extraction and correction

def _check_state(code: QuantumCode, state: StateVector):
    if not state.is_qubits or state.num_registers != code.n:
        raise DimensionMismatchError(f"state dims {list(state.dims)} do not match the {code.n}-qubit code {code.name}")


def extract_syndrome(code: QuantumCode, state: StateVector, rng: Optional[np.random.Generator] = None) -> Tuple[Syndrome, StateVector]:
    """Projective measurement of every generator in order; returns the syndrome and the collapsed state."""
    _check_state(code, state)
    rng = rng if rng is not None else np.random.default_rng()
    bits = []
    for g in code.generators:
        record = measure_pauli(state, g, rng)
        bits.append(record.outcome)
        state = record.collapsed
    return Syndrome(tuple(bits)), state


def correct(code: QuantumCode, state: StateVector, rng: Optional[np.random.Generator] = None) -> StateVector:
    """Syndrome extraction followed by the decoder's correction; unknown syndromes leave the state as is."""
    syndrome, state = extract_syndrome(code, state, rng)
    if syndrome.is_trivial:
        return state
    try:
        correction = code.decode(syndrome)
    except DecodingError as e:
        logger.warning(f"{e}; applying identity")
        return state
    logger.debug(f"{code.name}: syndrome {syndrome} -> correction {correction}")
    return apply_pauli(state, correction)


# Encoding

def encode(code: QuantumCode, state: StateVector) -> StateVector:
    """Encodes a k-qubit state: data registers first, ancillas in |0>, then the encoder circuit."""
    if list(state.dims) != [2] * code.k:
        raise DimensionMismatchError(f"{code.name} encodes {code.k} qubits, got dims {list(state.dims)}")
    full = tensor(state, zero_state(code.n - code.k)) if code.n > code.k else state
    return run_circuit(full, code.encoder)


def logical_basis_state(code: QuantumCode, bits: Union[str, Sequence[int]]) -> StateVector:
    bits = bits if isinstance(bits, str) else "".join(str(int(b)) for b in bits)
    return encode(code, from_bitstring(bits))


# Transversal gates

def transversal_conjugate(code: Union[QuantumCode, StabilizerCode], gate: str = "H") -> StabilizerCode:
    """The stabilizer code obtained by conjugating every generator and logical operator by gate on each qubit."""
    stab = code.stab if isinstance(code, QuantumCode) else code
    tableau = CliffordTableau.from_circuit([(gate, q) for q in range(stab.n)], stab.n)
    return StabilizerCode(
        stab.n,
        stab.k,
        tuple(conjugate(tableau, g) for g in stab.generators),
        tuple(conjugate(tableau, p) for p in stab.logical_x),
        tuple(conjugate(tableau, p) for p in stab.logical_z),
        stab.distance,
        f"{gate}({stab.name})",
    )


def stabilizer_group_contains(code: Union[QuantumCode, StabilizerCode], pauli: PauliOperator) -> bool:
    """Exact membership, sign included."""
    stab = code.stab if isinstance(code, QuantumCode) else code
    return stab.in_stabilizer_group(pauli, ignore_sign=False)


def _stacked(stab: StabilizerCode, blocks: int) -> StabilizerCode:
    total = blocks * stab.n
    return StabilizerCode(
        total,
        blocks * stab.k,
        tuple(embed(g, total, _block(b, stab.n)) for b in range(blocks) for g in stab.generators),
        tuple(embed(p, total, _block(b, stab.n)) for b in range(blocks) for p in stab.logical_x),
        tuple(embed(p, total, _block(b, stab.n)) for b in range(blocks) for p in stab.logical_z),
    )


def _is_transversal(stab: StabilizerCode, gate_name: str) -> bool:
    """Bitwise gate preserves the stabilizer group and acts on the logical operators like the gate itself."""
    if stab.k != 1:
        return False
    gate = TRANSVERSAL_CANDIDATES[gate_name]
    blocks = gate.arity
    stacked = _stacked(stab, blocks)
    ops = [(gate_name, *(b * stab.n + q for b in range(blocks))) for q in range(stab.n)]
    tableau = CliffordTableau.from_circuit(ops, stacked.n)
    for g in stacked.generators:
        if not stacked.in_stabilizer_group(conjugate(tableau, g), ignore_sign=False):
            return False
    images = _LOGICAL_IMAGES[gate_name]
    for letter, logicals in (("X", stacked.logical_x), ("Z", stacked.logical_z)):
        expected_images = images[letter] if blocks > 1 else (images[letter],)
        for logical, image in zip(logicals, expected_images):
            expected = lift_through(PauliOperator.from_string(image), stab, blocks)
            residual = pauli_mul(expected, conjugate(tableau, logical))
            if not stacked.in_stabilizer_group(residual, ignore_sign=False):
                return False
    return True


def transversal_gate(code: QuantumCode, gate: Union[str, Gate], blocks: Optional[int] = None) -> Circuit:
    """
    Bitwise circuit for a logical gate: gate on qubit i of every block, for each i.
    Args:
        code (QuantumCode): code with one logical qubit per block.
        gate (str | Gate): one of X, Z, H, S, CNOT, CZ.
        blocks (int): 1 or 2; must match the gate's arity when given.
    Returns:
        Circuit over blocks * n qubits, block b occupying qubits b*n .. b*n + n - 1.
    Raises:
        UnsupportedGateError: the code has no transversal version of the gate.
    """
    name = gate.name if isinstance(gate, Gate) else str(gate).upper()
    if name not in TRANSVERSAL_CANDIDATES:
        raise UnsupportedGateError(f"{name} has no transversal implementation here")
    physical = TRANSVERSAL_CANDIDATES[name]
    if blocks is not None and blocks != physical.arity:
        raise UnsupportedGateError(f"{name} acts on {physical.arity} blocks, not {blocks}")
    if name not in code.transversal_gates():
        raise UnsupportedGateError(f"{name} is not transversal on {code.name}")
    return [(physical, tuple(b * code.n + q for b in range(physical.arity))) for q in range(code.n)]
