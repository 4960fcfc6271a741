"""
Stochastic Pauli noise: per-location X/Z insertion, depolarizing errors and
measurement flips, sampled either as Pauli frames for many trials at once or
as single PauliOperators for trajectory simulation.
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Tuple
import logging

import numpy as np

from modules.pauli import PauliOperator

logger = logging.getLogger(__name__)


class Location(str, Enum):
    AFTER_GATE = "after_gate"
    IDLE = "idle"
    MEASUREMENT_FLIP = "measurement_flip"


@dataclass(frozen=True)
class NoiseModel:
    """
    p_x and p_z are exclusive per location (X with p_x, else Z with p_z), and a
    depolarizing X, Y or Z follows independently with rate p_depol. p_m flips
    recorded measurement outcomes.
    """

    p_x: float = 0.0
    p_z: float = 0.0
    p_depol: float = 0.0
    p_m: float = 0.0
    locations: FrozenSet[Location] = frozenset({Location.AFTER_GATE})

    def __post_init__(self):
        for label in ("p_x", "p_z", "p_depol", "p_m"):
            value = getattr(self, label)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} must lie in [0, 1], got {value}")
        if self.p_x + self.p_z > 1.0:
            raise ValueError(f"p_x + p_z must not exceed 1, got {self.p_x + self.p_z}")
        object.__setattr__(self, "locations", frozenset(Location(v) for v in self.locations))

    @classmethod
    def depolarizing(cls, p: float) -> "NoiseModel":
        return cls(p_depol=p)

    @property
    def is_noiseless(self) -> bool:
        return self.p_x == self.p_z == self.p_depol == self.p_m == 0.0

    def applies_at(self, location: Location) -> bool:
        return Location(location) in self.locations

    def sample_frames(self, trials: int, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """(x, z) bit arrays of shape (trials, n), one independent draw per qubit location."""
        u = rng.random((trials, n))
        x = (u < self.p_x).astype(np.uint8)
        z = ((u >= self.p_x) & (u < self.p_x + self.p_z)).astype(np.uint8)
        if self.p_depol > 0.0:
            hit = rng.random((trials, n)) < self.p_depol
            letter = rng.integers(0, 3, size=(trials, n))
            # 0 -> X, 1 -> Y, 2 -> Z
            x ^= (hit & (letter <= 1)).astype(np.uint8)
            z ^= (hit & (letter >= 1)).astype(np.uint8)
        return x, z

    def sample_flips(self, shape, rng: np.random.Generator) -> np.ndarray:
        if self.p_m == 0.0:
            return np.zeros(shape, dtype=np.uint8)
        return (rng.random(shape) < self.p_m).astype(np.uint8)

    def sample_pauli(self, n: int, rng: np.random.Generator, qubits: Optional[Iterable[int]] = None) -> PauliOperator:
        """One draw on the listed qubits (all by default), as an unsigned n-qubit Pauli."""
        qubits = list(range(n)) if qubits is None else list(qubits)
        x, z = self.sample_frames(1, len(qubits), rng)
        full_x = np.zeros(n, dtype=np.uint8)
        full_z = np.zeros(n, dtype=np.uint8)
        full_x[qubits] = x[0]
        full_z[qubits] = z[0]
        return PauliOperator.hermitian_from_symplectic(np.concatenate([full_x, full_z]))

    def describe(self) -> List[str]:
        return [f"{label}={getattr(self, label):g}" for label in ("p_x", "p_z", "p_depol", "p_m")]
