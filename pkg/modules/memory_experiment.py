"""
Monte Carlo memory experiments: encode a logical state, run rounds of
(noise, ideal syndrome extraction, correction), read the logical observable
and count flips.

Two engines share one seeding contract. Trials are split into fixed-size
chunks and chunk i draws from child seed i of the master seed, so a result
depends only on (master seed, chunk_size) and never on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import csv
import io
import json
import logging
import math

import numpy as np
from scipy.stats import norm

from modules.data_structure import DecodingError, InvalidCodeError
from modules.noise import NoiseModel
from modules.pauli import PauliOperator, apply_pauli, measure_pauli
from modules.qec_codes import QuantumCode, encode, extract_syndrome
from modules.statevector import plus_state, zero_state
from modules.utils import default_workers, derive_seeds

logger = logging.getLogger(__name__)

ENGINES = ("frame", "statevector")
BASES = ("Z", "X")
CSV_COLUMNS = [
    "code",
    "p_x",
    "p_z",
    "p_depol",
    "rounds",
    "trials",
    "logical_rate",
    "ci_low",
    "ci_high",
    "seed",
    "p_m",
    "basis",
    "version",
]


@dataclass
class ExperimentResult:
    code: str
    p_x: float
    p_z: float
    p_depol: float
    p_m: float
    rounds: int
    trials: int
    failures: int
    logical_rate: float
    ci_low: float
    ci_high: float
    seed: int
    basis: str = "Z"
    engine: str = "frame"
    decoding_failures: int = 0

    def as_row(self, version: str = "") -> Dict[str, object]:
        row = {key: value for key, value in asdict(self).items() if key in CSV_COLUMNS}
        row["version"] = version
        return row


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.
    Args:
        successes (int): number of counted events.
        trials (int): number of trials, at least 1.
        confidence (float): two-sided confidence level.
    Returns:
        (low, high) clipped into [0, 1].
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    z = norm.ppf(0.5 + confidence / 2)
    p_hat = successes / trials
    denom = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def loglog_slope(rates_by_p: Dict[float, float]) -> float:
    """Least-squares slope of log(rate) against log(p); zero rates are skipped."""
    points = [(math.log(p), math.log(r)) for p, r in sorted(rates_by_p.items()) if p > 0 and r > 0]
    if len(points) < 2:
        raise ValueError("need at least two nonzero rates to fit a slope")
    xs, ys = zip(*points)
    return float(np.polyfit(xs, ys, 1)[0])


class _FrameContext:
    """Per-experiment data shared read-only by frame-engine chunks, plus the decode cache."""

    def __init__(self, code: QuantumCode, basis: str):
        self.code = code
        self.n = code.n
        gens = code.stab.generator_matrix().astype(np.int64)
        self.gx, self.gz = gens[:, : self.n], gens[:, self.n :]
        logicals = code.stab.logical_z if basis == "Z" else code.stab.logical_x
        ops = np.array([p.symplectic() for p in logicals], dtype=np.int64)
        self.lx, self.lz = ops[:, : self.n], ops[:, self.n :]
        self._cache: Dict[Tuple[int, ...], Optional[np.ndarray]] = {}

    def correction(self, bits: Tuple[int, ...]) -> Optional[np.ndarray]:
        if bits not in self._cache:
            try:
                self._cache[bits] = self.code.decode(bits).symplectic().astype(np.uint8)
            except DecodingError:
                self._cache[bits] = None
        return self._cache[bits]


def _frame_chunk(ctx: _FrameContext, noise: NoiseModel, rounds: int, trials: int, seed) -> Tuple[int, int]:
    rng = np.random.default_rng(seed)
    n = ctx.n
    rx = np.zeros((trials, n), dtype=np.uint8)
    rz = np.zeros((trials, n), dtype=np.uint8)
    decode_failures = 0
    for _ in range(rounds):
        x, z = noise.sample_frames(trials, n, rng)
        rx ^= x
        rz ^= z
        syndromes = (rx.astype(np.int64) @ ctx.gz.T + rz.astype(np.int64) @ ctx.gx.T) % 2
        syndromes = syndromes.astype(np.uint8) ^ noise.sample_flips(syndromes.shape, rng)
        if syndromes.shape[1] == 0:
            continue
        unique, inverse = np.unique(syndromes, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        table = np.zeros((len(unique), 2 * n), dtype=np.uint8)
        for row, bits in enumerate(unique):
            correction = ctx.correction(tuple(int(b) for b in bits))
            if correction is None:
                decode_failures += int(np.count_nonzero(inverse == row))
            else:
                table[row] = correction
        applied = table[inverse]
        rx ^= applied[:, :n]
        rz ^= applied[:, n:]
    # a residual flips the readout iff it anticommutes with a measured logical
    flips = (rx.astype(np.int64) @ ctx.lz.T + rz.astype(np.int64) @ ctx.lx.T) % 2
    return int(np.count_nonzero(flips.any(axis=1))), decode_failures


def _statevector_chunk(
    code: QuantumCode, noise: NoiseModel, rounds: int, trials: int, seed, basis: str
) -> Tuple[int, int]:
    rng = np.random.default_rng(seed)
    initial = encode(code, zero_state(code.k) if basis == "Z" else plus_state(code.k))
    logicals: Sequence[PauliOperator] = code.stab.logical_z if basis == "Z" else code.stab.logical_x
    failures = decode_failures = 0
    for _ in range(trials):
        state = initial
        for _ in range(rounds):
            state = apply_pauli(state, noise.sample_pauli(code.n, rng))
            syndrome, state = extract_syndrome(code, state, rng)
            bits = tuple(int(b) ^ int(f) for b, f in zip(syndrome.bits, noise.sample_flips(len(syndrome), rng)))
            try:
                state = apply_pauli(state, code.decode(bits))
            except DecodingError:
                decode_failures += 1
        flipped = False
        for logical in logicals:
            record = measure_pauli(state, logical, rng)
            flipped |= record.outcome == 1
            state = record.collapsed
        failures += int(flipped)
    return failures, decode_failures


def _chunks(trials: int, chunk_size: int) -> List[int]:
    full, rest = divmod(trials, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def memory_experiment(
    code: QuantumCode,
    noise: NoiseModel,
    rounds: int = 1,
    trials: int = 100000,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
    basis: str = "Z",
    engine: str = "frame",
    chunk_size: int = 4096,
    workers: int = 0,
) -> ExperimentResult:
    """
    Logical error rate of a code under stochastic Pauli noise.
    Args:
        code (QuantumCode): code with a decoder.
        noise (NoiseModel): per-qubit Pauli noise each round, plus syndrome flips p_m.
        rounds (int): noise and correction cycles before the logical readout.
        trials (int): number of Monte Carlo trials.
        rng (np.random.Generator): source of the master seed when seed is not given.
        seed (int): master seed.
        basis (str): "Z" prepares |0>_L and reads logical Z, "X" prepares |+>_L and reads logical X.
        engine (str): "frame" (vectorized Pauli frames) or "statevector" (trajectories).
        chunk_size (int): trials per seeded chunk.
        workers (int): thread count, 0 for the host default.
    Returns:
        ExperimentResult: flip fraction with a Wilson 95% interval.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    if code.k < 1:
        raise InvalidCodeError(f"{code.name} encodes no logical qubit")
    if seed is None:
        rng = rng if rng is not None else np.random.default_rng()
        seed = int(rng.integers(0, 2**63 - 1))

    sizes = _chunks(trials, chunk_size)
    seeds = derive_seeds(seed, len(sizes))
    workers = workers or default_workers()
    logger.info(
        f"memory experiment on {code.name}: {', '.join(noise.describe())}, rounds={rounds}, "
        f"trials={trials}, basis={basis}, engine={engine}, seed={seed}"
    )
    if engine == "frame":
        ctx = _FrameContext(code, basis)
        tasks = [(_frame_chunk, (ctx, noise, rounds, size, s)) for size, s in zip(sizes, seeds)]
    else:
        tasks = [(_statevector_chunk, (code, noise, rounds, size, s, basis)) for size, s in zip(sizes, seeds)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(lambda task: task[0](*task[1]), tasks))

    failures = sum(f for f, _ in outcomes)
    decoding_failures = sum(d for _, d in outcomes)
    if decoding_failures:
        logger.warning(f"{decoding_failures} syndromes were missing from the {code.name} decoder table; identity applied")
    low, high = wilson_interval(failures, trials)
    result = ExperimentResult(
        code=code.name,
        p_x=noise.p_x,
        p_z=noise.p_z,
        p_depol=noise.p_depol,
        p_m=noise.p_m,
        rounds=rounds,
        trials=trials,
        failures=failures,
        logical_rate=failures / trials,
        ci_low=low,
        ci_high=high,
        seed=seed,
        basis=basis,
        engine=engine,
        decoding_failures=decoding_failures,
    )
    logger.info(f"{code.name}: logical rate {result.logical_rate:.6g} [{low:.6g}, {high:.6g}]")
    return result


def sweep(
    code: QuantumCode, grid: Iterable[NoiseModel], seed: int, **kwargs
) -> List[ExperimentResult]:
    """One memory_experiment per grid point, every point run from the same master seed."""
    return [memory_experiment(code, noise, seed=seed, **kwargs) for noise in grid]


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(results: Sequence[ExperimentResult], version: str = "") -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for result in results:
        row = result.as_row(version)
        writer.writerow([_format(row[column]) for column in CSV_COLUMNS])
    return buffer.getvalue()


def format_json(results: Sequence[ExperimentResult], version: str = "") -> str:
    document = {"version": version, "results": [result.as_row(version) for result in results]}
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_results(results: Sequence[ExperimentResult], path, version: str = "", fmt: str = "csv") -> Path:
    """Writes a CSV or JSON result file, creating parent directories."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = format_csv(results, version) if fmt == "csv" else format_json(results, version)
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info(f"wrote {len(results)} results to {path}")
    return path
