import argparse
import itertools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import psutil

from modules.algorithms import (
    EXACT,
    POWER_OF_TWO,
    discrete_log,
    factor,
    grover,
    marked_oracle,
    order_find,
    phase_estimate,
    simon,
    simon_oracle,
    torus_period,
)
from modules.code_library import CodeLibrary
from modules.code_search import search_code
from modules.data_structure import ExitCode, QLabError, RetryBudgetExceededError, RunResponse
from modules.ft_gadgets import (
    cat_state,
    density_check,
    gadget_toffoli,
    prepare_cat,
    rus_rotation,
)
from modules.memory_experiment import format_csv, format_json, sweep, write_results
from modules.noise import NoiseModel
from modules.qec_codes import encode
from modules.stabilizer import format_stabilizer_code, min_distance, write_stabilizer_file
from modules.statevector import (
    H,
    R_2PI_3,
    S,
    SDG,
    T,
    TDG,
    TOFFOLI,
    X,
    Y,
    Z,
    MAX_AMPLITUDES,
    apply_gate,
    basis_state,
    fidelity,
    from_bitstring,
    random_state,
)
from modules.utils import available_memory_bytes, default_workers, load_yaml_config

GATES = {"H": H, "S": S, "S†": SDG, "SDG": SDG, "T": T, "T†": TDG, "TDG": TDG, "X": X, "Y": Y, "Z": Z}
GADGETS = ("rus-rotation", "toffoli", "cat", "density")
ALGORITHMS = ("factor", "order", "simon", "dlog", "phase", "grover", "torus")


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_pair(text: str) -> List[int]:
    return [int(v) for v in text.split(",")]


class UsageError(QLabError, ValueError):
    pass


class ExperimentCLI:
    """
    Command-line experiment runner. Each subcommand is a handler registered
    with add_command_handler; handlers return RunResponse payloads and run()
    turns them into output and an exit code.
    """

    def __init__(self, config_path: str = "configs/configs.yml"):
        """
        Initialize the runner with configuration from a YAML file.

        Args:
            config_path (str): Path to the configuration file
        """
        self.config_path = config_path
        self.configs = load_yaml_config(config_path)
        self.app = self.configs.get("app", {})
        self.version = str(self.app.get("version", "0"))
        self.cli_configs = self.configs.get("cli", {})
        self.mc_configs = self.configs.get("monte_carlo", {})
        self.search_configs = self.configs.get("search", {})
        self.algo_configs = self.configs.get("algorithms", {})
        self.gadget_configs = self.configs.get("gadgets", {})
        self.library = CodeLibrary(self.cli_configs.get("code_library", "configs/codes.yml"))
        self.logger = logging.getLogger(__name__)

        self.parser = argparse.ArgumentParser(prog=self.app.get("name", "qlab"), description="Quantum error-correction lab")
        self.parser.add_argument("--config", default=config_path, help="configuration file")
        self.parser.add_argument("--log-level", default=None, help="logging level")
        self.subparsers = self.parser.add_subparsers(dest="command", required=True)
        self.handlers: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {}

        # Register default handlers
        self._setup_default_handlers()

    def add_command_handler(
        self,
        command: str,
        callback: Callable[[argparse.Namespace], Dict[str, Any]],
        configure: Optional[Callable[[argparse.ArgumentParser], None]] = None,
        help_text: str = "",
    ):
        """
        Add a subcommand.

        Args:
            command (str): Subcommand name
            callback (Callable): Function taking the parsed arguments and returning a RunResponse payload
            configure (Callable): Adds the subcommand's own arguments to its parser
            help_text (str): One-line description
        """
        sub = self.subparsers.add_parser(command, help=help_text)
        sub.add_argument("--seed", type=int, default=int(self.cli_configs.get("seed", 0)), help="master seed")
        if configure is not None:
            configure(sub)
        self.handlers[command] = callback
        self.logger.debug(f"Added command handler for {command}")

    def _setup_default_handlers(self):
        """Set up default command handlers."""
        self.add_command_handler("code-info", self._code_info_command, self._code_info_args, "describe a code")
        self.add_command_handler("sweep", self._sweep_command, self._sweep_args, "memory experiment noise sweep")
        self.add_command_handler("run", self._run_command, self._run_args, "run a period-finding algorithm")
        self.add_command_handler("gadget", self._gadget_command, self._gadget_args, "fault-tolerance gadget demo")
        self.add_command_handler("search", self._search_command, self._search_args, "random stabilizer code search")
        self.add_command_handler("status", self._status_command, None, "host and simulator limits")

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parses argv, dispatches to the handler and prints its content. Returns the exit code."""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        try:
            response = self.handlers[args.command](args)
        except OSError as e:
            self.logger.error(f"{args.command}: I/O failure: {e}")
            return ExitCode.io
        except (QLabError, ValueError) as e:
            self.logger.error(f"{args.command}: {e}")
            return ExitCode.usage
        content = response["content"]
        if content is not None:
            text = content if isinstance(content, str) else json.dumps(content, indent=2, sort_keys=True)
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return ExitCode.success if response["success"] else ExitCode.usage

    def _record(self, args: argparse.Namespace, payload: Dict[str, Any]) -> Dict[str, Any]:
        payload.setdefault("seed", args.seed)
        payload["version"] = self.version
        return payload

    # code-info

    def _code_info_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("code", help="library id or stabilizer file path")
        parser.add_argument("--export", default=None, help="write the code as a stabilizer file")
        parser.add_argument("--format", choices=("text", "json"), default="text")

    def _code_info_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        code = self.library.get(args.code)
        stab = code.stab
        distance = min_distance(stab) if stab.n <= 12 and stab.k > 0 else code.distance
        x_distance = min_distance(stab, error_types="X") if distance == 1 else None
        if args.export:
            write_stabilizer_file(stab, args.export)
            self.logger.info(f"exported {code.name} to {args.export}")
        record = self._record(
            args,
            {
                "code": code.name,
                "n": stab.n,
                "k": stab.k,
                "distance": distance,
                "x_distance": x_distance,
                "generators": [str(g) for g in stab.generators],
                "logical_x": [str(p) for p in stab.logical_x],
                "logical_z": [str(p) for p in stab.logical_z],
                "transversal": sorted(code.transversal_gates()),
                "description": self.library.describe(args.code),
            },
        )
        if args.format == "json":
            return RunResponse.success(record)
        d = "?" if distance is None else distance
        lines = [f"{code.name}: n={stab.n}, k={stab.k}, d={d}"]
        if x_distance is not None:
            lines.append(f"note: X-distance {x_distance}")
        lines.append("stabilizers: " + " ".join(record["generators"]))
        lines.append("logical X: " + " ".join(record["logical_x"]))
        lines.append("logical Z: " + " ".join(record["logical_z"]))
        lines.append("transversal: " + (", ".join(record["transversal"]) or "none"))
        lines.append(f"version {self.version}, seed {args.seed}")
        return RunResponse.success("\n".join(lines))

    # sweep

    def _sweep_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("--code", required=True, help="library id or stabilizer file path")
        parser.add_argument("--noise-px", type=_float_list, default=[0.0], help="comma-separated p_x grid")
        parser.add_argument("--noise-pz", type=_float_list, default=[0.0], help="comma-separated p_z grid")
        parser.add_argument("--noise-depol", type=_float_list, default=[0.0], help="comma-separated depolarizing grid")
        parser.add_argument("--noise-pm", type=float, default=0.0, help="syndrome flip probability")
        parser.add_argument("--rounds", type=int, default=int(self.mc_configs.get("default_rounds", 1)))
        parser.add_argument("--trials", type=int, default=int(self.mc_configs.get("default_trials", 100000)))
        parser.add_argument("--basis", choices=("Z", "X"), default="Z")
        parser.add_argument("--engine", choices=("frame", "statevector"), default="frame")
        parser.add_argument("--out", default=None, help="output file (stdout when omitted)")
        parser.add_argument("--format", choices=("csv", "json"), default=self.cli_configs.get("format", "csv"))

    def _sweep_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        if args.trials < 100:
            raise UsageError(f"--trials must be >= 100, got {args.trials}")
        if args.rounds < 1:
            raise UsageError(f"--rounds must be >= 1, got {args.rounds}")
        code = self.library.get(args.code)
        grid = [
            NoiseModel(p_x=px, p_z=pz, p_depol=pd, p_m=args.noise_pm)
            for px, pz, pd in itertools.product(args.noise_px, args.noise_pz, args.noise_depol)
        ]
        results = sweep(
            code,
            grid,
            seed=args.seed,
            rounds=args.rounds,
            trials=args.trials,
            basis=args.basis,
            engine=args.engine,
            chunk_size=int(self.mc_configs.get("chunk_size", 4096)),
            workers=int(self.mc_configs.get("workers", 0)),
        )
        if args.out:
            path = write_results(results, args.out, self.version, args.format)
            return RunResponse.success(self._record(args, {"written": str(path), "rows": len(results)}))
        text = format_csv(results, self.version) if args.format == "csv" else format_json(results, self.version)
        return RunResponse.success(text)

    # run

    def _run_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("algorithm", choices=ALGORITHMS)
        parser.add_argument("--n", type=int, default=None, help="number to factor / modulus / bit count")
        parser.add_argument("--a", type=int, default=None, help="order-finding base")
        parser.add_argument("--period", default=None, help="Simon period bits, or torus period 'p1,p2'")
        parser.add_argument("--p", type=int, default=None, help="discrete-log prime")
        parser.add_argument("--g", type=int, default=None, help="discrete-log generator")
        parser.add_argument("--y", type=int, default=None, help="discrete-log target")
        parser.add_argument("--q", type=int, default=None, help="torus side")
        parser.add_argument("--marked", type=int, default=None, help="Grover marked item")
        parser.add_argument("--gate", default="Z", help="phase-estimation gate")
        parser.add_argument("--eigenstate", default="1", help="phase-estimation eigenstate bits")
        parser.add_argument("--t", type=int, default=3, help="phase-estimation precision bits")
        parser.add_argument("--mode", choices=(POWER_OF_TWO, EXACT), default=None)

    @staticmethod
    def _require(args: argparse.Namespace, *names: str):
        missing = [f"--{name}" for name in names if getattr(args, name) is None]
        if missing:
            raise UsageError(f"{args.algorithm} needs {', '.join(missing)}")

    def _run_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        rng = np.random.default_rng(args.seed)
        retries = self.algo_configs
        algorithm = args.algorithm
        if algorithm == "factor":
            self._require(args, "n")
            if args.n % 2 == 0:
                raise UsageError(f"factor needs an odd composite N, got {args.n}")
            result = factor(args.n, rng, mode=args.mode or POWER_OF_TWO, max_trials=int(retries.get("factor_retries", 40)))
            result.answer = list(result.answer)
        elif algorithm == "order":
            self._require(args, "n", "a")
            result = order_find(args.n, args.a, rng, mode=args.mode or POWER_OF_TWO, max_trials=int(retries.get("order_find_retries", 40)))
        elif algorithm == "simon":
            self._require(args, "period")
            if args.n is not None and args.n != len(args.period):
                raise UsageError(f"--period {args.period} has {len(args.period)} bits, --n is {args.n}")
            result = simon(simon_oracle(args.period), rng, max_queries=int(retries.get("simon_max_queries", 200)))
            result.answer = result.data["period"]
        elif algorithm == "dlog":
            self._require(args, "p", "g", "y")
            result = discrete_log(args.p, args.g, args.y, rng, mode=args.mode or EXACT, max_trials=int(retries.get("discrete_log_retries", 40)))
        elif algorithm == "torus":
            self._require(args, "q", "period")
            result = torus_period(args.q, tuple(_int_pair(args.period)), rng, max_trials=int(retries.get("torus_retries", 40)))
            result.answer = list(result.answer)
        elif algorithm == "grover":
            self._require(args, "n", "marked")
            oracle = marked_oracle(args.n, args.marked)
            for _ in range(int(retries.get("grover_retries", 40))):
                result = grover(oracle, rng)
                if result.verified:
                    break
            else:
                raise RetryBudgetExceededError("grover: no verified hit within the retry budget")
        else:
            gate = GATES.get(args.gate.upper())
            if gate is None:
                raise UsageError(f"unknown gate {args.gate!r}; known: {', '.join(GATES)}")
            eigenstate = from_bitstring(args.eigenstate)
            for _ in range(int(retries.get("phase_retries", 40))):
                result = phase_estimate(gate, eigenstate, args.t, rng)
                if result.verified:
                    break
            else:
                raise RetryBudgetExceededError("phase estimation: no verified estimate within the retry budget")
        self.logger.info(f"{algorithm}: answer {result.answer} after {result.queries_or_trials} queries")
        return RunResponse.success(result.as_record(args.seed, self.version))

    # gadget

    def _gadget_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("gadget", choices=GADGETS)
        parser.add_argument("--trials", type=int, default=None)
        parser.add_argument("--n", type=int, default=4, help="cat-state size")
        parser.add_argument("--code", default=None, help="encode the RUS rotation in this code")
        parser.add_argument("--noise-px", type=float, default=0.0)
        parser.add_argument("--noise-pz", type=float, default=0.0)
        parser.add_argument("--noise-depol", type=float, default=0.0)
        parser.add_argument("--gates", default="H,T", help="density-check gate set")
        parser.add_argument("--depth", type=int, default=12, help="density-check depth")

    def _gadget_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        rng = np.random.default_rng(args.seed)
        handler = {
            "rus-rotation": self._rus_summary,
            "toffoli": self._toffoli_summary,
            "cat": self._cat_summary,
            "density": self._density_summary,
        }[args.gadget]
        summary = handler(args, rng)
        summary["gadget"] = args.gadget
        return RunResponse.success(self._record(args, summary))

    def _rus_summary(self, args: argparse.Namespace, rng: np.random.Generator) -> Dict[str, Any]:
        trials = args.trials or 10000
        code = self.library.get(args.code) if args.code else None
        max_rounds = int(self.gadget_configs.get("rus_max_rounds", 64))
        rounds, fidelities, plus = [], [], 0
        incomplete = 0
        for _ in range(trials):
            psi = random_state([2], rng)
            expected = apply_gate(psi, R_2PI_3, [0])
            if code is not None:
                psi, expected = encode(code, psi), encode(code, expected)
            result = rus_rotation(psi, rng=rng, max_rounds=max_rounds, code=code)
            rounds.append(result.rounds)
            plus += result.outcomes.count("+")
            if result.complete:
                fidelities.append(fidelity(result.output, expected))
            else:
                incomplete += 1
        total_rounds = sum(rounds)
        return {
            "trials": trials,
            "code": code.name if code else None,
            "mean_rounds": total_rounds / trials,
            "plus_fraction": plus / total_rounds,
            "min_fidelity": min(fidelities) if fidelities else None,
            "incomplete": incomplete,
        }

    def _toffoli_summary(self, args: argparse.Namespace, rng: np.random.Generator) -> Dict[str, Any]:
        inputs = [basis_state([2, 2, 2], i) for i in range(8)]
        inputs += [random_state([2, 2, 2], rng) for _ in range(args.trials or 20)]
        fidelities = []
        for data in inputs:
            output = gadget_toffoli(data, rng=rng).output
            fidelities.append(fidelity(output, apply_gate(data, TOFFOLI, [0, 1, 2])))
        return {"inputs": len(inputs), "min_fidelity": min(fidelities)}

    def _cat_summary(self, args: argparse.Namespace, rng: np.random.Generator) -> Dict[str, Any]:
        trials = args.trials or 1
        noise = NoiseModel(p_x=args.noise_px, p_z=args.noise_pz, p_depol=args.noise_depol)
        target = cat_state(args.n)
        attempts, fidelities, checks = [], [], []
        for _ in range(trials):
            result = prepare_cat(args.n, noise, rng, max_attempts=int(self.gadget_configs.get("cat_max_attempts", 100)))
            attempts.append(result.rounds)
            fidelities.append(fidelity(result.output, target))
            checks.append(bool(result.data.get("checks_passed")))
        return {
            "n": args.n,
            "trials": trials,
            "mean_fidelity": float(np.mean(fidelities)),
            "min_fidelity": min(fidelities),
            "mean_attempts": float(np.mean(attempts)),
            "checks_passed": all(checks),
        }

    def _density_summary(self, args: argparse.Namespace, rng: np.random.Generator) -> Dict[str, Any]:
        names = [g.strip().upper() for g in args.gates.split(",") if g.strip()]
        unknown = [g for g in names if g not in GATES]
        if unknown:
            raise UsageError(f"unknown gates {unknown}; known: {', '.join(GATES)}")
        best = density_check(
            [GATES[g] for g in names],
            R_2PI_3,
            args.depth,
            beam_width=int(self.gadget_configs.get("density_beam_width", 20000)),
        )
        return {"gates": names, "depth": args.depth, "sequence": list(best.sequence), "distance": best.distance}

    # search

    def _search_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--k", type=int, required=True)
        parser.add_argument("--distance", type=int, required=True)
        parser.add_argument("--budget", type=int, default=int(self.search_configs.get("default_budget", 1000000)))
        parser.add_argument("--out", default=None, help="write the found code as a stabilizer file")

    def _search_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        found = search_code(
            args.n,
            args.k,
            args.distance,
            np.random.default_rng(args.seed),
            budget=args.budget,
            batch_size=int(self.search_configs.get("batch_size", 256)),
            workers=int(self.mc_configs.get("workers", 0)),
            depth=int(self.search_configs.get("scramble_depth", 0)),
        )
        if found is None:
            return RunResponse.success(self._record(args, {"found": False, "n": args.n, "k": args.k, "distance": args.distance}))
        if args.out:
            write_stabilizer_file(found, Path(args.out))
        return RunResponse.success(
            self._record(args, {"found": True, "distance": found.distance, "code": format_stabilizer_code(found)})
        )

    # status

    def _status_command(self, args: argparse.Namespace) -> Dict[str, Any]:
        """Host resources and simulator limits."""
        memory = psutil.virtual_memory()
        return RunResponse.success(
            self._record(
                args,
                {
                    "cpu_physical": psutil.cpu_count(logical=False),
                    "cpu_logical": psutil.cpu_count(logical=True),
                    "memory_available_mb": available_memory_bytes() // (1 << 20),
                    "memory_percent": memory.percent,
                    "workers": default_workers(),
                    "max_amplitudes": MAX_AMPLITUDES,
                    "codes": self.library.names(),
                },
            )
        )
