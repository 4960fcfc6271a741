from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import logging

from modules.data_structure import InvalidCodeError
from modules.gf2_codes import load_classical_code
from modules.qec_codes import (
    QuantumCode,
    bit_flip_code,
    css_code,
    from_stabilizer_code,
    phase_flip_code,
    shor_code,
    steane_code,
)
from modules.stabilizer import read_stabilizer_file
from modules.utils import load_yaml_config

logger = logging.getLogger(__name__)

BUILDERS: Dict[str, Callable[[], QuantumCode]] = {
    "bitflip": bit_flip_code,
    "phaseflip": phase_flip_code,
    "shor9": shor_code,
    "css-hamming": steane_code,
}


class UnknownCodeError(InvalidCodeError):
    pass


class CodeLibrary:
    """Named codes from configs/codes.yml, plus stabilizer files given by path."""

    def __init__(self, library_path: str = "configs/codes.yml"):
        self.library_path = Path(library_path)
        self.code_configs = load_yaml_config(str(self.library_path), "codes")
        self.root = self.library_path.resolve().parent.parent
        self._cache: Dict[str, QuantumCode] = {}

    def names(self) -> List[str]:
        return list(self.code_configs)

    def describe(self, code_id: str) -> str:
        return self.code_configs.get(code_id, {}).get("description", "")

    def get(self, identifier: str) -> QuantumCode:
        """
        Builds a code by library id, or loads a stabilizer file by path.
        Args:
            identifier (str): library id such as "shor9", or a path to a .stab file.
        Returns:
            QuantumCode: the code, cached per identifier.
        Raises:
            UnknownCodeError: neither a library id nor an existing file.
        """
        if identifier not in self._cache:
            self._cache[identifier] = self._build(identifier)
        return self._cache[identifier]

    def _resolve(self, path: str) -> Path:
        candidate = Path(path)
        if candidate.is_absolute() or candidate.exists():
            return candidate
        return self.root / candidate

    def _build(self, identifier: str) -> QuantumCode:
        entry: Optional[Dict[str, Any]] = self.code_configs.get(identifier)
        if entry is None:
            path = Path(identifier)
            if path.is_file():
                logger.info(f"loading stabilizer file {path}")
                return from_stabilizer_code(read_stabilizer_file(path))
            raise UnknownCodeError(f"unknown code {identifier!r}; known codes: {', '.join(self.names())}")

        if "builder" in entry:
            builder = BUILDERS.get(entry["builder"])
            if builder is None:
                raise UnknownCodeError(f"{identifier}: unknown builder {entry['builder']!r}")
            return builder()
        if "stabilizer_file" in entry:
            stab = read_stabilizer_file(self._resolve(entry["stabilizer_file"]))
            return from_stabilizer_code(stab, identifier)
        if "css" in entry:
            c1_path, c2_path = entry["css"]
            c1 = load_classical_code(self._resolve(c1_path))
            c2 = load_classical_code(self._resolve(c2_path))
            return css_code(c1, c2, identifier)
        raise UnknownCodeError(f"{identifier}: entry needs a builder, stabilizer_file or css key")
