import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from modules.data_structure import ExitCode
from modules.experiment_cli import ExperimentCLI
from modules.utils import load_yaml_config

# Load environment variables
load_dotenv()

DEFAULT_CONFIG = "configs/configs.yml"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # --config and --log-level are needed before the full parser exists
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=os.getenv("QLAB_CONFIG", DEFAULT_CONFIG))
    pre.add_argument("--log-level", default=None)
    known, _ = pre.parse_known_args(argv)

    try:
        app_configs = load_yaml_config(known.config, "app")
    except FileNotFoundError as e:
        sys.stderr.write(f"{e}\n")
        return ExitCode.io
    level = known.log_level or os.getenv("QLAB_LOG_LEVEL") or app_configs.get("log_level", "INFO")
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=getattr(logging, str(level).upper(), logging.INFO),
        stream=sys.stderr,
    )
    logger = logging.getLogger("qlab")
    logger.debug(f"using configuration {known.config}")

    cli = ExperimentCLI(known.config)
    return cli.run(argv)


if __name__ == "__main__":
    sys.exit(main())
