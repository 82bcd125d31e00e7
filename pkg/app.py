"""Batch entrypoint: `python app.py --config configs/solve_n2_p7.json [--override key=value]...`"""
import argparse
import os
import sys
from typing import List, Optional

from loguru import logger

from modules.commands import COMMAND_HANDLERS, EXIT_INVALID, EXIT_NOT_CONVERGED
from modules.utils.config import RunConfig
from modules.utils.errors import ConfigError, ParameterError, QnlsError
from modules.utils.logging_setup import configure_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnls",
        description="Normalized solutions of the quasilinear Schrodinger equation on radial grids.",
    )
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="replace a configuration entry; dotted keys reach into sections")
    parser.add_argument("--output-dir", default=None, help="directory for reports and tables")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    return parser


def run_config(config: RunConfig) -> int:
    # 📁 Output directory
    output_dir = config.resolved_output_dir()
    os.makedirs(output_dir, exist_ok=True)

    # 🔀 Command routing
    handler = COMMAND_HANDLERS[config.command]
    logger.info(f"Running '{config.command}' with params {config.params}, writing to {output_dir}")
    status = handler(config, output_dir)
    if status == EXIT_NOT_CONVERGED:
        logger.warning(f"'{config.command}' finished without meeting its convergence gates")
    return status


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(quiet=args.quiet)

    # 📦 Load configuration
    try:
        config = RunConfig.load(args.config, args.override)
        if args.output_dir:
            config = config.with_output_dir(args.output_dir)
    except (ConfigError, ParameterError) as exc:
        logger.error(f"Invalid configuration: {exc}")
        return EXIT_INVALID

    # 🚀 Run
    try:
        return run_config(config)
    except (ConfigError, ParameterError) as exc:
        logger.error(f"Invalid input: {exc}")
        return EXIT_INVALID
    except QnlsError as exc:
        logger.error(f"Numerical failure: {exc}")
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
