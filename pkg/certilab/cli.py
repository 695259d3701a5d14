import argparse
import logging
import sys
from typing import List, Optional

from certilab.components.executor import run_scenario
from certilab.components.scenario import COMMANDS
from certilab.config import get_settings

logger = logging.getLogger("certilab")


class CertiLab:
    def __init__(self):
        self.settings = get_settings()
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="certilab",
            description="Certifiability of many-qubit states under local depolarizing noise",
        )
        sub = parser.add_subparsers(dest="action", required=True)
        run = sub.add_parser("run", help=f"run a scenario file ({', '.join(COMMANDS)})")
        run.add_argument("scenario", help="path to a JSON scenario")
        run.add_argument("--jobs", type=int, default=None, help=f"worker threads (default {self.settings.jobs})")
        run.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
        run.add_argument("--out", default=".", help="output directory")
        run.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
        return parser

    def _configure_logging(self, verbose: int):
        level = {0: self.settings.log_level, 1: "INFO"}.get(verbose, "DEBUG")
        logging.basicConfig(
            level=getattr(logging, level, logging.WARNING),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )

    def main(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        self._configure_logging(args.verbose)
        if args.jobs is not None and args.jobs < 1:
            logger.error("--jobs must be at least 1")
            return 2
        return run_scenario(args.scenario, jobs=args.jobs, seed=args.seed, out_dir=args.out)


def main(argv: Optional[List[str]] = None) -> int:
