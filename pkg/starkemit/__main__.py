"""
Copyright (c) 2024-present Starkemit Developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as published
by the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""


import argparse
import logging
import sys
from contextlib import contextmanager
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Generator, Optional, Tuple

import yaml

from . import __version__
from .errors import InvariantViolation, StarkemitError
from .expcli import crossval, load_config, run, selfcheck
from .expcli.presets import PRESETS
from .utils import bool_to_mark, human_join, tchart

_LOG: logging.Logger = logging.getLogger("starkemit")


# fmt: off
EXIT_OK:        int = 0
EXIT_INVALID:   int = 1
EXIT_INVARIANT: int = 2
EXIT_IO:        int = 3
# fmt: on


@contextmanager
def _setup_logging(*, log_filename: Optional[str] = None) -> Generator[None, None, None]:
    root_logger = logging.getLogger()

    try:
        stream_handler = logging.StreamHandler()

        formatter = logging.Formatter(
            fmt="[{asctime}] [{levelname:<8}] {name}: {message}",
            datefmt="%Y-%m-%d %H:%M:%S",
            style="{",
        )

        stream_handler.setFormatter(formatter)
        root_logger.addHandler(stream_handler)

        root_logger.setLevel(logging.INFO)

        if log_filename is not None:
            Path(log_filename).parent.mkdir(parents=True, exist_ok=True)

            file_handler = RotatingFileHandler(
                filename=log_filename,
                mode="w",
                maxBytes=33_554_432,  # 32 MiB
                backupCount=5,
                encoding="utf-8",
            )

            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)

        yield
    finally:
        for handler in root_logger.handlers[:]:
            handler.close()
            root_logger.removeHandler(handler)


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    run(config, out=args.out, jobs=args.jobs)
    return EXIT_OK


def _crossval(args: argparse.Namespace) -> int:
    config = load_config(args.config)

    for report in crossval(config, out=args.out):
        print(report.render(), end="\n\n")

    return EXIT_OK


def _presets(args: argparse.Namespace) -> int:
    rows = {}

    for path in sorted(PRESETS.glob("*.yaml")):
        with path.open(encoding="utf-8") as f:
            rows[path.stem] = yaml.safe_load(f)["experiment"]

    print(tchart(rows))
    return EXIT_OK


def _seedcheck() -> int:
    passed, chart = selfcheck()
    print(chart)
    print(f"Self-check: {bool_to_mark(passed)}")
    return EXIT_OK if passed else EXIT_INVARIANT


def _parse_args() -> Tuple[argparse.ArgumentParser, argparse.Namespace]:
    parser = argparse.ArgumentParser(
        prog="starkemit",
        description="Qubit emission into a coupled-cavity array under a synthetic force.",
    )

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--out", type=Path, help="the output directory (overrides out_dir of the config)"
    )
    parser.add_argument(
        "--seedcheck",
        action="store_true",
        help="run the invariant self-checks before anything else",
    )
    parser.add_argument(
        "--jobs", type=int, default=1, help="the number of parameter points run at once"
    )
    parser.add_argument(
        "--log-filename", "-lfn", help="the file to write logging messages to"
    )
    parser.set_defaults(func=None)

    subparsers = parser.add_subparsers(title="commands")

    run_parser = subparsers.add_parser("run", help="run an experiment")
    run_parser.add_argument("config", help="a config file or a preset name")
    run_parser.set_defaults(func=_run)

    crossval_parser = subparsers.add_parser(
        "crossval", help="compare the full simulation with the delay equation"
    )
    crossval_parser.add_argument("config", help="a config file or a preset name")
    crossval_parser.set_defaults(func=_crossval)

    presets_parser = subparsers.add_parser("presets", help="list the bundled presets")
    presets_parser.set_defaults(func=_presets)

    return parser, parser.parse_args()


def _dispatch(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.jobs < 1:
        parser.error(f"invalid --jobs {args.jobs} (must be >= 1)")

    if args.func is None and not args.seedcheck:
        commands = human_join(["run", "crossval", "presets"], joiner="or")
        parser.error(f"a command is required ({commands})")

    try:
        if args.seedcheck:
            status = _seedcheck()

            if status != EXIT_OK or args.func is None:
                return status

        return args.func(args)
    except InvariantViolation as exc:
        _LOG.error("Invariant violated: %s", exc)
        return EXIT_INVARIANT
    except StarkemitError as exc:
        _LOG.error("Invalid input: %s", exc)
        return EXIT_INVALID
    except OSError as exc:
        _LOG.error("I/O failure: %s", exc)
        return EXIT_IO


def main() -> None:
    parser, args = _parse_args()

    try:
        with _setup_logging(log_filename=args.log_filename):
            status = _dispatch(parser, args)
    except OSError:
        parser.error(f'Failed to write to log file "{args.log_filename}".')

    sys.exit(status)


if __name__ == "__main__":
    main()
