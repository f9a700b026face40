"""Command-line entry point."""

import argparse
import logging
import sys
import time

from app import __version__
from app.commands import COMMANDS
from app.commands.common import CommandOutcome
from app.config import get_settings
from app.errors import ConfigError, LabError, NonFiniteError, TrainingAborted
from app.schemas.run import RunManifest, RunStatus
from app.utils.storage import file_sha256, write_json

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dropattack", description="DropAttack adversarial-training laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=get_settings().log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def write_manifest(outcome: CommandOutcome, argv: list[str], status: RunStatus, started: float, error: str | None = None) -> None:
    manifest = RunManifest(
        command=outcome.kind,
        status=status,
        argv=argv,
        config_path=str(outcome.config_path) if outcome.config_path else None,
        config_sha256=file_sha256(outcome.config_path) if outcome.config_path else None,
        seeds=outcome.seeds,
        tool_version=__version__,
        wall_seconds=time.perf_counter() - started,
        outputs=[str(path) for path in outcome.outputs],
        metrics=outcome.metrics,
        error_message=error,
    )
    write_json(outcome.out_dir / outcome.manifest_name, manifest)


def main(argv: list[str] | None = None) -> int:
    """Run one sub-command; exit code 0 on success, 2 on config/usage errors, 3 on numerical failure."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    configure_logging()
    started = time.perf_counter()

    try:
        outcome: CommandOutcome = args.handler(args)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_USAGE
    except TrainingAborted as exc:
        logger.error("training aborted at epoch %d, batch %d: %s", exc.epoch, exc.batch, exc)
        for name, norm in exc.layer_norms.items():
            logger.error("  %s norm=%.6g", name, norm)
        return EXIT_NUMERICAL
    except NonFiniteError as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (LabError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE

    if outcome.aborted is not None:
        exc = outcome.aborted
        logger.error("training aborted at epoch %d, batch %d: %s", exc.epoch, exc.batch, exc)
        write_manifest(outcome, argv, RunStatus.ABORTED, started, error=str(exc))
        return EXIT_NUMERICAL

    status = RunStatus.FAILED if outcome.failed else RunStatus.COMPLETED
    write_manifest(outcome, argv, status, started)
    logger.info("%s %s; outputs in %s", outcome.kind.value, status.value, outcome.out_dir)
    return EXIT_NUMERICAL if outcome.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
