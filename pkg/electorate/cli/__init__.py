"""Command-line entry point.

Every subcommand writes ``report.json``, ``report.txt`` and its CSV series into
``<out>/<subcommand>/<run-id>/`` and prints that directory on stdout.
"""
import argparse
import asyncio
import json
import logging
import os
import pathlib
import typing as t

import aiofiles

from electorate import __version__
from electorate.constants import DEFAULT_ALPHA, DEFAULT_MIN_BYTES, DEFAULT_PAGE_SIZE, Gender
from electorate.exceptions import ConfigError, ElectorateException, get_exit_code
from electorate.logger import get_logger
from electorate.models import AffinityParams, CaseStudyConfig, TrainConfig

from . import commands
from .reports import Report, Table, render_table, run_directory, write_report

__all__: t.Tuple[str, ...] = (
    "Report",
    "Table",
    "render_table",
    "build_parser",
    "run",
    "main",
)

Handler = t.Callable[[argparse.Namespace, pathlib.Path], t.Awaitable[Report]]


async def _read_text(path: pathlib.Path) -> str:
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            return await f.read()
    except FileNotFoundError as error:
        raise ConfigError("Missing input", str(path)) from error


async def _load_case_study(args: argparse.Namespace) -> CaseStudyConfig:
    try:
        payload = json.loads(await _read_text(args.config))
    except json.JSONDecodeError as error:
        raise ConfigError(f"Invalid case study config: {error}", str(args.config)) from error
    if args.model is not None:
        payload["model"] = str(args.model.resolve())
    if args.faces is not None:
        payload["faces"] = str(args.faces.resolve())
    return CaseStudyConfig.from_payload(payload, base=args.config.parent)


def _require(value: t.Optional[pathlib.Path], flag: str) -> pathlib.Path:
    if value is None:
        raise ConfigError(f"{flag} is required for this subcommand")
    return value


async def _ingest(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_ingest(
        args.source,
        directory,
        captured_at=args.captured_at,
        fixture_dir=args.fixture_dir,
        page_size=args.page_size,
        rate_limit=args.rate_limit,
    )


async def _snapshot_diff(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_snapshot_diff(args.older, args.newer)


async def _snapshot_series(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_snapshot_series(args.snapshots)


async def _snapshot_export(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_snapshot_export(args.snapshot, directory)


async def _preprocess(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_preprocess(args.manifest, directory, min_bytes=args.min_bytes, jobs=args.jobs)


async def _label(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_label(args.manifest, lexicon_dir=args.lexicon_dir, strict=args.strict)


async def _train(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    try:
        config = TrainConfig(
            learning_rate=args.learning_rate, batch_size=args.batch_size, epochs=args.epochs, seed=args.seed
        )
    except ValueError as error:
        raise ConfigError(f"Invalid training config: {error}") from error
    return await commands.cmd_train(args.faces, args.labels, directory, config=config)


async def _evaluate(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_evaluate(_require(args.model, "--model"), args.faces, args.labels, jobs=args.jobs)


async def _classify(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_classify(_require(args.model, "--model"), args.faces, jobs=args.jobs)


async def _event_study(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    config = await _load_case_study(args)
    return await commands.cmd_event_study(config, alpha=args.alpha, jobs=args.jobs)


async def _crossfollow(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    return await commands.cmd_crossfollow(
        args.focal,
        args.a,
        args.b,
        model=args.model,
        faces=args.faces,
        earlier=args.earlier,
        alpha=args.alpha,
        jobs=args.jobs,
    )


async def _simulate(args: argparse.Namespace, directory: pathlib.Path) -> Report:
    params = AffinityParams.from_text(await _read_text(args.params))
    return await commands.cmd_simulate(
        params,
        trials=args.trials,
        seed=args.seed,
        alpha=args.alpha,
        tested_class=Gender.parse(args.tested_class),
        jobs=args.jobs,
    )


HANDLERS: t.Dict[str, Handler] = {
    "ingest": _ingest,
    "snapshot-diff": _snapshot_diff,
    "snapshot-series": _snapshot_series,
    "snapshot-export": _snapshot_export,
    "preprocess": _preprocess,
    "label": _label,
    "train": _train,
    "evaluate": _evaluate,
    "classify": _classify,
    "event-study": _event_study,
    "crossfollow": _crossfollow,
    "simulate": _simulate,
}


def _common() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("out"), help="output root")
    parser.add_argument("--run-id", default=None, help="run directory name, a UTC timestamp by default")
    parser.add_argument("--model", type=pathlib.Path, default=None, help="trained classifier file")
    parser.add_argument("--lexicon-dir", type=pathlib.Path, default=None, help="folder with the name lists")
    parser.add_argument("--min-bytes", type=int, default=DEFAULT_MIN_BYTES, help="smallest usable image file")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="significance level")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="log debug messages")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="log warnings and errors only")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """The ``electorate`` argument parser."""
    common = _common()
    parser = argparse.ArgumentParser(prog="electorate", description="Gender composition of candidate followers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    ingest = sub.add_parser("ingest", parents=[common], help="fetch follower IDs into snapshots")
    ingest.add_argument("--source", action="append", required=True, help="source id, repeatable")
    ingest.add_argument("--captured-at", required=True, help="ISO-8601 capture time")
    ingest.add_argument("--fixture-dir", type=pathlib.Path, default=None)
    ingest.add_argument("--page-size", type=int, default=DEFAULT_PAGE_SIZE)
    ingest.add_argument("--rate-limit", type=int, default=0, help="requests per minute, 0 for unlimited")

    snapshot = sub.add_parser("snapshot", help="snapshot tools")
    snapshot_sub = snapshot.add_subparsers(dest="snapshot_command", required=True, metavar="ACTION")
    snapshot_diff = snapshot_sub.add_parser("diff", parents=[common], help="new followers and unfollowers")
    snapshot_diff.add_argument("older", type=pathlib.Path)
    snapshot_diff.add_argument("newer", type=pathlib.Path)
    series = snapshot_sub.add_parser("series", parents=[common], help="follower growth series")
    series.add_argument("snapshots", type=pathlib.Path, nargs="+")
    export = snapshot_sub.add_parser("export", parents=[common], help="CSV mirror of a snapshot")
    export.add_argument("snapshot", type=pathlib.Path)

    preprocess = sub.add_parser("preprocess", parents=[common], help="crop and resize faces")
    preprocess.add_argument("manifest", type=pathlib.Path)

    label = sub.add_parser("label", parents=[common], help="weak labels from display names")
    label.add_argument("manifest", type=pathlib.Path)
    label.add_argument("--strict", action="store_true", help="fail on names in both lists")

    train = sub.add_parser("train", parents=[common], help="train the classifier")
    train.add_argument("--faces", type=pathlib.Path, required=True)
    train.add_argument("--labels", type=pathlib.Path, required=True)
    train.add_argument("--epochs", type=int, default=10)
    train.add_argument("--learning-rate", type=float, default=0.05)
    train.add_argument("--batch-size", type=int, default=64)

    evaluate = sub.add_parser("evaluate", parents=[common], help="metrics on labeled faces")
    evaluate.add_argument("--faces", type=pathlib.Path, required=True)
    evaluate.add_argument("--labels", type=pathlib.Path, required=True)

    classify = sub.add_parser("classify", parents=[common], help="predict genders")
    classify.add_argument("--faces", type=pathlib.Path, required=True)

    study = sub.add_parser("event-study", parents=[common], help="before/after gender composition tests")
    study.add_argument("config", type=pathlib.Path)
    study.add_argument("--faces", type=pathlib.Path, default=None, help="override the config's tensor bundle")

    cross = sub.add_parser("crossfollow", parents=[common], help="four-group cross-following partition")
    cross.add_argument("focal", type=pathlib.Path)
    cross.add_argument("a", type=pathlib.Path)
    cross.add_argument("b", type=pathlib.Path)
    cross.add_argument("--faces", type=pathlib.Path, default=None)
    cross.add_argument("--earlier", type=pathlib.Path, nargs=3, default=None, metavar=("FOCAL", "A", "B"))

    simulate = sub.add_parser("simulate", parents=[common], help="calibrate the z-test by simulation")
    simulate.add_argument("params", type=pathlib.Path)
    simulate.add_argument("--trials", type=int, default=1000)
    simulate.add_argument("--tested-class", default=Gender.FEMALE.value, choices=["male", "female"])
    return parser


def _command_name(args: argparse.Namespace) -> str:
    if args.command == "snapshot":
        return f"snapshot-{args.snapshot_command}"
    return str(args.command)


async def run(args: argparse.Namespace) -> pathlib.Path:
    """Runs a parsed command and writes its report.

    Returns
    -------
    pathlib.Path
        The run directory.
    """
    command = _command_name(args)
    directory = run_directory(args.out, command, args.run_id or commands.default_run_id())
    report = await HANDLERS[command](args, directory)
    await write_report(report, directory)
    get_logger().info(f"Wrote {command} report to {directory}")
    return directory


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    """Parses ``argv``, runs the command and maps errors to exit codes."""
    args = build_parser().parse_args(argv)
    logger = get_logger()
    logger.setLevel(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    try:
        directory = asyncio.run(run(args))
    except ElectorateException as error:
        logger.error(str(error))
        return get_exit_code(error)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as error:
        logger.error(f"{error.strerror}: {error.filename}")
        return get_exit_code(error)
    except Exception as error:
        logger.exception(f"Unexpected error: {error!r}")
        return get_exit_code(error)
    print(directory)
    return 0
