"""
decenc command line

Usage:
    decenc run sweep.cfg --format csv --trials 5
    decenc run sweep.cfg --out results.jsonl --format json-lines --trace messages.jsonl

Exit codes: 0 all rows verified, 1 a verification failed, 2 config error.
"""

import io
import logging
from contextlib import ExitStack
from pathlib import Path
from typing import Optional

import click

from src import __version__
from src.cli.suite import ConfigParseError, OutputFormat, parse_configs, run_suite
from src.config import get_config
from src.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIG_ERROR = 2


@click.group()
@click.version_option(__version__, prog_name="decenc")
def cli():
    """Decentralized encoding simulator."""


@cli.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the table here instead of stdout")
@click.option(
    "--format", "fmt",
    type=click.Choice([f.value for f in OutputFormat]),
    default=None,
    help="Table format (default from DECENC_DEFAULT_FORMAT)",
)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Base seed for stanzas without one")
@click.option("--trials", type=click.IntRange(min=0), default=None, help="Random trials per scenario")
@click.option("--trace", type=click.Path(dir_okay=False, path_type=Path), help="Dump every message as JSON lines")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
)
@click.pass_context
def run(
    ctx: click.Context,
    config_file: Path,
    out: Optional[Path],
    fmt: Optional[str],
    seed: Optional[int],
    trials: Optional[int],
    trace: Optional[Path],
    log_level: Optional[str],
):
    """Verify every scenario of CONFIG_FILE and emit the cost table."""
    settings = get_config()
    setup_logging(
        level=log_level or settings.logging.log_level,
        log_file=str(settings.logging.log_file) if settings.logging.log_file else None,
        json_logs=settings.logging.json_logs,
    )

    buffer = io.StringIO()
    try:
        configs = parse_configs(config_file.read_text(encoding="utf-8"))
        with ExitStack() as stack:
            trace_sink = stack.enter_context(trace.open("w", encoding="utf-8")) if trace else None
            status = run_suite(
                configs,
                buffer,
                fmt=fmt or settings.simulator.default_format,
                seed=seed,
                trials=trials,
                trace=trace_sink,
            )
    except ConfigParseError as exc:
        logger.error("Config error", extra={"event": "config_error", "line": exc.line, "key": exc.key})
        click.echo(f"config error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)

    if out is None:
        click.echo(buffer.getvalue(), nl=False)
    else:
        out.write_text(buffer.getvalue(), encoding="utf-8")

    if status != EXIT_OK:
        click.echo("verification failed", err=True)
    ctx.exit(status)


if __name__ == "__main__":
    cli()
