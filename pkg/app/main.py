"""
Command-line entry point for the secant equations toolkit.
Logs go to stderr so stdout carries only the command output.
"""
import logging
import sys
from typing import Optional

import click

from app.cli.common import CliState
from app.cli.router import include_commands
from app.core.config import settings


def configure_logging():
    logging.basicConfig(
        level=logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )
    logging.getLogger("sqlalchemy.engine").setLevel(logging.WARNING)


@click.group()
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=settings.DEFAULT_SEED, show_default=True,
              help="Master seed; every task derives its generator from it")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker count (WORKER_THREADS overrides)")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--checkpoint", type=click.Path(file_okay=False), default=None,
              help="Directory for resumable matrix entries and result files")
@click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
@click.pass_context
def cli(ctx: click.Context, seed: int, threads: Optional[int], output_format: str, checkpoint: Optional[str]):
    """Equations of the fifth secant variety of (P^1)^5 by exact randomized interpolation."""
    ctx.obj = CliState(seed=seed, threads=threads, output_format=output_format, checkpoint=checkpoint)


include_commands(cli)


def main():
    configure_logging()
    cli(prog_name="secant-equations")


if __name__ == "__main__":
    main()
