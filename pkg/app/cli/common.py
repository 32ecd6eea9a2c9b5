"""
Shared command plumbing: run state, output, and exit codes.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error.
"""
import functools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from app.core.artifact_storage import dumps
from app.core.config import settings
from app.core.exceptions import (
    BasisSearchError,
    EvaluationBudgetExceeded,
    InputValidationError,
    ModularRankMismatch,
    SchemaError,
    VerificationFailed,
)
from app.models.schemas import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class CliState:
    seed: int
    threads: Optional[int]
    output_format: str
    checkpoint: Optional[str]

    @property
    def as_json(self) -> bool:
        return self.output_format == "json"

    def run_config(self, **values: Any) -> RunConfig:
        return RunConfig(seed=self.seed, threads=self.threads, checkpoint=self.checkpoint, **values)


def state(ctx: click.Context) -> CliState:
    return ctx.find_root().obj


def emit(ctx: click.Context, payload: Dict[str, Any], render: Callable[[Dict[str, Any]], str]):
    """JSON on stdout in json mode, the human rendering otherwise."""
    if state(ctx).as_json:
        click.echo(dumps(payload).decode("utf-8"), nl=False)
    else:
        click.echo(render(payload))


def read_input(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputValidationError(f"cannot read {path}: {e.strerror or e}")


def handle_errors(func: Callable) -> Callable:
    """Map toolkit exceptions to exit codes, messages go to stderr."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except SchemaError as e:
            click.echo(f"schema error: {e}", err=True)
            ctx.exit(EXIT_INPUT_ERROR)
        except InputValidationError as e:
            click.echo(f"input error: {e}", err=True)
            ctx.exit(EXIT_INPUT_ERROR)
        except VerificationFailed as e:
            logger.error(f"[CLI] check {e.check} failed")
            emit(ctx, {"pass": False, "failed_check": e.check, "report": e.report},
                 lambda p: f"FAIL: {p['failed_check']}")
            ctx.exit(EXIT_CHECK_FAILED)
        except (BasisSearchError, EvaluationBudgetExceeded, ModularRankMismatch) as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_CHECK_FAILED)
    return wrapper


def version_block() -> Dict[str, str]:
    return {"version": settings.VERSION}
