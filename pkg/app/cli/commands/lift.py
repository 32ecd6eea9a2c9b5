"""
lift: f6 pulled back to more factors through grouped projections, or inherited by
factors of larger dimension (``--dims``).
"""
from typing import List, Optional

import click

from app.cli.common import EXIT_CHECK_FAILED, emit, handle_errors, state, version_block
from app.core.exceptions import InputValidationError
from app.core.f6_kit import FACTORS, inherit_generic_witness, inherit_trials, lift_generic_witness, lift_trials


def _render(payload) -> str:
    zeros = sum(1 for t in payload["trials"] if t["value"] == "0")
    lines = [f"{zeros}/{len(payload['trials'])} zero values at rank-{payload['rank']} points"]
    witness = payload["generic_witness"]
    lines.append(f"generic witness: {witness['value'] if witness else 'none found'}")
    lines.append("PASS" if payload["pass"] else "FAIL")
    return "\n".join(lines)


def _parse_dims(raw: str) -> List[int]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != FACTORS or not all(p.isdigit() and int(p) >= 2 for p in parts):
        raise InputValidationError(f"--dims needs {FACTORS} comma-separated dimensions >= 2, got {raw!r}")
    return [int(p) for p in parts]


@click.command("lift")
@click.option("--factors", type=int, default=6, show_default=True)
@click.option("--dims", default=None, help="Five factor dimensions, e.g. 3,2,2,2,2 (inheritance instead of lifting)")
@click.option("--rank", "rank", type=int, default=5, show_default=True)
@click.option("--trials", type=int, default=25, show_default=True)
@click.pass_context
@handle_errors
def command(ctx: click.Context, factors: int, dims: Optional[str], rank: int, trials: int):
    """Evaluate lifted or inherited f6 at random points of the r-th secant variety."""
    if factors < FACTORS:
        raise InputValidationError(f"--factors must be at least {FACTORS}, got {factors}")
    if trials < 1 or rank < 1:
        raise InputValidationError("--trials and --rank must be positive")
    run = state(ctx)
    if dims is not None:
        shape = _parse_dims(dims)
        results = inherit_trials(shape, rank, trials, run.seed, threads=run.threads)
        witness = inherit_generic_witness(shape, run.seed)
        extra = {"dims": shape}
    else:
        results = lift_trials(factors, rank, trials, run.seed, threads=run.threads)
        witness = lift_generic_witness(factors, run.seed)
        extra = {"factors": factors}
    vanishing = all(t["value"] == "0" for t in results)
    # above rank 5 nonzero values are expected, only the witness is checked
    passed = witness is not None and (vanishing or rank > FACTORS)
    payload = {
        **extra,
        "rank": rank,
        "trials": results,
        "generic_witness": witness,
        "pass": passed,
        "provenance": run.run_config(rank=rank).provenance("lift", trials=trials, **extra, **version_block()),
    }
    emit(ctx, payload, _render)
    if not passed:
        ctx.exit(EXIT_CHECK_FAILED)
