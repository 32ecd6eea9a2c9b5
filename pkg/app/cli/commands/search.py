"""
search: invariant basis, secant kernel and quotient by f6-multiples in one degree.
"""
import sys
from pathlib import Path
from typing import Optional

import click
from sympy import isprime

from app.cli.common import EXIT_CHECK_FAILED, emit, handle_errors, state, version_block
from app.core.artifact_storage import write_artifact
from app.core.equation_search import run_search
from app.core.exceptions import InputValidationError


def _render(payload) -> str:
    kernel = payload["kernel"]
    lines = [
        f"degree {payload['degree']} ({payload['symmetry']}), secant rank {payload['secant_rank']}",
        f"basis size: {len(payload['basis_ids'])}",
        f"evaluation rank at {payload['points']} points: {kernel['rank']}",
        f"kernel dimension: {kernel['dimension']}",
    ]
    if payload.get("primes"):
        lines.append(f"primes: {', '.join(payload['primes'])}")
    if "quotient" in payload:
        q = payload["quotient"]
        lines.append(f"new generators: {q['new_generators']} ({q['status']})")
    if "known_outcome" in payload:
        known = payload["known_outcome"]
        verdict = "matches" if known["matches"] else "DIFFERS from"
        lines.append(f"{verdict} the known rank-5 outcome: kernel {known['kernel_dimension']}, "
                     f"{known['new_generators']} new")
    return "\n".join(lines)


@click.command("search")
@click.option("--degree", type=int, required=True)
@click.option("--symmetry", type=click.Choice(["full", "sym", "sgn"]), required=True)
@click.option("--rank", "rank", type=int, required=True, help="Secant rank r of the sample points")
@click.option("--points", type=int, default=None, help="Secant points; basis size + margin by default")
@click.option("--modulus", default="auto", show_default=True, help="auto, exact, or comma-separated primes")
@click.option("--extended", is_flag=True, help="Allow the long high-degree runs")
@click.option("--quotient/--no-quotient", default=True, show_default=True)
@click.pass_context
@handle_errors
def command(ctx: click.Context, degree: int, symmetry: str, rank: int, points: Optional[int],
            modulus: str, extended: bool, quotient: bool):
    """Randomized search for equations of the secant variety in one degree."""
    run = state(ctx)
    try:
        config = run.run_config(degree=degree, symmetry=symmetry, rank=rank, points=points, modulus=modulus)
    except ValueError as e:
        raise InputValidationError(str(e))
    policy = config.modulus_policy()
    if isinstance(policy, list) and not all(isprime(p) for p in policy):
        raise InputValidationError(f"--modulus lists a non-prime: {modulus}")
    report = run_search(degree, symmetry, rank, run.seed, points, policy, extended, quotient,
                        run.threads, run.checkpoint, progress=not run.as_json and sys.stderr.isatty())
    report["provenance"] = config.provenance("search", primes=report["primes"], **version_block())
    if run.checkpoint:
        target = Path(run.checkpoint) / f"search-d{degree}-{symmetry}-r{rank}-s{run.seed}.json"
        if not write_artifact(str(target), report):
            click.echo(f"warning: could not write {target}", err=True)
    emit(ctx, report, _render)
    if report.get("quotient", {}).get("status") == "indeterminate":
        ctx.exit(EXIT_CHECK_FAILED)
