"""
sample: random secant or generic tensors with their flattening ranks.
"""
from typing import Optional

import click

from app.cli.common import emit, handle_errors, state, version_block
from app.core.artifact_storage import write_artifact
from app.core.exceptions import InputValidationError
from app.core.seeds import derive_rng
from app.core.tensor import flattening_ranks, sample_generic, sample_secant
from app.models.schemas import TensorFile


def _render(payload) -> str:
    lines = [f"{key} {value}" for key, value in sorted(payload["tensor"]["entries"].items())]
    ranks = ", ".join(f"{k}:{v}" for k, v in payload["flattening_ranks"].items())
    lines.append(f"flattening ranks: {ranks}")
    return "\n".join(lines)


@click.command("sample")
@click.option("--factors", type=int, default=5, show_default=True)
@click.option("--rank", "rank", type=int, default=None, help="Sum of this many rank-1 tensors")
@click.option("--generic", is_flag=True, help="Uniform random entries instead")
@click.option("--height", type=int, default=None, help="Entry bound of the sampled vectors or entries")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Also write the tensor file here")
@click.pass_context
@handle_errors
def command(ctx: click.Context, factors: int, rank: Optional[int], generic: bool, height: Optional[int], out: Optional[str]):
    """Sample a tensor."""
    if generic == (rank is not None):
        raise InputValidationError("pass exactly one of --rank or --generic")
    if not 1 <= factors <= 12:
        raise InputValidationError(f"--factors must lie in [1, 12], got {factors}")
    if (rank is not None and rank < 1) or (height is not None and height < 1):
        raise InputValidationError("--rank and --height must be positive")
    run = state(ctx)
    label = "generic" if generic else f"rank{rank}"
    rng = derive_rng(run.seed, "sample", factors, label)
    A = sample_generic(factors, height, rng) if generic else sample_secant(rank, factors, height, rng)
    provenance = run.run_config(rank=rank, height=height).provenance(
        "sample", factors=factors, generic=generic, **version_block())
    tensor_file = TensorFile.from_tensor(A, provenance)
    if out:
        write_artifact(out, tensor_file.model_dump(exclude_none=True))
    emit(ctx, {"tensor": tensor_file.model_dump(exclude_none=True), "flattening_ranks": flattening_ranks(A),
               "provenance": provenance}, _render)
