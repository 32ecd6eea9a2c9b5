"""
dims: dimensions of the invariant spaces and their symmetric/skew parts.
"""
import click

from app.cli.common import emit, handle_errors, state, version_block
from app.core.characters import character_table


def _render(payload) -> str:
    lines = [f"{'d':>3} {'U':>8} {'sym':>6} {'sgn':>6}"]
    for row in payload["rows"]:
        lines.append(f"{row['d']:>3} {row['U']:>8} {row['sym']:>6} {row['sgn']:>6}")
    return "\n".join(lines)


@click.command("dims")
@click.option("--max-degree", type=int, default=16, show_default=True, help="Largest degree listed")
@click.pass_context
@handle_errors
def command(ctx: click.Context, max_degree: int):
    """Character-theoretic dimension table."""
    rows = character_table(max_degree)
    provenance = state(ctx).run_config().provenance("dims", max_degree=max_degree, **version_block())
    emit(ctx, {"rows": [row.to_dict() for row in rows], "provenance": provenance}, _render)
