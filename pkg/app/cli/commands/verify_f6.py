"""
verify-f6: the degree-6 equation's check suite.
"""
import click

from app.cli.common import EXIT_CHECK_FAILED, emit, handle_errors, state, version_block
from app.core.exceptions import InputValidationError
from app.core.f6_kit import verify_f6


def _render(payload) -> str:
    lines = [f"f6: {payload['monomials']} monomials"]
    for name, check in payload["checks"].items():
        lines.append(f"{name}: {'pass' if check['pass'] else 'FAIL'}")
    bezout = payload["bezout"]
    lines.append(f"bezout degree: {bezout['bezout_degree']}")
    lines.append("PASS" if payload["pass"] else "FAIL")
    return "\n".join(lines)


@click.command("verify-f6")
@click.option("--points", type=int, default=100, show_default=True, help="Rank-5 points for the vanishing check")
@click.pass_context
@handle_errors
def command(ctx: click.Context, points: int):
    """Verify symmetry, invariance, vanishing and nonvanishing of f6."""
    if points < 1:
        raise InputValidationError(f"--points must be positive, got {points}")
    run = state(ctx)
    report = verify_f6(points=points, seed=run.seed, threads=run.threads, raise_on_failure=False)
    report["provenance"] = run.run_config(points=points).provenance("verify-f6", **version_block())
    emit(ctx, report, _render)
    if not report["pass"]:
        ctx.exit(EXIT_CHECK_FAILED)
