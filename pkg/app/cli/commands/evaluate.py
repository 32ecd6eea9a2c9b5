"""
eval: value of an invariant file at a tensor file.
"""
from typing import Optional

import click
from sympy import isprime

from app.cli.common import emit, handle_errors, read_input, state, version_block
from app.core.contraction import STRATEGIES
from app.core.exceptions import InputValidationError
from app.core.invariants import evaluate_invariant
from app.core.rationals import format_rational
from app.models.schemas import TensorFile, parse_document, parse_invariant_document


@click.command("eval")
@click.argument("invariant_file", type=click.Path(dir_okay=False))
@click.argument("tensor_file", type=click.Path(dir_okay=False))
@click.option("--modulus", type=int, default=None, help="Evaluate modulo this prime")
@click.option("--strategy", type=click.Choice(list(STRATEGIES)), default="auto", show_default=True)
@click.pass_context
@handle_errors
def command(ctx: click.Context, invariant_file: str, tensor_file: str, modulus: Optional[int], strategy: str):
    """Evaluate an invariant (or a bare quintuple) at a tensor."""
    if modulus is not None and not isprime(modulus):
        raise InputValidationError(f"--modulus must be a prime, got {modulus}")
    spec = parse_invariant_document(read_input(invariant_file))
    tensor = parse_document(read_input(tensor_file), TensorFile).to_tensor()
    value = evaluate_invariant(spec, tensor, modulus, strategy, state(ctx).threads)
    provenance = state(ctx).run_config().provenance(
        "eval", invariant=spec.identifier, primes=[str(modulus)] if modulus else [], **version_block())
    emit(ctx, {"value": format_rational(value), "modulus": str(modulus) if modulus else None,
               "provenance": provenance}, lambda p: p["value"])
