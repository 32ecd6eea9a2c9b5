"""
Exact scalar helpers. Rationals are ``fractions.Fraction`` values, always reduced
with a positive denominator.
"""
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from app.core.exceptions import InputValidationError

Scalar = Union[int, Fraction]


def parse_rational(text: Union[str, int]) -> Fraction:
    """
    Parse a decimal rational string such as ``"3/2"``, ``"-7"`` or ``"0"``.

    Args:
        text: String in ``p/q`` or ``p`` form (integers are accepted as-is)

    Returns:
        Reduced Fraction
    """
    if isinstance(text, bool):
        raise InputValidationError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InputValidationError(f"not a rational: {text!r}")
    raw = text.strip()
    parts = raw.split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            den = int(parts[1])
            if den == 0:
                raise InputValidationError(f"zero denominator in {text!r}")
            return Fraction(int(parts[0]), den)
    except ValueError:
        pass
    raise InputValidationError(f"not a rational: {text!r}")


def format_rational(value: Scalar) -> str:
    """Render a rational as ``p/q`` (or ``p`` when integral)."""
    return str(Fraction(value))


def to_int_if_integral(value: Scalar) -> Scalar:
    """Return a plain int for integral values so hot loops avoid Fraction arithmetic."""
    frac = Fraction(value)
    return frac.numerator if frac.denominator == 1 else frac


def clear_denominators(row: Sequence[Scalar]) -> List[int]:
    """Scale a rational row by the lcm of its denominators (rank-preserving)."""
    fracs = [Fraction(x) for x in row]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return [int(f * lcm) for f in fracs]


def reduce_mod(value: Scalar, modulus: int) -> int:
    """Image of a rational in Z/pZ; the denominator must be invertible."""
    frac = Fraction(value)
    if frac.denominator % modulus == 0:
        raise InputValidationError(f"denominator of {frac} vanishes modulo {modulus}")
    return frac.numerator * pow(frac.denominator, -1, modulus) % modulus


def rational_reconstruction(residue: int, modulus: int) -> Optional[Fraction]:
    """
    Recover a/b with |a|, |b| <= sqrt(modulus/2) from a residue, or None.

    Extended Euclid stopped at the half-size remainder.
    """
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, residue % modulus
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)

