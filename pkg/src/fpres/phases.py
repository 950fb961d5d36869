"""Exact roots of unity as rational exponents.

A phase exp(2*pi*i*q) is represented by the Fraction q reduced mod 1.
All group-theoretic phase bookkeeping stays exact; conversion to complex
happens only at the numerical boundary.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .errors import PhaseSnapError

ZERO = Fraction(0)
HALF = Fraction(1, 2)


def norm1(q: Fraction) -> Fraction:
    """Reduce an exponent mod 1 into [0, 1)."""
    return q - Fraction(math.floor(q))


def unit(q: Fraction | float) -> complex:
    return cmath.exp(2j * math.pi * float(q))


def conj_exp(q: Fraction) -> Fraction:
    return norm1(-q)


def principal_root_exp(q: Fraction, n: int) -> Fraction:
    """Exponent of the principal n-th root: argument in [0, 2*pi) divided by n."""
    if n <= 0:
        raise ValueError("root order must be positive")
    return norm1(q) / n


def snap_phase(z: complex, order: int, tol: float = 1e-8) -> Fraction:
    """Identify a unimodular complex number with the nearest root of unity
    of order dividing `order`, as an exact exponent.
    """
    if order <= 0:
        raise ValueError("order must be positive")
    r = abs(z)
    if abs(r - 1.0) > tol:
        raise PhaseSnapError(f"|z| = {r!r} is not within {tol} of 1")
    ang = cmath.phase(z) / (2.0 * math.pi)
    k = round(ang * order) % order
    q = Fraction(k, order)
    if abs(z - unit(q)) > tol:
        raise PhaseSnapError(
            f"z = {z!r} is not within {tol} of any root of unity of order {order}"
        )
    return q


def exp_str(q: Fraction) -> str:
    q = norm1(q)
    return f"{q.numerator}/{q.denominator}"


def parse_exp(s: str) -> Fraction:
    return norm1(Fraction(s))
