"""Exact rational scalars and small combinatorial helpers.

Every computation in the package is over QQ.  gmpy2's mpq is used when
available (it is an order of magnitude faster than fractions.Fraction on
the elimination-heavy span computations); both types are exact rationals
in canonical reduced form with positive denominator, and they compare
equal to each other, so the choice is invisible at the API surface.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    QQ = Fraction

ZERO = QQ(0)
ONE = QQ(1)


def rat(value, den=None):
    """Build an exact rational from ints, strings like "1/2", or rationals."""
    if den is not None:
        return QQ(value, den)
    if isinstance(value, str):
        return QQ(Fraction(value))
    return QQ(value)


def binom(r, j):
    """Binomial coefficient C(r, j) for integer r (any sign) and j >= 0.

    C(r, j) = r (r-1) ... (r-j+1) / j!, exact.
    """
    if j < 0:
        return ZERO
    num = 1
    for t in range(j):
        num *= r - t
    return QQ(num, factorial(j))


def inv_factorial(r):
    return QQ(1, factorial(r))


def as_fraction(q):
    """Convert an exact rational back to fractions.Fraction (for display/JSON)."""
    return Fraction(q.numerator, q.denominator)
