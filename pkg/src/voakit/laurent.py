"""Truncated formal Laurent series with the binomial-expansion convention.

A series is finite below (lowest exponent) and retained up to a declared
highest exponent.  The ``truncated`` flag records whether coefficients
beyond ``highest`` are genuinely all zero (an exact polynomial) or merely
unknown; every arithmetic operation propagates the flag, so an equality
involving a truncated series can only ever be certified "to order N".

Coefficients may be scalars or graded vectors; the series carries a
``zero`` element of its coefficient domain so the code stays agnostic.
All expansions of (a+x)^r proceed in nonnegative powers of the
second-listed variable x.
"""

from __future__ import annotations

from .errors import TruncationError, ParameterError
from .scalars import QQ, ZERO, binom


def _is_zero(c):
    isz = getattr(c, "is_zero", None)
    if isz is not None:
        return isz()
    return c == 0


class TruncatedLaurent:
    """Laurent series sum_{lowest <= e <= highest} coeffs[e] x^e."""

    __slots__ = ("coeffs", "lowest", "highest", "truncated", "zero", "vector_valued")

    def __init__(self, coeffs, lowest, highest, truncated, zero=ZERO, vector_valued=False):
        if lowest > highest + 1:
            lowest = highest + 1
        self.coeffs = {e: c for e, c in coeffs.items() if lowest <= e <= highest and not _is_zero(c)}
        self.lowest = lowest
        self.highest = highest
        self.truncated = truncated
        self.zero = zero
        self.vector_valued = vector_valued

    @classmethod
    def from_pairs(cls, pairs, truncated=False, zero=ZERO, vector_valued=False, highest=None):
        d = {e: c for e, c in pairs if not _is_zero(c)}
        lo = min(d) if d else 0
        hi = max(d) if d else -1
        if highest is not None:
            hi = highest
            if lo > hi:
                lo = hi + 1
        return cls(d, lo, hi, truncated, zero, vector_valued)

    def coefficient(self, e):
        if e > self.highest and self.truncated:
            raise TruncationError(
                f"coefficient of x^{e} requested but series only retained to order {self.highest}")
        return self.coeffs.get(e, self.zero)

    def is_exact(self):
        return not self.truncated

    def support(self):
        return sorted(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        return (self.coeffs == other.coeffs and self.truncated == other.truncated
                and (not self.truncated or self.highest == other.highest))

    def __repr__(self):
        tail = ", truncated@%d" % self.highest if self.truncated else ""
        return f"TruncatedLaurent({self.coeffs!r}{tail})"

    def __add__(self, other):
        if self.vector_valued != other.vector_valued:
            raise ParameterError("cannot add scalar and vector series")
        truncated = self.truncated or other.truncated
        hi = min(x.highest for x in (self, other) if x.truncated) if truncated \
            else max(self.highest, other.highest)
        d = dict(self.coeffs)
        for e, c in other.coeffs.items():
            d[e] = d[e] + c if e in d else c
        return TruncatedLaurent(d, min(self.lowest, other.lowest), hi, truncated,
                                self.zero, self.vector_valued)

    def scale(self, scalar):
        return TruncatedLaurent({e: scalar * c for e, c in self.coeffs.items()},
                                self.lowest, self.highest, self.truncated,
                                self.zero, self.vector_valued)

    def shift(self, k):
        """Multiply by x^k."""
        return TruncatedLaurent({e + k: c for e, c in self.coeffs.items()},
                                self.lowest + k, self.highest + k, self.truncated,
                                self.zero, self.vector_valued)

    def derivative(self):
        d = {e - 1: e * c for e, c in self.coeffs.items() if e != 0}
        hi = self.highest - 1 if self.truncated else max(d, default=-1)
        return TruncatedLaurent(d, self.lowest - 1, hi, self.truncated,
                                self.zero, self.vector_valued)


def residue(s):
    """Coefficient of x^{-1}, exact.

    Raises when the truncation window ends below exponent -1, since the
    coefficient would then be unknown rather than zero.
    """
    if s.truncated and s.highest < -1:
        raise TruncationError("residue undefined: series truncated below exponent -1")
    return s.coeffs.get(-1, s.zero)


def truncated_multiply(a, b):
    """Product of two series, truncated at the minimum attainable order."""
    if a.vector_valued and b.vector_valued:
        raise ParameterError("product of two vector-valued series is not defined")
    bounds = []
    if a.truncated:
        bounds.append(a.highest + b.lowest)
    if b.truncated:
        bounds.append(b.highest + a.lowest)
    truncated = bool(bounds)
    hi = min(bounds) if truncated else a.highest + b.highest
    lo = a.lowest + b.lowest
    zero = b.zero if b.vector_valued else a.zero
    out = {}
    for e1, c1 in a.coeffs.items():
        for e2, c2 in b.coeffs.items():
            e = e1 + e2
            if e > hi:
                continue
            if a.vector_valued:
                c = c1.scale(c2)
            elif b.vector_valued:
                c = c2.scale(c1)
            else:
                c = c1 * c2
            out[e] = out[e] + c if e in out else c
    return TruncatedLaurent(out, lo, hi, truncated, zero,
                            a.vector_valued or b.vector_valued)


def binom_expand(r, order):
    """(1+x)^r = sum_{j=0}^{order} C(r,j) x^j.

    Exact (complete polynomial) once r >= 0 and order >= r; otherwise the
    result is flagged as truncated at ``order``.
    """
    if order < 0:
        raise ParameterError("order must be nonnegative")
    exact = r >= 0 and order >= r
    coeffs = {j: binom(r, j) for j in range(order + 1)}
    return TruncatedLaurent(coeffs, 0, order, not exact)


def shifted_binom_expand(r, a, order):
    """(a+x)^r = sum_{j>=0} C(r,j) a^{r-j} x^j for a nonzero rational a.

    Expansion in nonnegative powers of the second-listed variable x.
    """
    if a == 0:
        raise ParameterError("shift a must be nonzero")
    a = QQ(a)
    coeffs = {}
    for j in range(order + 1):
        e = r - j
        p = a ** e if e >= 0 else QQ(1) / (a ** (-e))
        coeffs[j] = binom(r, j) * p
    exact = r >= 0 and order >= r
    return TruncatedLaurent(coeffs, 0, order, not exact)


def x_power(k):
    return TruncatedLaurent({k: QQ(1)}, k, k, False)


def scalar_one():
    return TruncatedLaurent({0: QQ(1)}, 0, 0, False)
