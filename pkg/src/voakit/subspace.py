"""Exact echelon-based subspace computations inside a weight truncation.

Vectors in the weight-<=D truncation are flattened onto a global
coordinate list ordered by (weight, basis index); elimination is done
over exact rationals with pivot rows normalized to leading coefficient 1.
Pivot order is lowest weight first, then basis index, so quotient
representatives are deterministic and the reduced echelon form is
canonical for the span (hence independent of input order).

Span builders push tens of thousands of spanning elements through the
echelon, almost all of them dependent on earlier ones.  A deterministic
mod-p prescreen (p = 2^31 - 1, numpy row arithmetic) filters candidates:
a row that reduces to zero mod p is skipped without touching the exact
echelon.  Skipping can only shrink the computed span, and every span here
is an under-approximation whose membership verdicts are one-sided, so the
shortcut never compromises soundness; rows the prescreen cannot decide
(a denominator divisible by p) fall back to exact insertion.
"""

from __future__ import annotations

import numpy as np

from .errors import TruncationError, MembershipError
from .scalars import QQ, ZERO
from .voa import GradedVector, DualFunctional

_P = 2147483647  # 2^31 - 1, prime; int64 holds products of two residues


class Ambient:
    """Flattened coordinates of a weight-<=cutoff truncation."""

    def __new__(cls, voa, cutoff):
        cache = getattr(voa, "_ambient_cache", None)
        if cache is None:
            cache = {}
            voa._ambient_cache = cache
        hit = cache.get(cutoff)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        self.voa = voa
        self.cutoff = cutoff
        self.positions = []
        index = {}
        for n in range(cutoff + 1):
            for m in voa.basis(n):
                index[(n, m)] = len(self.positions)
                self.positions.append((n, m))
        self.index = index
        cache[cutoff] = self
        return self

    @property
    def dim(self):
        return len(self.positions)

    def vector_to_row(self, vec):
        mw = vec.max_weight()
        if mw is not None and mw > self.cutoff:
            raise TruncationError(
                f"vector supported at weight {mw} beyond truncation cutoff {self.cutoff}")
        row = {}
        for wt, mono, c in vec.terms():
            row[self.index[(wt, mono)]] = c
        return row

    def row_to_vector(self, row):
        data = {}
        for pos, c in row.items():
            wt, mono = self.positions[pos]
            data.setdefault(wt, {})[mono] = c
        return GradedVector(self.voa, data)

    def functional_to_row(self, f):
        if f.cutoff < self.cutoff:
            raise TruncationError(
                f"functional cutoff {f.cutoff} below ambient cutoff {self.cutoff}")
        row = {}
        for wt in sorted(f.data):
            if wt > self.cutoff:
                raise TruncationError("functional supported beyond ambient")
            for mono, c in f.data[wt].items():
                row[self.index[(wt, mono)]] = c
        return row

    def row_to_functional(self, row):
        data = {}
        for pos, c in row.items():
            wt, mono = self.positions[pos]
            data.setdefault(wt, {})[mono] = c
        return DualFunctional(self.voa, self.cutoff, data)


class _ModScreen:
    """Deterministic mod-p echelon used to prescreen candidate rows."""

    def __init__(self, dim):
        self.dim = dim
        self.rows = {}  # pivot -> np.int64 array, pivot entry 1

    def image(self, row):
        """Row reduced mod p, or None when a denominator hits p."""
        arr = np.zeros(self.dim, dtype=np.int64)
        for pos, c in row.items():
            den = int(c.denominator) % _P
            if den == 0:
                return None
            arr[pos] = (int(c.numerator) % _P) * pow(den, _P - 2, _P) % _P
        return arr

    def reduce(self, arr):
        support = np.flatnonzero(arr)
        while support.size:
            p = int(support[0])
            piv = self.rows.get(p)
            if piv is None:
                return arr, p
            arr = (arr - int(arr[p]) * piv) % _P
            support = np.flatnonzero(arr)
        return arr, None

    def insert(self, arr):
        arr, p = self.reduce(arr)
        if p is None:
            return None
        inv = pow(int(arr[p]), _P - 2, _P)
        self.rows[p] = (arr * inv) % _P
        return p


class _Echelon:
    """Incremental exact echelon; pivot rows have leading coefficient 1."""

    def __init__(self, dim=None, screen=False):
        self.pivots = {}
        self.screen = _ModScreen(dim) if screen and dim is not None else None

    def _reduce(self, row):
        row = {p: c for p, c in row.items() if c != 0}
        while row:
            p = min(row)
            piv = self.pivots.get(p)
            if piv is None:
                return row, p
            c = row[p]
            for q, v in piv.items():
                w = row.get(q, ZERO) - c * v
                if w:
                    row[q] = w
                elif q in row:
                    del row[q]
        return row, None

    def insert(self, row):
        """Add a row to the span; returns its pivot or None if dependent."""
        if self.screen is not None:
            arr = self.screen.image(row)
            if arr is not None:
                if self.screen.insert(arr) is None:
                    return None  # dependent mod p => dependent over QQ
        row, p = self._reduce(row)
        if p is None:
            return None
        lead = row[p]
        self.pivots[p] = {q: v / lead for q, v in row.items()}
        return p

    def reduces_to_zero(self, row):
        residue, _ = self._reduce(dict(row))
        return not residue

    def rref(self):
        """Full back-substitution; top-down so a single pass suffices."""
        for p in sorted(self.pivots, reverse=True):
            row = self.pivots[p]
            for q in sorted(k for k in row if k > p and k in self.pivots):
                c = row.get(q)
                if not c:
                    continue
                piv = self.pivots[q]
                for r, v in piv.items():
                    w = row.get(r, ZERO) - c * v
                    if w:
                        row[r] = w
                    elif r in row:
                        del row[r]
            self.pivots[p] = row
        return self.pivots


class SubspaceAtCutoff:
    """Reduced echelon basis of a computed span inside a truncation."""

    def __init__(self, ambient, rref_rows, provenance=None):
        self.ambient = ambient
        self.provenance = dict(provenance or {})
        self.pivots = sorted(rref_rows)
        self.rows = {p: dict(rref_rows[p]) for p in self.pivots}

    @property
    def cutoff(self):
        return self.ambient.cutoff

    @property
    def rank(self):
        return len(self.pivots)

    def basis_vectors(self):
        return [self.ambient.row_to_vector(self.rows[p]) for p in self.pivots]

    def reduce_row(self, row):
        """Residue of a row modulo the span, plus elimination coordinates."""
        row = {p: c for p, c in row.items() if c != 0}
        coords = {}
        for p in self.pivots:
            c = row.get(p)
            if not c:
                continue
            coords[p] = c
            for q, v in self.rows[p].items():
                w = row.get(q, ZERO) - c * v
                if w:
                    row[q] = w
                elif q in row:
                    del row[q]
        return row, coords

    def contains(self, vec):
        residue, _ = self.reduce_row(self.ambient.vector_to_row(vec))
        return not residue

    def member(self, vec):
        """Membership verdict plus coordinates in the echelon basis.

        Coordinates reproduce the vector exactly: vec = sum coords[i] *
        basis_vectors()[i] when the verdict is True.
        """
        residue, coords = self.reduce_row(self.ambient.vector_to_row(vec))
        if residue:
            return False, None
        return True, [coords.get(p, ZERO) for p in self.pivots]

    def reduce_vector(self, vec):
        """Canonical representative of vec modulo the span."""
        residue, _ = self.reduce_row(self.ambient.vector_to_row(vec))
        return self.ambient.row_to_vector(residue)

    def same_span(self, other):
        return self.pivots == other.pivots and self.rows == other.rows


def echelonize(vectors, cutoff, voa=None, provenance=None, screen=False):
    """Reduced echelon basis spanning the input span (exactly, when screen
    is off; a deterministic subspan when the prescreen drops rows).

    Raises a truncation violation when an input vector is supported beyond
    the cutoff.
    """
    vectors = list(vectors)
    if voa is None:
        if not vectors:
            raise MembershipError("echelonize of empty input needs an explicit voa")
        voa = vectors[0].space
    amb = Ambient(voa, cutoff)
    ech = _Echelon(amb.dim, screen=screen)
    for vec in vectors:
        ech.insert(amb.vector_to_row(vec))
    return SubspaceAtCutoff(amb, ech.rref(), provenance)


def member(vec, subspace):
    return subspace.member(vec)


def annihilator(subspace):
    """Basis of the functionals on the truncation killing the subspace.

    dim = dim(truncation) - rank, one functional per non-pivot coordinate.
    """
    amb = subspace.ambient
    out = []
    pivot_set = set(subspace.pivots)
    for q in range(amb.dim):
        if q in pivot_set:
            continue
        row = {q: QQ(1)}
        for p in subspace.pivots:
            c = subspace.rows[p].get(q)
            if c:
                row[p] = -c
        out.append(amb.row_to_functional(row))
    return out


def nullspace_vectors(rows, ambient):
    """Vectors x with row . x = 0 for every given coordinate row."""
    ech = _Echelon()
    for row in rows:
        ech.insert(dict(row))
    span = SubspaceAtCutoff(ambient, ech.rref())
    pivot_set = set(span.pivots)
    out = []
    for q in range(ambient.dim):
        if q in pivot_set:
            continue
        row = {q: QQ(1)}
        for p in span.pivots:
            c = span.rows[p].get(q)
            if c:
                row[p] = -c
        out.append(ambient.row_to_vector(row))
    return out


def functional_span(functionals, cutoff, voa, provenance=None):
    """Echelonized span of dual functionals, in the same flattened coordinates."""
    amb = Ambient(voa, cutoff)
    ech = _Echelon()
    for f in functionals:
        ech.insert(amb.functional_to_row(f))
    return SubspaceAtCutoff(amb, ech.rref(), provenance)


def functional_in_span(f, span):
    row = span.ambient.functional_to_row(f)
    residue, _ = span.reduce_row(row)
    return not residue


class SpanSolver:
    """Incremental span with exact coordinate recovery.

    Generators occupy positions below ``dim``; each accepted generator gets
    an augmented tracking coordinate, so solving expresses a query vector
    as an explicit combination of the accepted generators.
    """

    def __init__(self, dim):
        self.dim = dim
        self.ech = _Echelon()
        self.count = 0

    def try_add(self, row):
        """Accept the row if independent of those already accepted."""
        aug = {p: c for p, c in row.items() if c != 0}
        aug[self.dim + self.count] = QQ(1)
        reduced, p = self.ech._reduce(aug)
        if p is None or p >= self.dim:
            return False
        lead = reduced[p]
        self.ech.pivots[p] = {q: v / lead for q, v in reduced.items()}
        self.count += 1
        return True

    def solve(self, row):
        """Coordinates in the accepted generators, or None if outside."""
        residue, _ = self.ech._reduce({p: c for p, c in row.items() if c != 0})
        if any(p < self.dim for p in residue):
            return None
        return [-residue.get(self.dim + i, ZERO) for i in range(self.count)]


class QuotientView:
    """Canonical-representative projector for a truncation modulo a span.

    The projector sends a vector to its reduction against the echelon rows;
    it is idempotent with kernel exactly the stored span.
    """

    def __init__(self, subspace):
        self.subspace = subspace
        self.ambient = subspace.ambient
        pivot_set = set(subspace.pivots)
        self.free_positions = [q for q in range(self.ambient.dim) if q not in pivot_set]
        self._free_index = {q: i for i, q in enumerate(self.free_positions)}

    @property
    def dimension(self):
        return len(self.free_positions)

    def project(self, vec):
        return self.subspace.reduce_vector(vec)

    def coordinates(self, vec):
        """Coordinates of the class of vec in the free-position basis."""
        residue, _ = self.subspace.reduce_row(self.ambient.vector_to_row(vec))
        return [residue.get(q, ZERO) for q in self.free_positions]

    def class_basis(self):
        return [self.ambient.row_to_vector({q: QQ(1)}) for q in self.free_positions]
