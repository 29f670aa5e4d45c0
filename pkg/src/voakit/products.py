"""Bilinear residue products, O-subspace span builders and vacuum kernels.

All products are exact finite sums: binomial kernels with negative
exponents expand into series whose tails are killed by the module grading
(v_k w = 0 once the result weight would be negative), so nothing here is
verified-to-order; truncation enters only through the span policy.

Span policy: an O-type span at cutoff D with margin M lives in the
weight-<=D+M ambient.  Spanning elements are generated from basis pairs
with wt v + wt w <= D+M and admitted only when fully supported <= D+M;
an element reaching beyond is discarded whole, never clipped, since
clipping would corrupt the span.  Membership tests run in the same
ambient, so every positive verdict certifies genuine membership in the
corresponding infinite-dimensional subspace.
"""

from __future__ import annotations

from .errors import ParameterError
from .scalars import QQ, ZERO, binom, inv_factorial
from .voa import GradedVector
from .subspace import Ambient, SubspaceAtCutoff, _Echelon, nullspace_vectors


def _homogeneous(v):
    for wt in v.weights():
        yield wt, v.component(wt)


# ---------------------------------------------------------------------------
# products

def star_n(voa, v, w, n):
    """v *_n w = Res_z sum_i C(-n-1,i) (1+z)^{n+wt v} z^{-n-1-i} Y(v,z)w."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for i in range(n + 1):
            ci = binom(-n - 1, i)
            for j in range(wtv + n + 1):
                coef = ci * binom(wtv + n, j)
                if coef == 0:
                    continue
                out = out + voa.mode(comp, j - n - 1 - i, w).scale(coef)
    return out


def circ_n(voa, v, w, n):
    """v o_n w = Res_z (1+z)^{n+wt v} z^{-2n-2} Y(v,z)w."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for j in range(wtv + n + 1):
            coef = binom(wtv + n, j)
            out = out + voa.mode(comp, j - 2 * n - 2, w).scale(coef)
    return out


def circ_mn(voa, v, w, m, n):
    """v o_m^n w = Res_z (1+z)^{m+wt v} z^{-m-n-2} Y(v,z)w."""
    if m < 0 or n < 0:
        raise ParameterError("m, n must be nonnegative")
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for j in range(wtv + m + 1):
            coef = binom(wtv + m, j)
            out = out + voa.mode(comp, j - m - n - 2, w).scale(coef)
    return out


def o_dagger_general(voa, v, w, m, n, s, k):
    """Res_z (1+z)^{wt v+m+s} z^{-(m+n+2+k)} Y(v,z)w, for 0 <= s <= k.

    These residues all lie in the o_m^n span; the suites verify that
    membership rather than assume it.
    """
    if s < 0 or k < 0 or s > k:
        raise ParameterError("need 0 <= s <= k")
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for j in range(wtv + m + s + 1):
            coef = binom(wtv + m + s, j)
            out = out + voa.mode(comp, j - m - n - 2 - k, w).scale(coef)
    return out


def dot_action(voa, v, w):
    """v . w = Res_x x^{-1} Y(x^{L(0)}v, x)w = v_{wt v - 1} w."""
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        out = out + voa.mode(comp, wtv - 1, w)
    return out


def bar_star_mn(voa, v, w, m, n):
    """v bar*_{m,n} w, the right-action product.

    Res_x sum_{i<=m} C(-n-1,i)(-1)^{n+i} (1+x)^{wt v+i-1} x^{-n-i-1} Y(v,x)w;
    the exponent wt v+i-1 may be negative, but the j-sum below is still
    finite because modes deep enough annihilate w.
    """
    if m < 0 or n < 0:
        raise ParameterError("m, n must be nonnegative")
    wmax = w.max_weight()
    if wmax is None:
        return GradedVector.zero(voa)
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for i in range(m + 1):
            ci = binom(-n - 1, i) * (QQ(-1) ** (n + i))
            jmax = wtv + wmax + n + i
            for j in range(jmax + 1):
                coef = ci * binom(wtv + i - 1, j)
                if coef == 0:
                    continue
                out = out + voa.mode(comp, j - n - i - 1, w).scale(coef)
    return out


def bar_star_upper(voa, v, w, m, n):
    """v bar*_m^n w = sum_{i<=n} C(-m-1,i) Res_z (1+z)^{wt v+m} z^{-m-i-1} Y(v,z)w."""
    if m < 0 or n < 0:
        raise ParameterError("m, n must be nonnegative")
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        for i in range(n + 1):
            ci = binom(-m - 1, i)
            for j in range(wtv + m + 1):
                coef = ci * binom(wtv + m, j)
                if coef == 0:
                    continue
                out = out + voa.mode(comp, j - m - i - 1, w).scale(coef)
    return out


def bracket_star(voa, u, p, w, m, n):
    """u[p] bar*_m^n w, the degree-p shifted product (p may be any integer)."""
    if m < 0 or n < 0:
        raise ParameterError("m, n must be nonnegative")
    out = GradedVector.zero(voa)
    for wtu, comp in _homogeneous(u):
        for i in range(n + abs(p) + 1):
            ci = binom(-m - p - 1, i)
            for j in range(wtu + m + 1):
                coef = ci * binom(wtu + m, j)
                if coef == 0:
                    continue
                out = out + voa.mode(comp, j - p - m - i - 1, w).scale(coef)
    return out


def bullet_z0(voa, v, w, z0):
    """v bullet_{(z0)} w, the z0-deformed zero-mode action.

    Res_x x^{wt v-1} (1-z0 x)^{wt v-1} Y(exp(-z0(1-z0 x)^{-1} L(1)) v, x)w;
    reduces to the dot action at z0 = 0.
    """
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        out = out + voa.deformed_mode(comp, wtv - 1, w, z0)
    return out


# ---------------------------------------------------------------------------
# span builders

SPAN_KINDS = ("O_n", "O_dagger", "O_prime", "shift")


def _shift_rows(voa, offset, ambient):
    """(L(-1) + L(0) + offset) b over basis b, fully supported in the ambient."""
    rows = []
    A = ambient.cutoff
    for lam in range(A + 1):
        for mono in voa.basis(lam):
            b = GradedVector.from_mono(voa, mono)
            elt = voa.L(-1, b) + b.scale(QQ(lam + offset))
            mw = elt.max_weight()
            if mw is None or mw > A:
                continue
            rows.append(elt)
    return rows


def _circ_rows(voa, m, n, ambient):
    """v o_m^n w over basis pairs, admitted only when fully supported."""
    A = ambient.cutoff
    rows = []
    for wtv in range(1, A + 1):
        for v in voa.basis(wtv):
            for wtw in range(0, A - wtv + 1):
                for w in voa.basis(wtw):
                    top = wtv + wtw + m + n + 1
                    elt = GradedVector.zero(voa)
                    admissible = True
                    for j in range(wtv + m + 1):
                        coef = binom(wtv + m, j)
                        term = voa.mode_mono(v, j - m - n - 2, w)
                        if not term:
                            continue
                        if top - j > A:
                            admissible = False
                            break
                        elt = elt + GradedVector(
                            voa, {top - j: {mm: coef * cc for mm, cc in term.items()}})
                    if admissible and not elt.is_zero():
                        rows.append(elt)
    return rows


def build_span(voa, kind, m, n, D, M, provenance_extra=None):
    """Echelonized under-approximation of an O-type subspace.

    kind: "O_n" (uses n only), "O_dagger", "O_prime", or "shift".
    Ambient cutoff is D+M; provenance records the request.
    """
    if kind not in SPAN_KINDS:
        raise ParameterError(f"unknown span kind {kind!r}")
    ambient = Ambient(voa, D + M)
    rows = []
    if kind == "O_n":
        rows.extend(_shift_rows(voa, 0, ambient))
        rows.extend(_circ_rows(voa, n, n, ambient))
    elif kind == "O_dagger":
        rows.extend(_circ_rows(voa, m, n, ambient))
    elif kind == "O_prime":
        rows.extend(_shift_rows(voa, m - n, ambient))
        rows.extend(_circ_rows(voa, m, n, ambient))
    else:
        rows.extend(_shift_rows(voa, m - n, ambient))
    ech = _Echelon(ambient.dim, screen=True)
    for vec in rows:
        ech.insert(ambient.vector_to_row(vec))
    prov = {"kind": kind, "m": m, "n": n, "cutoff": D, "margin": M,
            "generators": len(rows)}
    prov.update(provenance_extra or {})
    return SubspaceAtCutoff(ambient, ech.rref(), prov)


def span_generators(voa, kind, m, n, D, M):
    """The admitted spanning elements, in the deterministic build order."""
    ambient = Ambient(voa, D + M)
    if kind == "O_n":
        return _shift_rows(voa, 0, ambient) + _circ_rows(voa, n, n, ambient)
    if kind == "O_dagger":
        return _circ_rows(voa, m, n, ambient)
    if kind == "O_prime":
        return _shift_rows(voa, m - n, ambient) + _circ_rows(voa, m, n, ambient)
    if kind == "shift":
        return _shift_rows(voa, m - n, ambient)
    raise ParameterError(f"unknown span kind {kind!r}")


# ---------------------------------------------------------------------------
# vacuum kernels on the module side

def omega_n(voa, n, D, vbound=None, z0=None):
    """Level-n vacuum space of the adjoint module at cutoff D.

    Kernel of the conditions v_k w = 0 for all basis v up to the generator
    bound and all k >= wt v + n; with z0 given, the modes of the deformed
    structure are used instead.  The kernel is an over-approximation that
    shrinks as vbound grows; provenance records the bound used.
    """
    if vbound is None:
        vbound = D + 4
    ambient = Ambient(voa, D)
    conditions = {}

    def add_condition(key, target_vec, pos, scale):
        if target_vec.is_zero():
            return
        for wt, mono, c in target_vec.terms():
            row = conditions.setdefault((key, wt, mono), {})
            row[pos] = row.get(pos, ZERO) + scale * c

    for wtv in range(1, vbound + 1):
        for v in voa.basis(wtv):
            vv = GradedVector.from_mono(voa, v)
            for lam in range(n + 1, D + 1):
                for w in voa.basis(lam):
                    pos = ambient.index[(lam, w)]
                    wv = GradedVector.from_mono(voa, w)
                    for k in range(wtv + n, wtv + lam):
                        if z0 is None:
                            img = voa.mode(vv, k, wv)
                        else:
                            img = voa.deformed_mode(vv, k, wv, z0)
                        add_condition((v, k), img, pos, QQ(1))
    vecs = nullspace_vectors(conditions.values(), ambient)
    ech = _Echelon()
    for vec in vecs:
        ech.insert(ambient.vector_to_row(vec))
    return SubspaceAtCutoff(ambient, ech.rref(),
                            {"kind": "omega", "n": n, "cutoff": D,
                             "vbound": vbound, "z0": z0})


def associated_graded(voa, n_max, D, vbound=None):
    """The filtration pieces Omega_n / Omega_{n-1} of the adjoint at cutoff.

    Returns (chain, pieces): chain[n] is the computed Omega_n span and
    pieces[n] a list of representatives of a basis of the degree-n piece.
    """
    chain = {n: omega_n(voa, n, D, vbound) for n in range(n_max + 1)}
    pieces = {}
    for n in range(n_max + 1):
        prev = chain[n - 1] if n > 0 else None
        reps = []
        ech = _Echelon()
        amb = chain[n].ambient
        if prev is not None:
            for p in prev.pivots:
                ech.insert(dict(prev.rows[p]))
        for vec in chain[n].basis_vectors():
            if ech.insert(amb.vector_to_row(vec)) is not None:
                reps.append(vec)
        pieces[n] = reps
    return chain, pieces
