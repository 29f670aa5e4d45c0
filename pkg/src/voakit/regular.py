"""Dual-side machinery: contragredient modes, vacuum spaces, bullet actions.

Everything here reaches the graded dual only through the contragredient
operator <Y*(v,x)f, w> = <f, Y(e^{xL(1)}(-x^{-2})^{L(0)}v, x^{-1})w> and
the two inversion identities that recover the right and left regularized
actions from it,

    x^{wt v+n} (1+x)^{wt v+m} Y^R(v,x)f = x^{wt v+n} (x+1)^{wt v+m} Y*(v,x)f,
    (-1+x)^{wt v+n} x^{wt v+m} Y^L(v,x)f = (x-1)^{wt v+n} x^{wt v+m} Y*(v,x-1)f,

    (all (-1+x)^r expanded in nonnegative powers of x).

None of the primal product formulas are used, so pairing identities that
compare this module against voakit.products compare two genuinely
independent computations.
"""

from __future__ import annotations

from .errors import TruncationError, CutoffInconclusive, MembershipError
from .scalars import QQ, ZERO, binom, inv_factorial
from .voa import GradedVector, DualFunctional
from .subspace import Ambient, SubspaceAtCutoff, _Echelon
from .products import circ_mn, _homogeneous


# ---------------------------------------------------------------------------
# contragredient modes

def ystar_mode(voa, v, k, f, upto=None):
    """Res_x x^k Y*(v,x)f as a functional (v homogeneous).

    <result, w> = (-1)^{wt v} sum_r (1/r!) <f, (L(1)^r v)_{2 wt v - r - k - 2} w>;
    the result lives at cutoff f.cutoff - (k + 1 - wt v), optionally
    materialized only up to ``upto``.
    """
    if not v.is_homogeneous():
        raise MembershipError("ystar_mode needs a homogeneous vector")
    if v.is_zero():
        return DualFunctional(voa, f.cutoff, {})
    wtv = v.max_weight()
    shift = k + 1 - wtv
    cut = f.cutoff - shift
    if upto is not None:
        cut = min(cut, upto)
    cache = getattr(f, "_ystar", None)
    if cache is None:
        cache = {}
        f._ystar = cache
    key = (tuple(v.terms()), k, cut)
    hit = cache.get(key)
    if hit is not None:
        return hit
    data = {}
    if cut >= 0:
        sign = QQ(-1) ** wtv
        terms = []
        lv = v
        r = 0
        while not lv.is_zero():
            terms.append((sign * inv_factorial(r), lv, 2 * wtv - r - k - 2))
            lv = voa.L(1, lv)
            r += 1
        for lam in range(cut + 1):
            for mono in voa.basis(lam):
                w = GradedVector.from_mono(voa, mono)
                val = ZERO
                for coef, lv, kk in terms:
                    img = voa.mode(lv, kk, w)
                    if not img.is_zero():
                        val += coef * f.pair(img)
                if val != 0:
                    data.setdefault(lam, {})[mono] = val
    out = DualFunctional(voa, max(cut, -1), data)
    cache[key] = out
    return out


def lstar(voa, k, f):
    """L*(k): <L*(k)f, u> = <f, L(-k)u>."""
    return ystar_mode(voa, voa.omega, k + 1, f)


def _reg_coefficient(voa, v, m, n, t, f, upto=None):
    """Coefficient of x^t in x^{wt v+n}(x+1)^{wt v+m} Y*(v,x)f.

    For f in the (m,n) vacuum space this series has no negative powers.
    """
    wtv = v.max_weight()
    cut = f.cutoff - n - (wtv + m) + t
    if upto is not None:
        cut = min(cut, upto)
    out = None
    for i in range(wtv + m + 1):
        ci = binom(wtv + m, i)
        if ci == 0:
            continue
        term = ystar_mode(voa, v, wtv + n + i - t - 1, f, upto=cut).scale(ci)
        out = term if out is None else out + term
    if out is None:
        return DualFunctional(voa, max(cut, -1), {})
    return out.restrict(min(out.cutoff, max(cut, -1)))


def yR_mode(voa, v, k, f, m, n):
    """Res_x x^k Y^R(v,x)f for f in the (m,n) vacuum space.

    Recovered by multiplying the regular series by the inverse binomial
    expanded in nonnegative powers; zero for k >= wt v + n, so
    x^{wt v+n} Y^R(v,x)f has only nonnegative powers.
    """
    wtv = v.max_weight()
    cut = max(f.cutoff - wtv - m - n, -1)
    acc = None
    for s in range(0, wtv + n - k):
        cs = binom(-wtv - m, s)
        if cs == 0:
            continue
        term = _reg_coefficient(voa, v, m, n, wtv + n - k - 1 - s, f, upto=cut).scale(cs)
        acc = term if acc is None else acc + term
    if acc is None:
        return DualFunctional(voa, cut, {})
    return acc.restrict(min(acc.cutoff, cut))


def _shifted_reg_coefficient(voa, v, m, n, tau, f, cut):
    """Coefficient of x^tau in (x-1)^{wt v+n} x^{wt v+m} Y*(v,x-1)f.

    Materialized on weights <= cut; the t-sum below is finite there
    because heavy coefficients vanish on light vectors.
    """
    wtv = v.max_weight()
    acc = {}
    tmax = cut + n + wtv + m
    for t in range(tau, tmax + 1):
        coef = binom(t, tau) * (QQ(-1) ** (t - tau))
        if coef == 0:
            continue
        g = _reg_coefficient(voa, v, m, n, t, f, upto=cut)
        for lam, piece in g.data.items():
            if lam > cut:
                continue
            tgt = acc.setdefault(lam, {})
            for mono, c in piece.items():
                tgt[mono] = tgt.get(mono, ZERO) + coef * c
    return DualFunctional(voa, cut, acc)


def yL_mode(voa, v, k, f, m, n):
    """Res_x x^k Y^L(v,x)f for f in the (m,n) vacuum space.

    Zero for k >= wt v + m, so x^{wt v+m} Y^L(v,x)f has only nonnegative
    powers.
    """
    wtv = v.max_weight()
    cut = max(f.cutoff - wtv - m - n, -1)
    acc = None
    for s in range(0, wtv + m - k):
        cs = binom(-wtv - n, s) * (QQ(-1) ** (wtv + n + s))
        if cs == 0:
            continue
        term = _shifted_reg_coefficient(voa, v, m, n, wtv + m - k - 1 - s, f, cut).scale(cs)
        acc = term if acc is None else acc + term
    if acc is None:
        return DualFunctional(voa, cut, {})
    return acc


def regular_series_is_nonnegative(voa, v, m, n, f):
    """Check that x^{wt v+n}(x+1)^{wt v+m} Y*(v,x)f has no negative powers.

    This is the level-(m,n) vacuum criterion for the single vector v,
    evaluated on the part of the dual that the cutoff can see.
    """
    wtv = v.max_weight()
    tmin = -(wtv + f.cutoff + n + m + 1)
    for t in range(tmin, 0):
        g = _reg_coefficient(voa, v, m, n, t, f)
        if not g.is_zero():
            return False, (t, g)
    return True, None


# ---------------------------------------------------------------------------
# vacuum spaces

class VacuumSpace:
    """Level-(m,n) vacuum space model at a weight cutoff.

    Computed twice: as the annihilator of the o_m^n span (product route)
    and as the kernel of the truncated regularity criterion (dual route);
    construction fails loudly when the two disagree.
    """

    def __init__(self, voa, m, n, cutoff, functionals, span, criterion_span):
        self.voa = voa
        self.m = m
        self.n = n
        self.cutoff = cutoff
        self.functionals = functionals
        self.span = span
        self.criterion_span = criterion_span

    @property
    def dimension(self):
        return len(self.functionals)


def _criterion_rows(voa, m, n, D):
    """Vectors whose vanishing under f expresses the truncated criterion.

    For each homogeneous v, the coefficient of x^{-j} (j >= 1) in
    x^{wt v+n}(x+1)^{wt v+m} Y*(v,x)f, evaluated at w, equals <f, T> with

        T = (-1)^{wt v} sum_{r,i} (1/r!) C(wt v+m, i)
            (L(1)^r v)_{wt v - r - n - i - j - 1} w,

    so the kernel is the annihilator of the span of the T vectors whose
    support fits under the cutoff (wt v + wt w + m + n + j <= D).
    """
    rows = []
    for wtv in range(1, D - m - n):
        for vm in voa.basis(wtv):
            v = GradedVector.from_mono(voa, vm)
            lterms = []
            lv = v
            r = 0
            while not lv.is_zero():
                lterms.append((inv_factorial(r) * (QQ(-1) ** wtv), lv, r))
                lv = voa.L(1, lv)
                r += 1
            for j in range(1, D - m - n - wtv + 1):
                for wtw in range(0, D - m - n - j - wtv + 1):
                    for wm in voa.basis(wtw):
                        w = GradedVector.from_mono(voa, wm)
                        T = GradedVector.zero(voa)
                        for i in range(wtv + m + 1):
                            ci = binom(wtv + m, i)
                            if ci == 0:
                                continue
                            for coef, lvec, r in lterms:
                                img = voa.mode(lvec, wtv - r - n - i - j - 1, w)
                                if not img.is_zero():
                                    T = T + img.scale(ci * coef)
                        if not T.is_zero():
                            rows.append(T)
    return rows


def vacuum_space(voa, m, n, D):
    """Both computations of the level-(m,n) vacuum space at cutoff D.

    Raises CutoffInconclusive (with the offending functional) when the
    annihilator of the product span and the criterion kernel differ.
    """
    from .products import build_span
    from .subspace import annihilator
    ambient = Ambient(voa, D)
    span = build_span(voa, "O_dagger", m, n, D, 0)
    ech = _Echelon(ambient.dim, screen=True)
    for T in _criterion_rows(voa, m, n, D):
        ech.insert(ambient.vector_to_row(T))
    criterion_span = SubspaceAtCutoff(
        ambient, ech.rref(),
        {"kind": "criterion", "m": m, "n": n, "cutoff": D})
    if not (span.pivots == criterion_span.pivots and span.rows == criterion_span.rows):
        # surface a functional separating the two spans
        anns = annihilator(span)
        witness = None
        for f in anns:
            for T in criterion_span.basis_vectors():
                if f.pair(T) != 0:
                    witness = (f, T)
                    break
            if witness:
                break
        if witness is None:
            for f in annihilator(criterion_span):
                for T in span.basis_vectors():
                    if f.pair(T) != 0:
                        witness = (f, T)
                        break
                if witness:
                    break
        raise CutoffInconclusive(
            f"vacuum space mismatch at (m={m}, n={n}, D={D}): "
            f"product span rank {span.rank}, criterion rank {criterion_span.rank}",
            witness=witness)
    functionals = annihilator(span)
    return VacuumSpace(voa, m, n, D, functionals, span, criterion_span)


# ---------------------------------------------------------------------------
# deformed dual modes and the bimodule actions

def deformed_dual_mode(voa, v, k, f, z0, side, m, n):
    """Res_x x^k of the z0-deformed side action applied to f.

    side "R" with z0=-1 and side "L" with z0=+1 give the two structures
    whose zero modes realize the bimodule actions.
    """
    if not v.is_homogeneous():
        raise MembershipError("deformed_dual_mode needs a homogeneous vector")
    z0 = QQ(z0)
    wtv = v.max_weight()
    bound = n if side == "R" else m
    mode_fn = yR_mode if side == "R" else yL_mode
    acc = None
    lv = v
    r = 0
    while not lv.is_zero():
        for s in range(0, wtv - r + bound - k):
            coef = ((-z0) ** (r + s)) * inv_factorial(r) * binom(2 * wtv - k - 2 - r, s)
            if coef == 0:
                continue
            term = mode_fn(voa, lv, k + s, f, m, n).scale(coef)
            acc = term if acc is None else acc + term
        lv = voa.L(1, lv)
        r += 1
    if acc is None:
        return DualFunctional(voa, max(f.cutoff - wtv - m - n, -1), {})
    return acc


def bullet_L(voa, v, f, m, n):
    """v bullet_L f = Res_x x^{wt v-1}(1-x)^{wt v-1} Y^L(e^{(-1+x)^{-1}L(1)}v, x)f."""
    out = None
    for wtv, comp in _homogeneous(v):
        term = deformed_dual_mode(voa, comp, wtv - 1, f, QQ(1), "L", m, n)
        out = term if out is None else out + term
    return out if out is not None else DualFunctional(voa, f.cutoff, {})


def bullet_R(voa, v, f, m, n):
    """v bullet_R f = Res_x x^{wt v-1}(1+x)^{wt v-1} Y^R(e^{(1+x)^{-1}L(1)}v, x)f."""
    out = None
    for wtv, comp in _homogeneous(v):
        term = deformed_dual_mode(voa, comp, wtv - 1, f, QQ(-1), "R", m, n)
        out = term if out is None else out + term
    return out if out is not None else DualFunctional(voa, f.cutoff, {})


def shifted_pairing_lhs(voa, v, p, f, w, m, n):
    """Res_x x^{wt v-1+p} (1+x)^{wt v-1-p} <Y^R(e^{(1+x)^{-1}L(1)}v, x)f, w>.

    The degree-p coefficient of the deformed right action, paired with w;
    the primal counterpart is <f, theta(v)[p] bar*_m^n w>.
    """
    total = ZERO
    for wtv, comp in _homogeneous(v):
        g = deformed_dual_mode(voa, comp, wtv - 1 + p, f, QQ(-1), "R", m, n)
        total += g.pair(w)
    return total


def lr_zero_modes(voa, f, m, n):
    """(left, right) deformed zero modes of the conformal vector on f."""
    om = voa.omega
    left = deformed_dual_mode(voa, om, 1, f, QQ(1), "L", m, n)
    right = deformed_dual_mode(voa, om, 1, f, QQ(-1), "R", m, n)
    return left, right
