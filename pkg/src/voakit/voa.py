"""Concrete vertex operator algebra instances with exact mode action.

Two instances are provided:

* ``heisenberg`` -- the rank-1 free boson M(1), PBW basis a(-n1)...a(-nk)|0>
  with n1 >= ... >= nk >= 1, central charge 1, conformal vector
  (1/2) a(-1)^2 |0>.
* ``virasoro`` -- the Virasoro vacuum VOA of central charge c (Verma-type,
  no quotient by singular vectors), PBW basis L(-n1)...L(-nk)|0> with
  n1 >= ... >= nk >= 2.

Basis monomials are weakly decreasing tuples of parts; the weight is the
sum of the parts.  The mode engine computes v_k w exactly for arbitrary
basis vectors via the standard iterate recursion on the head mode of v,
with memoization.  A separate brute-force evaluator expands the field of
v into normally ordered strings of generator modes and applies them by
commutator pushing alone; it shares nothing with the iterate recursion
except the generator action itself and serves as an independent oracle.
"""

from __future__ import annotations

from .errors import TruncationError, ParameterError
from .scalars import QQ, ZERO, binom, inv_factorial, rat


# ---------------------------------------------------------------------------
# partitions

def _partitions(n, min_part, cache={}):
    """All weakly decreasing tuples of parts >= min_part summing to n."""
    key = (n, min_part)
    if key in cache:
        return cache[key]
    if n == 0:
        out = ((),)
    elif n < min_part:
        out = ()
    else:
        acc = []
        for first in range(n, min_part - 1, -1):
            for rest in _partitions(n - first, min_part):
                if not rest or rest[0] <= first:
                    acc.append((first,) + rest)
        out = tuple(sorted(acc))
    cache[key] = out
    return out


# ---------------------------------------------------------------------------
# graded vectors

class GradedVector:
    """Finitely supported weight-graded coefficient vector over QQ.

    data maps weight -> {monomial: coefficient}; zero coefficients and
    empty weight pieces are never stored.
    """

    __slots__ = ("space", "data")

    def __init__(self, space, data):
        clean = {}
        for wt, piece in data.items():
            kept = {m: c for m, c in piece.items() if c != 0}
            if kept:
                clean[wt] = kept
        self.space = space
        self.data = clean

    @classmethod
    def from_mono(cls, space, mono, coeff=1):
        return cls(space, {sum(mono): {tuple(mono): QQ(coeff)}})

    @classmethod
    def zero(cls, space):
        return cls(space, {})

    def is_zero(self):
        return not self.data

    def weights(self):
        return sorted(self.data)

    def max_weight(self):
        return max(self.data) if self.data else None

    def component(self, wt):
        """Homogeneous component at the given weight, as a GradedVector."""
        if wt in self.data:
            return GradedVector(self.space, {wt: dict(self.data[wt])})
        return GradedVector.zero(self.space)

    def terms(self):
        for wt in sorted(self.data):
            piece = self.data[wt]
            for mono in sorted(piece):
                yield wt, mono, piece[mono]

    def __add__(self, other):
        out = {wt: dict(piece) for wt, piece in self.data.items()}
        for wt, piece in other.data.items():
            tgt = out.setdefault(wt, {})
            for m, c in piece.items():
                tgt[m] = tgt.get(m, ZERO) + c
        return GradedVector(self.space, out)

    def __sub__(self, other):
        return self + other.scale(QQ(-1))

    def scale(self, q):
        q = QQ(q)
        if q == 0:
            return GradedVector.zero(self.space)
        return GradedVector(self.space,
                            {wt: {m: q * c for m, c in piece.items()}
                             for wt, piece in self.data.items()})

    def __eq__(self, other):
        return isinstance(other, GradedVector) and self.data == other.data

    def __repr__(self):
        if self.is_zero():
            return "GradedVector(0)"
        parts = [f"{c}*{self.space.mono_str(m)}" for _, m, c in self.terms()]
        return "GradedVector(" + " + ".join(parts) + ")"

    def is_homogeneous(self):
        return len(self.data) <= 1


class DualFunctional:
    """Element of the graded dual, supported on weights <= cutoff.

    Pairing against a vector supported beyond the cutoff is an error, not
    zero: the functional models the restriction of an unknown element of
    the full dual, so values out there are unknown rather than vanishing.
    """

    __slots__ = ("space", "cutoff", "data", "_ystar")

    def __init__(self, space, cutoff, data):
        clean = {}
        for wt, piece in data.items():
            if wt > cutoff:
                raise TruncationError(f"dual coefficient at weight {wt} beyond cutoff {cutoff}")
            kept = {m: c for m, c in piece.items() if c != 0}
            if kept:
                clean[wt] = kept
        self.space = space
        self.cutoff = cutoff
        self.data = clean

    def is_zero(self):
        return not self.data

    def pair(self, vec):
        mw = vec.max_weight()
        if mw is not None and mw > self.cutoff:
            raise TruncationError(
                f"pairing undefined: vector supported at weight {mw} beyond dual cutoff {self.cutoff}")
        total = ZERO
        for wt, piece in vec.data.items():
            mine = self.data.get(wt)
            if not mine:
                continue
            for m, c in piece.items():
                if m in mine:
                    total += mine[m] * c
        return total

    def __add__(self, other):
        # the sum is only known on the common window
        cut = min(self.cutoff, other.cutoff)
        out = {}
        for src in (self.data, other.data):
            for wt, piece in src.items():
                if wt > cut:
                    continue
                tgt = out.setdefault(wt, {})
                for m, c in piece.items():
                    tgt[m] = tgt.get(m, ZERO) + c
        return DualFunctional(self.space, cut, out)

    def scale(self, q):
        q = QQ(q)
        return DualFunctional(self.space, self.cutoff,
                              {wt: {m: q * c for m, c in piece.items()}
                               for wt, piece in self.data.items()})

    def restrict(self, cutoff):
        if cutoff > self.cutoff:
            raise TruncationError("cannot extend a functional beyond its cutoff")
        return DualFunctional(self.space, cutoff,
                              {wt: piece for wt, piece in self.data.items() if wt <= cutoff})

    def __eq__(self, other):
        return (isinstance(other, DualFunctional) and self.data == other.data
                and self.cutoff == other.cutoff)

    def __repr__(self):
        parts = [f"{c}*{self.space.mono_str(m)}'" for wt in sorted(self.data)
                 for m, c in sorted(self.data[wt].items())]
        return "DualFunctional(@%d: " % self.cutoff + (" + ".join(parts) or "0") + ")"


# ---------------------------------------------------------------------------
# the instances

class VOAInstance:
    """A concrete VOA with exact mode action on its PBW basis."""

    def __init__(self, kind, central_charge=None):
        if kind not in ("heisenberg", "virasoro"):
            raise ParameterError(f"unknown VOA kind {kind!r}")
        self.kind = kind
        if kind == "heisenberg":
            if central_charge is not None and rat(central_charge) != 1:
                raise ParameterError("the rank-1 free boson has central charge 1")
            self.c = QQ(1)
            self.min_part = 1
            self.gen_weight = 1
        else:
            self.c = rat(central_charge) if central_charge is not None else QQ(1, 2)
            self.min_part = 2
            self.gen_weight = 2
        self._mode_cache = {}
        self._gen_cache = {}

    # -- basis bookkeeping

    def basis(self, n):
        return _partitions(n, self.min_part) if n >= 0 else ()

    def dim(self, n):
        return len(self.basis(n))

    def index(self, mono):
        return self.basis(sum(mono)).index(mono)

    def mono_str(self, mono):
        if not mono:
            return "vac"
        sym = "a" if self.kind == "heisenberg" else "L"
        return "".join(f"{sym}({-p})" for p in mono) + "vac"

    @property
    def vacuum(self):
        return GradedVector.from_mono(self, ())

    @property
    def hvec(self):
        if self.kind != "heisenberg":
            raise ParameterError("h = a(-1)vac only exists in the free boson")
        return GradedVector.from_mono(self, (1,))

    @property
    def omega(self):
        if self.kind == "heisenberg":
            return GradedVector.from_mono(self, (1, 1), QQ(1, 2))
        return GradedVector.from_mono(self, (2,))

    # -- generator action (straightening, the base layer shared by both engines)

    def _gen_apply(self, j, mono):
        """Apply the weight-``gen_weight`` generator mode to a basis monomial.

        heisenberg: a(j); virasoro: L(j).  Returns {monomial: coefficient}.
        """
        key = (j, mono)
        hit = self._gen_cache.get(key)
        if hit is not None:
            return hit
        if self.kind == "heisenberg":
            if j == 0:
                out = {}
            elif j < 0:
                out = {tuple(sorted(mono + (-j,), reverse=True)): QQ(1)}
            else:
                count = mono.count(j)
                if count:
                    shorter = list(mono)
                    shorter.remove(j)
                    out = {tuple(shorter): QQ(j * count)}
                else:
                    out = {}
        else:
            out = self._virasoro_apply(j, mono)
        self._gen_cache[key] = out
        return out

    def _virasoro_apply(self, j, mono):
        if not mono:
            if j <= -2:
                return {(-j,): QQ(1)}
            return {}
        n1 = mono[0]
        rest = mono[1:]
        if j <= -n1:
            return {(-j,) + mono: QQ(1)}
        # L(j) L(-n1) = L(-n1) L(j) + (j+n1) L(j-n1) + delta_{j,n1} (c/12)(j^3-j)
        out = {}
        for m2, c2 in self._gen_apply(j, rest).items():
            for m3, c3 in self._gen_apply(-n1, m2).items():
                out[m3] = out.get(m3, ZERO) + c2 * c3
        for m2, c2 in self._gen_apply(j - n1, rest).items():
            out[m2] = out.get(m2, ZERO) + QQ(j + n1) * c2
        if j == n1:
            central = self.c * QQ(j ** 3 - j, 12)
            if central != 0:
                out[rest] = out.get(rest, ZERO) + central
        return {m: c for m, c in out.items() if c != 0}

    # -- memoized mode engine (iterate recursion)

    def mode_mono(self, v, k, w):
        """v_k w for basis monomials v, w; returns {monomial: coefficient}.

        The result is homogeneous of weight wt v + wt w - k - 1.
        """
        key = (v, k, w)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        if not v:
            out = {w: QQ(1)} if k == -1 else {}
            self._mode_cache[key] = out
            return out
        n1 = v[0]
        u = v[1:]
        m0 = -n1 if self.kind == "heisenberg" else -(n1 - 1)
        wt_u = sum(u)
        wt_w = sum(w)
        out = {}
        # sum_i (-1)^i C(m0,i) a_{m0-i} (u_{k+i} w)
        for i in range(0, wt_u + wt_w - k):
            coef = (QQ(-1) ** i) * binom(m0, i)
            if coef == 0:
                continue
            inner = self.mode_mono(u, k + i, w)
            if not inner:
                continue
            for m2, c2 in inner.items():
                for m3, c3 in self._avamode(m0 - i, m2).items():
                    acc = coef * c2 * c3
                    out[m3] = out.get(m3, ZERO) + acc
        # - (-1)^{m0} sum_i (-1)^i C(m0,i) u_{m0+k-i} (a_i w)
        sign = -(QQ(-1) ** m0)
        for i in range(0, self.gen_weight + wt_w):
            coef = sign * (QQ(-1) ** i) * binom(m0, i)
            if coef == 0:
                continue
            inner = self._avamode(i, w)
            if not inner:
                continue
            for m2, c2 in inner.items():
                for m3, c3 in self.mode_mono(u, m0 + k - i, m2).items():
                    acc = coef * c2 * c3
                    out[m3] = out.get(m3, ZERO) + acc
        out = {m: c for m, c in out.items() if c != 0}
        self._mode_cache[key] = out
        return out

    def _avamode(self, j, mono):
        """Generator field mode in vertex-algebra indexing: h_j resp. omega_j."""
        if self.kind == "heisenberg":
            return self._gen_apply(j, mono)
        return self._gen_apply(j - 1, mono)

    def mode(self, v, k, w):
        """v_k w extended bilinearly to GradedVectors."""
        if isinstance(v, tuple):
            v = GradedVector.from_mono(self, v)
        if isinstance(w, tuple):
            w = GradedVector.from_mono(self, w)
        acc = {}
        for _, vm, vc in v.terms():
            for _, wm, wc in w.terms():
                scale = vc * wc
                for m, c in self.mode_mono(vm, k, wm).items():
                    acc[m] = acc.get(m, ZERO) + scale * c
        out = {}
        for m, c in acc.items():
            if c != 0:
                out.setdefault(sum(m), {})[m] = c
        return GradedVector(self, out)

    # -- independent brute-force evaluator (field expansion, no memoization)

    def brute_mode_mono(self, v, k, w):
        """v_k w via nested normally ordered products of generator fields.

        No memoization and no iterate recursion: the field of v is expanded
        into strings of generator modes which are applied to w by plain
        commutator pushing.
        """
        if not v:
            return {w: QQ(1)} if k == -1 else {}
        n1 = v[0]
        u = v[1:]
        d = n1 - 1 if self.kind == "heisenberg" else n1 - 2
        wt_u = sum(u)
        wt_w = sum(w)
        out = {}
        # creation half: sum_{m<0} A_m B_{k-m-1} w
        for m in range(k - wt_u - wt_w, 0):
            coef = binom(d - m - 1, d)
            if coef == 0:
                continue
            inner = self.brute_mode_mono(u, k - m - 1, w)
            for m2, c2 in inner.items():
                for m3, c3 in self._avamode(m - d, m2).items():
                    out[m3] = out.get(m3, ZERO) + coef * c2 * c3
        # annihilation half: sum_{m>=0} B_{k-m-1} A_m w
        for m in range(0, self.gen_weight + wt_w + d):
            coef = binom(d - m - 1, d)
            if coef == 0:
                continue
            for m2, c2 in self._avamode(m - d, w).items():
                for m3, c3 in self.brute_mode_mono(u, k - m - 1, m2).items():
                    out[m3] = out.get(m3, ZERO) + coef * c2 * c3
        return {m: c for m, c in out.items() if c != 0}

    def brute_mode(self, v, k, w):
        if isinstance(v, tuple):
            v = GradedVector.from_mono(self, v)
        if isinstance(w, tuple):
            w = GradedVector.from_mono(self, w)
        acc = {}
        for _, vm, vc in v.terms():
            for _, wm, wc in w.terms():
                scale = vc * wc
                for m, c in self.brute_mode_mono(vm, k, wm).items():
                    acc[m] = acc.get(m, ZERO) + scale * c
        out = {}
        for m, c in acc.items():
            if c != 0:
                out.setdefault(sum(m), {})[m] = c
        return GradedVector(self, out)

    # -- Virasoro operators and theta

    def L(self, k, vec):
        """L(k) = omega_{k+1}."""
        return self.mode(self.omega, k + 1, vec)

    def L1_power(self, r, vec):
        for _ in range(r):
            if vec.is_zero():
                break
            vec = self.L(1, vec)
        return vec

    def theta(self, vec):
        """v -> exp(L(1)) (-1)^{L(0)} v; finite sum since L(1) lowers weight."""
        out = GradedVector.zero(self)
        for wt in vec.weights():
            comp = vec.component(wt).scale(QQ(-1) ** wt)
            r = 0
            while not comp.is_zero():
                out = out + comp.scale(inv_factorial(r))
                comp = self.L(1, comp)
                r += 1
        return out

    def x_l0_scale(self, vec, q):
        """q^{L(0)} v for rational q: scale each homogeneous piece by q^wt."""
        q = QQ(q)
        out = GradedVector.zero(self)
        for wt in vec.weights():
            out = out + vec.component(wt).scale(q ** wt)
        return out

    # -- deformed structures

    def deformed_mode(self, v, k, w, z0):
        """Res_x x^k of the z0-deformed vertex operator applied to w.

        Equals Res_x x^k (1 - z0 x)^{2 wt v - k - 2}
        Y(exp(-z0 (1-z0 x)^{-1} L(1)) v, x) w, expanded exactly; at z0 = 0
        this is the plain mode v_k w.
        """
        z0 = QQ(z0)
        if isinstance(v, tuple):
            v = GradedVector.from_mono(self, v)
        if isinstance(w, tuple):
            w = GradedVector.from_mono(self, w)
        out = GradedVector.zero(self)
        for wtv in v.weights():
            lv = v.component(wtv)
            r = 0
            while not lv.is_zero():
                for wtw in w.weights():
                    wcomp = w.component(wtw)
                    smax = (wtv - r) + wtw - k - 1
                    for s in range(0, smax + 1):
                        coef = ((-z0) ** (r + s)) * inv_factorial(r) * binom(2 * wtv - k - 2 - r, s)
                        if coef == 0:
                            continue
                        term = self.mode(lv, k + s, wcomp)
                        if not term.is_zero():
                            out = out + term.scale(coef)
                lv = self.L(1, lv)
                r += 1
        return out


# ---------------------------------------------------------------------------
# adjoint module at a cutoff

class ModuleInstance:
    """The adjoint module of a VOA instance, truncated at a weight cutoff.

    L(0) acts semisimply by weight; the wrapper enforces that mode results
    stay inside the declared window.
    """

    def __init__(self, voa, cutoff):
        self.voa = voa
        self.cutoff = cutoff

    def dim_total(self):
        return sum(self.voa.dim(n) for n in range(self.cutoff + 1))

    def mode_apply(self, v, k, w):
        """v_k w, raising if the result weight exceeds the cutoff."""
        if isinstance(v, tuple):
            v = GradedVector.from_mono(self.voa, v)
        if isinstance(w, tuple):
            w = GradedVector.from_mono(self.voa, w)
        vmax = v.max_weight()
        wmax = w.max_weight()
        if vmax is not None and wmax is not None:
            result_wt = vmax + wmax - k - 1
            if result_wt > self.cutoff:
                raise TruncationError(
                    f"mode result weight {result_wt} exceeds module cutoff {self.cutoff}")
        return self.voa.mode(v, k, w)


def vertex_series(voa, v, w, lo, hi):
    """Y(v,x)w over the exponent window [lo, hi] as a vector-valued series."""
    if isinstance(v, tuple):
        v = GradedVector.from_mono(voa, v)
    if isinstance(w, tuple):
        w = GradedVector.from_mono(voa, w)
    from .laurent import TruncatedLaurent
    coeffs = {}
    for e in range(lo, hi + 1):
        c = voa.mode(v, -e - 1, w)
        if not c.is_zero():
            coeffs[e] = c
    return TruncatedLaurent(coeffs, lo, hi, True,
                            zero=GradedVector.zero(voa), vector_valued=True)


def weak_module_axiom_check(voa, u, v, w, p_window, q_window, mode_fn=None, cutoff=None):
    """Verify the commutator formula on the given mode windows.

    [u_p, v_q] w = sum_i C(p, i) (u_i v)_{p+q-i} w for all p in p_window,
    q in q_window.  Returns (verdict, witness); verdict is one of "pass",
    "fail", "inconclusive" (the latter when the window would leave the
    declared cutoff).
    """
    if isinstance(u, tuple):
        u = GradedVector.from_mono(voa, u)
    if isinstance(v, tuple):
        v = GradedVector.from_mono(voa, v)
    if isinstance(w, tuple):
        w = GradedVector.from_mono(voa, w)
    mode = mode_fn if mode_fn is not None else voa.mode
    wt_u = u.max_weight() or 0
    wt_v = v.max_weight() or 0
    wt_w = w.max_weight() or 0
    for p in p_window:
        for q in q_window:
            if cutoff is not None and wt_u + wt_v + wt_w - p - q - 2 > cutoff:
                return "inconclusive", {"p": p, "q": q, "reason": "window exceeds cutoff"}
            lhs = mode(u, p, mode(v, q, w)) - mode(v, q, mode(u, p, w))
            rhs = GradedVector.zero(voa)
            for i in range(0, wt_u + wt_v):
                ci = binom(p, i)
                if ci == 0:
                    continue
                uv = voa.mode(u, i, v)
                if uv.is_zero():
                    continue
                rhs = rhs + mode(uv, p + q - i, w).scale(ci)
            if lhs != rhs:
                return "fail", {"p": p, "q": q, "lhs": repr(lhs), "rhs": repr(rhs)}
    return "pass", None
