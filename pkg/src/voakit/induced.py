"""N-graded quotient families, degree-shift operators and induced modules.

The degree-n piece of the graded family is the cutoff model of the
quotient of W by the level-(n,m) shifted span; the degree-p operators act
on representatives through the shifted product and descend to the quotient
because they map each span into the target span (checked, not assumed).
The induced module from a finite module U over the level-m algebra is the
graded tensor product with the family, cut down by the right-action
relations over a finite generating corpus.
"""

from __future__ import annotations

from .errors import TruncationError, CutoffInconclusive, ParameterError
from .scalars import QQ, ZERO, binom
from .voa import GradedVector
from .subspace import (Ambient, SubspaceAtCutoff, QuotientView, SpanSolver,
                       _Echelon, annihilator, functional_span)
from .products import (build_span, bracket_star, bar_star_mn, dot_action,
                       omega_n, _homogeneous)
from .regular import vacuum_space, lr_zero_modes


# ---------------------------------------------------------------------------
# the diamond vacuum space, two ways

class DiamondSpace:
    """Level-(m,n) diamond vacuum model at a weight cutoff.

    ``functionals`` is the annihilator of the full shifted span (the
    tightest model); ``eigen_dim`` and ``window`` record the matched-window
    eigenvalue computation it was checked against.
    """

    def __init__(self, voa, m, n, cutoff, functionals, eigen_dim, window):
        self.voa = voa
        self.m = m
        self.n = n
        self.cutoff = cutoff
        self.functionals = functionals
        self.eigen_dim = eigen_dim
        self.window = window

    @property
    def dimension(self):
        return len(self.functionals)


def _dense_nullspace(rows, N):
    """Nullspace coefficient dicts for small dense systems over QQ."""
    ech = _Echelon()
    for row in rows:
        ech.insert({i: c for i, c in row.items() if c != 0})
    rref = ech.rref()
    pivots = sorted(rref)
    out = []
    for q in range(N):
        if q in rref:
            continue
        coef = {q: QQ(1)}
        for p in pivots:
            c = rref[p].get(q)
            if c:
                coef[p] = -c
        out.append(coef)
    return out


def vacuum_diamond(voa, m, n, D):
    """The diamond vacuum space, computed two independent ways.

    Route one: the eigenvalue-(n-m) conditions of the difference of the
    deformed conformal zero modes, imposed inside the level-(m,n) vacuum
    space on the window where those modes are visible (weights <=
    D-2-m-n).  Route two: the annihilator of the product span whose shift
    generators are restricted to the same window.  The two must agree
    exactly; the returned functionals are the annihilator of the full
    shifted span, which is contained in both.
    """
    VS = vacuum_space(voa, m, n, D)
    cut = D - 2 - m - n
    if cut < 0:
        raise ParameterError(f"cutoff {D} too small for the zero-mode window at (m={m}, n={n})")
    # route one: eigenvalue conditions inside the vacuum space
    conds = {}
    for i, f in enumerate(VS.functionals):
        left, right = lr_zero_modes(voa, f, m, n)
        g = right + left.scale(QQ(-1)) + f.restrict(min(cut, f.cutoff)).scale(QQ(m - n))
        for wt, piece in g.data.items():
            if wt > cut:
                continue
            for mono, c in piece.items():
                conds.setdefault((wt, mono), {})[i] = c
    eigen = []
    for coef in _dense_nullspace(conds.values(), len(VS.functionals)):
        g = None
        for i, c in coef.items():
            t = VS.functionals[i].scale(c)
            g = t if g is None else g + t
        eigen.append(g)
    # route two: annihilator of the window-matched shifted span
    ambient = Ambient(voa, D)
    ech = _Echelon(ambient.dim, screen=True)
    for p in VS.span.pivots:
        ech.insert(dict(VS.span.rows[p]))
    for lam in range(0, cut + 1):
        for mono in voa.basis(lam):
            b = GradedVector.from_mono(voa, mono)
            elt = voa.L(-1, b) + b.scale(QQ(lam + m - n))
            if not elt.is_zero():
                ech.insert(ambient.vector_to_row(elt))
    windowed = SubspaceAtCutoff(ambient, ech.rref(),
                                {"kind": "O_prime_windowed", "m": m, "n": n,
                                 "cutoff": D, "shift_window": cut})
    ann_windowed = annihilator(windowed)
    span_a = functional_span(eigen, D, voa) if eigen else None
    span_b = functional_span(ann_windowed, D, voa) if ann_windowed else None
    rank_a = span_a.rank if span_a else 0
    rank_b = span_b.rank if span_b else 0
    if rank_a != rank_b or (span_a and span_b and not span_a.same_span(span_b)):
        witness = eigen[0] if eigen else None
        raise CutoffInconclusive(
            f"diamond vacuum mismatch at (m={m}, n={n}, D={D}): "
            f"eigen route dim {rank_a}, windowed annihilator dim {rank_b}", witness)
    full = annihilator(build_span(voa, "O_prime", m, n, D, 0))
    return DiamondSpace(voa, m, n, D, full, rank_a, cut)


# ---------------------------------------------------------------------------
# the graded quotient family and its degree operators

class GradedQuotientFamily:
    """Degree pieces of W modulo the level-(n,m) shifted spans, n = 0..n_max.

    All spans share the ambient weight-(D+M) truncation; degree-p operators
    evaluate on representatives and reduce in the target piece.
    """

    def __init__(self, voa, m, n_max, D, M):
        self.voa = voa
        self.m = m
        self.n_max = n_max
        self.D = D
        self.M = M
        self.spans = {n: build_span(voa, "O_prime", m, n, D, M)
                      for n in range(n_max + 1)}
        self.views = {n: QuotientView(self.spans[n]) for n in range(n_max + 1)}
        self.ambient = Ambient(voa, D + M)

    def piece_dimension(self, n):
        if n < 0:
            return 0
        return self.views[n].dimension

    def reduce(self, n, vec):
        """Canonical representative of the class of vec in piece n."""
        if n < 0:
            return GradedVector.zero(self.voa)
        return self.views[n].project(vec)

    def vp_action(self, u, p, n, vec, check_representative=False):
        """The degree-p operator of u: piece n -> piece n+p.

        Evaluates the shifted product on the representative and reduces in
        the target; with check_representative, a second representative
        (shifted by a span basis row) must give the same class.
        """
        if n < 0 or n > self.n_max:
            raise ParameterError(f"piece {n} outside family range")
        if n + p < 0:
            return GradedVector.zero(self.voa)
        if n + p > self.n_max:
            raise ParameterError(f"target piece {n + p} outside family range")
        img = bracket_star(self.voa, u, p, vec, self.m, n)
        mw = img.max_weight()
        if mw is not None and mw > self.ambient.cutoff:
            raise TruncationError(
                f"degree-{p} image supported at weight {mw} beyond ambient {self.ambient.cutoff}")
        if check_representative and self.spans[n].rank:
            alt = self.spans[n].basis_vectors()[0]
            img2 = bracket_star(self.voa, u, p, vec + alt, self.m, n)
            diff = img2 - img
            if not self.spans[n + p].contains(diff):
                raise CutoffInconclusive(
                    f"degree-{p} operator not representative-independent at piece {n} "
                    f"(margin {self.M} insufficient)", witness=diff)
        return self.reduce(n + p, img)

    def commutator_defect(self, u, v, a, b, n, w):
        """[u-op(a), v-op(b)] minus the iterate expansion, on piece n.

        u, v homogeneous; a, b are degree shifts; w a representative.
        Returns the primal defect vector whose class in piece n+a+b must
        vanish.
        """
        wtu = u.max_weight()
        P = wtu - 1 - a
        t1 = bracket_star(self.voa, u, a, bracket_star(self.voa, v, b, w, self.m, n),
                          self.m, n + b)
        t2 = bracket_star(self.voa, v, b, bracket_star(self.voa, u, a, w, self.m, n),
                          self.m, n + a)
        rhs = GradedVector.zero(self.voa)
        wtv = v.max_weight()
        for i in range(0, wtu + wtv):
            ci = binom(P, i)
            if ci == 0:
                continue
            uv = self.voa.mode(u, i, v)
            if uv.is_zero():
                continue
            for _, comp in _homogeneous(uv):
                rhs = rhs + bracket_star(self.voa, comp, a + b, w, self.m, n).scale(ci)
        return t1 - t2 - rhs


# ---------------------------------------------------------------------------
# finite modules over the level-m algebra and induction

class FiniteAmModule:
    """Finite-dimensional module over the level-m quotient algebra model.

    ``vectors`` label a basis; ``act(v, j)`` gives the action of (the class
    of) v on basis vector j as a coefficient list.
    """

    def __init__(self, voa, m, dim, act, label=""):
        self.voa = voa
        self.m = m
        self.dim = dim
        self.act = act
        self.label = label

    def action_matrix(self, v):
        """Column-major action matrix of v on the module."""
        return [self.act(v, j) for j in range(self.dim)]


def omega_module(voa, m, D, vbound=None):
    """Omega_m of the adjoint module at cutoff, as a finite module.

    The action is the zero-mode product; images are asserted to stay in
    the computed space.
    """
    span = omega_n(voa, m, D, vbound)
    basis = span.basis_vectors()

    def act(v, j):
        img = dot_action(voa, v, basis[j])
        ok, coords = span.member(img)
        if not ok:
            raise CutoffInconclusive(
                f"zero-mode action leaves the computed level-{m} vacuum space", witness=img)
        return coords

    mod = FiniteAmModule(voa, m, len(basis), act, label=f"omega_{m}")
    mod.basis_vectors = basis
    mod.span = span
    return mod


class InducedModule:
    """Degree pieces of the induced module from U along the family.

    Each piece is (classes of weight-<=rep_bound vectors) tensor U modulo
    the right-action relations over the corpus; piece data records the
    chosen class representatives and the quotient projector.
    """

    def __init__(self, family, U, rep_bound, corpus_bound):
        self.family = family
        self.U = U
        self.rep_bound = rep_bound
        self.corpus_bound = corpus_bound
        voa = family.voa
        m = family.m
        self.pieces = {}
        corpus = [GradedVector.from_mono(voa, mono)
                  for wt in range(0, corpus_bound + 1) for mono in voa.basis(wt)]
        for n in range(family.n_max + 1):
            span = family.spans[n]
            # class representatives: weight-<=rep_bound monomials with
            # independent residues, with coordinate recovery
            reps = []
            solver = SpanSolver(span.ambient.dim)
            for wt in range(0, rep_bound + 1):
                for mono in voa.basis(wt):
                    b = GradedVector.from_mono(voa, mono)
                    residue, _ = span.reduce_row(span.ambient.vector_to_row(b))
                    if residue and solver.try_add(residue):
                        reps.append(b)
            # relation rows in (reps x U)-coordinates; a relation whose left
            # class cannot be expressed at this bound is skipped and counted
            # (the model is corpus-bounded, never silently truncated)
            dimT = len(reps) * U.dim
            relations = []
            skipped = 0
            for s in corpus:
                mats = U.action_matrix(s)
                for bi, b in enumerate(reps):
                    prod = bar_star_mn(voa, s, b, m, n)
                    mw = prod.max_weight()
                    coords = None
                    if mw is None or mw <= span.ambient.cutoff:
                        residue, _ = span.reduce_row(span.ambient.vector_to_row(prod))
                        coords = solver.solve(residue)
                    if coords is None:
                        skipped += 1
                        continue
                    # [s *bar b] (x) e_j - [b] (x) (s . e_j)
                    for j in range(U.dim):
                        row = {}
                        for ci, c in enumerate(coords):
                            if c:
                                row[ci * U.dim + j] = c
                        for i2, c in enumerate(mats[j]):
                            if c:
                                row[bi * U.dim + i2] = row.get(bi * U.dim + i2, ZERO) - c
                        if row:
                            relations.append(row)
            null = _Echelon()
            for row in relations:
                null.insert(row)
            rref = null.rref()
            free = [q for q in range(dimT) if q not in rref]
            self.pieces[n] = {
                "reps": reps,
                "solver": solver,
                "relations": rref,
                "dimension": len(free),
                "free": free,
                "skipped_relations": skipped,
            }

    def dimension(self, n):
        return self.pieces[n]["dimension"]

    def class_coordinates(self, n, vec, uindex):
        """Coordinates of [vec] (x) e_uindex in the piece-n quotient."""
        piece = self.pieces[n]
        span = self.family.spans[n]
        residue, _ = span.reduce_row(span.ambient.vector_to_row(vec))
        coords = piece["solver"].solve(residue)
        if coords is None:
            raise CutoffInconclusive(f"vector class outside the piece-{n} model", witness=vec)
        row = {}
        for ci, c in enumerate(coords):
            if c:
                row[ci * self.U.dim + uindex] = c
        # reduce modulo the relation span
        rref = piece["relations"]
        for p in sorted(rref):
            c = row.get(p)
            if not c:
                continue
            for q, v in rref[p].items():
                w = row.get(q, ZERO) - c * v
                if w:
                    row[q] = w
                elif q in row:
                    del row[q]
        return [row.get(q, ZERO) for q in piece["free"]]


def induce(voa, U, m, n_max, D, M, rep_bound, corpus_bound):
    family = GradedQuotientFamily(voa, m, n_max, D, M)
    return family, InducedModule(family, U, rep_bound, corpus_bound)


# ---------------------------------------------------------------------------
# the universal-property maps

def F_nm(voa, v, u_vec, psi, m, n):
    """Res_x x^{m-n-1} Y(x^{L(0)} v, x) psi(u) = v_{wt v+m-n-1} psi(u)."""
    w = psi(u_vec)
    out = GradedVector.zero(voa)
    for wtv, comp in _homogeneous(v):
        out = out + voa.mode(comp, wtv + m - n - 1, w)
    return out
