"""Matrices over GF(q)[t, 1/t], the twisted form, and the explicit generators.

Basis order is fixed as (e_1..e_n, f_1..f_n).  The form is
``beta(x, y) = x^T B sigma(y)`` with ``B[e_i, f_i] = t`` and ``B[f_i, e_i] = 1``;
matrices act on column coordinate vectors.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from .ff import (
    Fe,
    FieldCtx,
    base_field,
    conj,
    min_poly,
    prime_power,
    solve_mod_p,
    subfield_coords,
    embedding,
    unit_root,
)
from .laurent import LPoly, divide_exact, evaluate, format_lpoly, sigma

log = logging.getLogger(__name__)


class CTError(ValueError):
    pass


class LMat:
    """Square matrix over a Laurent ring; immutable."""

    __slots__ = ("field", "rows", "_hash")

    def __init__(self, field: FieldCtx, rows):
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise CTError("matrix must be square")
        self._hash = None

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, field, d):
        z, o = LPoly.zero(field), LPoly.one(field)
        return cls(field, [[o if i == j else z for j in range(d)] for i in range(d)])

    @classmethod
    def from_constants(cls, field, rows):
        return cls(field, [[LPoly.const(field, c) for c in r] for r in rows])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, LMat) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __matmul__(self, other: "LMat") -> "LMat":
        d = self.dim
        if other.dim != d:
            raise CTError("dimension mismatch")
        cols = list(zip(*other.rows))
        zero = LPoly.zero(self.field)
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for x, y in zip(r, c):
                    if x.coeffs and y.coeffs:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return LMat(self.field, out)

    __mul__ = __matmul__

    def __add__(self, other):
        return LMat(self.field, [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return LMat(self.field, [[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def transpose(self) -> "LMat":
        return LMat(self.field, list(zip(*self.rows)))

    T = property(transpose)

    def sigma(self) -> "LMat":
        return LMat(self.field, [[sigma(x) for x in r] for r in self.rows])

    def is_identity(self) -> bool:
        return self == LMat.identity(self.field, self.dim)

    def det(self) -> LPoly:
        """Fraction-free (Bareiss) elimination; exact in the Laurent ring."""
        d = self.dim
        M = [list(r) for r in self.rows]
        sign = 1
        prev = LPoly.one(self.field)
        for k in range(d - 1):
            if not M[k][k]:
                swap = next((i for i in range(k + 1, d) if M[i][k]), None)
                if swap is None:
                    return LPoly.zero(self.field)
                M[k], M[swap] = M[swap], M[k]
                sign = -sign
            for i in range(k + 1, d):
                for j in range(k + 1, d):
                    M[i][j] = divide_exact(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
            prev = M[k][k]
        det = M[d - 1][d - 1]
        return det if sign == 1 else -det

    def entry_text(self) -> str:
        return "\n".join(" | ".join(format_lpoly(x) for x in r) for r in self.rows)

    def __repr__(self):
        return f"LMat(\n{self.entry_text()}\n)"


@dataclass(frozen=True)
class Form:
    """The sigma-sesquilinear form of half-rank n over GF(q)[t, 1/t]."""

    n: int
    q: int

    @property
    def field(self) -> FieldCtx:
        return base_field(self.q)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def e(self, i: int) -> int:
        """Basis index of e_i (1-based i)."""
        return i - 1

    def f(self, i: int) -> int:
        return self.n + i - 1

    def basis_label(self, idx: int) -> str:
        return f"e{idx + 1}" if idx < self.n else f"f{idx - self.n + 1}"

    def basis_index(self, label: str) -> int:
        kind, i = label[0], int(label[1:])
        if kind not in "ef" or not 1 <= i <= self.n:
            raise CTError(f"bad basis vector {label!r}")
        return self.e(i) if kind == "e" else self.f(i)

    @property
    def gram(self) -> LMat:
        F, n = self.field, self.n
        t, one, z = LPoly.t(F), LPoly.one(F), LPoly.zero(F)
        rows = [[z] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            rows[i][n + i] = t
            rows[n + i][i] = one
        return LMat(F, rows)

    def basis_vector(self, idx: int) -> list[LPoly]:
        F = self.field
        return [LPoly.one(F) if j == idx else LPoly.zero(F) for j in range(self.dim)]


def form_value(form: Form, x, y) -> LPoly:
    """beta(x, y) = x^T B sigma(y)."""
    d = form.dim
    if len(x) != d or len(y) != d:
        raise CTError("vector length must be 2n")
    n = form.n
    t = LPoly.t(form.field)
    acc = LPoly.zero(form.field)
    for i in range(n):
        acc = acc + t * x[i] * sigma(y[n + i]) + x[n + i] * sigma(y[i])
    return acc


def is_form_preserving(form: Form, g: LMat) -> bool:
    B = form.gram
    return g.T @ B @ g.sigma() == B


@dataclass(frozen=True)
class MembershipReport:
    form_preserving: bool
    det_one: bool
    det: LPoly

    @property
    def member(self) -> bool:
        return self.form_preserving and self.det_one


def is_gtau_member(form: Form, g: LMat) -> MembershipReport:
    det = g.det()
    return MembershipReport(is_form_preserving(form, g), det.is_one(), det)


def form_inverse(form: Form, g: LMat) -> LMat:
    """Inverse of a form-preserving matrix: sigma(B)^-1 sigma(g)^T sigma(B)."""
    F, n = form.field, form.n
    sB = form.gram.sigma()
    t, one, z = LPoly.t(F), LPoly.one(F), LPoly.zero(F)
    # sigma(B) has 1/t at (e_i, f_i) and 1 at (f_i, e_i); its inverse swaps roles.
    rows = [[z] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][n + i] = one
        rows[n + i][i] = t
    sBinv = LMat(F, rows)
    inv = sBinv @ g.sigma().T @ sB
    if not (inv @ g).is_identity():
        raise CTError("matrix does not preserve the form; no cheap inverse")
    return inv


def shift_generator(form: Form) -> LMat:
    """e_i -> e_{i+1}, f_i -> f_{i+1}, e_n -> f_1, f_n -> t^-1 e_1."""
    n = form.n
    if n < 2:
        raise CTError("shift generator needs n >= 2")
    F = form.field
    z = LPoly.zero(F)
    rows = [[z] * (2 * n) for _ in range(2 * n)]
    one = LPoly.one(F)
    for i in range(1, n):
        rows[form.e(i + 1)][form.e(i)] = one
        rows[form.f(i + 1)][form.f(i)] = one
    rows[form.f(1)][form.e(n)] = one
    rows[form.e(1)][form.f(n)] = LPoly.monomial(F, -1)
    return LMat(F, rows)


def _mat2_det(F: FieldCtx, A) -> int:
    return F.sub(F.mul(A[0][0], A[1][1]), F.mul(A[0][1], A[1][0]))


def _mat2_mul(F, A, B):
    return tuple(
        tuple(F.add(F.mul(A[i][0], B[0][j]), F.mul(A[i][1], B[1][j])) for j in range(2)) for i in range(2)
    )


def _mat2_inv_transpose(F, A):
    # A has det 1: A^-1 = [[d, -b], [-c, a]], transposed.
    (a, b), (c, d) = A
    return ((d, F.neg(c)), (F.neg(b), a))


def l0_embed(form: Form, A) -> LMat:
    """diag(A, I, A^-T, I) acting on span(e_1, e_2) and span(f_1, f_2)."""
    F = form.field
    A = tuple(tuple(int(x) for x in r) for r in A)
    if _mat2_det(F, A) != 1:
        raise CTError("L0 element must have determinant 1")
    n = form.n
    rows = [[1 if i == j else 0 for j in range(2 * n)] for i in range(2 * n)]
    At = _mat2_inv_transpose(F, A)
    for i in range(2):
        for j in range(2):
            rows[i][j] = A[i][j]
            rows[n + i][n + j] = At[i][j]
    return LMat.from_constants(F, rows)


def sl2_elements(F: FieldCtx):
    """SL_2(GF(q)) in lexicographic order of row-major entry codes."""
    for a, b, c, d in itertools.product(range(F.order), repeat=4):
        if F.sub(F.mul(a, d), F.mul(b, c)) == 1:
            yield ((a, b), (c, d))


def sl2_order(q: int) -> int:
    return q * (q * q - 1)


def _generated_order(F, gens, cap):
    ident = ((1, 0), (0, 1))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = _mat2_mul(F, g, h)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
                    if len(seen) > cap:
                        return len(seen)
        frontier = nxt
    return len(seen)


@dataclass(frozen=True)
class GenSet:
    gens: tuple[LMat, ...]
    labels: tuple[str, ...]
    symmetric: bool
    note: str
    x: tuple = None
    y: tuple = None
    involution: bool = True

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)


def find_sl2_pair(q: int):
    """First (x, y) in lexicographic order generating SL_2(q), x an involution if possible.

    Returns (x, y, involution_found).
    """
    F = base_field(q)
    order = sl2_order(q)
    ident = ((1, 0), (0, 1))
    elems = list(sl2_elements(F))
    involutions = [g for g in elems if g != ident and _mat2_mul(F, g, g) == ident]
    for xs, inv_flag in ((involutions, True), (elems, False)):
        for x in xs:
            if x == ident:
                continue
            for y in elems:
                if y in (ident, x):
                    continue
                if _generated_order(F, [x, y], order) == order:
                    return x, y, inv_flag
    raise CTError(f"no generating pair found for SL_2({q})")  # pragma: no cover


def build_generating_set(form: Form) -> GenSet:
    """S = {x, y, y^-1, s, s^-1}, or {x, x^-1, y, y^-1, s, s^-1} without an involution."""
    n = form.n
    if n < 2:
        raise CTError("generating set needs n >= 2")
    F = form.field
    x, y, has_inv = find_sl2_pair(form.q)
    X, Y = l0_embed(form, x), l0_embed(form, y)
    s = shift_generator(form)
    Yi, Si = form_inverse(form, Y), form_inverse(form, s)
    if has_inv:
        gens, labels = (X, Y, Yi, s, Si), ("x", "y", "y^-1", "s", "s^-1")
        note = f"x involution, y from lexicographic search over SL_2({form.q})"
    else:
        Xi = form_inverse(form, X)
        gens = (X, Xi, Y, Yi, s, Si)
        labels = ("x", "x^-1", "y", "y^-1", "s", "s^-1")
        note = f"SL_2({form.q}) has no non-central involution; 6-element symmetric fallback"
        log.warning(note)
    ident = LMat.identity(F, form.dim)
    if any(g == ident for g in gens):  # pragma: no cover
        raise CTError("generating set contains the identity")
    return GenSet(gens, labels, True, note, x, y, has_inv)


# --- lifting transvections -----------------------------------------------------


def is_admissible(lam: Fe, a: Fe, q: int, s: int) -> bool:
    return (conj(lam, q, s) + a * lam).code == 0


def lift_conditions(Fpoly: LPoly, lam: Fe, a: Fe) -> tuple[bool, bool]:
    """(F(a) == lam, sigma(F) + t F == 0)."""
    t = LPoly.t(Fpoly.field)
    return evaluate(Fpoly, a) == lam, (sigma(Fpoly) + t * Fpoly).is_zero()


@dataclass
class FSolution:
    F: LPoly
    P: LPoly
    G: LPoly
    H: LPoly | None
    fallback: bool = False
    reason: str = ""


def _h_formula(G: LPoly, s: int) -> LPoly:
    Fq = G.field
    if G.is_zero():
        return LPoly.zero(Fq)
    l = G.hi
    terms: dict[int, int] = {}
    for j in range(-l - 2 * s, -s):
        terms[j] = Fq.add(terms.get(j, 0), 1)
    for i in range(-s + 1, l + 1):
        terms[i - 1] = Fq.add(terms.get(i - 1, 0), Fq.sub(G.coeff(i), 1))
    return LPoly.from_dict(Fq, terms)


def solve_F_chain(lam: Fe, a: Fe, q: int, s: int) -> FSolution:
    """P -> G -> H -> F construction of a Laurent polynomial F with
    F(a) = lam and sigma(F) + t F = 0."""
    if not is_admissible(lam, a, q, s):
        raise CTError(f"lambda={lam} is not admissible (conj(lam) + a lam != 0)")
    ctx = a.ctx
    Fq = base_field(q)
    t = LPoly.t(Fq)
    powers = [ctx.pow(a.code, i) for i in range(2 * s)]
    coords = subfield_coords(powers, lam.code, Fq, ctx)
    if coords is None:  # pragma: no cover
        raise CTError("powers of a do not span GF(q^2s)")
    P = LPoly(Fq, 0, coords)
    fa = LPoly(Fq, 0, min_poly(a, q))
    if len(fa.coeffs) != 2 * s + 1:
        raise CTError(f"minimal polynomial of a has degree {len(fa.coeffs) - 1}, expected {2 * s}")
    G = divide_exact(sigma(P) + t * P, fa)
    if sigma(G) != G.shift(2 * s - 1):
        raise CTError("sigma(G) != t^(2s-1) G; upstream identity broken")
    H = _h_formula(G, s)
    ok = sigma(H).shift(-2 * s) + t * H == G
    if ok:
        F = P - fa * H
        if all(lift_conditions(F, lam, a)):
            return FSolution(F, P, G, H)
    F = solve_F_linear(lam, a, q, s)
    return FSolution(F, P, G, H, fallback=True, reason="H formula did not satisfy its defining identity")


def solve_F(lam: Fe, a: Fe, q: int, s: int) -> LPoly:
    return solve_F_chain(lam, a, q, s).F


def solve_F_linear(lam: Fe, a: Fe, q: int, s: int, window: tuple[int, int] | None = None) -> LPoly:
    """Bounded-window linear solve for F; independent of the P/G/H chain."""
    if not is_admissible(lam, a, q, s):
        raise CTError(f"lambda={lam} is not admissible")
    ctx = a.ctx
    Fq = base_field(q)
    p, e = prime_power(q)
    L = 2 * s - 1
    lo, hi = window or (-2 * s - L, L)
    exps = list(range(lo, hi + 1))
    pos = {x: i for i, x in enumerate(exps)}
    nvar = len(exps) * e
    emb = embedding(Fq, ctx)
    basis = [emb[p**m] for m in range(e)]
    rows, rhs = [], []
    # F(a) = lam, one equation per GF(p)-digit of GF(q^2s)
    cols = []
    for x in exps:
        ax = ctx.pow(a.code, x)
        for b in basis:
            cols.append(ctx.digits(ctx.mul(b, ax)))
    for r, target in enumerate(ctx.digits(lam.code)):
        rows.append([c[r] for c in cols])
        rhs.append(target)
    # sigma(F) + t F = 0: coefficient of t^i is c_{-i} + c_{i-1}
    seen = set()
    for x in exps:
        partner = -1 - x
        key = frozenset((x, partner))
        if key in seen:
            continue
        seen.add(key)
        for m in range(e):
            row = [0] * nvar
            row[pos[x] * e + m] += 1
            if partner in pos:
                row[pos[partner] * e + m] += 1
            rows.append(row)
            rhs.append(0)
    sol = solve_mod_p(rows, rhs, p)
    if sol is None:
        raise CTError("no solution in the given window")
    coeffs = [Fq.from_digits(sol[i * e:(i + 1) * e]) for i in range(len(exps))]
    return LPoly(Fq, lo, coeffs)


def transvection_matrix(form: Form, v: int, Fpoly: LPoly) -> LMat:
    """x -> x + F beta(x, v) v, i.e. I + F v B[:, v]^T."""
    B = form.gram
    d = form.dim
    rows = [list(r) for r in LMat.identity(form.field, d).rows]
    for j in range(d):
        b = B[j, v]
        if b:
            rows[v][j] = rows[v][j] + Fpoly * b
    return LMat(form.field, rows)


def lift_transvection(form: Form, v: int, lam: Fe, a: Fe, q: int, s: int) -> LMat:
    """Lift of the finite transvection T_v(lam) to the Laurent ring."""
    if not 0 <= v < form.dim:
        raise CTError(f"basis index {v} out of range")
    Fpoly = solve_F(lam, a, q, s)
    return transvection_matrix(form, v, Fpoly)


def form_defect(form: Form, Fpoly: LPoly, v: int, x, y) -> LPoly:
    """beta(x, y) - beta(Phi x, Phi y) for Phi = transvection_matrix(v, F)."""
    Phi = transvection_matrix(form, v, Fpoly)

    def act(vec):
        return [sum((Phi[i, j] * vec[j] for j in range(form.dim)), LPoly.zero(form.field)) for i in range(form.dim)]

    return form_value(form, x, y) - form_value(form, act(x), act(y))


# --- eventual faithfulness ----------------------------------------------------


def specialize_entries(g: LMat, a: Fe) -> list[list[int]]:
    return [[evaluate(x, a).code for x in r] for r in g.rows]


def trivial_specializations(g: LMat, q: int, s_max: int) -> tuple[list[int], int]:
    """s <= s_max at which g evaluates to the identity, and a root-count bound.

    The bound is the smallest support width among nonzero entries of g - I:
    any such entry vanishes at no more than that many nonzero points, so g
    can become trivial under at most that many specialisations.
    """
    ident = LMat.identity(g.field, g.dim)
    if g == ident:
        raise CTError("g is the identity")
    diff = g - ident
    bound = min(x.width() for r in diff.rows for x in r if x)
    hits = []
    for s in range(1, s_max + 1):
        _, a = unit_root(q, s)
        ev = specialize_entries(g, a)
        if all(ev[i][j] == (1 if i == j else 0) for i in range(g.dim) for j in range(g.dim)):
            hits.append(s)
    return hits, bound
