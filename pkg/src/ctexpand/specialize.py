"""Evaluation maps t -> a from Laurent matrices to matrices over finite fields.

For a a primitive (q^s+1)-st root of unity the image preserves the evaluated
form ``x^T B~ conj(y)`` (a unitary group); for a = -1 / +1 the twist is trivial
and the evaluated form is alternating / symmetric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ctcore import LMat
from .ff import FieldCtx, Fe, base_field, unit_root
from .laurent import evaluate


class SpecError(ValueError):
    pass


class FMat:
    """Square matrix over a finite field, entries stored as field codes."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FieldCtx, entries):
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise SpecError("FMat must be square")
        arr.setflags(write=False)
        self.ctx = ctx
        self.a = arr

    @classmethod
    def identity(cls, ctx, d):
        return cls(ctx, np.eye(d, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def __getitem__(self, ij):
        return int(self.a[ij])

    def __eq__(self, other):
        return isinstance(other, FMat) and self.ctx == other.ctx and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash(self.a.tobytes())

    def __matmul__(self, other: "FMat") -> "FMat":
        return FMat(self.ctx, matmul(self.ctx, self.a, other.a))

    def transpose(self) -> "FMat":
        return FMat(self.ctx, self.a.T)

    T = property(transpose)

    def map(self, fn) -> "FMat":
        return FMat(self.ctx, [[fn(int(x)) for x in r] for r in self.a])

    def is_identity(self) -> bool:
        return np.array_equal(self.a, np.eye(self.dim, dtype=np.int64))

    def det(self) -> int:
        F = self.ctx
        M = [[int(x) for x in r] for r in self.a]
        d = self.dim
        det = 1
        for c in range(d):
            piv = next((r for r in range(c, d) if M[r][c]), None)
            if piv is None:
                return 0
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                det = F.neg(det)
            det = F.mul(det, M[c][c])
            inv = F.inv(M[c][c])
            for r in range(c + 1, d):
                if M[r][c]:
                    f = F.mul(M[r][c], inv)
                    M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[c])]
        return det

    def inverse(self) -> "FMat":
        F = self.ctx
        d = self.dim
        M = [[int(x) for x in r] + [1 if i == j else 0 for j in range(d)] for i, r in enumerate(self.a)]
        for c in range(d):
            piv = next((r for r in range(c, d) if M[r][c]), None)
            if piv is None:
                raise SpecError("singular matrix")
            M[c], M[piv] = M[piv], M[c]
            inv = F.inv(M[c][c])
            M[c] = [F.mul(inv, x) for x in M[c]]
            for r in range(d):
                if r != c and M[r][c]:
                    f = M[r][c]
                    M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[c])]
        return FMat(F, [r[d:] for r in M])

    def text(self) -> str:
        return "\n".join(" ".join(self.ctx.fmt(int(x)) for x in r) for r in self.a)

    def __repr__(self):
        return f"FMat(\n{self.text()}\n)"


def matmul(ctx: FieldCtx, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product of (..., d, d) code arrays with a (d, d) or batched right factor."""
    if ctx.order <= 1 << 10:
        add, mul, _, _ = ctx.tables
        d = A.shape[-1]
        acc = mul[A[..., :, 0:1], B[..., 0:1, :]]
        for k in range(1, d):
            acc = add[acc, mul[A[..., :, k:k + 1], B[..., k:k + 1, :]]]
        return acc
    A2, B2 = np.asarray(A), np.asarray(B)
    if A2.ndim != 2 or B2.ndim != 2:
        raise SpecError("batched products need a tabulated field")
    d = A2.shape[0]
    out = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = ctx.add(acc, ctx.mul(int(A2[i, k]), int(B2[k, j])))
            out[i, j] = acc
    return out


def specialize(g: LMat, a: Fe) -> FMat:
    """Entrywise evaluation t -> a."""
    if not a:
        raise SpecError("cannot specialize at a = 0")
    return FMat(a.ctx, [[evaluate(x, a).code for x in r] for r in g.rows])


@dataclass(frozen=True)
class SpecContext:
    """Target of a specialisation: the field, the point a, and the evaluated form."""

    n: int
    q: int
    s: int  # 0 for the bilinear cases a = +1 / -1
    kind: str  # "unitary" | "symplectic" | "orthogonal"
    ctx: FieldCtx
    a: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def a_fe(self) -> Fe:
        return Fe(self.ctx, self.a)

    @property
    def base(self) -> FieldCtx:
        return base_field(self.q)

    def conj(self, x: int) -> int:
        if self.kind != "unitary":
            return x
        return self.ctx.pow(x, self.q**self.s)

    @cached_property
    def conj_map(self) -> np.ndarray:
        return np.array([self.conj(x) for x in range(self.ctx.order)], dtype=np.int64)

    def conj_mat(self, m: FMat) -> FMat:
        if self.kind != "unitary":
            return m
        if self.ctx.order <= 1 << 16:
            return FMat(self.ctx, self.conj_map[m.a])
        return m.map(self.conj)

    @cached_property
    def gram(self) -> FMat:
        n = self.n
        B = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for i in range(n):
            B[i, n + i] = self.a
            B[n + i, i] = 1
        return FMat(self.ctx, B)

    def header(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "q": self.q,
            "s": self.s,
            "p": self.ctx.p,
            "k": self.ctx.k,
            "modulus": list(self.ctx.modulus),
            "a": self.ctx.fmt(self.a),
            "gram": [[self.ctx.fmt(int(x)) for x in r] for r in self.gram.a],
        }

    def header_bytes(self) -> bytes:
        return json.dumps(self.header(), sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_header(cls, h: dict) -> "SpecContext":
        from .ff import FieldCtx as _FC

        ctx = _FC(h["p"], h["k"], tuple(h["modulus"]))
        return cls(h["n"], h["q"], h["s"], h["kind"], ctx, ctx.parse(h["a"]))


def unitary_context(n: int, q: int, s: int, a: int | None = None) -> SpecContext:
    """Context at the distinguished root of order q^s+1 (or an explicit override)."""
    ctx, root = unit_root(q, s)
    if a is not None:
        if a == 0 or ctx.mult_order(a) != q**s + 1:
            raise SpecError(f"override a={ctx.fmt(a)} is not a primitive (q^s+1)-st root of unity")
        root = Fe(ctx, a)
    return SpecContext(n, q, s, "unitary", ctx, root.code)


def bilinear_context(n: int, q: int, sign: int) -> SpecContext:
    """Context at a = -1 (alternating form) or a = +1 (symmetric form) in GF(q)."""
    if sign not in (1, -1):
        raise SpecError("sign must be +1 or -1")
    F = base_field(q)
    kind = "symplectic" if sign == -1 else "orthogonal"
    return SpecContext(n, q, 0, kind, F, F.from_int(sign))


def is_unitary(m: FMat, gram: FMat, conj) -> bool:
    """m^T B~ conj(m) == B~."""
    if m.dim != gram.dim:
        raise SpecError("dimension mismatch")
    cm = m.map(conj) if callable(conj) else conj
    return (m.T @ gram @ cm) == gram


def preserves(spec: SpecContext, m: FMat) -> bool:
    return (m.T @ spec.gram @ spec.conj_mat(m)) == spec.gram


def finite_transvection(spec: SpecContext, v: int, lam: int) -> FMat:
    """x -> x + lam beta~(x, v) v."""
    F = spec.ctx
    if spec.kind == "unitary" and F.add(spec.conj(lam), F.mul(spec.a, lam)) != 0:
        raise SpecError(f"lambda={F.fmt(lam)} is not admissible")
    d = spec.dim
    M = np.eye(d, dtype=np.int64)
    B = spec.gram.a
    for j in range(d):
        if B[j, v]:
            M[v, j] = F.add(int(M[v, j]), F.mul(lam, int(B[j, v])))
    return FMat(F, M)


@dataclass(frozen=True)
class BilinearReport:
    a: int
    alternating: bool
    symmetric: bool
    preserved: bool


def bilinear_specialize_check(g: LMat, q: int, sign: int) -> BilinearReport:
    n = g.dim // 2
    spec = bilinear_context(n, q, sign)
    m = specialize(g, spec.a_fe)
    B = spec.gram
    F = spec.ctx
    negT = B.T.map(F.neg)
    alternating = negT == B and all(int(B.a[i, i]) == 0 for i in range(B.dim))
    symmetric = B.T == B
    return BilinearReport(sign, alternating, symmetric, (m.T @ B @ m) == B)


def unitary_scalars(spec: SpecContext) -> list[int]:
    """Scalars c with c * conj(c) = 1, in code order."""
    F = spec.ctx
    return [c for c in range(1, F.order) if F.mul(c, spec.conj(c)) == 1]


def det_one_correction(spec: SpecContext, m: FMat) -> FMat:
    """c * m for the first unitary scalar c with det(c m) = 1."""
    F = spec.ctx
    det = m.det()
    for c in unitary_scalars(spec):
        if F.mul(F.pow(c, spec.dim), det) == 1:
            return FMat(F, [[F.mul(c, int(x)) for x in r] for r in m.a])
    raise SpecError("no unitary scalar corrects the determinant")


def hermitian_rescaling(spec: SpecContext) -> int:
    """c with c^(q^s - 1) = a such that c B~ is hermitian (transpose = conj)."""
    F = spec.ctx
    e = spec.q**spec.s - 1
    for c in range(1, F.order):
        if F.pow(c, e) != spec.a:
            continue
        H = FMat(F, [[F.mul(c, int(x)) for x in r] for r in spec.gram.a])
        if H.T == spec.conj_mat(H):
            return c
    raise SpecError("no hermitian rescaling found")


def classical_order(family: str, m: int, qhat: int) -> int:
    """Orders of SU_m(qhat), GU_m(qhat) and Sp_m(qhat)."""
    if m < 1 or qhat < 2:
        raise SpecError("invalid parameters")
    if family in ("SU", "GU"):
        order = qhat ** (m * (m - 1) // 2)
        for i in range(2, m + 1):
            order *= qhat**i - (-1) ** i
        return order * (qhat + 1) if family == "GU" else order
    if family == "Sp":
        if m % 2:
            raise SpecError("Sp needs even dimension")
        h = m // 2
        order = qhat ** (h * h)
        for i in range(1, h + 1):
            order *= qhat ** (2 * i) - 1
        return order
    raise SpecError(f"unknown family {family!r}")
