"""Laurent polynomials over GF(q) with the involution t <-> 1/t."""

from __future__ import annotations

from .ff import Fe, FieldCtx, base_field, embedding

MAX_EXPONENT = 10**6


class LaurentError(ValueError):
    pass


class LPoly:
    """Element of GF(q)[t, 1/t], stored densely on its support window.

    ``coeffs[i]`` is the coefficient (a code of ``field``) of ``t**(lo + i)``.
    The boundary coefficients are always nonzero; zero is the empty tuple with
    ``lo == 0``.
    """

    __slots__ = ("field", "lo", "coeffs", "_hash")

    def __init__(self, field: FieldCtx, lo: int, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        start = 0
        while start < len(cs) and cs[start] == 0:
            start += 1
        cs = cs[start:]
        lo = lo + start if cs else 0
        if cs and (abs(lo) > MAX_EXPONENT or abs(lo + len(cs) - 1) > MAX_EXPONENT):
            raise LaurentError("exponent window out of range")
        self.field = field
        self.lo = lo
        self.coeffs = tuple(cs)
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, field):
        return cls(field, 0, ())

    @classmethod
    def const(cls, field, c: int):
        return cls(field, 0, (c,))

    @classmethod
    def one(cls, field):
        return cls(field, 0, (1,))

    @classmethod
    def monomial(cls, field, e: int, c: int = 1):
        return cls(field, e, (c,))

    @classmethod
    def t(cls, field):
        return cls(field, 1, (1,))

    @classmethod
    def from_dict(cls, field, terms: dict[int, int]):
        if not terms:
            return cls.zero(field)
        lo, hi = min(terms), max(terms)
        return cls(field, lo, [terms.get(e, 0) for e in range(lo, hi + 1)])

    # structure
    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1 if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, e: int) -> int:
        i = e - self.lo
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def terms(self):
        """(exponent, code) pairs with nonzero code, ascending exponent."""
        return [(self.lo + i, c) for i, c in enumerate(self.coeffs) if c]

    def width(self) -> int:
        """hi - lo; bounds the number of nonzero roots of a nonzero polynomial."""
        return self.hi - self.lo if self.coeffs else 0

    def is_one(self) -> bool:
        return self.lo == 0 and self.coeffs == (1,)

    def __eq__(self, other):
        if not isinstance(other, LPoly):
            return NotImplemented
        return self.field == other.field and self.lo == other.lo and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.lo, self.coeffs))
        return self._hash

    # arithmetic
    def _check(self, other):
        if isinstance(other, int):
            return LPoly.const(self.field, self.field.from_int(other))
        if other.field != self.field:
            raise LaurentError("Laurent polynomials over different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        F = self.field
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = [0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.lo - lo + i] = c
        for i, c in enumerate(other.coeffs):
            j = other.lo - lo + i
            out[j] = F.add(out[j], c)
        return LPoly(F, lo, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return LPoly(F, self.lo, [F.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if not self.coeffs or not other.coeffs:
            return LPoly.zero(self.field)
        F = self.field
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return LPoly(F, self.lo + other.lo, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> "LPoly":
        F = self.field
        return LPoly(F, self.lo, [F.mul(c, x) for x in self.coeffs])

    def shift(self, e: int) -> "LPoly":
        """Multiply by t**e."""
        if not self.coeffs:
            return self
        return LPoly(self.field, self.lo + e, self.coeffs)

    def __pow__(self, e: int):
        if e < 0:
            if len(self.coeffs) != 1:
                raise LaurentError("only monomials are units")
            F = self.field
            return LPoly(F, self.lo * e, (F.pow(self.coeffs[0], e),))
        result = LPoly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __repr__(self):
        return f"LPoly({self})"

    def __str__(self):
        return format_lpoly(self)


def sigma(f: LPoly) -> LPoly:
    """The involution fixing GF(q) and swapping t and 1/t."""
    if not f.coeffs:
        return f
    return LPoly(f.field, -f.hi, tuple(reversed(f.coeffs)))


def evaluate(f: LPoly, a: Fe) -> Fe:
    """The specialisation t -> a, landing in a's field."""
    if not a:
        raise LaurentError("cannot evaluate a Laurent polynomial at 0")
    big = a.ctx
    emb = embedding(f.field, big)
    if not f.coeffs:
        return Fe(big, 0)
    acc = 0
    for c in reversed(f.coeffs):
        acc = big.add(big.mul(acc, a.code), emb[c])
    return Fe(big, big.mul(acc, big.pow(a.code, f.lo)))


def divide_exact(f: LPoly, g: LPoly) -> LPoly:
    """The quotient f/g in the Laurent ring; raises if g does not divide f."""
    if not g.coeffs:
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    F = f.field
    if not f.coeffs:
        return LPoly.zero(F)
    r = list(f.coeffs)
    d = list(g.coeffs)
    inv = F.inv(d[-1])
    dg = len(d) - 1
    if len(r) - 1 < dg:
        raise LaurentError(f"{g} does not divide {f}")
    quot = [0] * (len(r) - dg)
    for shift in range(len(r) - 1 - dg, -1, -1):
        c = F.mul(r[shift + dg], inv)
        quot[shift] = c
        if c:
            for j, b in enumerate(d):
                r[shift + j] = F.sub(r[shift + j], F.mul(c, b))
    if any(r):
        raise LaurentError(f"{g} does not divide {f}")
    return LPoly(F, f.lo - g.lo, quot)


def from_poly(field: FieldCtx, coeffs, lo: int = 0) -> LPoly:
    return LPoly(field, lo, coeffs)


def ring(q: int) -> tuple[FieldCtx, LPoly]:
    """Coefficient field GF(q) and the variable t."""
    F = base_field(q)
    return F, LPoly.t(F)


def _fmt_coeff(F: FieldCtx, c: int) -> str:
    return str(c) if F.k == 1 else F.fmt(c)


def format_lpoly(f: LPoly) -> str:
    """``c*t^e`` monomials in increasing exponent order; ``0`` for zero."""
    if not f.coeffs:
        return "0"
    return " + ".join(f"{_fmt_coeff(f.field, c)}*t^{e}" for e, c in f.terms())


def parse_lpoly(field: FieldCtx, text: str) -> LPoly:
    text = text.strip()
    if text == "0":
        return LPoly.zero(field)
    terms: dict[int, int] = {}
    for part in text.split(" + "):
        c, _, e = part.strip().partition("*t^")
        if not _:
            raise LaurentError(f"bad monomial {part!r}")
        code = field.parse(c) if c.startswith("[") else field.from_int(int(c))
        terms[int(e)] = field.add(terms.get(int(e), 0), code)
    return LPoly.from_dict(field, terms)
