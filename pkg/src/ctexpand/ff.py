"""Exact arithmetic in finite fields GF(p^k).

Elements are stored as integer codes: the coefficient vector
(c_0, ..., c_{k-1}) of the polynomial-basis representation packed as
``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``.  The moduli are chosen
deterministically (first irreducible in code order) so every run, and every
downstream snapshot, sees the same field.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

DEFAULT_MAX_ORDER = 1 << 20
TABLE_MAX_ORDER = 1 << 10


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise FieldError(f"{q} is not a prime power")
    p = fs[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return p, e


# --- dense polynomials over GF(p), coefficient lists low degree first -------


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _trim(out)


def poly_divmod(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    g = _trim(list(g))
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim(list(f))
    inv = pow(g[-1], p - 2, p)
    dg = len(g) - 1
    q = [0] * max(len(r) - dg, 0)
    while len(r) - 1 >= dg and r:
        shift = len(r) - 1 - dg
        c = r[-1] * inv % p
        q[shift] = c
        for j, b in enumerate(g):
            r[shift + j] = (r[shift + j] - c * b) % p
        _trim(r)
    return _trim(q), r


def poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, poly_divmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], p - 2, p)
        f = [c * inv % p for c in f]
    return f


def _powmod_x(e: int, f: list[int], p: int) -> list[int]:
    """x^e mod f over GF(p)."""
    result = [1]
    base = poly_divmod([0, 1], f, p)[1]
    while e:
        if e & 1:
            result = poly_divmod(poly_mul(result, base, p), f, p)[1]
        base = poly_divmod(poly_mul(base, base, p), f, p)[1]
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's irreducibility test for a polynomial over GF(p)."""
    f = _trim(list(f))
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if f[0] == 0:
        return False

    def minus_x(h):
        h = list(h) + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        return _trim(h)

    if minus_x(_powmod_x(p**k, f, p)):
        return False
    for r in prime_factors(k):
        h = minus_x(_powmod_x(p ** (k // r), f, p))
        if not h or len(poly_gcd(h, f, p)) != 1:
            return False
    return True


def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    """First monic irreducible of degree k, scanning lower coefficients in code order."""
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")


# --- field context ------------------------------------------------------------


class FieldCtx:
    """The field GF(p^k) = GF(p)[x]/(modulus).

    Immutable after construction; arithmetic works on integer codes.  Small
    fields (order <= 1024) also carry numpy addition/multiplication tables,
    which the group enumerator uses for vectorised matrix products.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)
        self.order = p**k
        self._pows = [p**i for i in range(k)]

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    # codes <-> digits
    def digits(self, x: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.k):
            x, r = divmod(x, p)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        ds = list(ds)
        if len(ds) > self.k:
            ds = poly_divmod(ds, list(self.modulus), self.p)[1]
        return sum((d % self.p) * self._pows[i] for i, d in enumerate(ds))

    def __call__(self, x) -> "Fe":
        if isinstance(x, Fe):
            return x
        if isinstance(x, (list, tuple)):
            return Fe(self, self.from_digits(x))
        return Fe(self, self.from_int(x))

    def from_int(self, n: int) -> int:
        """Image of the integer n (prime-field element)."""
        return n % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    # arithmetic on codes
    def add(self, x: int, y: int) -> int:
        p = self.p
        if self.k == 1:
            return (x + y) % p
        if p == 2:
            return x ^ y
        dx, dy = self.digits(x), self.digits(y)
        return sum(((a + b) % p) * w for a, b, w in zip(dx, dy, self._pows))

    def neg(self, x: int) -> int:
        p = self.p
        if self.k == 1:
            return (-x) % p
        if p == 2:
            return x
        return sum(((-a) % p) * w for a, w in zip(self.digits(x), self._pows))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        p = self.p
        if self.k == 1:
            return x * y % p
        if x == 0 or y == 0:
            return 0
        if p == 2:
            r = 0
            a = x
            b = y
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
            mod = sum(c << i for i, c in enumerate(self.modulus))
            k = self.k
            for i in range(r.bit_length() - 1, k - 1, -1):
                if (r >> i) & 1:
                    r ^= mod << (i - k)
            return r
        prod = poly_mul(self.digits(x), self.digits(y), p)
        return self.from_digits(poly_divmod(prod, list(self.modulus), p)[1])

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x = self.inv(x)
            e = -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(x, self.order - 2)

    def frob(self, x: int, e: int = 1) -> int:
        """x^(p^e)."""
        return self.pow(x, self.p**e)

    def mult_order(self, x: int) -> int:
        if x == 0:
            raise FieldError("zero has no multiplicative order")
        n = self.order - 1
        for r in prime_factors(self.order - 1):
            while n % r == 0 and self.pow(x, n // r) == 1:
                n //= r
        return n

    @functools.cached_property
    def generator(self) -> int:
        """First element in code order with multiplicative order p^k - 1."""
        for x in range(1, self.order):
            if self.mult_order(x) == self.order - 1:
                return x
        raise FieldError("no generator found")  # pragma: no cover

    @functools.cached_property
    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(add, mul, neg, inv) lookup tables indexed by code."""
        if self.order > TABLE_MAX_ORDER:
            raise FieldError(f"tables only built for order <= {TABLE_MAX_ORDER}")
        Q = self.order
        codes = np.arange(Q)
        dig = np.stack([(codes // w) % self.p for w in self._pows], axis=1)
        w = np.array(self._pows)
        add = ((dig[:, None, :] + dig[None, :, :]) % self.p) @ w
        neg = ((-dig) % self.p) @ w
        mul = np.zeros((Q, Q), dtype=np.int64)
        for x in range(Q):
            for y in range(x, Q):
                mul[x, y] = mul[y, x] = self.mul(x, y)
        inv = np.zeros(Q, dtype=np.int64)
        for x in range(1, Q):
            inv[x] = int(np.nonzero(mul[x] == 1)[0][0])
        for t in (add, mul, neg, inv):
            t.setflags(write=False)
        return add.astype(np.int64), mul, neg.astype(np.int64), inv

    def elements(self):
        return range(self.order)

    def fmt(self, x: int) -> str:
        """Report form: coefficient digits, most significant last, e.g. ``[1,1]``."""
        return "[" + ",".join(str(d) for d in self.digits(x)) + "]"

    def parse(self, text: str) -> int:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise FieldError(f"bad field element text {text!r}")
        body = text[1:-1].strip()
        ds = [int(v) for v in body.split(",")] if body else []
        if len(ds) > self.k or any(not 0 <= d < self.p for d in ds):
            raise FieldError(f"bad field element text {text!r}")
        return self.from_digits(ds)


@dataclass(frozen=True)
class Fe:
    """A field element with operator overloading; thin wrapper over a code."""

    ctx: FieldCtx
    code: int

    def _c(self, other):
        if isinstance(other, Fe):
            if other.ctx != self.ctx:
                raise FieldError("elements of different fields")
            return other.code
        return self.ctx.from_int(int(other))

    def __add__(self, other):
        return Fe(self.ctx, self.ctx.add(self.code, self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Fe(self.ctx, self.ctx.sub(self.code, self._c(other)))

    def __rsub__(self, other):
        return Fe(self.ctx, self.ctx.sub(self._c(other), self.code))

    def __mul__(self, other):
        return Fe(self.ctx, self.ctx.mul(self.code, self._c(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Fe(self.ctx, self.ctx.neg(self.code))

    def __truediv__(self, other):
        return Fe(self.ctx, self.ctx.mul(self.code, self.ctx.inv(self._c(other))))

    def __pow__(self, e: int):
        return Fe(self.ctx, self.ctx.pow(self.code, e))

    def inverse(self) -> "Fe":
        return Fe(self.ctx, self.ctx.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, Fe):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.code))

    def __repr__(self):
        return self.ctx.fmt(self.code)

    @property
    def digits(self) -> list[int]:
        return self.ctx.digits(self.code)


@functools.lru_cache(maxsize=None)
def field_create(p: int, k: int, max_order: int = DEFAULT_MAX_ORDER) -> FieldCtx:
    """GF(p^k) with the first irreducible modulus in code order."""
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if p**k > max_order:
        raise FieldError(f"field order {p}^{k} exceeds bound {max_order}")
    return FieldCtx(p, k, first_irreducible(p, k))


def base_field(q: int) -> FieldCtx:
    p, e = prime_power(q)
    return field_create(p, e)


@functools.lru_cache(maxsize=None)
def embedding(small: FieldCtx, big: FieldCtx) -> tuple[int, ...]:
    """Code map GF(p^e) -> GF(p^k) for e | k, sending x to the first root
    (in code order) of small's modulus among big's GF(p^e)-subfield."""
    if small.p != big.p or big.k % small.k:
        raise FieldError(f"{small} does not embed in {big}")
    if small.k == 1:
        return tuple(range(small.p))
    h = big.pow(big.generator, (big.order - 1) // (small.order - 1))
    sub = sorted({big.pow(h, i) for i in range(small.order - 1)})
    root = None
    for z in sub:
        acc = 0
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, z), big.from_int(c))
        if acc == 0:
            root = z
            break
    if root is None:  # pragma: no cover
        raise FieldError("no root of modulus in subfield")
    images = []
    for x in range(small.order):
        acc = 0
        for d in reversed(small.digits(x)):
            acc = big.add(big.mul(acc, root), big.from_int(d))
        images.append(acc)
    return tuple(images)


def unit_root(q: int, s: int) -> tuple[FieldCtx, Fe]:
    """GF(q^{2s}) and its distinguished primitive (q^s+1)-st root of unity."""
    if s < 1:
        raise FieldError("s must be positive")
    p, e = prime_power(q)
    ctx = field_create(p, 2 * e * s)
    m = q**s + 1
    a = ctx.pow(ctx.generator, (ctx.order - 1) // m)
    if ctx.mult_order(a) != m:  # pragma: no cover
        raise FieldError("unit root has wrong order")
    return ctx, Fe(ctx, a)


def conj(lam: Fe | int, q: int, s: int, ctx: FieldCtx | None = None):
    """Galois conjugation lam -> lam^(q^s) of GF(q^{2s}) (sends a to a^-1)."""
    if isinstance(lam, Fe):
        return Fe(lam.ctx, lam.ctx.pow(lam.code, q**s))
    return ctx.pow(lam, q**s)


def min_poly(alpha: Fe, q: int) -> tuple[int, ...]:
    """Minimal polynomial of alpha over GF(q), as codes of GF(q) (low degree first, monic)."""
    big = alpha.ctx
    small = base_field(q)
    emb = embedding(small, big)
    back = {v: i for i, v in enumerate(emb)}
    conjs = [alpha.code]
    while True:
        nxt = big.pow(conjs[-1], q)
        if nxt == alpha.code:
            break
        conjs.append(nxt)
    poly = [1]
    for c in conjs:
        # multiply by (t - c)
        out = [0] * (len(poly) + 1)
        for i, v in enumerate(poly):
            out[i + 1] = big.add(out[i + 1], v)
            out[i] = big.sub(out[i], big.mul(v, c))
        poly = out
    try:
        return tuple(back[v] for v in poly)
    except KeyError:  # pragma: no cover
        raise FieldError("minimal polynomial has coefficients outside GF(q)")


def admissible_lambdas(ctx: FieldCtx, a: int, q: int, s: int) -> list[int]:
    """All lam in GF(q^{2s}) with conj(lam) + a*lam = 0, in code order."""
    e = q**s
    out = []
    for lam in range(ctx.order):
        if ctx.add(ctx.pow(lam, e), ctx.mul(a, lam)) == 0:
            out.append(lam)
    return out


def enumerate_monic(p: int, k: int):
    """All monic polynomials of degree k over GF(p), in code order."""
    for low in itertools.product(range(p), repeat=k):
        yield list(reversed(low)) + [1]


def solve_mod_p(rows: list[list[int]], rhs: list[int], p: int) -> list[int] | None:
    """One solution of rows @ x = rhs over GF(p) (free variables set to 0), or None."""
    m = len(rows)
    nvar = len(rows[0]) if rows else 0
    aug = [[v % p for v in r] + [b % p] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(nvar):
        piv = next((i for i in range(r, m) if aug[i][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][col], p - 2, p)
        aug[r] = [v * inv % p for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(vi - f * vr) % p for vi, vr in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    if any(row[-1] for row in aug[r:]):
        return None
    x = [0] * nvar
    for i, col in enumerate(pivots):
        x[col] = aug[i][-1]
    return x


def subfield_coords(values: list[int], target: int, small: FieldCtx, big: FieldCtx) -> list[int] | None:
    """Codes c_i of ``small`` with sum emb(c_i) * values[i] == target, or None."""
    emb = embedding(small, big)
    basis = [emb[small.p**m] for m in range(small.k)]
    cols = []
    for v in values:
        for b in basis:
            cols.append(big.digits(big.mul(b, v)))
    rows = [[col[r] for col in cols] for r in range(big.k)]
    x = solve_mod_p(rows, big.digits(target), big.p)
    if x is None:
        return None
    e = small.k
    return [small.from_digits(x[i * e:(i + 1) * e]) for i in range(len(values))]
