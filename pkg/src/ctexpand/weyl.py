"""Growth of the affine symmetric group and the Poincare series it satisfies.

An element of the affine Weyl group of type A~_{m-1} is stored by its window
(u(1), ..., u(m)): integers distinct mod m summing to m(m+1)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

MAX_LENGTH = 14


class WeylError(ValueError):
    pass


@dataclass(frozen=True)
class AffinePerm:
    window: tuple[int, ...]

    def __post_init__(self):
        m = len(self.window)
        if m < 2:
            raise WeylError("period must be at least 2")
        if sorted(x % m for x in self.window) != list(range(m)):
            raise WeylError(f"window {self.window} is not a bijection mod {m}")
        if sum(self.window) != m * (m + 1) // 2:
            raise WeylError(f"window {self.window} has the wrong sum")

    @property
    def m(self) -> int:
        return len(self.window)

    @classmethod
    def identity(cls, m: int) -> "AffinePerm":
        return cls(tuple(range(1, m + 1)))

    def __call__(self, i: int) -> int:
        m = self.m
        q, r = divmod(i - 1, m)
        return self.window[r] + q * m

    def act(self, i: int) -> "AffinePerm":
        """Right multiplication by the Coxeter generator s_i (0 <= i < m)."""
        w = list(self.window)
        m = self.m
        if i == 0:
            w[0], w[-1] = w[-1] - m, w[0] + m
        else:
            w[i - 1], w[i] = w[i], w[i - 1]
        return AffinePerm(tuple(w))


def length_by_inversions(u: AffinePerm) -> int:
    """Coxeter length as the affine inversion count sum_{i<j} |floor((u(j)-u(i))/m)|."""
    m = u.m
    w = u.window
    return sum(abs((w[j] - w[i]) // m) for i in range(m) for j in range(i + 1, m))


@dataclass(frozen=True)
class SeriesCoeffs:
    coeffs: tuple[int, ...]
    provenance: str

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, d):
        return self.coeffs[d]


def coxeter_ball(m: int, L: int) -> dict[AffinePerm, int]:
    """All elements of length <= L with their BFS distance from the identity."""
    if m < 2:
        raise WeylError("period must be at least 2")
    e = AffinePerm.identity(m)
    dist = {e: 0}
    frontier = [e]
    for d in range(1, L + 1):
        nxt = []
        for u in frontier:
            for i in range(m):
                v = u.act(i)
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def coxeter_growth_bfs(m: int, L: int, max_length: int = MAX_LENGTH) -> SeriesCoeffs:
    """Number of elements at each Cayley distance 0..L under the m Coxeter generators."""
    if L > max_length:
        raise WeylError(f"length {L} exceeds the configured cap {max_length}")
    if L < 0:
        raise WeylError("length must be nonnegative")
    counts = [0] * (L + 1)
    for d in coxeter_ball(m, L).values():
        counts[d] += 1
    return SeriesCoeffs(tuple(counts), "bfs")


def poincare_formula(n: int, L: int) -> SeriesCoeffs:
    """Coefficients of (1 - x^(n+1)) / (1 - x)^(n+1) up to x^L."""
    if n < 1:
        raise WeylError("n must be positive")
    return SeriesCoeffs(tuple(comb(d + n, n) - comb(d - 1, n) if d >= 1 else 1 for d in range(L + 1)), "formula")


def poincare_closed_form(n: int, x: Fraction) -> Fraction:
    return (1 - x ** (n + 1)) / (1 - x) ** (n + 1)


def covolume_partial_sums(n: int, q: int, L: int) -> list[Fraction]:
    """sum_{d <= D} coeff(d) q^-d for D = 0..L, exactly."""
    if q < 2 or n < 1:
        raise WeylError("need q >= 2 and n >= 1")
    coeffs = poincare_formula(n, L).coeffs
    x = Fraction(1, q)
    out, acc, xp = [], Fraction(0), Fraction(1)
    for c in coeffs:
        acc += c * xp
        out.append(acc)
        xp *= x
    return out


def finite_differences(seq, order: int) -> list:
    for _ in range(order):
        seq = [b - a for a, b in zip(seq, seq[1:])]
    return list(seq)
