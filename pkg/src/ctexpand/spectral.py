"""Expansion measurements for regular graphs.

All floating point in the package lives here.  Exact vertex expansion is a
brute-force scan over subsets (tiny graphs only); large graphs get spectral
certificates from an iterative solver restricted to the complement of the
constant vector.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

DENSE_MAX = 4096
EXACT_MAX = 24


class SpectralError(RuntimeError):
    pass


class NotConverged(SpectralError):
    def __init__(self, estimate, residual, iterations):
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


def adjacency(graph) -> sp.csr_matrix:
    if hasattr(graph, "adjacency"):
        return graph.adjacency()
    if sp.issparse(graph):
        return sp.csr_matrix(graph, dtype=float)
    return sp.csr_matrix(np.asarray(graph, dtype=float))


def _degree(A) -> float:
    deg = np.asarray(A.sum(axis=1)).ravel()
    if not np.allclose(deg, deg[0]):
        raise SpectralError("graph is not regular")
    return float(deg[0])


def spectrum_dense(graph, max_n: int = DENSE_MAX) -> np.ndarray:
    """All adjacency eigenvalues, descending."""
    A = adjacency(graph)
    if A.shape[0] > max_n:
        raise SpectralError(f"{A.shape[0]} vertices exceeds the dense bound {max_n}")
    return np.linalg.eigvalsh(A.toarray())[::-1]


@dataclass
class IterativeResult:
    estimate: float
    residual: float
    iterations: int
    seed: int
    method: str


def _start_vector(N, seed):
    v = np.random.default_rng(seed).standard_normal(N)
    v -= v.mean()
    return v / np.linalg.norm(v)


def lambda2_power(graph, tol: float = 1e-8, max_iter: int = 100000, seed: int = 0) -> IterativeResult:
    """Power iteration on A + kI, projected off the constant vector each step."""
    A = adjacency(graph)
    k = _degree(A)
    N = A.shape[0]
    v = _start_vector(N, seed)
    mu, res = 0.0, np.inf
    for it in range(1, max_iter + 1):
        Av = A @ v
        mu = float(v @ Av)
        res = float(np.linalg.norm(Av - mu * v))
        if res <= tol:
            return IterativeResult(mu, res, it, seed, "power")
        w = Av + k * v
        w -= w.mean()
        v = w / np.linalg.norm(w)
    raise NotConverged(mu, res, max_iter)


def _lanczos_top(matvec, v0, tol, max_iter, m_max=80):
    """Top eigenpair of a symmetric operator by restarted Lanczos with full
    reorthogonalisation.  Returns (theta, vector, residual, matvecs)."""
    v = v0 / np.linalg.norm(v0)
    used = 0
    theta, y, res = 0.0, v, np.inf
    while used < max_iter:
        V = [v]
        alphas, betas = [], []
        w = None
        for j in range(m_max):
            w = matvec(V[j])
            used += 1
            a = float(V[j] @ w)
            alphas.append(a)
            Vm = np.array(V)
            w = w - Vm.T @ (Vm @ w)
            w = w - Vm.T @ (Vm @ w)
            b = float(np.linalg.norm(w))
            if b < 1e-12 or used >= max_iter:
                break
            if j >= 1 and j % 4 == 0:
                th, sv = eigh_tridiagonal(np.array(alphas), np.array(betas))
                if b * abs(sv[-1, -1]) <= tol / 10:
                    break
            betas.append(b)
            V.append(w / b)
        m = len(alphas)
        th, sv = eigh_tridiagonal(np.array(alphas), np.array(betas[: m - 1]))
        y = np.array(V[:m]).T @ sv[:, -1]
        y /= np.linalg.norm(y)
        Ay = matvec(y)
        used += 1
        theta = float(y @ Ay)
        res = float(np.linalg.norm(Ay - theta * y))
        if res <= tol:
            return theta, y, res, used
        v = y
    raise NotConverged(theta, res, used)


def lambda2_iterative(graph, tol: float = 1e-8, max_iter: int = 100000, seed: int = 0) -> IterativeResult:
    """Largest adjacency eigenvalue orthogonal to the constant vector.

    Lanczos on A - (2k+1) J/N: the constant vector is pushed to eigenvalue
    -k-1, below the whole spectrum, so the top eigenpair of the shifted
    operator is (lambda_2, v) exactly.  The residual is measured against A.
    """
    A = adjacency(graph)
    k = _degree(A)
    N = A.shape[0]
    if N <= 2:
        ev = spectrum_dense(A)
        return IterativeResult(float(ev[min(1, N - 1)]), 0.0, 0, seed, "dense")
    c = 2 * k + 1

    def matvec(x):
        return A @ x - c * x.mean()

    theta, y, _, used = _lanczos_top(matvec, _start_vector(N, seed), tol, max_iter)
    y = y - y.mean()
    y /= np.linalg.norm(y)
    Ay = A @ y
    mu = float(y @ Ay)
    return IterativeResult(mu, float(np.linalg.norm(Ay - mu * y)), used, seed, "lanczos")


def lambda_min_iterative(graph, tol: float = 1e-8, max_iter: int = 100000, seed: int = 0) -> IterativeResult:
    """Smallest adjacency eigenvalue (top of -A)."""
    A = adjacency(graph)
    N = A.shape[0]
    if N <= 2:
        ev = spectrum_dense(A)
        return IterativeResult(float(ev[-1]), 0.0, 0, seed, "dense")
    theta, y, res, used = _lanczos_top(lambda x: -(A @ x), _start_vector(N, seed + 1), tol, max_iter)
    return IterativeResult(-theta, res, used, seed, "lanczos")


def _neighbor_masks(A) -> list[int]:
    A = sp.csr_matrix(A)
    masks = []
    for i in range(A.shape[0]):
        m = 0
        for j in A.indices[A.indptr[i]:A.indptr[i + 1]]:
            m |= 1 << int(j)
        masks.append(m)
    return masks


def vertex_expansion_exact(graph, max_n: int = EXACT_MAX) -> Fraction:
    """min over nonempty proper A of |dA| / ((1 - |A|/N) |A|), dA the vertex boundary."""
    A = adjacency(graph)
    N = A.shape[0]
    if N > max_n:
        raise SpectralError(f"{N} vertices exceeds the exhaustive bound {max_n}")
    if N < 2:
        raise SpectralError("need at least two vertices")
    masks = np.array(_neighbor_masks(A), dtype=np.uint32)
    total = 1 << N
    nbr = np.zeros(total, dtype=np.uint32)
    for i in range(N):
        lo = 1 << i
        # subsets whose highest vertex is i
        nbr[lo:2 * lo] = nbr[0:lo] | masks[i]
    subsets = np.arange(total, dtype=np.uint32)
    boundary = np.bitwise_count(nbr & ~subsets).astype(np.int64)
    size = np.bitwise_count(subsets).astype(np.int64)
    best = None
    for a in range(1, N):
        mb = int(boundary[size == a].min())
        ratio = Fraction(mb * N, (N - a) * a)
        if best is None or ratio < best:
            best = ratio
    return best


@dataclass
class SpectralReport:
    N: int
    k: int
    lambda2: float
    lambda_min: float
    method: str
    residual: float
    iterations: int
    seed: int
    gap: float
    two_sided_gap: float
    bipartite: bool
    edge_expansion_bound: float
    c_exact: Fraction | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["c_exact"] = None if self.c_exact is None else str(self.c_exact)
        return d


def expansion_report(graph, tol: float = 1e-8, seed: int = 0, max_iter: int = 100000, dense_max: int = DENSE_MAX) -> SpectralReport:
    A = adjacency(graph)
    N = A.shape[0]
    k = _degree(A)
    if N <= dense_max:
        ev = spectrum_dense(A, dense_max)
        lam2 = float(ev[1]) if N > 1 else float(ev[0])
        lmin = float(ev[-1])
        method, res, iters = "dense", 0.0, 0
    else:
        r = lambda2_iterative(A, tol, max_iter, seed)
        lam2, res, iters, method = r.estimate, r.residual, r.iterations, r.method
        lmin = lambda_min_iterative(A, tol, max_iter, seed).estimate
    bip = abs(lmin + k) <= 1e-6
    c_exact = vertex_expansion_exact(A) if N <= EXACT_MAX else None
    return SpectralReport(
        N=N,
        k=int(round(k)),
        lambda2=lam2,
        lambda_min=lmin,
        method=method,
        residual=res,
        iterations=iters,
        seed=seed,
        gap=k - lam2,
        two_sided_gap=min(k - lam2, k - abs(lmin)),
        bipartite=bip,
        edge_expansion_bound=(k - lam2) / 2,
        c_exact=c_exact,
    )


def snapshot_id(*blobs: bytes) -> str:
    h = hashlib.sha256()
    for b in blobs:
        h.update(b)
    return h.hexdigest()[:16]
