"""Breadth-first enumeration of finite matrix groups and their Cayley graphs.

Elements are keyed by a canonical encoding: row-major entry codes, one byte
per entry for fields of order <= 256 (two little-endian bytes otherwise).
Each BFS layer is sorted by encoding before indices are assigned, so tables
are identical whatever the number of worker threads.
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .ff import FieldCtx
from .specialize import FMat, matmul

DEFAULT_LIMIT = 1 << 27
MAGIC = b"CTXG"
VERSION = 1
_CHUNK = 4096


class CapExceeded(RuntimeError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"group exceeds element cap {limit} (at least {count} elements found)")
        self.count = count
        self.limit = limit


class EnumError(ValueError):
    pass


def _dtype(ctx: FieldCtx):
    return np.uint8 if ctx.order <= 256 else np.dtype("<u2")


def encode(ctx: FieldCtx, m) -> bytes:
    arr = m.a if isinstance(m, FMat) else np.asarray(m)
    return np.ascontiguousarray(arr, dtype=_dtype(ctx)).tobytes()


@dataclass
class GroupTable:
    ctx: FieldCtx
    dim: int
    elements: np.ndarray  # (N, d, d) entry codes
    depth: np.ndarray  # (N,) BFS word length
    right: np.ndarray  # (N, ngens) index of element * generator
    header: dict = field(default_factory=dict)
    _index: dict | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    @property
    def ngens(self) -> int:
        return self.right.shape[1]

    @property
    def index(self) -> dict:
        if self._index is None:
            dt = _dtype(self.ctx)
            flat = np.ascontiguousarray(self.elements.reshape(len(self.elements), -1), dtype=dt)
            self._index = {row.tobytes(): i for i, row in enumerate(flat)}
        return self._index

    def element(self, i: int) -> FMat:
        return FMat(self.ctx, self.elements[i])

    def encoding(self, i: int) -> bytes:
        return encode(self.ctx, self.elements[i])

    def layer_sizes(self) -> list[int]:
        return np.bincount(self.depth).tolist()

    def __eq__(self, other):
        return (
            isinstance(other, GroupTable)
            and self.ctx == other.ctx
            and self.dim == other.dim
            and np.array_equal(self.elements, other.elements)
            and np.array_equal(self.depth, other.depth)
            and np.array_equal(self.right, other.right)
            and self.header == other.header
        )

    def to_bytes(self) -> bytes:
        return _pack_table(self, kind=0)

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupTable":
        table, _, _ = _unpack(data)
        return table


def _products(ctx, frontier, gens, dt, workers):
    """Encodings of frontier @ g for every generator, in (gen, row) order."""
    chunks = [frontier[i:i + _CHUNK] for i in range(0, len(frontier), _CHUNK)] or [frontier]

    def work(chunk):
        out = []
        for g in gens:
            P = matmul(ctx, chunk, g)
            flat = np.ascontiguousarray(P.reshape(len(chunk), -1), dtype=dt)
            out.append((P, [r.tobytes() for r in flat]))
        return out

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    per_gen = []
    for gi in range(len(gens)):
        mats = np.concatenate([r[gi][0] for r in results])
        keys = [k for r in results for k in r[gi][1]]
        per_gen.append((mats, keys))
    return per_gen


def enumerate_group(
    gens, limit: int = DEFAULT_LIMIT, workers: int = 1, header: dict | None = None, allow_identity: bool = False
) -> GroupTable:
    """The group generated by ``gens`` (FMat list), indexed in BFS order."""
    if not gens:
        raise EnumError("need at least one generator")
    ctx = gens[0].ctx
    d = gens[0].dim
    for g in gens:
        if g.ctx != ctx or g.dim != d:
            raise EnumError("generators must share field and dimension")
        if g.det() == 0:
            raise EnumError("generators must be invertible")
        if g.is_identity() and not allow_identity:
            raise EnumError("generator list contains the identity")
    G = [g.a for g in gens]
    dt = _dtype(ctx)
    ident = np.eye(d, dtype=np.int64)
    index = {encode(ctx, ident): 0}
    layers = [ident[None]]
    depths = [0]
    right_rows: list[np.ndarray] = []
    frontier = ident[None]
    level = 0
    while len(frontier):
        per_gen = _products(ctx, frontier, G, dt, workers)
        fresh: dict[bytes, np.ndarray] = {}
        for mats, keys in per_gen:
            for j, key in enumerate(keys):
                if key not in index and key not in fresh:
                    fresh[key] = mats[j]
        order = sorted(fresh)
        base = len(index)
        if base + len(order) > limit:
            raise CapExceeded(base + len(order), limit)
        for i, key in enumerate(order):
            index[key] = base + i
        right = np.empty((len(frontier), len(G)), dtype=np.int64)
        for gi, (_, keys) in enumerate(per_gen):
            right[:, gi] = [index[k] for k in keys]
        right_rows.append(right)
        level += 1
        frontier = np.array([fresh[k] for k in order], dtype=np.int64).reshape(-1, d, d)
        if len(frontier):
            layers.append(frontier)
            depths.extend([level] * len(frontier))
    elements = np.concatenate(layers).astype(dt)
    table = GroupTable(
        ctx,
        d,
        elements,
        np.array(depths, dtype=np.int64),
        np.concatenate(right_rows),
        {"p": ctx.p, "k": ctx.k, "modulus": list(ctx.modulus), **(header or {})},
    )
    table._index = index
    return table


def membership(table: GroupTable, m: FMat) -> int | None:
    return table.index.get(encode(table.ctx, m))


@dataclass
class CayleyGraph:
    """Right Cayley graph: edges {g, g s} for s in the generator set."""

    neighbors: np.ndarray  # (N, k), column j = right multiplication by generator j
    labels: tuple[str, ...]
    columns: tuple[int, ...] = ()
    table: GroupTable | None = None
    coincident: tuple[tuple[str, str], ...] = ()

    @property
    def N(self) -> int:
        return self.neighbors.shape[0]

    @property
    def k(self) -> int:
        return self.neighbors.shape[1]

    def sorted_neighbors(self, v: int) -> list[int]:
        return sorted(set(self.neighbors[v].tolist()))

    def adjacency(self) -> sp.csr_matrix:
        N, k = self.neighbors.shape
        rows = np.repeat(np.arange(N), k)
        A = sp.csr_matrix((np.ones(N * k), (rows, self.neighbors.ravel())), shape=(N, N))
        A.sum_duplicates()
        return A

    def edges(self) -> list[tuple[int, int]]:
        E = set()
        for u, row in enumerate(self.neighbors.tolist()):
            for v in row:
                if u != v:
                    E.add((min(u, v), max(u, v)))
        return sorted(E)

    def labelled_edges(self) -> list[tuple[int, int, str]]:
        seen = {}
        for u, row in enumerate(self.neighbors.tolist()):
            for j, v in enumerate(row):
                key = (min(u, v), max(u, v))
                if key not in seen:
                    seen[key] = self.labels[j]
        return [(u, v, lab) for (u, v), lab in sorted(seen.items())]

    def is_regular(self) -> bool:
        A = self.adjacency()
        deg = np.asarray(A.sum(axis=1)).ravel()
        return bool(np.all(deg == self.k))

    def is_symmetric(self) -> bool:
        A = self.adjacency()
        return (A != A.T).nnz == 0

    def has_self_loops(self) -> bool:
        return bool(np.any(self.neighbors == np.arange(self.N)[:, None]))

    def is_connected(self) -> bool:
        from scipy.sparse.csgraph import connected_components

        return connected_components(self.adjacency(), directed=False)[0] == 1

    def __eq__(self, other):
        if not isinstance(other, CayleyGraph):
            return NotImplemented
        same_table = (self.table is None and other.table is None) or (
            self.table is not None and other.table is not None and self.table == other.table
        )
        return (
            np.array_equal(self.neighbors, other.neighbors)
            and tuple(self.labels) == tuple(other.labels)
            and tuple(self.columns) == tuple(other.columns)
            and same_table
        )


def build_cayley(table: GroupTable, gens, labels=None) -> CayleyGraph:
    """Cayley graph of the enumerated group w.r.t. ``gens`` (the generators the
    table was built from).  Coincident images are merged, reducing k."""
    labels = tuple(labels or (f"g{i}" for i in range(len(gens))))
    if len(gens) != table.ngens:
        raise EnumError("generator list does not match the table")
    keys = [encode(table.ctx, g) for g in gens]
    ident = encode(table.ctx, np.eye(table.dim, dtype=np.int64))
    if ident in keys:
        raise EnumError("generator set contains the identity")
    cols, seen, coincident = [], {}, []
    for j, key in enumerate(keys):
        if key in seen:
            coincident.append((labels[seen[key]], labels[j]))
            continue
        seen[key] = j
        cols.append(j)
    for j in cols:
        inv = gens[j].inverse()
        if encode(table.ctx, inv) not in seen:
            raise EnumError(f"generator set is not symmetric ({labels[j]} has no inverse in it)")
    return CayleyGraph(
        np.ascontiguousarray(table.right[:, cols]),
        tuple(labels[j] for j in cols),
        tuple(cols),
        table,
        tuple(coincident),
    )


def graph_from_neighbors(neighbors, labels=None) -> CayleyGraph:
    """Wrap plain neighbor lists (one column per 'generator') as a graph."""
    nb = np.asarray(neighbors, dtype=np.int64)
    return CayleyGraph(nb, tuple(labels or (f"g{i}" for i in range(nb.shape[1]))), tuple(range(nb.shape[1])))


# --- export --------------------------------------------------------------------


def export(graph: CayleyGraph, fmt: str) -> bytes:
    if fmt == "edge-list":
        return "".join(f"{u} {v}\n" for u, v in graph.edges()).encode()
    if fmt == "dot":
        lines = ["graph cayley {"]
        lines += [f'  {u} -- {v} [label="{lab}"];' for u, v, lab in graph.labelled_edges()]
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "binary-cache":
        if graph.table is None:
            raise EnumError("binary cache needs the group table")
        out = bytearray(_pack_table(graph.table, kind=1))
        out += struct.pack("<I", len(graph.columns))
        out += struct.pack(f"<{len(graph.columns)}I", *graph.columns)
        lab = json.dumps(list(graph.labels), separators=(",", ":")).encode()
        out += struct.pack("<I", len(lab)) + lab
        co = json.dumps([list(c) for c in graph.coincident], separators=(",", ":")).encode()
        out += struct.pack("<I", len(co)) + co
        return bytes(out)
    raise EnumError(f"unknown export format {fmt!r}")


def import_graph(data: bytes) -> CayleyGraph:
    table, kind, off = _unpack(data)
    if kind != 1:
        raise EnumError("not a graph cache")
    (k,) = struct.unpack_from("<I", data, off)
    off += 4
    cols = struct.unpack_from(f"<{k}I", data, off)
    off += 4 * k
    (ln,) = struct.unpack_from("<I", data, off)
    off += 4
    labels = tuple(json.loads(data[off:off + ln]))
    off += ln
    (ln,) = struct.unpack_from("<I", data, off)
    off += 4
    coincident = tuple(tuple(c) for c in json.loads(data[off:off + ln]))
    return CayleyGraph(np.ascontiguousarray(table.right[:, list(cols)]), labels, tuple(cols), table, coincident)


def _pack_table(table: GroupTable, kind: int) -> bytes:
    hdr = dict(table.header)
    hdr.setdefault("p", table.ctx.p)
    hdr.setdefault("k", table.ctx.k)
    hdr.setdefault("modulus", list(table.ctx.modulus))
    hb = json.dumps(hdr, sort_keys=True, separators=(",", ":")).encode()
    dt = _dtype(table.ctx)
    eb = np.dtype(dt).itemsize
    N = len(table.elements)
    parts = [
        MAGIC,
        struct.pack("<BB", VERSION, kind),
        struct.pack("<I", len(hb)),
        hb,
        struct.pack("<QIII", N, table.dim, eb, table.ngens),
        np.ascontiguousarray(table.elements, dtype=dt).tobytes(),
        np.ascontiguousarray(table.depth, dtype="<u4").tobytes(),
        np.ascontiguousarray(table.right, dtype="<i4").tobytes(),
    ]
    return b"".join(parts)


def _unpack(data: bytes):
    if data[:4] != MAGIC:
        raise EnumError("bad magic")
    version, kind = struct.unpack_from("<BB", data, 4)
    if version != VERSION:
        raise EnumError(f"unsupported cache version {version}")
    (hl,) = struct.unpack_from("<I", data, 6)
    off = 10
    hdr = json.loads(data[off:off + hl])
    off += hl
    N, d, eb, ng = struct.unpack_from("<QIII", data, off)
    off += 20
    ctx = FieldCtx(hdr["p"], hdr["k"], tuple(hdr["modulus"]))
    dt = np.uint8 if eb == 1 else np.dtype("<u2")
    n_el = N * d * d * eb
    elements = np.frombuffer(data, dtype=dt, count=N * d * d, offset=off).reshape(N, d, d).copy()
    off += n_el
    depth = np.frombuffer(data, dtype="<u4", count=N, offset=off).astype(np.int64)
    off += 4 * N
    right = np.frombuffer(data, dtype="<i4", count=N * ng, offset=off).reshape(N, ng).astype(np.int64)
    off += 4 * N * ng
    table = GroupTable(ctx, d, elements, depth, right, hdr)
    return table, kind, off


def cache_name(prefix: str, n: int, q: int, s: int) -> str:
    return f"{prefix}-n{n}-q{q}-s{s}.grp"


def save_table(path, table: GroupTable) -> None:
    import os
    import tempfile

    data = table.to_bytes()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def load_table(path) -> GroupTable:
    with open(path, "rb") as fh:
        return GroupTable.from_bytes(fh.read())
