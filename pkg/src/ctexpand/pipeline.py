"""End-to-end runs: generators -> specialisation -> group -> Cayley graph -> spectrum."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .cayley import (
    CayleyGraph,
    GroupTable,
    build_cayley,
    cache_name,
    enumerate_group,
    export,
    load_table,
    save_table,
    DEFAULT_LIMIT,
)
from .ctcore import Form, GenSet, build_generating_set
from .ff import base_field
from .specialize import (
    FMat,
    SpecContext,
    bilinear_context,
    classical_order,
    det_one_correction,
    specialize,
    unitary_context,
)
from .spectral import SpectralReport, expansion_report, snapshot_id

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    n: int = 2
    q: int = 2
    s: int = 1
    mode: str = "full-report"
    a: int | None = None  # explicit root-of-unity code override
    sign: int | None = None  # +1 / -1 selects the bilinear specialisations
    group: str = "full"  # full | det1 | l0
    limit: int = DEFAULT_LIMIT
    dense_max: int = 4096
    tol: float = 1e-8
    max_iter: int = 100000
    L: int = 10
    m: int = 3
    v: str = "e1"
    lam: str = "a"
    fmt: str = "edge-list"
    out: str | None = None
    cache_dir: str | None = None
    cache: bool = True
    seed: int = 0
    threads: int = 1

    def validate(self):
        from .ff import prime_power

        prime_power(self.q)
        if self.n < 2:
            raise ValueError("n must be at least 2 for group runs")
        if self.s < 1:
            raise ValueError("s must be positive")
        if self.limit < 1 or self.dense_max < 1 or self.L < 0 or self.threads < 1:
            raise ValueError("caps must be positive")
        if self.sign not in (None, 1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.group not in ("full", "det1", "l0"):
            raise ValueError(f"unknown group {self.group!r}")


def spec_for(cfg: RunConfig) -> SpecContext:
    if cfg.sign is not None:
        return bilinear_context(cfg.n, cfg.q, cfg.sign)
    return unitary_context(cfg.n, cfg.q, cfg.s, cfg.a)


def generator_images(cfg: RunConfig) -> tuple[SpecContext, GenSet, list[FMat]]:
    form = Form(cfg.n, cfg.q)
    S = build_generating_set(form)
    spec = spec_for(cfg)
    return spec, S, [specialize(g, spec.a_fe) for g in S.gens]


def _group_gens(cfg: RunConfig):
    spec, S, imgs = generator_images(cfg)
    if cfg.group == "det1":
        if spec.kind != "unitary":
            raise ValueError("the det-1 slice is defined for unitary specialisations")
        imgs = [det_one_correction(spec, m) for m in imgs]
    elif cfg.group == "l0":
        F = base_field(cfg.q)
        X, Y = FMat(F, S.x), FMat(F, S.y)
        if S.involution:
            return spec, ("x", "y", "y^-1"), [X, Y, Y.inverse()]
        return spec, ("x", "x^-1", "y", "y^-1"), [X, X.inverse(), Y, Y.inverse()]
    return spec, S.labels, imgs


def table_header(cfg: RunConfig, spec: SpecContext, imgs) -> dict:
    h = {"spec": spec.header(), "group": cfg.group, "gens": [m.text() for m in imgs]}
    h["p"], h["k"], h["modulus"] = imgs[0].ctx.p, imgs[0].ctx.k, list(imgs[0].ctx.modulus)
    return h


def cache_dir(cfg: RunConfig) -> Path | None:
    if not cfg.cache:
        return None
    d = cfg.cache_dir or os.environ.get("CTX_CACHE_DIR")
    if d is None and cfg.out:
        d = os.path.join(cfg.out, "cache")
    return Path(d) if d else None


def get_table(cfg: RunConfig) -> tuple[SpecContext, tuple, list[FMat], GroupTable]:
    spec, labels, imgs = _group_gens(cfg)
    header = table_header(cfg, spec, imgs)
    cdir = cache_dir(cfg)
    path = None
    if cdir is not None:
        tag = spec.kind if cfg.sign is None else f"{spec.kind}{'m' if cfg.sign < 0 else 'p'}"
        path = cdir / cache_name(f"{cfg.group}-{tag}", cfg.n, cfg.q, cfg.s if cfg.sign is None else 0)
        if path.exists():
            try:
                table = load_table(path)
            except Exception:  # unreadable cache is rebuilt
                table = None
            if table is not None and table.header == header:
                log.info("reusing cached table %s", path)
                return spec, labels, imgs, table
    table = enumerate_group(imgs, limit=cfg.limit, workers=cfg.threads, header=header)
    if path is not None:
        save_table(path, table)
    return spec, labels, imgs, table


def get_graph(cfg: RunConfig) -> tuple[SpecContext, GroupTable, CayleyGraph, list[FMat]]:
    spec, labels, imgs, table = get_table(cfg)
    return spec, table, build_cayley(table, imgs, labels), imgs


def element_dets(table: GroupTable, gens: list[FMat]) -> list[int]:
    """Determinants of all table elements, propagated along BFS edges."""
    F = table.ctx
    gd = [g.det() for g in gens]
    dets = [-1] * table.order
    dets[0] = 1
    right = table.right.tolist()
    for i, row in enumerate(right):
        di = dets[i]
        for j, c in enumerate(row):
            if dets[c] < 0:
                dets[c] = F.mul(di, gd[j])
    return dets


def det_counts(table: GroupTable, gens: list[FMat]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for d in element_dets(table, gens):
        counts[d] = counts.get(d, 0) + 1
    return counts


def group_summary(cfg: RunConfig, spec: SpecContext, table: GroupTable, gens: list[FMat]) -> dict:
    out = {"order": table.order, "layers": table.layer_sizes()}
    m = 2 * cfg.n
    if cfg.group == "l0":
        out["SL2_order"] = cfg.q * (cfg.q**2 - 1)
    elif spec.kind == "unitary":
        qh = cfg.q**cfg.s
        su, gu = classical_order("SU", m, qh), classical_order("GU", m, qh)
        out.update(
            det1_order=det_counts(table, gens).get(1, 0),
            SU_order=su,
            GU_order=gu,
            divisible_by_SU=table.order % su == 0,
            divides_GU=gu % table.order == 0,
        )
    elif spec.kind == "symplectic":
        out["Sp_order"] = classical_order("Sp", m, cfg.q)
    return out


def _round(x: float) -> float:
    return float(f"{x:.9f}")


def spectral_json(cfg: RunConfig, graph: CayleyGraph, rep: SpectralReport, sid: str) -> dict:
    return {
        "n": cfg.n,
        "q": cfg.q,
        "s": cfg.s,
        "N": rep.N,
        "k": rep.k,
        "lambda2": _round(rep.lambda2),
        "residual": float(f"{rep.residual:.3e}"),
        "gap": _round(rep.gap),
        "two_sided_gap": _round(rep.two_sided_gap),
        "bipartite": rep.bipartite,
        "c_exact": None if rep.c_exact is None else str(rep.c_exact),
        "snapshot_id": sid,
        "lambda_min": _round(rep.lambda_min),
        "method": rep.method,
        "iterations": rep.iterations,
        "seed": rep.seed,
        "group": cfg.group,
        "labels": list(graph.labels),
        "coincident_generators": [list(c) for c in graph.coincident],
    }


def graph_report(cfg: RunConfig) -> tuple[dict, CayleyGraph, GroupTable, SpecContext]:
    spec, table, graph, imgs = get_graph(cfg)
    rep = expansion_report(graph, tol=cfg.tol, seed=cfg.seed, max_iter=cfg.max_iter, dense_max=cfg.dense_max)
    sid = snapshot_id(table.to_bytes(), export(graph, "edge-list"))
    data = spectral_json(cfg, graph, rep, sid)
    data["group_summary"] = group_summary(cfg, spec, table, imgs)
    return data, graph, table, spec


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path: Path, data: bytes) -> None:
    import tempfile

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def full_report(cfg: RunConfig) -> dict:
    """Full image and det-1 slice reports; writes artifacts under cfg.out if set."""
    from dataclasses import replace

    main, g_full, t_full, spec = graph_report(replace(cfg, group="full"))
    out = dict(main)
    artifacts = {"graph-full.edges": export(g_full, "edge-list")}
    if spec.kind == "unitary":
        try:
            det1, g_det1, _, _ = graph_report(replace(cfg, group="det1"))
            out["det1_slice"] = det1
            artifacts["graph-det1.edges"] = export(g_det1, "edge-list")
        except ValueError as exc:
            out["det1_slice"] = {"error": str(exc)}
    if cfg.out:
        root = Path(cfg.out)
        for name, blob in artifacts.items():
            write_atomic(root / name, blob)
        write_atomic(root / "report.json", dumps(out).encode())
    return out
