"""Command line entry point.

    ctexpand --mode full-report --n 2 --q 2 --s 1 --out run/
    ctexpand full-report n=2 q=2 s=1
    ctexpand growth m=3 L=10
    ctexpand lift q=2 s=1 v=e1 lambda=a

Exit codes: 0 success, 2 invalid configuration, 3 cap exceeded, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import pipeline
from .cayley import CapExceeded, export
from .ctcore import CTError, Form, lift_transvection, solve_F_chain
from .ff import Fe, FieldError
from .laurent import LaurentError, format_lpoly
from .pipeline import RunConfig, dumps
from .specialize import SpecError, preserves
from .spectral import SpectralError, vertex_expansion_exact
from .weyl import WeylError, coxeter_growth_bfs, covolume_partial_sums, poincare_closed_form, poincare_formula

MODES = ("lift", "specialize", "enumerate", "graph", "spectrum", "cheeger", "growth", "covolume", "full-report")
EXIT_INVALID, EXIT_CAP, EXIT_IO = 2, 3, 4

log = logging.getLogger("ctexpand")




def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctexpand", description="Laurent-ring generators, finite specialisations and Cayley graph expansion")
    p.add_argument("positional", nargs="*", help="optional mode followed by key=value overrides")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--a", help="override the root of unity (field element text, e.g. [0,1])")
    p.add_argument("--sign", type=int, choices=(1, -1), help="specialise at a=+1 or a=-1 instead")
    p.add_argument("--group", choices=("full", "det1", "l0"))
    p.add_argument("--limit", type=int)
    p.add_argument("--dense-max", type=int, dest="dense_max")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--seed", type=int)
    p.add_argument("--L", type=int, dest="L")
    p.add_argument("--m", type=int)
    p.add_argument("--v", help="basis vector for lift, e.g. e1 or f2")
    p.add_argument("--lambda", dest="lam", help="'a' or field element text")
    p.add_argument("--format", dest="fmt", choices=("edge-list", "dot", "binary-cache"))
    p.add_argument("--out")
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--no-cache", dest="no_cache", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _coerce(key: str, value: str):
    key = {"lambda": "lam", "format": "fmt", "cache-dir": "cache_dir", "max-iter": "max_iter", "dense-max": "dense_max"}.get(key, key)
    types = {f.name: f.type for f in fields(RunConfig)}
    if key == "no_cache":
        return "cache", value.lower() not in ("1", "true", "yes")
    if key not in types:
        raise ValueError(f"unknown config key {key!r}")
    t = str(types[key])
    if key == "a":
        return key, value
    if t.startswith("int"):
        return key, int(value)
    if t.startswith("float"):
        return key, float(value)
    if t.startswith("bool"):
        return key, value.lower() in ("1", "true", "yes")
    return key, value


def _read_config(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        k, sep, v = line.partition("=")
        if not sep:
            raise ValueError(f"bad config line {line!r}")
        key, val = _coerce(k.strip(), v.strip())
        out[key] = val
    return out


def config_from_args(argv=None) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        values.update(_read_config(args.config))
    pos = list(args.positional)
    if pos and "=" not in pos[0]:
        values["mode"] = pos.pop(0)
    for tok in pos:
        k, sep, v = tok.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {tok!r}")
        key, val = _coerce(k, v)
        values[key] = val
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if args.mode:
        values["mode"] = args.mode
    if args.no_cache:
        values["cache"] = False
    raw_a = values.pop("a", None)
    cfg = RunConfig(**values)
    if cfg.mode not in MODES:
        raise ValueError(f"unknown mode {cfg.mode!r}")
    if raw_a is not None:
        spec = pipeline.unitary_context(cfg.n, cfg.q, cfg.s)
        cfg = replace(cfg, a=spec.ctx.parse(str(raw_a)))
    if cfg.mode not in ("growth", "covolume"):
        cfg.validate()
    return cfg, args


def _emit(cfg: RunConfig, name: str, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode()
    if cfg.out:
        pipeline.write_atomic(Path(cfg.out) / name, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def run_lift(cfg: RunConfig) -> None:
    spec = pipeline.unitary_context(cfg.n, cfg.q, cfg.s, cfg.a)
    form = Form(cfg.n, cfg.q)
    v = form.basis_index(cfg.v)
    a = spec.a_fe
    lam = a if cfg.lam == "a" else Fe(spec.ctx, spec.ctx.parse(cfg.lam))
    sol = solve_F_chain(lam, a, cfg.q, cfg.s)
    Phi = lift_transvection(form, v, lam, a, cfg.q, cfg.s)
    lines = [
        f"a = {spec.ctx.fmt(a.code)}",
        f"lambda = {spec.ctx.fmt(lam.code)}",
        f"F = {format_lpoly(sol.F)}",
        f"fallback = {str(sol.fallback).lower()}",
        f"Phi_{cfg.v} =",
        Phi.entry_text(),
    ]
    _emit(cfg, "lift.txt", "\n".join(lines) + "\n")


def run_specialize(cfg: RunConfig) -> None:
    spec, S, imgs = pipeline.generator_images(cfg)
    chunks = [f"# {spec.kind} specialisation at a = {spec.ctx.fmt(spec.a)}"]
    for lab, m in zip(S.labels, imgs):
        chunks.append(f"{lab}: preserves_form={str(preserves(spec, m)).lower()} det={spec.ctx.fmt(m.det())}")
        chunks.append(m.text())
    _emit(cfg, "specialize.txt", "\n".join(chunks) + "\n")


def run_enumerate(cfg: RunConfig) -> None:
    spec, labels, imgs, table = pipeline.get_table(cfg)
    summary = pipeline.group_summary(cfg, spec, table, imgs)
    summary["generators"] = list(labels)
    _emit(cfg, "enumerate.json", dumps(summary))


def run_graph(cfg: RunConfig) -> None:
    _, _, graph, _ = pipeline.get_graph(cfg)
    ext = {"edge-list": "edges", "dot": "dot", "binary-cache": "grp"}[cfg.fmt]
    _emit(cfg, f"graph-{cfg.group}.{ext}", export(graph, cfg.fmt))


def run_spectrum(cfg: RunConfig) -> None:
    data, *_ = pipeline.graph_report(cfg)
    _emit(cfg, f"spectrum-{cfg.group}.json", dumps(data))


def run_cheeger(cfg: RunConfig) -> None:
    _, _, graph, _ = pipeline.get_graph(cfg)
    if graph.N > 24:
        raise CapExceeded(graph.N, 24)
    c = vertex_expansion_exact(graph)
    _emit(cfg, f"cheeger-{cfg.group}.json", dumps({"N": graph.N, "k": graph.k, "c_exact": str(c)}))


def run_growth(cfg: RunConfig) -> None:
    n = cfg.m - 1
    bfs = coxeter_growth_bfs(cfg.m, cfg.L)
    formula = poincare_formula(n, cfg.L)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "degree", "bfs_count", "formula_count", "match"])
    for d in range(cfg.L + 1):
        w.writerow([n, d, bfs[d], formula[d], str(bfs[d] == formula[d]).lower()])
    _emit(cfg, f"growth-m{cfg.m}.csv", buf.getvalue())


def run_covolume(cfg: RunConfig) -> None:
    from fractions import Fraction

    n = cfg.n
    sums = covolume_partial_sums(n, cfg.q, cfg.L)
    bound = poincare_closed_form(n, Fraction(1, cfg.q))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "q", "D", "partial_sum", "bound", "below_bound"])
    for D, v in enumerate(sums):
        w.writerow([n, cfg.q, D, str(v), str(bound), str(v < bound).lower()])
    _emit(cfg, f"covolume-n{n}-q{cfg.q}.csv", buf.getvalue())


def run_full_report(cfg: RunConfig) -> None:
    data = pipeline.full_report(cfg)
    if not cfg.out:
        _emit(cfg, "report.json", dumps(data))


RUNNERS = {
    "lift": run_lift,
    "specialize": run_specialize,
    "enumerate": run_enumerate,
    "graph": run_graph,
    "spectrum": run_spectrum,
    "cheeger": run_cheeger,
    "growth": run_growth,
    "covolume": run_covolume,
    "full-report": run_full_report,
}


def main(argv=None) -> int:
    try:
        cfg, args = config_from_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else 0
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc, OSError) and not isinstance(exc, ValueError) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        RUNNERS[cfg.mode](cfg)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FieldError, LaurentError, CTError, SpecError, WeylError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpectralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
