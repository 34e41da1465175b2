"""Command-line front end: ``probe-interval {recognize,verify,gen,bench,pq}``.

Exit codes: 0 accepted / valid, 1 rejected / invalid, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import gc
import json
import re
import statistics
import sys
import time

from . import pq_tree
from .errors import InvalidInput, RefusedParams, Rejected
from .oracle import GeneratorParams, random_normal_model
from .recognition import (
    ProbeIntervalModel, format_graph, is_normal_model, load_graph, recognize, verify_model,
)
from .sparse_matrix import parse_matrix
from .uniqueness import is_unique_normal_model

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _model_text(model: ProbeIntervalModel) -> str:
    lines = [f"accepted: {model.n_columns} columns, {model.ones} ones"]
    for j, (cls, verts) in enumerate(zip(model.classes, model.column_sets())):
        lines.append(f"  {j:>3} {cls:<12} {' '.join(str(v) for v in verts)}")
    return "\n".join(lines)


def cmd_recognize(args) -> int:
    g = load_graph(args.graph)
    try:
        model, trace = recognize(g)
    except Rejected as exc:
        if args.json:
            print(_dump({"verdict": "rejected", "reject": {"stage": exc.stage, "detail": exc.detail}}))
        else:
            print(f"rejected at {exc.stage}: {exc.detail}")
        return EXIT_REJECTED
    out = model.to_dict()
    lines = [_model_text(model)]
    if args.unique:
        v = is_unique_normal_model(g, trace)
        out["unique"] = v.unique
        out["failing_test"] = v.failing_test
        word = "unique" if v.unique else f"not unique (test {v.failing_test}: {v.hint})"
        lines.append(f"uniqueness: {word}")
    status = EXIT_OK
    if args.verify:
        ok = verify_model(g, model) and is_normal_model(g, model)
        out["verified"] = ok
        lines.append(f"verify: {'passed' if ok else 'FAILED'}")
        if not ok:
            status = EXIT_REJECTED
    print(_dump(out) if args.json else "\n".join(lines))
    return status


def cmd_verify(args) -> int:
    g = load_graph(args.graph)
    with open(args.model, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"model file is not JSON: {exc}") from None
    model = ProbeIntervalModel.from_dict(data)
    if not verify_model(g, model):
        print("invalid: the model does not represent the graph")
        return EXIT_REJECTED
    if is_normal_model(g, model):
        print("valid normal model")
    else:
        print("valid model, not normal")
    return EXIT_OK


def _params(args) -> GeneratorParams:
    return GeneratorParams(probes=args.probes, nonprobes=args.nonprobes, span=args.span,
                           single=args.single, starters=args.starters, seed=args.seed)


def cmd_gen(args) -> int:
    params = _params(args)
    model, g = random_normal_model(params)
    header = (f"seed {params.seed} probes {params.probes} nonprobes {params.nonprobes} "
              f"span {params.span} single {params.single} starters {params.starters}")
    sys.stdout.write(format_graph(g, header))
    if args.model:
        with open(args.model, "w", encoding="utf-8") as fh:
            fh.write(_dump(model.to_dict()) + "\n")
    return EXIT_OK


def parse_sizes(text: str) -> list[int]:
    """``"2^12..2^17"`` (doubling range) or a comma list such as ``"4096,8192"``."""
    text = text.strip()
    m = re.fullmatch(r"2\^(\d+)\s*\.\.\s*2\^(\d+)", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise InvalidInput("size range is empty")
        return [2 ** k for k in range(a, b + 1)]
    try:
        sizes = [int(eval_power(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidInput(f"cannot parse sizes {text!r}") from None
    if not sizes or min(sizes) < 2:
        raise InvalidInput("sizes must be integers >= 2")
    return sizes


def eval_power(tok: str) -> int:
    tok = tok.strip()
    if "^" in tok:
        base, exp = tok.split("^", 1)
        return int(base) ** int(exp)
    return int(tok)


def bench_instance(size: int, seed: int):
    """A generated graph whose ``n + m`` is close to ``size``."""
    # about five edges per vertex at the default shape; refine once from a measurement
    n = max(2, size // 6)
    for _ in range(3):
        params = GeneratorParams(probes=max(1, n // 2), nonprobes=n - n // 2, seed=seed)
        _, g = random_normal_model(params)
        got = g.n + g.m
        if abs(got - size) <= size * 0.05:
            break
        n = max(2, round(n * size / got))
    return g


def time_recognize(g, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        gc.collect()
        enabled = gc.isenabled()
        gc.disable()
        try:
            t0 = time.perf_counter()
            recognize(g)
            times.append(time.perf_counter() - t0)
        finally:
            if enabled:
                gc.enable()
    return statistics.median(times)


def run_bench(sizes, repeats: int = 5, seed: int = 0):
    """Rows of ``(size, n, m, median_seconds, ratio_to_previous)``."""
    rows = []
    prev = None
    for size in sizes:
        g = bench_instance(size, seed)
        t = time_recognize(g, repeats)
        ratio = None
        if prev is not None:
            # normalise to an exact doubling of n + m
            ratio = (t / prev[1]) * (2 * prev[0] / (g.n + g.m))
        rows.append((size, g.n, g.m, t, ratio))
        prev = (g.n + g.m, t)
    return rows


def cmd_bench(args) -> int:
    sizes = parse_sizes(args.sizes)
    print(f"{'size':>8} {'n':>8} {'m':>8} {'median s':>10} {'ratio':>7}")
    rows = run_bench(sizes, args.repeats, args.seed)
    for size, n, m, t, ratio in rows:
        r = f"{ratio:7.2f}" if ratio is not None else f"{'-':>7}"
        print(f"{size:>8} {n:>8} {m:>8} {t:>10.4f} {r}")
    ratios = [r[4] for r in rows if r[4] is not None]
    if ratios:
        print(f"median doubling ratio: {statistics.median(ratios):.2f}")
    return EXIT_OK


def _read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def cmd_pq(args) -> int:
    m = _read_matrix(args.matrix)
    t = pq_tree.build(m)
    if t is None:
        print("no consecutive-ones ordering")
        return EXIT_REJECTED
    if args.intersect:
        other = pq_tree.build(_read_matrix(args.intersect))
        if other is None:
            print("the other matrix has no consecutive-ones ordering")
            return EXIT_REJECTED
        t = pq_tree.intersect(t, other)
        if t is None:
            print("empty intersection")
            return EXIT_REJECTED
    if args.restrict:
        cols = [c for c in re.split(r"[,\s]+", args.restrict) if c]
        by_name = {str(c): c for c in t.leaves}
        missing = [c for c in cols if c not in by_name]
        if missing:
            raise InvalidInput(f"unknown columns: {' '.join(missing)}")
        t = pq_tree.restrict(t, [by_name[c] for c in cols])
    print(t.canonical().to_text())
    print("order: " + " ".join(str(c) for c in t.canonical_ordering()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="probe-interval",
                                 description="Partitioned probe interval graph recognition.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recognize", help="find a normal model or reject")
    p.add_argument("graph", help="graph file, or - for stdin")
    p.add_argument("--unique", action="store_true", help="also decide uniqueness")
    p.add_argument("--json", action="store_true", help="print JSON")
    p.add_argument("--verify", action="store_true", help="check the model independently")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("verify", help="check a model against a graph")
    p.add_argument("graph")
    p.add_argument("model", help="JSON model as printed by recognize --json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="emit a random probe interval graph")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--probes", type=int, default=10)
    p.add_argument("--nonprobes", type=int, default=5)
    p.add_argument("--span", type=float, default=3.0)
    p.add_argument("--single", type=float, default=0.3)
    p.add_argument("--starters", type=int, default=2)
    p.add_argument("--model", help="also write the generating model as JSON here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time recognition over doubling sizes")
    p.add_argument("--sizes", default="2^12..2^17")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pq", help="PQ tree of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--restrict", help="comma-separated columns to keep")
    p.add_argument("--intersect", help="second matrix file")
    p.set_defaults(func=cmd_pq)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "graph", None) == "-":
        args.graph = sys.stdin
    try:
        return args.func(args)
    except (InvalidInput, RefusedParams, OSError) as exc:
        print(f"probe-interval: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
