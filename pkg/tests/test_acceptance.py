"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import itertools
import json
import random
import statistics
import time

from conftest import record_criterion
from helpers import (
    DATA, atlas_graphs, brute_orderings, data_graph, labelled_graphs, planted_c1pm, project,
    random_partitioned, random_tree,
)
from probe_interval.c1pm import C1PMInstance, is_unique, solve, taut_matrix
from probe_interval.cli import run_bench
from probe_interval.errors import Rejected
from probe_interval.oracle import (
    GeneratorParams, brute_force_c1pm, brute_force_normal_models, brute_force_recognize,
    column_delete_with_constraints, equivalent_models, log_uniform_int, random_normal_model,
    solution_classes,
)
from probe_interval.pq_tree import (
    build, build_from_rows, canonical_matrix, enumerate_orderings, intersect, restrict,
)
from probe_interval.recognition import (
    CLIQUE, ProbeIntervalModel, is_normal_model, recognize, verify_model,
)
from probe_interval.sparse_matrix import BinaryMatrix, is_c1_ordered, parse_matrix
from probe_interval.uniqueness import is_unique_normal_model


def _pq_agrees(cols, rows) -> bool:
    t = build_from_rows(cols, rows)
    ref = brute_orderings(cols, rows)
    if not ref:
        return t is None
    return t is not None and enumerate_orderings(t) == ref


def test_criterion_1_pq_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(1)
    failures = sampled = exhaustive = 0
    for _ in range(10_000):
        cols = [f"c{i}" for i in range(rng.randint(1, 5))]
        rows = [frozenset(c for c in cols if rng.random() < 0.5) for _ in range(rng.randint(0, 6))]
        failures += not _pq_agrees(cols, rows)
        sampled += 1
    for k in range(1, 5):
        cols = [f"c{i}" for i in range(k)]
        # rows with fewer than two 1's and repeated rows do not change the orderings
        nontrivial = [frozenset(s) for r in range(2, k + 1) for s in itertools.combinations(cols, r)]
        for nrows in range(0, 7):
            for rows in itertools.combinations(nontrivial, nrows):
                failures += not _pq_agrees(cols, list(rows))
                exhaustive += 1
    elapsed = time.perf_counter() - t0
    passed = failures == 0 and elapsed < 120
    record_criterion(1, passed, f"{sampled} sampled + {exhaustive} exhaustive matrices, "
                                f"{failures} mismatches, {elapsed:.1f}s (limit 120s)")
    assert passed


def test_criterion_2_tree_laws():
    rng = random.Random(2)
    failures = undefined = 0
    for _ in range(10_000):
        cols = [f"c{i}" for i in range(rng.randint(1, 6))]
        t = random_tree(rng, cols)
        pi = enumerate_orderings(t)
        keep = rng.sample(cols, rng.randint(1, len(cols)))
        ok = enumerate_orderings(restrict(t, keep)) == project(pi, keep)
        t2 = random_tree(rng, cols)
        both = pi & enumerate_orderings(t2)
        meet = intersect(t, t2)
        if both:
            ok = ok and meet is not None and enumerate_orderings(meet) == both
        else:
            undefined += 1
            ok = ok and meet is None
        ok = ok and build(canonical_matrix(t)) == t
        failures += not ok
    passed = failures == 0
    record_criterion(2, passed, f"10000 random trees, {undefined} empty intersections, "
                                f"{failures} law violations")
    assert passed


def _random_small_instance(rng):
    ncols = rng.randint(1, 6)
    cols = [f"c{i}" for i in range(ncols)]
    c_cols = [c for c in cols if rng.random() < 0.6]
    r_rows = [(f"r{i}", {c for c in cols if rng.random() < 0.4}) for i in range(rng.randint(0, 5))]
    extra = [(f"s{i}", {c for c in c_cols if rng.random() < 0.5})
             for i in range(rng.randint(0, 4) if c_cols else 0)]
    m_r = BinaryMatrix(r_rows, cols)
    m_c = BinaryMatrix([(r, v & set(c_cols)) for r, v in r_rows] + extra, c_cols)
    return C1PMInstance(m_r, m_c)


def test_criterion_3_c1pm():
    rng = random.Random(3)
    planted_fail = 0
    for _ in range(10_000):
        inst, _ = planted_c1pm(rng, rng.randint(1, 12), rng.randint(0, 12))
        sol = solve(inst)
        if sol is None or not is_c1_ordered(taut_matrix(sol)):
            planted_fail += 1
    brute_fail = solved = 0
    for _ in range(10_000):
        inst = _random_small_instance(rng)
        sol = solve(inst)
        ref = brute_force_c1pm(inst)
        if (sol is None) != (not ref):
            brute_fail += 1
        elif sol is not None:
            solved += 1
            if is_unique(inst, sol) != (len(solution_classes(ref)) == 1):
                brute_fail += 1
    passed = planted_fail == 0 and brute_fail == 0
    record_criterion(3, passed, f"10000 planted instances ({planted_fail} failures); 10000 instances "
                                f"with at most 6 columns ({solved} solvable, {brute_fail} disagreements)")
    assert passed


def _verdict(g):
    try:
        recognize(g)
        return True
    except Rejected:
        return False


def test_criterion_4_recognition_completeness():
    mismatches = exhaustive = accepted = 0
    for n in range(1, 6):
        for g in labelled_graphs(n):
            exhaustive += 1
            v = _verdict(g)
            accepted += v
            mismatches += v != (brute_force_recognize(g) is not None)
    rng = random.Random(4)
    sampled_acc = 0
    for _ in range(10_000):
        g = random_partitioned(rng, rng.randint(6, 8), rng.uniform(0.15, 0.85))
        v = _verdict(g)
        sampled_acc += v
        mismatches += v != (brute_force_recognize(g) is not None)
    passed = mismatches == 0
    record_criterion(4, passed, f"{exhaustive} connected graphs with at most 5 vertices "
                                f"({accepted} accepted) + 10000 sampled 6-8 vertices "
                                f"({sampled_acc} accepted), {mismatches} mismatches")
    assert passed


def test_criterion_5_soundness_at_scale():
    rng = random.Random(5)
    bad = 0
    sizes = []
    worst_ratio = 0.0
    for i in range(1000):
        n = log_uniform_int(rng, 100, 10_000)
        share = rng.uniform(0.4, 0.8)
        budget = n
        while True:
            # repairs may add probes beyond the budget; shrink it until n fits
            probes = max(1, round(budget * share))
            _, g = random_normal_model(GeneratorParams(probes=probes, nonprobes=budget - probes, seed=i))
            if 100 <= g.n <= 10_000 or budget <= 100:
                break
            budget -= g.n - 10_000
        sizes.append(g.n)
        try:
            model, _ = recognize(g)
        except Rejected:
            bad += 1
            continue
        ok = verify_model(g, model) and is_normal_model(g, model)
        ok = ok and model.n_columns <= g.n and model.ones <= 4 * (g.n + g.m)
        worst_ratio = max(worst_ratio, model.ones / (g.n + g.m))
        bad += not ok
    in_range = all(100 <= n <= 10_000 for n in sizes)
    passed = bad == 0 and in_range
    record_criterion(5, passed, f"1000 generated instances, n from {min(sizes)} to {max(sizes)} "
                                f"(median {statistics.median(sizes):.0f}), {bad} failures, "
                                f"max ones/(n+m) = {worst_ratio:.2f} (limit 4)")
    assert passed


def test_criterion_6_uniqueness():
    checked = mismatches = missing_witness = non_unique = 0
    for g in atlas_graphs(6):
        try:
            model, trace = recognize(g)
        except Rejected:
            continue
        checked += 1
        v = is_unique_normal_model(g, trace)
        models = brute_force_normal_models(g)
        if v.unique != (len(models) == 1):
            mismatches += 1
        if not v.unique:
            non_unique += 1
            pair = models[:2]
            if len(pair) < 2 or equivalent_models(*pair) or not all(
                    verify_model(g, m) and is_normal_model(g, m) for m in pair):
                missing_witness += 1
    passed = mismatches == 0 and missing_witness == 0
    record_criterion(6, passed, f"{checked} accepted graphs with at most 6 vertices, "
                                f"{non_unique} not unique, {mismatches} mismatches, "
                                f"{missing_witness} without two non-equivalent normal models")
    assert passed


def test_criterion_7_scaling():
    t0 = time.perf_counter()
    rows = run_bench([2 ** k for k in range(12, 18)], repeats=5, seed=0)
    total = time.perf_counter() - t0
    ratios = [r[4] for r in rows if r[4] is not None]
    med = statistics.median(ratios)
    passed = med <= 2.6 and total <= 300
    record_criterion(7, passed, f"doubling ratios {' '.join(f'{r:.2f}' for r in ratios)}, "
                                f"median {med:.2f} (limit 2.6), total {total:.1f}s (limit 300s)")
    assert passed


def test_criterion_8_fixtures():
    results = {}
    g = data_graph("five_cliques.graph")
    model, _ = recognize(g)
    cols = [frozenset(c) for c, k in zip(model.column_sets(), model.classes) if k == CLIQUE]
    want = [frozenset(c) for c in ("ag", "abc", "bcd", "bef", "bfh")]
    results["five cliques"] = cols == want or cols == want[::-1]

    p = recognize(data_graph("bound_pairs.graph"))[1].pipeline()
    results["representative pairs"] = {pair for _, pair in p.named_pairs()} == {
        frozenset({"p3", "x2"}), frozenset({"p2", "x3"})}

    g = data_graph("taut.graph")
    left = ProbeIntervalModel.from_dict(json.loads((DATA / "taut_normal.json").read_text()))
    right = ProbeIntervalModel.from_dict(json.loads((DATA / "taut_reordered.json").read_text()))
    results["taut reordering"] = (verify_model(g, left) and is_normal_model(g, left)
                       and verify_model(g, right) and not is_normal_model(g, right))

    m = parse_matrix((DATA / "bound_pairs_mn.matrix").read_text())
    out = column_delete_with_constraints(m, "d2")
    results["column deletion"] = [r for r in out.rows if r not in m.rows] == [("constraint", "p2", "x3")]

    passed = all(results.values())
    record_criterion(8, passed, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in results.items()))
    assert passed
