"""Independent oracles used by the test suite.

Each oracle re-derives an expected result by brute force, without touching the
library code path it is checking: path search is checked by exhaustive simple-
path enumeration, transition counting by a from-scratch recount of the trace
file, and the minimizer by exhaustive search over all cube covers.
"""

from __future__ import annotations

import json
from collections import Counter
from itertools import combinations, product


def best_path_product(m, max_len: int = 12):
    """Highest probability product over simple action-labeled paths to a goal.

    Enumerates every initial-to-goal path of at most ``max_len`` edges that
    never revisits a state; returns None when no such path exists.  Branches
    whose running product cannot exceed the best found so far are pruned,
    which is sound because probabilities never exceed one.
    """
    goals = {s for s in m.states if m.is_goal(s)}
    best = [None]

    def walk(state, product_so_far, visited, depth):
        if state in goals:
            if best[0] is None or product_so_far > best[0]:
                best[0] = product_so_far
            return
        if depth == max_len:
            return
        if best[0] is not None and product_so_far <= best[0]:
            return
        edges = sorted(
            m.out_edges.get(state, ()), key=lambda e: -e.probability
        )
        for e in edges:
            if e.target in visited or e.probability <= 0.0:
                continue
            walk(e.target, product_so_far * e.probability,
                 visited | {e.target}, depth + 1)

    if m.has_virtual_init:
        for s, p in m.initial_distribution().items():
            walk(s, p, {s}, 0)
    else:
        walk(m.initial_state, 1.0, {m.initial_state}, 0)
    return best[0]


def recount_trace(path, schema):
    """From-scratch transition recount straight off the trace file."""
    counts = Counter()
    initials = Counter()
    with open(path) as fh:
        lines = fh.read().splitlines()
    for line in lines[1:]:
        rec = json.loads(line)
        source = tuple(_encode(agent, schema) for agent in rec["state"])
        target = tuple(_encode(agent, schema) for agent in rec["next_state"])
        counts[(source, tuple(rec["action"]), target)] += 1
        if rec["step"] == 0:
            initials[source] += 1
    return counts, initials


def _encode(record, schema):
    bits = 0
    for i, pred in enumerate(schema.predicates):
        if pred.evaluate(record):
            bits |= 1 << i
    return bits


def all_cubes(n_vars: int):
    """Every cube over n_vars as a (mask, values) pair, fixed order."""
    cubes = []
    for spec in product((None, 0, 1), repeat=n_vars):
        mask = values = 0
        for v, bit in enumerate(spec):
            if bit is not None:
                mask |= 1 << v
                values |= bit << v
        cubes.append((mask, values))
    return cubes


def cube_covers(cube, minterm: int) -> bool:
    mask, values = cube
    return (minterm & mask) == values


def minimal_cover_size(ones, zeros, n_vars: int) -> int:
    """Exhaustive minimum DNF cardinality: fewest cubes covering all ones and
    no zero.  Practical for n_vars <= 3."""
    ones = sorted(set(ones))
    zeros = set(zeros)
    if not ones:
        return 0
    usable = [
        c for c in all_cubes(n_vars)
        if not any(cube_covers(c, z) for z in zeros)
        and any(cube_covers(c, m) for m in ones)
    ]
    for k in range(1, len(ones) + 1):
        for combo in combinations(usable, k):
            if all(any(cube_covers(c, m) for c in combo) for m in ones):
                return k
    raise AssertionError("no cover found; ones and zeros must overlap")


def dnf_truth(implicants, minterm: int) -> bool:
    """Evaluate a list of library implicants without using their methods."""
    for imp in implicants:
        if (minterm & imp.care_mask) == imp.values:
            return True
    return False
