"""Exact two-level Boolean minimization over minterms with implicit don't-cares.

``minimize`` receives the on-set and off-set as integer minterms; every
assignment in neither set is a don't-care the minimizer may absorb.  Prime
implicants are generated per on-set minterm as the minimal hitting sets of its
difference sets against the off-set (a cube keeping exactly the variables in a
hitting set excludes every zero and cannot drop a variable, i.e. is prime).
The minimum-cardinality cover is then found exactly via essential-implicant
extraction plus Petrick-style expansion, falling back to greedy set cover with
a logged warning when the prime count exceeds the exact-cover limit.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import MintermConflictError, MinimizationTimeout, TooManyVariablesError

log = logging.getLogger(__name__)

# Guardrail: problems wider than this are refused outright; the relevancy
# filter is the intended way to stay under it.
MAX_VARIABLES = 24

# Above this many prime implicants the exact Petrick cover is replaced by
# greedy set cover (non-optimality logged).
EXACT_COVER_LIMIT = 64

# Cap on minimal hitting sets kept per minterm; prevents pathological blowup
# while always retaining at least one cover per minterm.
_HITTING_SET_CAP = 4096


@dataclass(frozen=True)
class Implicant:
    """A cube: ``values`` on the variables in ``care_mask``, free elsewhere."""

    care_mask: int
    values: int

    def __post_init__(self):
        if self.values & ~self.care_mask:
            raise ValueError("implicant values set outside its care mask")

    def covers(self, minterm: int) -> bool:
        return (minterm & self.care_mask) == self.values

    @property
    def n_literals(self) -> int:
        return bin(self.care_mask).count("1")

    def literals(self) -> tuple[tuple[int, bool], ...]:
        """(variable index, polarity) pairs in ascending variable order."""
        out = []
        mask = self.care_mask
        v = 0
        while mask:
            if mask & 1:
                out.append((v, bool(self.values >> v & 1)))
            mask >>= 1
            v += 1
        return tuple(out)

    def sort_key(self) -> tuple:
        return tuple((v, 0 if pol else 1) for v, pol in self.literals())


def _check_deadline(deadline: float | None, stage: str, primes_found: int):
    if deadline is not None and time.monotonic() > deadline:
        raise MinimizationTimeout(stage, primes_found)


def _minimal_hitting_sets(
    families: Sequence[frozenset[int]],
    deadline: float | None,
    primes_so_far: int,
) -> list[frozenset[int]]:
    """All minimal hitting sets of ``families`` (Berge's incremental scheme).

    The frontier can grow exponentially on wide baseline (norf) problems, so
    the cooperative deadline is polled inside the expansion and minimality
    loops, not just per family.
    """
    hitting: list[frozenset[int]] = [frozenset()]
    for fam in families:
        _check_deadline(deadline, "prime generation", primes_so_far)
        nxt: set[frozenset[int]] = set()
        for i, h in enumerate(hitting):
            if i % 1024 == 0:
                _check_deadline(deadline, "prime generation", primes_so_far)
            if h & fam:
                nxt.add(h)
            else:
                for v in sorted(fam):
                    nxt.add(h | {v})
        # drop non-minimal candidates; same-size sets cannot contain each
        # other, so only strictly smaller kept sets need checking
        pool = sorted(nxt, key=lambda s: (len(s), sorted(s)))
        hitting = []
        smaller: list[frozenset[int]] = []
        boundary = 0
        for i, cand in enumerate(pool):
            if i % 256 == 0:
                _check_deadline(deadline, "prime generation", primes_so_far)
            while boundary < len(hitting) and len(hitting[boundary]) < len(cand):
                smaller.append(hitting[boundary])
                boundary += 1
            if not any(kept < cand for kept in smaller):
                hitting.append(cand)
        if len(hitting) > _HITTING_SET_CAP:
            log.warning(
                "hitting-set enumeration capped at %d; cover may be non-optimal",
                _HITTING_SET_CAP,
            )
            hitting = hitting[:_HITTING_SET_CAP]
    return hitting


def _prime_implicants(
    ones: Sequence[int], zeros: Sequence[int], deadline: float | None
) -> dict[Implicant, set[int]]:
    """All prime implicants touching the on-set, mapped to the ones they cover."""
    primes: dict[Implicant, set[int]] = {}
    for m in ones:
        diff_sets = []
        for z in zeros:
            d = m ^ z
            fam = frozenset(i for i in range(d.bit_length()) if d >> i & 1)
            diff_sets.append(fam)
        # deduplicate and process small sets first (keeps Berge's frontier tight)
        diff_sets = sorted(set(diff_sets), key=lambda s: (len(s), sorted(s)))
        for keep in _minimal_hitting_sets(diff_sets, deadline, len(primes)):
            care = 0
            for v in keep:
                care |= 1 << v
            imp = Implicant(care, m & care)
            primes.setdefault(imp, set())
    # a prime generated from one minterm may cover others; complete the map
    for imp, covered in primes.items():
        for m in ones:
            if imp.covers(m):
                covered.add(m)
    return primes


def _petrick_cover(
    remaining: list[int],
    primes: list[Implicant],
    coverage: dict[Implicant, set[int]],
    deadline: float | None,
) -> list[Implicant]:
    """Exact minimum cover of ``remaining`` by Petrick expansion with absorption."""
    index_of = {p: i for i, p in enumerate(primes)}
    terms: set[frozenset[int]] = {frozenset()}
    for m in remaining:
        _check_deadline(deadline, "cover selection", len(primes))
        options = [index_of[p] for p in primes if m in coverage[p]]
        expanded: set[frozenset[int]] = set()
        for i, t in enumerate(terms):
            if i % 1024 == 0:
                _check_deadline(deadline, "cover selection", len(primes))
            if any(o in t for o in options):
                expanded.add(t)
                continue
            for o in options:
                expanded.add(t | {o})
        # absorption: drop any term containing another
        pool = sorted(expanded, key=lambda s: (len(s), sorted(s)))
        terms = set()
        for i, cand in enumerate(pool):
            if i % 256 == 0:
                _check_deadline(deadline, "cover selection", len(primes))
            if not any(kept <= cand for kept in terms):
                terms.add(cand)

    def cover_key(t: frozenset[int]) -> tuple:
        chosen = [primes[i] for i in t]
        return (
            len(chosen),
            sum(p.n_literals for p in chosen),
            tuple(sorted(p.sort_key() for p in chosen)),
        )

    best = min(terms, key=cover_key)
    return [primes[i] for i in best]


def _greedy_cover(
    remaining: list[int],
    primes: list[Implicant],
    coverage: dict[Implicant, set[int]],
) -> list[Implicant]:
    log.warning(
        "prime implicant count %d exceeds exact-cover limit %d; "
        "falling back to greedy set cover (result may be non-minimal)",
        len(primes), EXACT_COVER_LIMIT,
    )
    chosen: list[Implicant] = []
    uncovered = set(remaining)
    while uncovered:
        best = min(
            primes,
            key=lambda p: (
                -len(coverage[p] & uncovered),
                p.n_literals,
                p.sort_key(),
            ),
        )
        gain = coverage[best] & uncovered
        if not gain:
            raise AssertionError("greedy cover stalled; uncovered ones remain")
        chosen.append(best)
        uncovered -= gain
    return chosen


def evaluate_dnf(implicants: Iterable[Implicant], minterm: int) -> bool:
    return any(imp.covers(minterm) for imp in implicants)


def minimize(
    ones: Iterable[int],
    zeros: Iterable[int],
    n_vars: int,
    *,
    deadline: float | None = None,
    max_vars: int = MAX_VARIABLES,
    exact_cover_limit: int = EXACT_COVER_LIMIT,
) -> list[Implicant]:
    """Minimum-cardinality DNF that is true on ``ones`` and false on ``zeros``.

    Assignments in neither set are don't-cares.  Ties are broken by fewest
    total literals, then lexicographically on the implicants' literal tuples;
    identical inputs always yield the identical implicant list.

    Raises MintermConflictError when the sets overlap, TooManyVariablesError
    when ``n_vars`` exceeds ``max_vars``, and MinimizationTimeout when the
    cooperative ``deadline`` (a ``time.monotonic()`` instant) passes.
    """
    ones = sorted(set(ones))
    zeros = sorted(set(zeros))
    if n_vars > max_vars:
        raise TooManyVariablesError(n_vars, max_vars)
    limit = 1 << n_vars
    for m in ones + zeros:
        if m < 0 or m >= limit:
            raise ValueError(f"minterm {m} out of range for {n_vars} variables")
    overlap = set(ones) & set(zeros)
    if overlap:
        raise MintermConflictError(overlap)

    if not ones:
        return []
    if not zeros:
        return [Implicant(0, 0)]

    coverage = _prime_implicants(ones, zeros, deadline)
    primes = sorted(coverage, key=Implicant.sort_key)

    # essential primes first: any minterm covered by exactly one prime
    chosen: list[Implicant] = []
    remaining = list(ones)
    changed = True
    while changed and remaining:
        changed = False
        for m in list(remaining):
            covering = [p for p in primes if m in coverage[p]]
            if len(covering) == 1:
                p = covering[0]
                if p not in chosen:
                    chosen.append(p)
                remaining = [x for x in remaining if not p.covers(x)]
                changed = True
                break

    if remaining:
        candidates = [p for p in primes if coverage[p] & set(remaining)]
        if len(candidates) <= exact_cover_limit:
            chosen.extend(_petrick_cover(remaining, candidates, coverage, deadline))
        else:
            chosen.extend(_greedy_cover(remaining, candidates, coverage))

    result = sorted(set(chosen), key=Implicant.sort_key)

    if __debug__:
        for m in ones:
            assert evaluate_dnf(result, m), f"DNF misses one-minterm {m}"
        for z in zeros:
            assert not evaluate_dnf(result, z), f"DNF covers zero-minterm {z}"
    return result
