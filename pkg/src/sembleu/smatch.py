"""Smatch: triple-overlap F1 under a one-to-one variable mapping.

The mapping is searched by greedy hill-climbing (remap one node or swap two)
from several starting points: a concept-matching start, then random ones.
``smatch_oracle`` enumerates every mapping and is meant for small graphs.

Top-triple conventions (``top=``):

* ``"concept"``: the top triple carries the root concept, so it matches only
  when the roots are mapped onto each other *and* share a concept (default).
* ``"constant"``: the top triple matches whenever the roots are mapped onto
  each other.
* ``"none"``: top triples are not counted at all.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import DEFAULT_INVERSE_EXCEPTIONS, Graph, Triple, graph_to_triples

TOP_MODES = ("concept", "constant", "none")
DEFAULT_RESTARTS = 4
ORACLE_MAX_VARIABLES = 8
ORACLE_MAX_MAPPINGS = 5_000_000


@dataclass(frozen=True)
class NodeMapping:
    """Partial injective map from candidate variable ids to reference ids."""

    assignment: dict = field(default_factory=dict)

    def __post_init__(self):
        values = list(self.assignment.values())
        if len(set(values)) != len(values):
            raise ValueError("node mapping is not injective")

    def __getitem__(self, node_id):
        return self.assignment[node_id]

    def get(self, node_id, default=None):
        return self.assignment.get(node_id, default)

    def __len__(self):
        return len(self.assignment)


@dataclass(frozen=True)
class SmatchResult:
    precision: float
    recall: float
    f1: float
    matched_triples: int
    candidate_triples: int
    reference_triples: int
    best_mapping: NodeMapping = field(default_factory=NodeMapping)
    restarts_used: int = 0
    per_restart_scores: tuple = ()

    def as_dict(self, digits: int = 4) -> dict:
        return {
            "precision": round(self.precision, digits),
            "recall": round(self.recall, digits),
            "f1": round(self.f1, digits),
            "matched_triples": self.matched_triples,
            "candidate_triples": self.candidate_triples,
            "reference_triples": self.reference_triples,
        }


def f_score(matched: int, cand_total: int, ref_total: int) -> tuple[float, float, float]:
    p = matched / cand_total if cand_total else 0.0
    r = matched / ref_total if ref_total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary parts (independent of PYTHONHASHSEED)."""
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _check_top(top: str):
    if top not in TOP_MODES:
        raise ValueError(f"top must be one of {TOP_MODES}, got {top!r}")


def count_triples(triples: Sequence[Triple], top: str = "concept") -> int:
    _check_top(top)
    if top == "none":
        return sum(1 for t in triples if t.kind != "top")
    return len(triples)


def _triple_keys(triples: Iterable[Triple], top: str, rename) -> Counter:
    """Counter of triples with variables passed through ``rename``.

    Triples touching a variable that ``rename`` drops (returns None) vanish.
    """
    triples = list(triples)
    concept = {t.source: t.label for t in triples if t.kind == "instance"}
    keys = Counter()
    for t in triples:
        src = rename(t.source)
        if src is None:
            continue
        if t.kind == "instance":
            keys[("instance", t.label, src)] += 1
        elif t.kind == "attribute":
            keys[("attribute", t.label, src, t.target)] += 1
        elif t.kind == "relation":
            tgt = rename(t.target)
            if tgt is not None:
                keys[("relation", t.label, src, tgt)] += 1
        elif t.kind == "top":
            if top == "constant":
                keys[("top", src)] += 1
            elif top == "concept":
                keys[("top", src, concept.get(t.source))] += 1
    return keys


def match_count(cand_triples: Sequence[Triple], ref_triples: Sequence[Triple],
                m: NodeMapping, top: str = "concept") -> int:
    """Number of candidate triples whose image under ``m`` is a reference triple."""
    _check_top(top)
    if isinstance(m, dict):
        m = NodeMapping(m)
    cand = _triple_keys(cand_triples, top, m.get)
    ref = _triple_keys(ref_triples, top, lambda v: v)
    return sum((cand & ref).values())


class _Problem:
    """Match weights between two triple sets, indexed by variable position.

    ``node_w[(i, j)]``: triples that match once candidate var i maps to
    reference var j alone (instances, attributes, top, self-loops).
    ``pair_w[(i, j)][(i2, j2)]``: relation triples matched when additionally
    i2 maps to j2; stored in both directions.
    """

    def __init__(self, cand_triples: Sequence[Triple], ref_triples: Sequence[Triple], top: str):
        _check_top(top)
        self.top = top
        self.cand_vars = [t.source for t in cand_triples if t.kind == "instance"]
        self.ref_vars = [t.source for t in ref_triples if t.kind == "instance"]
        ci = {v: i for i, v in enumerate(self.cand_vars)}
        ri = {v: j for j, v in enumerate(self.ref_vars)}
        self.cand_total = count_triples(cand_triples, top)
        self.ref_total = count_triples(ref_triples, top)
        self.cand_concepts = [t.label for t in cand_triples if t.kind == "instance"]
        self.ref_concepts = [t.label for t in ref_triples if t.kind == "instance"]

        node_w: Counter = Counter()
        pair_w: dict = defaultdict(Counter)

        by_concept = defaultdict(list)
        for j, c in enumerate(self.ref_concepts):
            by_concept[c].append(j)
        for i, c in enumerate(self.cand_concepts):
            for j in by_concept.get(c, ()):
                node_w[(i, j)] += 1

        ref_attrs = defaultdict(list)
        ref_rels = defaultdict(list)
        ref_top = None
        for t in ref_triples:
            if t.kind == "attribute":
                ref_attrs[(t.label, t.target)].append(ri[t.source])
            elif t.kind == "relation":
                ref_rels[t.label].append((ri[t.source], ri[t.target]))
            elif t.kind == "top":
                ref_top = ri[t.source]
        for t in cand_triples:
            if t.kind == "attribute":
                for j in ref_attrs.get((t.label, t.target), ()):
                    node_w[(ci[t.source], j)] += 1
            elif t.kind == "relation":
                i1, i2 = ci[t.source], ci[t.target]
                for j1, j2 in ref_rels.get(t.label, ()):
                    if i1 == i2 and j1 == j2:
                        node_w[(i1, j1)] += 1
                    elif i1 != i2 and j1 != j2:
                        pair_w[(i1, j1)][(i2, j2)] += 1
                        pair_w[(i2, j2)][(i1, j1)] += 1
            elif t.kind == "top" and ref_top is not None and top != "none":
                i = ci[t.source]
                if top == "constant" or self.cand_concepts[i] == self.ref_concepts[ref_top]:
                    node_w[(i, ref_top)] += 1

        self.node_w = dict(node_w)
        self.pair_w = {k: dict(v) for k, v in pair_w.items()}
        n1, n2 = len(self.cand_vars), len(self.ref_vars)
        pool = [set() for _ in range(n1)]
        for i, j in itertools.chain(self.node_w, self.pair_w):
            pool[i].add(j)
        self.pool = [sorted(p) for p in pool]
        self.pool_sets = pool
        self.n1, self.n2 = n1, n2

    # -- scoring --------------------------------------------------------

    def score(self, m: list[int]) -> int:
        node_w, pair_w = self.node_w, self.pair_w
        total = 0
        pairs = 0
        for i, j in enumerate(m):
            if j < 0:
                continue
            total += node_w.get((i, j), 0)
            for (i2, j2), c in pair_w.get((i, j), {}).items():
                if m[i2] == j2:
                    pairs += c
        return total + pairs // 2

    def gain(self, m: list[int], changes: dict[int, int]) -> int:
        node_w, pair_w = self.node_w, self.pair_w
        empty: dict = {}
        d = 0
        for i, new in changes.items():
            old = m[i]
            if new >= 0:
                d += node_w.get((i, new), 0)
                for (i2, j2), c in pair_w.get((i, new), empty).items():
                    if i2 not in changes and m[i2] == j2:
                        d += c
            if old >= 0:
                d -= node_w.get((i, old), 0)
                for (i2, j2), c in pair_w.get((i, old), empty).items():
                    if i2 not in changes and m[i2] == j2:
                        d -= c
        if len(changes) > 1:
            items = list(changes.items())
            for a in range(len(items)):
                i, ni = items[a]
                for b in range(a + 1, len(items)):
                    i2, ni2 = items[b]
                    if ni >= 0 and ni2 >= 0:
                        d += pair_w.get((i, ni), empty).get((i2, ni2), 0)
                    if m[i] >= 0 and m[i2] >= 0:
                        d -= pair_w.get((i, m[i]), empty).get((i2, m[i2]), 0)
        return d

    # -- initial mappings -----------------------------------------------

    def smart_init(self, rng: random.Random) -> list[int]:
        """Map each candidate var to the first free reference var with the
        same concept; fill the rest randomly, preferring useful targets."""
        m = [-1] * self.n1
        used: set[int] = set()
        by_concept = defaultdict(list)
        for j, c in enumerate(self.ref_concepts):
            by_concept[c].append(j)
        for i, c in enumerate(self.cand_concepts):
            for j in by_concept.get(c, ()):
                if j not in used:
                    m[i] = j
                    used.add(j)
                    break
        for i in range(self.n1):
            if m[i] >= 0 or len(used) == self.n2:
                continue
            options = [j for j in self.pool[i] if j not in used]
            if not options:
                options = [j for j in range(self.n2) if j not in used]
            j = options[rng.randrange(len(options))]
            m[i] = j
            used.add(j)
        return m

    def random_init(self, rng: random.Random) -> list[int]:
        """Random injective start. Each candidate var, in random order, takes
        a random free reference var among those it could match at all; vars
        left without such a target get a random free one."""
        m = [-1] * self.n1
        used: set[int] = set()
        order = list(range(self.n1))
        rng.shuffle(order)
        for i in order:
            options = [j for j in self.pool[i] if j not in used]
            if options:
                m[i] = options[rng.randrange(len(options))]
                used.add(m[i])
        free = [j for j in range(self.n2) if j not in used]
        rng.shuffle(free)
        for i in order:
            if m[i] < 0 and free:
                m[i] = free.pop()
        return m

    # -- search ---------------------------------------------------------

    def climb(self, m: list[int]) -> tuple[list[int], int]:
        """Apply the best improving remap or swap until none improves."""
        m = list(m)
        current = self.score(m)
        n1 = self.n1
        pool, pool_sets = self.pool, self.pool_sets
        while True:
            used = set(m)
            best_gain = 0
            best = None
            for i in range(n1):
                mi = m[i]
                for j in pool[i]:
                    if j == mi or j in used:
                        continue
                    g = self.gain(m, {i: j})
                    if g > best_gain:
                        best_gain, best = g, {i: j}
            for i in range(n1):
                mi = m[i]
                for i2 in range(i + 1, n1):
                    mi2 = m[i2]
                    if mi == mi2:
                        continue
                    # a swap landing both nodes on weightless targets cannot gain
                    if mi2 not in pool_sets[i] and mi not in pool_sets[i2]:
                        continue
                    change = {i: mi2, i2: mi}
                    g = self.gain(m, change)
                    if g > best_gain:
                        best_gain, best = g, change
            if best is None:
                return m, current
            for i, j in best.items():
                m[i] = j
            current += best_gain

    def to_mapping(self, m: list[int]) -> NodeMapping:
        return NodeMapping({self.cand_vars[i]: self.ref_vars[j] for i, j in enumerate(m) if j >= 0})

    def run(self, seed: int, smart: bool) -> tuple[list[int], int]:
        rng = random.Random(seed)
        start = self.smart_init(rng) if smart else self.random_init(rng)
        return self.climb(start)


def prepare(cand: Graph, ref: Graph, top: str = "concept",
            exceptions=DEFAULT_INVERSE_EXCEPTIONS) -> _Problem:
    return _Problem(graph_to_triples(cand, exceptions), graph_to_triples(ref, exceptions), top)


def hill_climb(cand: Graph, ref: Graph, seed: int = 0, smart: bool = True,
               top: str = "concept") -> tuple[NodeMapping, int]:
    """One hill-climbing run; ``smart`` selects the concept-matching start."""
    problem = prepare(cand, ref, top)
    m, matched = problem.run(seed, smart)
    return problem.to_mapping(m), matched


def _result(problem: _Problem, best_m, best, scores) -> SmatchResult:
    p, r, f = f_score(best, problem.cand_total, problem.ref_total)
    return SmatchResult(p, r, f, best, problem.cand_total, problem.ref_total,
                        problem.to_mapping(best_m), len(scores), tuple(scores))


def solve(problem: _Problem, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> SmatchResult:
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best_m: list[int] = []
    best = -1
    scores = []
    for k in range(restarts):
        m, matched = problem.run(seed + k, smart=(k == 0))
        scores.append(f_score(matched, problem.cand_total, problem.ref_total)[2])
        # ties keep the earliest restart
        if matched > best:
            best, best_m = matched, m
    return _result(problem, best_m, best, scores)


def smatch_score(cand: Graph, ref: Graph, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                 top: str = "concept") -> SmatchResult:
    """Best of ``restarts`` hill-climbing runs, seeded ``seed, seed+1, ...``."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    return solve(prepare(cand, ref, top), restarts, seed)


def smatch_oracle(cand: Graph, ref: Graph, top: str = "concept") -> int:
    """Exact best matched-triple count by trying every injective mapping."""
    _check_top(top)
    ct, rt = graph_to_triples(cand), graph_to_triples(ref)
    cvars = [t.source for t in ct if t.kind == "instance"]
    rvars = [t.source for t in rt if t.kind == "instance"]
    small, large = sorted((len(cvars), len(rvars)))
    if small > ORACLE_MAX_VARIABLES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_VARIABLES} variables on the smaller side")
    if math.perm(large, small) > ORACLE_MAX_MAPPINGS:
        raise ValueError("too many mappings to enumerate")
    best = 0
    if len(cvars) <= len(rvars):
        for image in itertools.permutations(rvars, len(cvars)):
            best = max(best, match_count(ct, rt, NodeMapping(dict(zip(cvars, image))), top))
    else:
        for image in itertools.permutations(cvars, len(rvars)):
            best = max(best, match_count(ct, rt, NodeMapping(dict(zip(image, rvars))), top))
    return best


@dataclass(frozen=True)
class CorpusSmatch:
    precision: float
    recall: float
    f1: float
    matched_triples: int
    candidate_triples: int
    reference_triples: int
    per_pair: tuple = ()

    def as_dict(self, digits: int = 4) -> dict:
        return {
            "precision": round(self.precision, digits),
            "recall": round(self.recall, digits),
            "f1": round(self.f1, digits),
            "matched_triples": self.matched_triples,
            "candidate_triples": self.candidate_triples,
            "reference_triples": self.reference_triples,
        }


def pair_seed(seed: int, index: int) -> int:
    return derive_seed("smatch-pair", seed, index)


def smatch_corpus(pairs: Iterable[tuple[Graph, Graph]], restarts: int = DEFAULT_RESTARTS,
                  seed: int = 0, top: str = "concept") -> CorpusSmatch:
    """Micro-averaged Smatch: triple counts are summed over all pairs."""
    results = [smatch_score(c, r, restarts, pair_seed(seed, i), top)
               for i, (c, r) in enumerate(pairs)]
    if not results:
        raise ValueError("corpus is empty")
    return combine(results)


def combine(results: Sequence[SmatchResult]) -> CorpusSmatch:
    matched = sum(r.matched_triples for r in results)
    ct = sum(r.candidate_triples for r in results)
    rt = sum(r.reference_triples for r in results)
    p, r, f = f_score(matched, ct, rt)
    return CorpusSmatch(p, r, f, matched, ct, rt, tuple(results))
