"""Synthetic AMR-like corpora and corruption operators.

Real AMR releases are licensed, so experiments here run on random
tree-shaped graphs drawn from an AMR-flavoured vocabulary, plus noisy
"system outputs" derived from them.
"""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from .graph import Edge, Graph, Node, graph_to_triples
from .harness import JudgmentRecord
from .smatch import NodeMapping, f_score, match_count

PREDICATES = [
    "want-01", "go-02", "say-01", "make-01", "ask-01", "leave-11", "believe-01", "see-01",
    "give-01", "know-01", "think-01", "possible-01", "need-01", "use-01", "work-01",
    "cause-01", "have-03", "state-01", "report-01", "help-01", "try-01", "begin-01",
    "include-01", "recommend-01", "obligate-01", "win-01", "run-02", "develop-02",
]
NOUNS = [
    "person", "girl", "boy", "woman", "man", "pie", "country", "city", "government",
    "company", "thing", "time", "year", "name", "day", "group", "problem", "system",
    "money", "school", "child", "house", "book", "car", "law", "war", "market", "data",
]
MODIFIERS = ["good-02", "big", "new-01", "many", "all", "other", "very", "only", "also", "this"]
CORE_ROLES = ["ARG0", "ARG1", "ARG2", "ARG3"]
NON_CORE_ROLES = ["mod", "time", "location", "manner", "poss", "purpose", "topic", "op1", "op2"]
CONSTANT_ROLES = {"quant": ["2", "3", "10", "100"], "polarity": ["-"], "mode": ["imperative"]}


def realistic_size(rng: random.Random) -> int:
    """Variable count per graph; median about 12, long right tail, capped at 120."""
    return max(2, min(120, round(rng.lognormvariate(2.5, 0.55))))


def random_amr(rng: random.Random, n_vars: int, reentrancy: float = 0.08,
               constant_rate: float = 0.12, inverse_rate: float = 0.1,
               vocabulary: Optional[Sequence[str]] = None) -> Graph:
    """Random rooted DAG with ``n_vars`` concept nodes plus a few constants.

    Each new variable hangs off an earlier one; a fraction of extra edges
    re-enter existing nodes, and a fraction of edges are written as inverse
    ``-of`` roles (reversed) the way annotators do.
    """
    if n_vars < 1:
        raise ValueError("need at least one variable")
    nodes: list[Node] = []
    edges: list[Edge] = []
    children: dict[int, set] = {}

    def concept(i: int) -> str:
        if vocabulary is not None:
            return rng.choice(vocabulary)
        pool = PREDICATES if (i == 0 or rng.random() < 0.35) else (NOUNS if rng.random() < 0.8 else MODIFIERS)
        return rng.choice(pool)

    def add_edge(src: int, tgt: int, role: str):
        if rng.random() < inverse_rate and not nodes[tgt].constant:
            edges.append(Edge(tgt, src, role + "-of"))
        else:
            edges.append(Edge(src, tgt, role))

    for i in range(n_vars):
        nodes.append(Node(i, concept(i)))
        children[i] = set()
        if i == 0:
            continue
        parent = rng.randrange(i)
        role = rng.choice(CORE_ROLES) if nodes[parent].label in PREDICATES and rng.random() < 0.7 \
            else rng.choice(NON_CORE_ROLES)
        add_edge(parent, i, role)
        children[parent].add(i)

    ancestors = _ancestors(n_vars, edges)
    for i in range(1, n_vars):
        if rng.random() < reentrancy:
            src = rng.randrange(n_vars)
            # keep it acyclic: the new parent must not descend from i
            if src != i and i not in ancestors[src] and src not in children[i]:
                add_edge(src, i, rng.choice(CORE_ROLES))
                ancestors = _ancestors(n_vars, edges)

    for i in range(n_vars):
        if rng.random() < constant_rate:
            role = rng.choice(sorted(CONSTANT_ROLES))
            cid = len(nodes)
            nodes.append(Node(cid, rng.choice(CONSTANT_ROLES[role]), True))
            children[cid] = set()
            edges.append(Edge(i, cid, role))
    return Graph(tuple(nodes), tuple(dict.fromkeys(edges)), 0)


def _ancestors(n: int, edges: Sequence[Edge]) -> dict[int, set]:
    parents: dict[int, set] = {i: set() for i in range(n)}
    for e in edges:
        s, t = (e.target, e.source) if e.label.endswith("-of") else (e.source, e.target)
        if s < n and t < n:
            parents[t].add(s)
    result: dict[int, set] = {}

    def up(i):
        if i not in result:
            result[i] = set()
            for p in parents[i]:
                result[i] |= {p} | up(p)
        return result[i]

    for i in range(n):
        up(i)
    return result


def random_tree(rng: random.Random, n_vars: int, **kw) -> Graph:
    """Directed tree: no re-entrancies, no constants, no inverse roles."""
    kw.setdefault("reentrancy", 0.0)
    kw.setdefault("constant_rate", 0.0)
    kw.setdefault("inverse_rate", 0.0)
    return random_amr(rng, n_vars, **kw)


def chain(labels: Sequence[str], role: str = "ARG1") -> Graph:
    nodes = tuple(Node(i, lab) for i, lab in enumerate(labels))
    edges = tuple(Edge(i, i + 1, role) for i in range(len(labels) - 1))
    return Graph(nodes, edges, 0 if nodes else None)


def synthetic_corpus(n: int, seed: int = 0, sizes: Optional[tuple[int, int]] = None, **kw) -> list[Graph]:
    """``n`` random graphs; sizes uniform in ``sizes`` or drawn from
    :func:`realistic_size` when ``sizes`` is None."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        k = rng.randint(*sizes) if sizes else realistic_size(rng)
        out.append(random_amr(rng, k, **kw))
    return out


# --------------------------------------------------------------------------
# corruption

def _rebuild(g: Graph, nodes, edges) -> Graph:
    return Graph(tuple(nodes), tuple(dict.fromkeys(edges)), g.root, g.names)


def delete_edges(g: Graph, k: int, rng: random.Random) -> Graph:
    """Drop ``k`` random edges (all of them if fewer). Nodes stay."""
    if k >= len(g.edges):
        return _rebuild(g, g.nodes, ())
    drop = set(rng.sample(range(len(g.edges)), k))
    return _rebuild(g, g.nodes, [e for i, e in enumerate(g.edges) if i not in drop])


def relabel_concepts(g: Graph, k: int, rng: random.Random) -> Graph:
    variables = [n.id for n in g.nodes if not n.constant]
    picked = set(rng.sample(variables, min(k, len(variables))))
    vocab = PREDICATES + NOUNS + MODIFIERS
    nodes = []
    for n in g.nodes:
        if n.id in picked:
            choices = [c for c in vocab if c != n.label]
            n = Node(n.id, rng.choice(choices), False)
        nodes.append(n)
    return _rebuild(g, nodes, g.edges)


def relabel_edges(g: Graph, k: int, rng: random.Random) -> Graph:
    picked = set(rng.sample(range(len(g.edges)), min(k, len(g.edges))))
    roles = CORE_ROLES + NON_CORE_ROLES
    edges = []
    for i, e in enumerate(g.edges):
        if i in picked and not g.node(e.target).constant:
            inverse = e.label.endswith("-of")
            base = e.label[:-3] if inverse else e.label
            new = rng.choice([r for r in roles if r != base])
            e = Edge(e.source, e.target, new + "-of" if inverse else new)
        edges.append(e)
    return _rebuild(g, g.nodes, edges)


def reattach(g: Graph, k: int, rng: random.Random) -> Graph:
    """Move ``k`` edges to hang off a different variable, keeping the graph
    connected and acyclic."""
    edges = list(g.edges)
    variables = [n.id for n in g.nodes if not n.constant]
    for _ in range(k):
        if not edges or len(variables) < 3:
            break
        i = rng.randrange(len(edges))
        e = edges[i]
        inverse = e.label.endswith("-of")
        parent, child = (e.target, e.source) if inverse else (e.source, e.target)
        below = _descendants(g.nodes, edges, child)
        options = [v for v in variables if v != parent and v not in below]
        if not options:
            continue
        new_parent = rng.choice(options)
        edges[i] = Edge(child, new_parent, e.label) if inverse else Edge(new_parent, child, e.label)
    return _rebuild(g, g.nodes, edges)


def _descendants(nodes, edges, start: int) -> set:
    kids: dict[int, list] = {n.id: [] for n in nodes}
    for e in edges:
        s, t = (e.target, e.source) if e.label.endswith("-of") else (e.source, e.target)
        kids[s].append(t)
    seen = {start}
    stack = [start]
    while stack:
        for c in kids[stack.pop()]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def add_leaves(g: Graph, k: int, rng: random.Random) -> Graph:
    nodes = list(g.nodes)
    edges = list(g.edges)
    variables = [n.id for n in g.nodes if not n.constant]
    next_id = max(n.id for n in nodes) + 1
    for _ in range(k):
        parent = rng.choice(variables)
        nodes.append(Node(next_id, rng.choice(NOUNS + MODIFIERS)))
        edges.append(Edge(parent, next_id, rng.choice(NON_CORE_ROLES)))
        next_id += 1
    return _rebuild(g, nodes, edges)


def drop_leaves(g: Graph, k: int, rng: random.Random) -> Graph:
    """Remove ``k`` leaf nodes together with their single incoming edge."""
    for _ in range(k):
        degree: dict[int, int] = {n.id: 0 for n in g.nodes}
        for e in g.edges:
            degree[e.source] += 1
            degree[e.target] += 1
        leaves = [n.id for n in g.nodes if n.id != g.root and degree[n.id] == 1]
        if not leaves:
            break
        gone = rng.choice(leaves)
        g = _rebuild(g, [n for n in g.nodes if n.id != gone],
                     [e for e in g.edges if gone not in (e.source, e.target)])
    return g


def noisy_copy(g: Graph, rng: random.Random, level: float) -> Graph:
    """Connectivity-preserving noise whose amount scales with ``level``
    (roughly the fraction of nodes touched)."""
    n = len(g.variables())

    def amount():
        x = level * n
        base = math.floor(x)
        return base + (1 if rng.random() < x - base else 0)

    g = relabel_concepts(g, amount(), rng)
    g = relabel_edges(g, amount(), rng)
    g = reattach(g, amount(), rng)
    g = drop_leaves(g, amount() // 2, rng)
    g = add_leaves(g, amount() // 2, rng)
    return g


def system_outputs(references: Sequence[Graph], levels: dict[str, float], seed: int = 0) -> dict[str, list[Graph]]:
    """One noisy corpus per system name, noise level per system."""
    out = {}
    for name in sorted(levels):
        rng = random.Random(f"{seed}:{name}")
        out[name] = [noisy_copy(g, rng, levels[name] * rng.uniform(0.5, 1.5)) for g in references]
    return out


def aligned_quality(output: Graph, reference: Graph) -> float:
    """Triple F1 with nodes aligned by id. Corruption keeps ids, so this is
    the known ground truth for a synthetic output, no search involved."""
    ot, rt = graph_to_triples(output), graph_to_triples(reference)
    ref_vars = {t.source for t in rt if t.kind == "instance"}
    ident = NodeMapping({t.source: t.source for t in ot if t.kind == "instance" and t.source in ref_vars})
    return f_score(match_count(ot, rt, ident), len(ot), len(rt))[2]


def simulate_judgments(references: Sequence[Graph], outputs: dict[str, Sequence[Graph]],
                       seed: int = 0, flip: float = 0.15):
    """Pairwise preferences in the style of relative-ranking annotation.

    Per sentence the systems are shuffled and paired off; the output with
    higher :func:`aligned_quality` is preferred, except that the annotator
    flips the call with probability ``flip``. Equal quality gives a tie.
    """
    rng = random.Random(f"judgments:{seed}")
    names = sorted(outputs)
    records = []
    for sid, ref in enumerate(references):
        order = names[:]
        rng.shuffle(order)
        for a, b in zip(order[::2], order[1::2]):
            qa = aligned_quality(outputs[a][sid], ref)
            qb = aligned_quality(outputs[b][sid], ref)
            if qa == qb:
                pref = "tie"
            else:
                pref = "a" if qa > qb else "b"
                if rng.random() < flip:
                    pref = "b" if pref == "a" else "a"
            records.append(JudgmentRecord(sid, a, b, pref))
    return records
