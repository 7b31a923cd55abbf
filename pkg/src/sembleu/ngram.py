"""Path n-grams over AMR graphs.

An n-gram of order k is a directed walk through k nodes, written as the
alternating sequence of node labels and the labels of the k-1 edges between
them. Every node is tried as a starting point, in breadth-first order from
the root; nodes the root cannot reach are tried afterwards.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .graph import Graph, reachable_order

SEPARATOR = "\x1f"


@dataclass(frozen=True)
class NGram:
    node_labels: tuple[str, ...]
    edge_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.node_labels:
            raise ValueError("an n-gram needs at least one node")
        if len(self.edge_labels) != len(self.node_labels) - 1:
            raise ValueError("an n-gram of k nodes has k-1 edges")

    @property
    def order(self) -> int:
        return len(self.node_labels)

    def __str__(self):
        parts = [self.node_labels[0]]
        for rel, label in zip(self.edge_labels, self.node_labels[1:]):
            parts.append(f":{rel} {label}")
        return " ".join(parts)


def ngram_key(ng: NGram) -> str:
    """Join node and edge labels alternately with U+001F."""
    parts = [ng.node_labels[0]]
    for rel, label in zip(ng.edge_labels, ng.node_labels[1:]):
        parts.append(rel)
        parts.append(label)
    return SEPARATOR.join(parts)


def key_order(key: str) -> int:
    return key.count(SEPARATOR) // 2 + 1


@dataclass
class NGramMultiset:
    max_order: int
    counts: Counter = field(default_factory=Counter)
    per_order_totals: dict = field(default_factory=dict)

    def __post_init__(self):
        for k in range(1, self.max_order + 1):
            self.per_order_totals.setdefault(k, 0)

    def add(self, key: str, order: int, count: int = 1):
        if count < 1:
            raise ValueError("counts must be positive")
        self.counts[key] += count
        self.per_order_totals[order] = self.per_order_totals.get(order, 0) + count

    def of_order(self, k: int) -> dict[str, int]:
        return {key: c for key, c in self.counts.items() if key_order(key) == k}

    def __len__(self):
        return sum(self.counts.values())


def iter_ngrams(g: Graph, max_order: int) -> Iterator[NGram]:
    """Yield every path n-gram of ``g`` up to ``max_order`` nodes.

    From each start node the current path is emitted before it is extended
    along each outgoing edge, depth first, in edge declaration order. A walk
    may come back to a node it already visited; the order cap ends it.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    out = g.out_edges()
    labels = {n.id: n.label for n in g.nodes}

    def extend(nid, node_labels, edge_labels):
        yield NGram(tuple(node_labels), tuple(edge_labels))
        if len(node_labels) == max_order:
            return
        for e in out[nid]:
            node_labels.append(labels[e.target])
            edge_labels.append(e.label)
            yield from extend(e.target, node_labels, edge_labels)
            node_labels.pop()
            edge_labels.pop()

    for start in reachable_order(g):
        yield from extend(start, [labels[start]], [])


def extract_ngrams(g: Graph, max_order: int = 3) -> NGramMultiset:
    """Multiset of path n-gram keys, orders 1..max_order.

    ``g`` should already be inverse-normalized.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    ms = NGramMultiset(max_order)
    out: dict[int, list[tuple[str, int]]] = {n.id: [] for n in g.nodes}
    labels = {n.id: n.label for n in g.nodes}
    for e in g.edges:
        out[e.source].append((SEPARATOR + e.label + SEPARATOR, e.target))

    # Hot path for corpus scoring. The multiset does not depend on the order
    # in which start nodes are visited (iter_ngrams keeps the breadth-first
    # order), so all paths are grown together, one order at a time.
    level = [(label, nid) for nid, label in labels.items()]
    for k in range(1, max_order + 1):
        ms.counts.update([key for key, _ in level])
        ms.per_order_totals[k] = len(level)
        if k == max_order:
            break
        level = [(key + rel + labels[tgt], tgt) for key, nid in level for rel, tgt in out[nid]]
        if not level:
            break
    return ms


def ngram_counts_by_order(ms: NGramMultiset) -> dict[int, int]:
    return {k: ms.per_order_totals.get(k, 0) for k in range(1, ms.max_order + 1)}
