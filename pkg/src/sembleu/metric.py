"""SemBleu: BLEU over path n-grams of two AMR graphs.

Per-order clipped precision, a brevity penalty on graph size (nodes plus
edges), and a weighted geometric mean. Sentence scores use NIST geometric
smoothing by default; corpus scores pool the counts of all pairs first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graph import Graph, graph_size, normalize_inverse
from .ngram import NGramMultiset, extract_ngrams, key_order

SMOOTHING_ALIASES = {"none": "none", "nist": "nist", "nist-geometric": "nist", "exp": "nist"}


@dataclass(frozen=True)
class SembleuConfig:
    max_order: int = 3
    weights: Optional[tuple[float, ...]] = None
    # None: nist for sentence scores, none for corpus scores
    smoothing: Optional[str] = None

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0 / self.max_order,) * self.max_order)
        else:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != self.max_order:
            raise ValueError(f"expected {self.max_order} weights, got {len(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.smoothing is not None:
            if self.smoothing not in SMOOTHING_ALIASES:
                raise ValueError(f"unknown smoothing {self.smoothing!r}")
            object.__setattr__(self, "smoothing", SMOOTHING_ALIASES[self.smoothing])

    def resolved_smoothing(self, sentence: bool) -> str:
        if self.smoothing is not None:
            return self.smoothing
        return "nist" if sentence else "none"


@dataclass(frozen=True)
class OrderPrecision:
    order: int
    matched: int
    total: int
    precision: float  # after smoothing; this is what enters the geometric mean

    @property
    def raw(self) -> float:
        return self.matched / self.total if self.total else 0.0


@dataclass(frozen=True)
class SembleuScore:
    value: float
    precisions: tuple[OrderPrecision, ...]
    brevity_penalty: float
    candidate_size: int
    reference_size: int

    def as_dict(self, digits: int = 4) -> dict:
        return {
            "value": round(self.value, digits),
            "brevity_penalty": round(self.brevity_penalty, digits),
            "candidate_size": self.candidate_size,
            "reference_size": self.reference_size,
            "precisions": [
                {"order": p.order, "matched": p.matched, "total": p.total,
                 "precision": round(p.precision, digits)}
                for p in self.precisions
            ],
        }


@dataclass(frozen=True)
class SembleuStats:
    """Sufficient statistics of one or more pairs; adding them pools counts."""

    matched: tuple[int, ...]
    totals: tuple[int, ...]
    ref_totals: tuple[int, ...]
    candidate_size: int
    reference_size: int

    def __add__(self, other: "SembleuStats") -> "SembleuStats":
        if len(self.matched) != len(other.matched):
            raise ValueError("cannot pool statistics of different max orders")
        return SembleuStats(
            tuple(a + b for a, b in zip(self.matched, other.matched)),
            tuple(a + b for a, b in zip(self.totals, other.totals)),
            tuple(a + b for a, b in zip(self.ref_totals, other.ref_totals)),
            self.candidate_size + other.candidate_size,
            self.reference_size + other.reference_size,
        )

    @classmethod
    def zero(cls, max_order: int) -> "SembleuStats":
        z = (0,) * max_order
        return cls(z, z, z, 0, 0)


def clipped_matches(cand: NGramMultiset, ref: NGramMultiset, k: int) -> tuple[int, int]:
    if k < 1:
        raise ValueError("order must be >= 1")
    total = cand.per_order_totals.get(k, 0)
    matched = 0
    ref_counts = ref.counts
    for key, count in cand.counts.items():
        if key_order(key) == k:
            matched += min(count, ref_counts.get(key, 0))
    return matched, total


def brevity_penalty(candidate_size: int, reference_size: int) -> float:
    if candidate_size >= reference_size:
        return 1.0
    if candidate_size == 0:
        return 0.0
    return math.exp(1.0 - reference_size / candidate_size)


def _all_clipped(cand: NGramMultiset, ref: NGramMultiset, max_order: int):
    matched = [0] * max_order
    ref_counts = ref.counts
    for key, count in cand.counts.items():
        hit = ref_counts.get(key)
        if hit:
            matched[key_order(key) - 1] += min(count, hit)
    totals = [cand.per_order_totals.get(k, 0) for k in range(1, max_order + 1)]
    ref_totals = [ref.per_order_totals.get(k, 0) for k in range(1, max_order + 1)]
    return tuple(matched), tuple(totals), tuple(ref_totals)


def pair_stats(cand: Graph, ref: Graph, max_order: int = 3) -> SembleuStats:
    """Clipped counts and sizes for one pair; graphs are normalized here."""
    cand = normalize_inverse(cand)
    ref = normalize_inverse(ref)
    m, t, rt = _all_clipped(extract_ngrams(cand, max_order), extract_ngrams(ref, max_order), max_order)
    return SembleuStats(m, t, rt, graph_size(cand), graph_size(ref))


def score_stats(stats: SembleuStats, cfg: SembleuConfig, smoothing: str) -> SembleuScore:
    """Combine (pooled) statistics into a score.

    An order where neither side has any n-grams is left out of the product
    (precision 1). An order where the candidate has none but the reference
    does is a zero-match order.
    """
    bp = brevity_penalty(stats.candidate_size, stats.reference_size)
    precisions = []
    log_sum = 0.0
    zero = False
    zero_orders = 0
    for k, (m, t, rt, w) in enumerate(
        zip(stats.matched, stats.totals, stats.ref_totals, cfg.weights), start=1
    ):
        if t == 0 and rt == 0:
            p = 1.0
        elif m == 0:
            if smoothing == "nist":
                zero_orders += 1
                p = 1.0 / (2 ** zero_orders * max(t, 1))
            else:
                p = 0.0
        else:
            p = m / t
        precisions.append(OrderPrecision(k, m, t, p))
        if w == 0:
            continue
        if p == 0.0:
            zero = True
        else:
            log_sum += w * math.log(p)
    value = 0.0 if zero or bp == 0.0 else bp * math.exp(log_sum)
    return SembleuScore(value, tuple(precisions), bp,
                        stats.candidate_size, stats.reference_size)


def sembleu_sentence(cand: Graph, ref: Graph, cfg: Optional[SembleuConfig] = None) -> SembleuScore:
    cfg = cfg or SembleuConfig()
    return score_stats(pair_stats(cand, ref, cfg.max_order), cfg, cfg.resolved_smoothing(sentence=True))


def sembleu_corpus(pairs: Iterable[tuple[Graph, Graph]], cfg: Optional[SembleuConfig] = None) -> SembleuScore:
    cfg = cfg or SembleuConfig()
    pairs = list(pairs)
    if not pairs:
        raise ValueError("corpus is empty")
    return corpus_from_stats([pair_stats(c, r, cfg.max_order) for c, r in pairs], cfg)


def corpus_from_stats(stats: Sequence[SembleuStats], cfg: SembleuConfig) -> SembleuScore:
    pooled = SembleuStats.zero(cfg.max_order)
    for s in stats:
        pooled = pooled + s
    return score_stats(pooled, cfg, cfg.resolved_smoothing(sentence=False))
