"""Experiment harness: restart variance, agreement with human judgments,
n-gram growth, system ranking and timing.

Metrics plug in through a small interface: ``vector(cand, ref, index)``
returns integer sufficient statistics for one sentence pair, and
``from_vector(v)`` turns a (summed) vector into a score. Summing vectors
before scoring is what makes corpus-level resampling cheap.
"""

from __future__ import annotations

import contextlib
import csv
import gc
import itertools
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .graph import Graph, normalize_inverse, parse_corpus, to_penman
from .metric import SembleuConfig, SembleuStats, pair_stats, score_stats, sembleu_corpus
from .ngram import extract_ngrams, ngram_counts_by_order
from .smatch import DEFAULT_RESTARTS, derive_seed, f_score, pair_seed, prepare, smatch_corpus, smatch_score

PREFERENCES = ("a", "b", "tie")


@dataclass(frozen=True)
class JudgmentRecord:
    sentence_id: int
    system_a: str
    system_b: str
    preference: str

    def __post_init__(self):
        if self.system_a == self.system_b:
            raise ValueError(f"judgment compares {self.system_a!r} with itself")
        if self.preference not in PREFERENCES:
            raise ValueError(f"preference must be one of {PREFERENCES}, got {self.preference!r}")

    @property
    def sign(self) -> int:
        return {"a": 1, "b": -1, "tie": 0}[self.preference]


def read_judgments(path) -> list[JudgmentRecord]:
    """TSV with header ``sentence_id system_a system_b preference``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        expected = ["sentence_id", "system_a", "system_b", "preference"]
        if reader.fieldnames != expected:
            raise ValueError(f"judgments header must be {expected}, got {reader.fieldnames}")
        return [JudgmentRecord(int(row["sentence_id"]), row["system_a"], row["system_b"],
                               row["preference"].strip().lower())
                for row in reader]


def write_judgments(path, judgments: Sequence[JudgmentRecord]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["sentence_id", "system_a", "system_b", "preference"])
        for j in judgments:
            writer.writerow([j.sentence_id, j.system_a, j.system_b, j.preference])


def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


# --------------------------------------------------------------------------
# metrics

class SembleuMetric:
    name = "sembleu"

    def __init__(self, cfg: Optional[SembleuConfig] = None):
        self.cfg = cfg or SembleuConfig()

    def vector(self, cand: Graph, ref: Graph, index: int = 0) -> list[int]:
        s = pair_stats(cand, ref, self.cfg.max_order)
        return [*s.matched, *s.totals, *s.ref_totals, s.candidate_size, s.reference_size]

    def _stats(self, v) -> SembleuStats:
        n = self.cfg.max_order
        v = [int(x) for x in v]
        return SembleuStats(tuple(v[:n]), tuple(v[n:2 * n]), tuple(v[2 * n:3 * n]), v[3 * n], v[3 * n + 1])

    def from_vector(self, v) -> float:
        return score_stats(self._stats(v), self.cfg, self.cfg.resolved_smoothing(sentence=False)).value

    def sentence(self, cand: Graph, ref: Graph, index: int = 0) -> float:
        stats = self._stats(self.vector(cand, ref, index))
        return score_stats(stats, self.cfg, self.cfg.resolved_smoothing(sentence=True)).value


class SmatchMetric:
    """Smatch with per-sentence seeds derived from ``seed`` and the sentence
    index, so the same pair always gets the same search."""

    name = "smatch"

    def __init__(self, restarts: int = DEFAULT_RESTARTS, seed: int = 0, top: str = "concept"):
        self.restarts = restarts
        self.seed = seed
        self.top = top

    def vector(self, cand: Graph, ref: Graph, index: int = 0) -> list[int]:
        r = smatch_score(cand, ref, self.restarts, pair_seed(self.seed, index), self.top)
        return [r.matched_triples, r.candidate_triples, r.reference_triples]

    def from_vector(self, v) -> float:
        return f_score(int(v[0]), int(v[1]), int(v[2]))[2]

    def sentence(self, cand: Graph, ref: Graph, index: int = 0) -> float:
        return self.from_vector(self.vector(cand, ref, index))


def corpus_score(metric, cands: Sequence[Graph], refs: Sequence[Graph]) -> float:
    total = None
    for i, (c, r) in enumerate(zip(cands, refs)):
        v = np.asarray(metric.vector(c, r, i), dtype=np.int64)
        total = v if total is None else total + v
    if total is None:
        raise ValueError("corpus is empty")
    return metric.from_vector(total)


# --------------------------------------------------------------------------
# restart variance

@dataclass(frozen=True)
class VarianceRow:
    restarts: int
    mean: float
    min: float
    max: float
    # median seconds of one corpus Smatch run, starting from PENMAN text
    runtime: float
    # same, starting from already-parsed graphs
    search_runtime: float = 0.0

    @property
    def spread(self) -> float:
        return self.max - self.min


def restart_variance(pairs: Sequence[tuple[Graph, Graph]], r_values: Sequence[int] = (1, 2, 3, 4),
                     runs: int = 100, seed: int = 0, top: str = "concept",
                     timing_runs: int = 3) -> list[VarianceRow]:
    """Corpus Smatch F1 over ``runs`` seeded runs for each restart count.

    Run ``j`` uses corpus seed ``derive_seed("variance", seed, j)``, so its
    score at restart count r equals ``smatch_corpus(pairs, r, that_seed)``.
    Within a run the restarts are shared across restart counts (best of the
    first r), which the seed policy implies anyway.

    Timing is measured separately, as the median of ``timing_runs``
    standalone runs per restart count: ``runtime`` covers reading the PENMAN
    text and scoring, like timing the scorer on two AMR files;
    ``search_runtime`` starts from parsed graphs.
    """
    if runs < 2:
        raise ValueError("runs must be >= 2")
    if not pairs:
        raise ValueError("corpus is empty")
    r_values = sorted(set(r_values))
    if r_values[0] < 1:
        raise ValueError("restart counts must be >= 1")
    max_r = r_values[-1]
    problems = [prepare(c, r, top) for c, r in pairs]
    cand_total = sum(p.cand_total for p in problems)
    ref_total = sum(p.ref_total for p in problems)

    scores: dict[int, list[float]] = {r: [] for r in r_values}
    for j in range(runs):
        run_seed = derive_seed("variance", seed, j)
        matched = {r: 0 for r in r_values}
        for i, problem in enumerate(problems):
            base = pair_seed(run_seed, i)
            best = -1
            for k in range(max_r):
                best = max(best, problem.run(base + k, smart=(k == 0))[1])
                if k + 1 in matched:
                    matched[k + 1] += best
        for r in r_values:
            scores[r].append(f_score(matched[r], cand_total, ref_total)[2])

    cand_text = "\n\n".join(to_penman(c) for c, _ in pairs)
    ref_text = "\n\n".join(to_penman(r) for _, r in pairs)
    rows = []
    for r in r_values:
        full, search = [], []
        for t in range(timing_runs):
            timing_seed = derive_seed("variance-timing", seed, t)
            with _timing():
                start = time.perf_counter()
                parsed = list(zip(parse_corpus(cand_text), parse_corpus(ref_text)))
                mid = time.perf_counter()
                smatch_corpus(parsed, r, timing_seed, top)
                end = time.perf_counter()
            full.append(end - start)
            search.append(end - mid)
        rows.append(VarianceRow(r, statistics.fmean(scores[r]), min(scores[r]), max(scores[r]),
                                statistics.median(full), statistics.median(search)))
    return rows


@contextlib.contextmanager
def _timing():
    """Collect garbage, then keep the collector off while timing (as timeit does)."""
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


# --------------------------------------------------------------------------
# agreement with human judgments

def _validate(judgments, system_outputs: Mapping[str, Sequence[Graph]], references: Sequence[Graph]):
    for name, outs in system_outputs.items():
        if len(outs) != len(references):
            raise ValueError(f"system {name!r} has {len(outs)} outputs for {len(references)} references")
    for j in judgments:
        if not 0 <= j.sentence_id < len(references):
            raise ValueError(f"judgment refers to unknown sentence {j.sentence_id}")
        for s in (j.system_a, j.system_b):
            if s not in system_outputs:
                raise ValueError(f"judgment refers to unknown system {s!r}")


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def corpus_agreement_bootstrap(judgments: Sequence[JudgmentRecord],
                               system_outputs: Mapping[str, Sequence[Graph]],
                               references: Sequence[Graph], metric, samples: int = 1000,
                               sample_size: int = 100, seed: int = 0,
                               workers: int = 1) -> dict[tuple[str, str], float]:
    """Fraction of bootstrap resamples where the metric orders each system
    pair the same way the human scores do.

    A system's human score on a resample is the number of times it was
    preferred, counted over the resampled sentences (with repetition). Ties
    agree only with ties. Resample ``s`` draws from its own generator,
    spawned from ``seed``, so ``workers`` never changes the result.
    """
    _validate(judgments, system_outputs, references)
    if samples < 1 or sample_size < 1:
        raise ValueError("samples and sample_size must be positive")
    systems = sorted(system_outputs)
    sentence_ids = sorted({j.sentence_id for j in judgments})
    if not sentence_ids:
        raise ValueError("no judgments")
    row = {sid: k for k, sid in enumerate(sentence_ids)}
    col = {s: k for k, s in enumerate(systems)}

    wins = np.zeros((len(sentence_ids), len(systems)), dtype=np.int64)
    for j in judgments:
        if j.preference == "a":
            wins[row[j.sentence_id], col[j.system_a]] += 1
        elif j.preference == "b":
            wins[row[j.sentence_id], col[j.system_b]] += 1

    def stats_for(task):
        s, sid = task
        return metric.vector(system_outputs[s][sid], references[sid], sid)

    tasks = [(s, sid) for s in systems for sid in sentence_ids]
    vectors = _map(stats_for, tasks, workers)
    stats = np.asarray(vectors, dtype=np.int64).reshape(len(systems), len(sentence_ids), -1)

    children = np.random.SeedSequence(seed).spawn(samples)
    system_pairs = list(itertools.combinations(range(len(systems)), 2))

    def one_sample(child):
        rng = np.random.default_rng(child)
        picks = rng.integers(0, len(sentence_ids), size=sample_size)
        weights = np.bincount(picks, minlength=len(sentence_ids))
        human = weights @ wins
        scores = [metric.from_vector(weights @ stats[k]) for k in range(len(systems))]
        return [_sign(human[a] - human[b]) == _sign(scores[a] - scores[b]) for a, b in system_pairs]

    agreements = np.asarray(_map(one_sample, children, workers), dtype=bool)
    return {(systems[a], systems[b]): float(agreements[:, k].mean())
            for k, (a, b) in enumerate(system_pairs)}


def sentence_agreement(judgments: Sequence[JudgmentRecord],
                       system_outputs: Mapping[str, Sequence[Graph]],
                       references: Sequence[Graph], metric) -> float:
    """Percent of judgments whose preference the sentence-level metric
    reproduces (``tie`` needs exactly equal scores)."""
    _validate(judgments, system_outputs, references)
    if not judgments:
        raise ValueError("no judgments")
    cache: dict[tuple[str, int], float] = {}

    def score(system, sid):
        if (system, sid) not in cache:
            cache[(system, sid)] = metric.sentence(system_outputs[system][sid], references[sid], sid)
        return cache[(system, sid)]

    hits = sum(_sign(score(j.system_a, j.sentence_id) - score(j.system_b, j.sentence_id)) == j.sign
               for j in judgments)
    return 100.0 * hits / len(judgments)


def sentence_agreement_by_order(judgments, system_outputs, references,
                                orders: Sequence[int] = (1, 2, 3, 4)) -> dict[int, float]:
    return {n: sentence_agreement(judgments, system_outputs, references,
                                  SembleuMetric(SembleuConfig(max_order=n)))
            for n in orders}


# --------------------------------------------------------------------------
# n-gram growth

@dataclass(frozen=True)
class GrowthRecord:
    node_count: int
    totals: tuple[int, ...]


@dataclass
class GrowthReport:
    records: list[GrowthRecord]
    # order -> (slope, intercept) of the least-squares line totals ~ node_count
    fits: dict[int, tuple[float, float]] = field(default_factory=dict)

    def csv_rows(self):
        for rec in self.records:
            for k, count in enumerate(rec.totals, start=1):
                yield rec.node_count, k, count


def least_squares(xs: Sequence[int], ys: Sequence[int]) -> tuple[float, float]:
    """Ordinary least squares on integer data, solved exactly with fractions."""
    n = len(xs)
    if n == 0:
        raise ValueError("no data")
    mx = Fraction(sum(xs), n)
    my = Fraction(sum(ys), n)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return float("nan"), float(my)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return float(slope), float(my - slope * mx)


def ngram_growth(corpus: Sequence[Graph], max_order: int = 3) -> GrowthReport:
    records = []
    for g in corpus:
        counts = ngram_counts_by_order(extract_ngrams(normalize_inverse(g), max_order))
        records.append(GrowthRecord(len(g.nodes), tuple(counts[k] for k in range(1, max_order + 1))))
    report = GrowthReport(records)
    if records:
        xs = [r.node_count for r in records]
        for k in range(1, max_order + 1):
            report.fits[k] = least_squares(xs, [r.totals[k - 1] for r in records])
    return report


# --------------------------------------------------------------------------
# ranking

@dataclass
class RankReport:
    scores: dict[str, dict[str, float]]
    rankings: dict[str, list[str]]
    ties: dict[str, list[tuple[str, str]]]
    disagreements: list[tuple[str, str]]

    def as_dict(self, digits: int = 4) -> dict:
        return {
            "scores": {m: {s: round(v, digits) for s, v in sc.items()} for m, sc in self.scores.items()},
            "rankings": self.rankings,
            "ties": {m: [list(p) for p in t] for m, t in self.ties.items()},
            "disagreements": [list(p) for p in self.disagreements],
        }


def rank_systems(system_outputs: Mapping[str, Sequence[Graph]], references: Sequence[Graph],
                 metrics: Sequence) -> RankReport:
    """Corpus score of every system under every metric, ranked best first.

    Pairs of systems that two metrics order differently (a tie counts as an
    order of its own) are listed as disagreements.
    """
    if len(system_outputs) < 2:
        raise ValueError("need at least two systems")
    _validate((), system_outputs, references)
    systems = sorted(system_outputs)
    scores = {m.name: {s: corpus_score(m, system_outputs[s], references) for s in systems}
              for m in metrics}
    rankings = {name: sorted(systems, key=lambda s: (-sc[s], s)) for name, sc in scores.items()}
    ties = {name: [(a, b) for a, b in itertools.combinations(systems, 2) if sc[a] == sc[b]]
            for name, sc in scores.items()}
    disagreements = []
    for a, b in itertools.combinations(systems, 2):
        signs = {_sign(sc[a] - sc[b]) for sc in scores.values()}
        if len(signs) > 1:
            disagreements.append((a, b))
    return RankReport(scores, rankings, ties, disagreements)


# --------------------------------------------------------------------------
# timing

@dataclass(frozen=True)
class BenchReport:
    pairs: int
    sembleu_seconds: float
    smatch_seconds: float

    @property
    def ratio(self) -> float:
        return self.sembleu_seconds / self.smatch_seconds if self.smatch_seconds else float("inf")

    def as_dict(self) -> dict:
        return {"pairs": self.pairs, "sembleu_seconds": self.sembleu_seconds,
                "smatch_seconds": self.smatch_seconds, "ratio": self.ratio}


def benchmark(pairs: Sequence[tuple[Graph, Graph]], cfg: Optional[SembleuConfig] = None,
              restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> BenchReport:
    """Wall clock of corpus SemBleu and corpus Smatch on already-parsed pairs."""
    with _timing():
        start = time.perf_counter()
        sembleu_corpus(pairs, cfg)
        mid = time.perf_counter()
    with _timing():
        mid2 = time.perf_counter()
        smatch_corpus(pairs, restarts, seed)
        end = time.perf_counter()
    return BenchReport(len(pairs), mid - start, end - mid2)
