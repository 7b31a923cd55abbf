import random

import pytest

from sembleu.graph import parse_penman
from sembleu.harness import (JudgmentRecord, SembleuMetric, SmatchMetric, benchmark, corpus_agreement_bootstrap,
                             corpus_score, least_squares, ngram_growth, rank_systems, read_judgments,
                             restart_variance, sentence_agreement, sentence_agreement_by_order,
                             write_judgments)
from sembleu.metric import SembleuConfig, sembleu_corpus
from sembleu.smatch import smatch_corpus
from sembleu.synthetic import (delete_edges, random_tree, simulate_judgments, synthetic_corpus,
                               system_outputs)


@pytest.fixture(scope="module")
def world():
    refs = synthetic_corpus(40, seed=5, sizes=(4, 14))
    outs = system_outputs(refs, {"good": 0.1, "mid": 0.3, "bad": 0.6}, seed=5)
    return refs, outs, simulate_judgments(refs, outs, seed=5)


def test_judgment_record():
    assert JudgmentRecord(0, "x", "y", "a").sign == 1
    assert JudgmentRecord(0, "x", "y", "tie").sign == 0
    with pytest.raises(ValueError):
        JudgmentRecord(0, "x", "x", "a")
    with pytest.raises(ValueError):
        JudgmentRecord(0, "x", "y", "maybe")


def test_judgments_round_trip(tmp_path, world):
    p = tmp_path / "j.tsv"
    write_judgments(p, world[2])
    assert read_judgments(p) == world[2]
    assert p.read_text().splitlines()[0] == "sentence_id\tsystem_a\tsystem_b\tpreference"


def test_judgments_header_checked(tmp_path):
    p = tmp_path / "j.tsv"
    p.write_text("id\ta\tb\tpref\n0\tx\ty\ta\n")
    with pytest.raises(ValueError):
        read_judgments(p)


def test_metric_vectors_pool_like_corpus_scores(world):
    refs, outs, _ = world
    pairs = list(zip(outs["mid"], refs))
    assert corpus_score(SembleuMetric(), outs["mid"], refs) == sembleu_corpus(pairs).value
    assert corpus_score(SmatchMetric(seed=3), outs["mid"], refs) == smatch_corpus(pairs, seed=3).f1


def test_bootstrap_reproducible_across_workers(world):
    refs, outs, judgments = world
    kw = dict(samples=60, sample_size=20, seed=9)
    one = corpus_agreement_bootstrap(judgments, outs, refs, SembleuMetric(), workers=1, **kw)
    again = corpus_agreement_bootstrap(judgments, outs, refs, SembleuMetric(), workers=1, **kw)
    four = corpus_agreement_bootstrap(judgments, outs, refs, SembleuMetric(), workers=4, **kw)
    assert one == again == four
    assert set(one) == {("bad", "good"), ("bad", "mid"), ("good", "mid")}


def test_bootstrap_perfect_agreement_when_humans_follow_the_metric():
    refs = synthetic_corpus(20, seed=1, sizes=(5, 10))
    outs = system_outputs(refs, {"x": 0.05, "y": 0.8}, seed=1)
    metric = SembleuMetric()
    judgments = []
    for sid in range(len(refs)):
        sx, sy = (metric.sentence(outs[s][sid], refs[sid]) for s in "xy")
        judgments.append(JudgmentRecord(sid, "x", "y", "a" if sx > sy else "b"))
    acc = corpus_agreement_bootstrap(judgments, outs, refs, metric, samples=50, sample_size=20)
    assert acc[("x", "y")] == 1.0
    assert sentence_agreement(judgments, outs, refs, metric) == 100.0


def test_ties_agree_only_with_ties():
    g = parse_penman("(a / ask-01 :ARG0 (g / girl))")
    outs = {"x": [g], "y": [g]}
    assert sentence_agreement([JudgmentRecord(0, "x", "y", "tie")], outs, [g], SembleuMetric()) == 100.0
    assert sentence_agreement([JudgmentRecord(0, "x", "y", "a")], outs, [g], SembleuMetric()) == 0.0


def test_validation(world):
    refs, outs, judgments = world
    with pytest.raises(ValueError):
        sentence_agreement([JudgmentRecord(0, "good", "ghost", "a")], outs, refs, SembleuMetric())
    with pytest.raises(ValueError):
        sentence_agreement([JudgmentRecord(99, "good", "mid", "a")], outs, refs, SembleuMetric())
    with pytest.raises(ValueError):
        corpus_agreement_bootstrap(judgments, outs, refs, SembleuMetric(), samples=0)


def test_agreement_by_order(world):
    refs, outs, judgments = world
    by_order = sentence_agreement_by_order(judgments, outs, refs, orders=(1, 2, 3))
    assert set(by_order) == {1, 2, 3}
    assert all(0.0 <= v <= 100.0 for v in by_order.values())
    # noisier systems lose more often, so agreement should beat chance
    assert by_order[3] > 50.0


def test_least_squares_exact():
    assert least_squares([1, 2, 3], [2, 4, 6]) == (2.0, 0.0)
    assert least_squares([1, 2, 3, 4], [3, 5, 7, 9]) == (2.0, 1.0)
    with pytest.raises(ValueError):
        least_squares([], [])


def test_growth_on_trees():
    rng = random.Random(0)
    trees = [random_tree(rng, rng.randint(2, 80)) for _ in range(60)]
    report = ngram_growth(trees)
    assert report.fits[1] == (1.0, 0.0)
    assert all(sum(r.totals) <= 3 * r.node_count for r in report.records)
    rows = list(report.csv_rows())
    assert len(rows) == 3 * len(trees) and rows[0][1] == 1


def test_rank_systems(world):
    refs, outs, _ = world
    systems = {"ref": refs, "copy": list(refs), **outs}
    report = rank_systems(systems, refs, [SembleuMetric(), SmatchMetric()])
    for name in ("sembleu", "smatch"):
        assert report.rankings[name][:2] == ["copy", "ref"]
        assert report.rankings[name][2:] == ["good", "mid", "bad"]
        assert ("copy", "ref") in report.ties[name]
    assert report.scores["sembleu"]["ref"] == 1.0 and report.scores["smatch"]["ref"] == 1.0
    assert report.disagreements == []
    with pytest.raises(ValueError):
        rank_systems({"x": refs}, refs, [SembleuMetric()])


def test_graded_deletions_rank_monotonically():
    refs = synthetic_corpus(30, seed=2, sizes=(8, 20))
    rng = random.Random(2)
    systems = {f"del{k}": [delete_edges(g, k, rng) for g in refs] for k in (1, 3, 5)}
    systems["del0"] = refs
    report = rank_systems(systems, refs, [SembleuMetric(), SmatchMetric()])
    assert report.rankings["sembleu"] == report.rankings["smatch"] == ["del0", "del1", "del3", "del5"]


def test_restart_variance_shape():
    refs = synthetic_corpus(10, seed=3, sizes=(6, 15))
    outs = system_outputs(refs, {"s": 0.3}, seed=3)["s"]
    rows = restart_variance(list(zip(outs, refs)), (1, 2), runs=4, timing_runs=1)
    assert [r.restarts for r in rows] == [1, 2]
    assert all(r.min <= r.mean <= r.max and r.spread >= 0 for r in rows)
    assert rows[1].mean >= rows[0].mean
    with pytest.raises(ValueError):
        restart_variance(list(zip(outs, refs)), (0,), runs=4)


def test_benchmark_reports_both_timings(world):
    refs, outs, _ = world
    report = benchmark(list(zip(outs["mid"], refs)), SembleuConfig())
    assert report.pairs == len(refs)
    assert report.sembleu_seconds > 0 and report.smatch_seconds > 0
    assert report.as_dict()["ratio"] == report.ratio
