import random

from hypothesis import given, settings, strategies as st

from sembleu.graph import graph_size, parse_penman, reachable_order, to_penman
from sembleu.synthetic import (add_leaves, aligned_quality, chain, delete_edges, drop_leaves, noisy_copy,
                               random_amr, realistic_size, reattach, relabel_concepts, relabel_edges,
                               simulate_judgments, synthetic_corpus, system_outputs)


def connected(g):
    return len(reachable_order(g)) == len(g.nodes)


def test_corpus_is_reproducible():
    a = synthetic_corpus(20, seed=4)
    assert a == synthetic_corpus(20, seed=4)
    assert a != synthetic_corpus(20, seed=5)


def test_realistic_sizes_stay_in_range():
    rng = random.Random(0)
    sizes = [realistic_size(rng) for _ in range(2000)]
    assert min(sizes) >= 2 and max(sizes) <= 120
    assert 8 <= sorted(sizes)[1000] <= 20


def test_chain():
    g = chain(["a", "b", "c"])
    assert graph_size(g) == 5 and to_penman(g) == "(a / a :ARG1 (b / b :ARG1 (c / c)))"


def test_delete_edges_keeps_nodes():
    g = chain(list("abcde"))
    rng = random.Random(0)
    assert len(delete_edges(g, 2, rng).edges) == 2
    assert len(delete_edges(g, 10, rng).edges) == 0
    assert delete_edges(g, 2, rng).nodes == g.nodes


def test_aligned_quality():
    g = parse_penman("(a / ask-01 :ARG0 (g / girl))")
    assert aligned_quality(g, g) == 1.0
    assert aligned_quality(parse_penman("(a / ask-01 :ARG0 (g / boy))"), g) < 1.0


def test_judgments_cover_every_sentence():
    refs = synthetic_corpus(10, seed=0, sizes=(3, 8))
    outs = system_outputs(refs, {"a": 0.1, "b": 0.5, "c": 0.3, "d": 0.9}, seed=0)
    judgments = simulate_judgments(refs, outs, seed=0)
    assert len(judgments) == 20
    assert {j.sentence_id for j in judgments} == set(range(10))
    assert judgments == simulate_judgments(refs, outs, seed=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.floats(0.0, 1.0))
def test_noise_keeps_graphs_writable(seed, n, level):
    rng = random.Random(seed)
    g = random_amr(rng, n)
    assert connected(g)
    for op in (relabel_concepts, relabel_edges, reattach, add_leaves, drop_leaves):
        h = op(g, 3, rng)
        assert connected(h)
        to_penman(h)
    out = noisy_copy(g, rng, level)
    assert connected(out) and parse_penman(to_penman(out))
    assert noisy_copy(g, rng, 0.0) == g
