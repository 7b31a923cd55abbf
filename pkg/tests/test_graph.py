import pytest
from hypothesis import given, settings

from sembleu.graph import (Edge, Graph, Node, ParseError, describe, graph_size, graph_to_triples,
                           is_inverse, iter_blocks, normalize_inverse, parse_corpus, parse_penman,
                           read_corpus, reachable_order, to_penman)

from conftest import ASK, MAKE, amr_graphs


def labels(g):
    return sorted(n.label for n in g.nodes)


def edges(g):
    return sorted((g.label(e.source), e.label, g.label(e.target)) for e in g.edges)


def test_minimal_pair():
    g = parse_penman("(a / ask-01 :ARG0 (g / girl))")
    assert labels(g) == ["ask-01", "girl"]
    assert edges(g) == [("ask-01", "ARG0", "girl")]
    assert g.label(g.root) == "ask-01"
    assert g.names[g.root] == "a"


def test_single_node():
    g = parse_penman("(w / woman)")
    assert len(g.nodes) == 1 and g.edges == ()


def test_make_pie(make):
    assert labels(make) == ["2", "make-01", "pie", "woman"]
    assert edges(make) == [("make-01", "ARG0", "woman"), ("make-01", "ARG1", "pie"), ("pie", "quant", "2")]
    assert make.node(3).constant


def test_reentrancy_resolves_to_same_node():
    g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
    assert len(g.nodes) == 3
    assert edges(g) == [("go-02", "ARG0", "boy"), ("want-01", "ARG0", "boy"), ("want-01", "ARG1", "go-02")]


def test_forward_reference():
    g = parse_penman("(w / want-01 :ARG1 (g / go-02 :ARG0 b) :ARG0 (b / boy))")
    assert ("go-02", "ARG0", "boy") in edges(g)


def test_constants_strings_and_polarity():
    g = parse_penman('(n / name :op1 "New" :op2 "York" :polarity -)')
    assert labels(g) == ["-", "name", "new", "york"]
    assert all(n.constant for n in g.nodes if n.label != "name")


def test_quoted_string_keeps_spaces():
    g = parse_penman('(n / name :op1 "a b")')
    assert "a b" in labels(g)


def test_alignments_and_case():
    g = parse_penman("(A / Ask-01~e.2 :ARG0 (G / Girl~e.1))")
    assert labels(g) == ["ask-01", "girl"]
    assert edges(g) == [("ask-01", "ARG0", "girl")]


def test_duplicate_edges_collapse():
    g = parse_penman("(a / ask-01 :ARG0 (g / girl) :ARG0 g)")
    assert len(g.edges) == 1


@pytest.mark.parametrize("text, offset", [
    ("", 0),
    ("   ", 0),
    ("(a / ask-01 :ARG0 (g / girl)", 0),
    ("(a / ask-01))", 12),
    ("(a / ask-01 :ARG0 x)", 18),
    ("(a / ask-01 :ARG0 (a / girl))", 19),
])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse_penman(text)
    assert err.value.offset == offset


def test_corpus():
    doc = f"# ::id 1\n{ASK}\n\n# ::id 2\n{MAKE}\n"
    graphs = parse_corpus(doc)
    assert [len(g.nodes) for g in graphs] == [4, 4]
    assert parse_corpus("") == []
    assert len(parse_corpus("\n\n".join(["(w / woman)"] * 3))) == 3


def test_multiline_block_and_block_lines():
    doc = "(a / ask-01\n   :ARG0 (g / girl))\n\n\n(w / woman)\n"
    blocks = list(iter_blocks(doc))
    assert [(i, line) for i, line, _ in blocks] == [(0, 1), (1, 5)]


def test_corpus_error_names_block():
    with pytest.raises(ParseError) as err:
        parse_corpus(f"{ASK}\n\n(x / broken")
    assert err.value.block == 1
    assert "block 1" in str(err.value)


def test_read_corpus(tmp_path):
    p = tmp_path / "c.amr"
    p.write_text(f"{ASK}\n\n{MAKE}\n", encoding="utf-8")
    assert len(read_corpus(p)) == 2


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph((Node(0, "a"),), (Edge(0, 1, "ARG0"),), 0)
    with pytest.raises(ValueError):
        Graph((Node(0, "a"),), (), 5)


def test_normalize_inverse():
    g = parse_penman("(g / girl :ARG0-of (a / ask-01))")
    n = normalize_inverse(g)
    assert edges(n) == [("ask-01", "ARG0", "girl")]
    assert n.root == g.root and n.nodes == g.nodes


def test_normalize_is_identity_without_inverse(ask):
    assert normalize_inverse(ask) is ask


def test_consist_of_is_not_inverted():
    g = parse_penman("(t / thing :consist-of (m / metal))")
    assert edges(normalize_inverse(g)) == [("thing", "consist-of", "metal")]
    assert not is_inverse("consist-of") and not is_inverse("prep-on-behalf-of")
    assert is_inverse("ARG0-of") and is_inverse("mod-of")


def test_custom_exceptions():
    g = parse_penman("(t / thing :consist-of (m / metal))")
    assert edges(normalize_inverse(g, exceptions=())) == [("metal", "consist", "thing")]


def test_graph_size(ask):
    assert graph_size(ask) == 7
    assert graph_size(parse_penman("(w / woman)")) == 1
    assert graph_size(Graph((), (), None)) == 0


def test_triples(ask, make):
    assert len(graph_to_triples(ask)) == 8
    kinds = [t.kind for t in graph_to_triples(make)]
    assert kinds.count("instance") == 3 and kinds.count("relation") == 2
    assert kinds.count("attribute") == 1 and kinds.count("top") == 1
    attr = next(t for t in graph_to_triples(make) if t.kind == "attribute")
    assert (attr.label, attr.target) == ("quant", "2")
    assert len(graph_to_triples(parse_penman("(w / woman)"))) == 2


def test_triples_of_inverse_match_forward():
    fwd = parse_penman("(a / ask-01 :ARG0 (g / girl))")
    inv = parse_penman("(g / girl :ARG0-of (a / ask-01))")
    strip = lambda g: sorted((t.kind, t.label) for t in graph_to_triples(g) if t.kind != "top")
    assert strip(fwd) == strip(inv)


def test_to_penman(ask):
    assert to_penman(ask) == ASK
    assert parse_penman(to_penman(ask, indent=4)) == ask


def test_reachable_order():
    g = parse_penman("(a / ask-01 :ARG1 (l / leave-11 :ARG0 (b / boy)) :ARG0 (g / girl))")
    assert [g.label(i) for i in reachable_order(g)] == ["ask-01", "leave-11", "girl", "boy"]


@settings(max_examples=200, deadline=None)
@given(amr_graphs())
def test_penman_round_trip(g):
    back = parse_penman(to_penman(g))
    assert describe(normalize_inverse(back)) == describe(normalize_inverse(g))
    assert graph_size(back) == graph_size(g)


@settings(max_examples=200, deadline=None)
@given(amr_graphs())
def test_normalize_idempotent_and_size_preserving(g):
    once = normalize_inverse(g)
    assert normalize_inverse(once) == once
    assert graph_size(once) == graph_size(g)
    assert not any(is_inverse(e.label) for e in once.edges)
