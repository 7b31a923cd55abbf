"""AMR graph model, PENMAN reader/writer and the views the metrics consume.

Graphs are immutable. Node ids are opaque integers assigned in declaration
order by the parser; constants (numbers, quoted strings, polarity) are nodes
too, flagged with ``constant=True``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

DEFAULT_INVERSE_EXCEPTIONS = frozenset({"consist-of", "prep-out-of", "prep-on-behalf-of"})


class ParseError(ValueError):
    """Malformed PENMAN input. ``offset`` is a character offset into the text."""

    def __init__(self, message: str, offset: int, block: Optional[int] = None):
        self.message = message
        self.offset = offset
        self.block = block
        where = f"offset {offset}" if block is None else f"block {block}, offset {offset}"
        super().__init__(f"{message} ({where})")


class Node(NamedTuple):
    id: int
    label: str
    constant: bool = False


class Edge(NamedTuple):
    source: int
    target: int
    label: str


class Triple(NamedTuple):
    """One Smatch triple.

    ``instance``: label=concept, source=variable, target=None
    ``relation``: label=role, source, target are variable ids
    ``attribute``: label=role, source=variable, target=constant string
    ``top``: label="top", source=root variable, target=None
    """

    kind: str
    label: str
    source: int
    target: object = None


@dataclass(frozen=True)
class Graph:
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    root: Optional[int] = None
    # surface variable names, only used when writing PENMAN back out
    names: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node id")
        known = set(ids)
        if self.nodes and self.root not in known:
            raise ValueError(f"root {self.root!r} is not a node")
        if not self.nodes and self.root is not None:
            raise ValueError("empty graph cannot have a root")
        for e in self.edges:
            if e.source not in known or e.target not in known:
                raise ValueError(f"edge {e} has an undeclared endpoint")

    def node(self, node_id: int) -> Node:
        return self._index[node_id]

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {n.id: n for n in self.nodes}
            object.__setattr__(self, "_idx", idx)
        return idx

    def label(self, node_id: int) -> str:
        return self._index[node_id].label

    def variables(self) -> list[Node]:
        return [n for n in self.nodes if not n.constant]

    def out_edges(self) -> dict[int, list[Edge]]:
        """Outgoing edges per node id, in edge declaration order."""
        out: dict[int, list[Edge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            out[e.source].append(e)
        return out

    def __len__(self):
        return len(self.nodes)


def graph_size(g: Graph) -> int:
    return len(g.nodes) + len(g.edges)


def is_inverse(label: str, exceptions: Iterable[str] = DEFAULT_INVERSE_EXCEPTIONS) -> bool:
    low = label.lower()
    return low.endswith("-of") and low not in exceptions


def normalize_inverse(g: Graph, exceptions: Iterable[str] = DEFAULT_INVERSE_EXCEPTIONS) -> Graph:
    """Rewrite every ``X-of`` edge as the reversed ``X`` edge.

    Node set, edge count and root are kept, so the result may have several
    source nodes (or cycles) as a plain digraph.
    """
    exceptions = frozenset(exceptions)
    edges = []
    changed = False
    for e in g.edges:
        if e.label.endswith("-of") and is_inverse(e.label, exceptions):
            edges.append(Edge(e.target, e.source, e.label[:-3]))
            changed = True
        else:
            edges.append(e)
    return Graph(g.nodes, tuple(edges), g.root, g.names) if changed else g


def graph_to_triples(g: Graph, exceptions: Iterable[str] = DEFAULT_INVERSE_EXCEPTIONS) -> list[Triple]:
    """Smatch triple view: instances, relations, attributes and one top triple.

    Inverse roles are reversed first, the same way :func:`normalize_inverse`
    does. Identical triples are emitted once.
    """
    if not g.nodes:
        return []
    g = normalize_inverse(g, exceptions)
    triples: list[Triple] = []
    for n in g.nodes:
        if not n.constant:
            triples.append(Triple("instance", n.label, n.id))
    for e in g.edges:
        src, tgt = g.node(e.source), g.node(e.target)
        if src.constant and tgt.constant:
            continue
        if tgt.constant:
            triples.append(Triple("attribute", e.label, e.source, tgt.label))
        elif src.constant:
            # only reachable through an inverse role pointing at a constant
            triples.append(Triple("attribute", e.label + "-of", e.target, src.label))
        else:
            triples.append(Triple("relation", e.label, e.source, e.target))
    triples.append(Triple("top", "top", g.root))
    return list(dict.fromkeys(triples))


# --------------------------------------------------------------------------
# PENMAN reading

_ALIGNMENT = re.compile(r"~(?:[A-Za-z]+\.?)?\d+(?:[.,]\d+)*$")
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<lparen>\()
    |(?P<rparen>\))
    |(?P<slash>/)
    |(?P<role>:[^\s()"/]*)
    |(?P<string>"(?:[^"\\]|\\.)*"(?:~[^\s()]*)?)
    |(?P<symbol>[^\s()"/:][^\s()"/]*)
    """,
    re.VERBOSE,
)
# bare symbols shaped like variable names must resolve to a declared variable
_VARIABLE_LIKE = re.compile(r"^[a-z]\d*$")


def _strip_alignment(text: str) -> str:
    return _ALIGNMENT.sub("", text)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.nodes: list[Node] = []
        self.names: dict[int, str] = {}
        self.by_name: dict[str, int] = {}
        # [source, role, target]; target is None until a forward reference resolves
        self.edges: list[list] = []
        self.pending: list[tuple[int, str, int]] = []  # (edge slot, symbol, offset)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input, expected {kind}", len(self.text))
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def new_node(self, label: str, constant: bool) -> int:
        nid = len(self.nodes)
        self.nodes.append(Node(nid, label, constant))
        return nid

    def parse(self) -> Graph:
        if not self.tokens:
            raise ParseError("empty input", 0)
        root = self.parse_node()
        tok = self.peek()
        if tok is not None:
            if tok[0] == "rparen":
                raise ParseError("unbalanced ')'", tok[2])
            raise ParseError(f"trailing content {tok[1]!r}", tok[2])
        for slot, symbol, offset in self.pending:
            if symbol in self.by_name:
                self.edges[slot][2] = self.by_name[symbol]
            elif _VARIABLE_LIKE.match(symbol):
                raise ParseError(f"reference to undeclared variable {symbol!r}", offset)
            else:
                self.edges[slot][2] = self.new_node(symbol.lower(), True)
        edges = dict.fromkeys(Edge(s, t, r) for s, r, t in self.edges)
        return Graph(tuple(self.nodes), tuple(edges), root, dict(self.names))

    def parse_node(self) -> int:
        start = self.take("lparen")
        name_tok = self.peek()
        if name_tok is None:
            raise ParseError("unbalanced '('", start[2])
        if name_tok[0] != "symbol":
            raise ParseError(f"expected variable name, found {name_tok[1]!r}", name_tok[2])
        self.i += 1
        name = _strip_alignment(name_tok[1])
        if name in self.by_name:
            raise ParseError(f"duplicate declaration of variable {name!r}", name_tok[2])
        self.take("slash")
        concept_tok = self.peek()
        if concept_tok is None or concept_tok[0] not in ("symbol", "string"):
            where = concept_tok[2] if concept_tok else len(self.text)
            raise ParseError("expected concept after '/'", where)
        self.i += 1
        nid = self.new_node(_clean_constant(concept_tok[1]), False)
        self.names[nid] = name
        self.by_name[name] = nid
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unbalanced '('", start[2])
            if tok[0] == "rparen":
                self.i += 1
                return nid
            if tok[0] != "role":
                raise ParseError(f"expected role or ')', found {tok[1]!r}", tok[2])
            self.i += 1
            role = _strip_alignment(tok[1][1:])
            if not role:
                raise ParseError("empty role", tok[2])
            self.parse_target(nid, role)

    def parse_target(self, src: int, role: str):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"missing target for role :{role}", len(self.text))
        kind, value, offset = tok
        if kind == "lparen":
            slot = [src, role, None]
            self.edges.append(slot)
            slot[2] = self.parse_node()
        elif kind == "string":
            self.i += 1
            self.edges.append([src, role, self.new_node(_clean_constant(value), True)])
        elif kind == "symbol":
            self.i += 1
            symbol = _strip_alignment(value)
            if symbol in self.by_name:
                self.edges.append([src, role, self.by_name[symbol]])
            else:
                # may be a constant or a variable declared further on
                self.pending.append((len(self.edges), symbol, offset))
                self.edges.append([src, role, None])
        else:
            raise ParseError(f"expected role target, found {value!r}", offset)


def _clean_constant(text: str) -> str:
    text = _strip_alignment(text)
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        text = text[1:-1]
    return text.lower()


def parse_penman(text: str) -> Graph:
    """Parse one PENMAN expression.

    >>> g = parse_penman("(a / ask-01 :ARG0 (g / girl))")
    >>> [n.label for n in g.nodes], [e.label for e in g.edges]
    (['ask-01', 'girl'], ['ARG0'])
    """
    return _Reader(text).parse()


def iter_blocks(text: str):
    """Yield ``(block_index, start_line, block_text)`` for each AMR block.

    Blocks are separated by blank lines; ``#`` lines are dropped.
    """
    lines: list[str] = []
    start = 0
    index = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if lines:
                yield index, start, "\n".join(lines)
                index += 1
                lines = []
            continue
        if not lines:
            start = lineno
        lines.append(raw)
    if lines:
        yield index, start, "\n".join(lines)


def parse_corpus(text: str) -> list[Graph]:
    graphs = []
    for index, line, block in iter_blocks(text):
        try:
            graphs.append(parse_penman(block))
        except ParseError as err:
            raise ParseError(f"{err.message} (line {line})", err.offset, block=index) from err
    return graphs


def read_corpus(path) -> list[Graph]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


# --------------------------------------------------------------------------
# PENMAN writing

_BARE_CONSTANT = re.compile(r"^(?:[-+]|-?\d+(?:\.\d+)?|[a-z][a-z-]+)$")


def _format_constant(label: str) -> str:
    if _BARE_CONSTANT.match(label) and not _VARIABLE_LIKE.match(label):
        return label
    return '"' + label.replace('"', '\\"') + '"'


def to_penman(g: Graph, indent: Optional[int] = None) -> str:
    """Serialize ``g`` back to PENMAN.

    Edges are walked in both directions, writing ``X-of`` for edges entered
    from their target, so any weakly connected graph can be written. Raises
    ValueError if some node cannot be reached from the root.
    """
    if not g.nodes:
        raise ValueError("cannot serialize an empty graph")
    names = _variable_names(g)
    out_edges = g.out_edges()
    in_edges: dict[int, list[Edge]] = {n.id: [] for n in g.nodes}
    for e in g.edges:
        in_edges[e.target].append(e)
    used_edges: set[int] = set()
    edge_ids = {id(e): i for i, e in enumerate(g.edges)}
    seen: set[int] = set()

    def walk(nid: int, depth: int) -> str:
        seen.add(nid)
        parts = [f"({names[nid]} / {_format_concept(g.label(nid))}"]
        steps = [(e, e.target, e.label) for e in out_edges[nid]]
        steps += [(e, e.source, _reverse_role(e.label)) for e in in_edges[nid]]
        for e, other, role in steps:
            eid = edge_ids[id(e)]
            if eid in used_edges:
                continue
            used_edges.add(eid)
            node = g.node(other)
            if node.constant:
                if other == e.source:
                    raise ValueError("constant node used as an edge source")
                target = _format_constant(node.label)
            elif other in seen:
                target = names[other]
            else:
                target = walk(other, depth + 1)
            if indent is None:
                parts.append(f" :{role} {target}")
            else:
                parts.append("\n" + " " * (indent * (depth + 1)) + f":{role} {target}")
        return "".join(parts) + ")"

    text = walk(g.root, 0)
    missing = [n.id for n in g.nodes if not n.constant and n.id not in seen]
    if missing or len(used_edges) != len(g.edges):
        raise ValueError("graph is not connected; cannot write it as one PENMAN tree")
    return text


def _reverse_role(label: str) -> str:
    # an edge already labelled X-of is written backwards as plain X
    return label[:-3] if is_inverse(label) else label + "-of"


def _format_concept(label: str) -> str:
    if re.search(r'[\s()"/:]', label) or not label:
        return '"' + label + '"'
    return label


def _variable_names(g: Graph) -> dict[int, str]:
    names: dict[int, str] = {}
    taken: set[str] = set()
    for n in g.nodes:
        if n.constant:
            continue
        name = g.names.get(n.id)
        if not name or name in taken:
            letter = next((c for c in n.label if c.isalpha() and c.isascii()), "x").lower()
            name, k = letter, 1
            while name in taken:
                k += 1
                name = f"{letter}{k}"
        names[n.id] = name
        taken.add(name)
    return names


def describe(g: Graph) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Label-level view: sorted node labels and sorted (source, role, target) labels."""
    nodes = sorted(n.label for n in g.nodes)
    edges = sorted((g.label(e.source), e.label, g.label(e.target)) for e in g.edges)
    return nodes, edges


def reachable_order(g: Graph) -> list[int]:
    """Node ids breadth-first from the root along edge direction, siblings in
    edge declaration order, then every unreached node in declaration order."""
    if not g.nodes:
        return []
    out = g.out_edges()
    order = [g.root]
    seen = {g.root}
    queue = deque([g.root])
    while queue:
        nid = queue.popleft()
        for e in out[nid]:
            if e.target not in seen:
                seen.add(e.target)
                order.append(e.target)
                queue.append(e.target)
    order.extend(n.id for n in g.nodes if n.id not in seen)
    return order
