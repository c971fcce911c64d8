"""Newick parsing, serialization and conversion to height-valued trees.

Supported grammar: nested parentheses, comma separated children, unquoted or
single-quoted names (``''`` escapes a quote), ``:length`` branch lengths,
``[...]`` comments anywhere between tokens, arbitrary whitespace, several
``;``-terminated trees per text.  Comments that follow a node's name or length
are kept on that node so that ``[&height=x]`` annotations can be read back.

The parser is iterative, so deep caterpillar trees do not hit the recursion
limit, and every failure is a :class:`~linf_cophenetic.errors.NewickSyntaxError`
carrying the offending character position.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .cophenetic import format_real
from .errors import (
    MissingBranchLength,
    MissingHeightAnnotation,
    MissingSemicolon,
    NegativeBranchLength,
    NewickSyntaxError,
    NotUltrametric,
    UnnamedLeaf,
    UnterminatedComment,
    UnterminatedQuote,
)
from .tree_core import ROOT, PhyloTree, build_merge_tree, label_tree

_DELIMS = frozenset("()[]':;,")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_HEIGHT = re.compile(r"(?:^|[&,\s])height\s*=\s*([^,\s\]]+)")
ULTRAMETRIC_TOL = 1e-9


@dataclass
class NewickNode:
    name: Optional[str] = None
    branch_length: Optional[float] = None
    children: list["NewickNode"] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def is_leaf(self) -> bool:
        return not self.children

    def __repr__(self):
        # the default dataclass repr recurses and fails on deep trees
        return (
            f"NewickNode(name={self.name!r}, branch_length={self.branch_length!r}, "
            f"children=<{len(self.children)}>, comments={self.comments!r})"
        )


class HeightConvention(enum.Enum):
    """How node heights are derived from a Newick tree.

    DEPTH_NEGATIVE
        ``height(v) = -(branch length sum from the root to v)``; root at 0.
    LEAF_ZERO_ULTRAMETRIC
        All root-to-leaf lengths must agree (within 1e-9); leaves at 0,
        ``height(v) = leaf depth - depth(v)``.
    EXPLICIT_HEIGHTS
        Every node carries a ``[&height=x]`` annotation.
    AUTO
        EXPLICIT_HEIGHTS when every node is annotated, else DEPTH_NEGATIVE.
    """

    DEPTH_NEGATIVE = "depth-negative"
    LEAF_ZERO_ULTRAMETRIC = "ultrametric"
    EXPLICIT_HEIGHTS = "explicit"
    AUTO = "auto"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.n = len(text)
        self.pos = 0

    def error(self, message, expected="", cls=NewickSyntaxError, pos=None):
        return cls(message, self.pos if pos is None else pos, expected)

    def skip(self, sink: Optional[list] = None) -> None:
        """Skip whitespace and comments, appending comment bodies to ``sink``."""
        s, n = self.s, self.n
        while self.pos < n:
            c = s[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "[":
                end = s.find("]", self.pos + 1)
                if end < 0:
                    raise self.error("unterminated comment", "']'", UnterminatedComment)
                if sink is not None:
                    sink.append(s[self.pos + 1 : end])
                self.pos = end + 1
            else:
                return

    def peek(self) -> str:
        return self.s[self.pos] if self.pos < self.n else ""

    def name(self) -> Optional[str]:
        s, n = self.s, self.n
        c = self.peek()
        if c == "'":
            start = self.pos
            out = []
            i = self.pos + 1
            while True:
                j = s.find("'", i)
                if j < 0:
                    raise self.error("unterminated quoted name", "\"'\"", UnterminatedQuote, start)
                out.append(s[i:j])
                if j + 1 < n and s[j + 1] == "'":
                    out.append("'")
                    i = j + 2
                else:
                    self.pos = j + 1
                    return "".join(out)
        start = self.pos
        i = start
        while i < n and s[i] not in _DELIMS and not s[i].isspace():
            i += 1
        self.pos = i
        return s[start:i] if i > start else None

    def length(self) -> float:
        m = _NUMBER.match(self.s, self.pos)
        if m is None:
            raise self.error("malformed branch length", "a number")
        value = float(m.group())
        if not math.isfinite(value):
            raise self.error("branch length overflows", "a finite number")
        if value < 0:
            raise self.error(
                f"negative branch length {m.group()}", "a length >= 0", NegativeBranchLength
            )
        self.pos = m.end()
        return value

    def tail(self, node: NewickNode) -> None:
        """Name, comments and branch length following a node."""
        self.skip(node.comments)
        node.name = self.name()
        self.skip(node.comments)
        if self.peek() == ":":
            self.pos += 1
            self.skip(node.comments)
            node.branch_length = self.length()
            self.skip(node.comments)

    def tree(self) -> NewickNode:
        stack: list[NewickNode] = []
        expect_node = True
        while True:
            if expect_node:
                self.skip()
                c = self.peek()
                if c == "(":
                    stack.append(NewickNode())
                    self.pos += 1
                    continue
                if not stack and c in (";", ""):
                    raise self.error("empty tree", "a tree")
                if c in (")", "]"):
                    if c == "]" or not stack:
                        raise self.error(f"unexpected {c!r}", "a node")
                node = NewickNode()
                self.tail(node)
            else:
                self.skip()
                c = self.peek()
                if c == ",":
                    if not stack:
                        raise self.error("',' outside parentheses", "';'")
                    self.pos += 1
                    expect_node = True
                    continue
                if c == ")":
                    if not stack:
                        raise self.error("unbalanced ')'", "';'")
                    node = stack.pop()
                    self.pos += 1
                    self.tail(node)
                elif c == ";":
                    if stack:
                        raise self.error("unclosed '('", "',' or ')'")
                    self.pos += 1
                    return root
                elif c == "":
                    if stack:
                        raise self.error("unexpected end of input", "',' or ')'")
                    raise self.error("missing ';' at end of tree", "';'", MissingSemicolon)
                else:
                    raise self.error(f"unexpected {c!r}", "',', ')' or ';'")
            if stack:
                stack[-1].children.append(node)
            else:
                root = node
            expect_node = False

    def trees(self) -> list[NewickNode]:
        out = []
        while True:
            self.skip()
            if self.pos >= self.n:
                break
            out.append(self.tree())
        if not out:
            raise self.error("no tree found", "a tree")
        return out


def parse_newick(text: Union[str, bytes]) -> list[NewickNode]:
    """Parse every ``;``-terminated tree in ``text``.

    Raises
    ------
    NewickSyntaxError
        Or one of its subclasses ``UnterminatedQuote``, ``UnterminatedComment``,
        ``MissingSemicolon``, ``NegativeBranchLength``; ``position`` is the
        0-based character offset (byte offset for undecodable bytes).
    """
    if isinstance(text, (bytes, bytearray, memoryview)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NewickSyntaxError("invalid UTF-8", exc.start, "UTF-8 text") from None
    return _Parser(text).trees()


# ---------------------------------------------------------------------------
# Conversion to PhyloTree
# ---------------------------------------------------------------------------


def _flatten(root: NewickNode) -> tuple[list[NewickNode], list[int]]:
    nodes: list[NewickNode] = []
    parent: list[int] = []
    stack = [(root, ROOT)]
    while stack:
        node, p = stack.pop()
        nodes.append(node)
        parent.append(p)
        k = len(nodes) - 1
        for c in reversed(node.children):
            stack.append((c, k))
    return nodes, parent


def height_annotation(node: NewickNode) -> Optional[float]:
    for c in node.comments:
        if not c.startswith("&"):
            continue
        m = _HEIGHT.search(c)
        if m:
            try:
                return float(m.group(1))
            except ValueError:
                raise MissingHeightAnnotation(
                    f"height annotation {m.group(1)!r} is not a number"
                ) from None
    return None


def _depths(nodes, parent) -> list[float]:
    depth = [0.0] * len(nodes)
    for k in range(1, len(nodes)):
        length = nodes[k].branch_length
        if length is None:
            who = nodes[k].name or f"node {k}"
            raise MissingBranchLength(f"{who} has no branch length")
        depth[k] = depth[parent[k]] + length
    return depth


def to_phylo(
    node: NewickNode,
    convention: Union[HeightConvention, str] = HeightConvention.DEPTH_NEGATIVE,
    strict: bool = False,
) -> PhyloTree:
    """Convert a parsed tree to a :class:`PhyloTree`.

    Leaf names become labels; internal names are ignored.  See
    :class:`HeightConvention` for how heights are assigned.

    Raises
    ------
    UnnamedLeaf, DuplicateLabel, MissingBranchLength, NotUltrametric,
    MissingHeightAnnotation, NonFiniteHeight, NonMonotoneEdge
    """
    convention = HeightConvention(convention)
    nodes, parent = _flatten(node)
    for k, nd in enumerate(nodes):
        if nd.is_leaf() and not nd.name:
            raise UnnamedLeaf(f"leaf {k} (pre-order) has no name")

    if convention is HeightConvention.AUTO:
        annotated = all(height_annotation(nd) is not None for nd in nodes)
        convention = (
            HeightConvention.EXPLICIT_HEIGHTS if annotated else HeightConvention.DEPTH_NEGATIVE
        )

    if convention is HeightConvention.DEPTH_NEGATIVE:
        heights = [-d for d in _depths(nodes, parent)]
        heights[0] = 0.0
    elif convention is HeightConvention.LEAF_ZERO_ULTRAMETRIC:
        depth = _depths(nodes, parent)
        leaf_depths = [depth[k] for k, nd in enumerate(nodes) if nd.is_leaf()]
        top, bottom = max(leaf_depths), min(leaf_depths)
        if top - bottom > ULTRAMETRIC_TOL:
            raise NotUltrametric(
                f"root-to-leaf lengths range over [{bottom!r}, {top!r}]"
            )
        heights = [0.0 if nd.is_leaf() else top - depth[k] for k, nd in enumerate(nodes)]
    else:
        heights = []
        for k, nd in enumerate(nodes):
            h = height_annotation(nd)
            if h is None:
                raise MissingHeightAnnotation(
                    f"{nd.name or f'node {k}'} lacks a [&height=...] annotation"
                )
            heights.append(h)

    raw = [
        (h, p, nd.name if nd.is_leaf() else None)
        for h, p, nd in zip(heights, parent, nodes)
    ]
    return label_tree(build_merge_tree(raw, strict=strict))


def loads(
    text: Union[str, bytes],
    convention: Union[HeightConvention, str] = HeightConvention.AUTO,
) -> list[PhyloTree]:
    """Parse and convert every tree in ``text``."""
    return [to_phylo(nd, convention) for nd in parse_newick(text)]


def load(path, convention=HeightConvention.AUTO) -> list[PhyloTree]:
    with open(path, "rb") as fh:
        return loads(fh.read(), convention)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def quote_name(name: str) -> str:
    if name and not any(c in _DELIMS or c.isspace() for c in name):
        return name
    return "'" + name.replace("'", "''") + "'"


def serialize(t: PhyloTree) -> str:
    """Canonical Newick with a ``[&height=x]`` annotation on every node.

    Children are ordered by the smallest leaf name they contain; internal
    nodes carry no name.
    """
    tree = t.tree
    names = list(tree.names)
    for i, leaf in enumerate(t.labels):
        names[leaf] = t.label_names[i]

    smallest: dict[int, str] = {}
    post = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        post.append(v)
        stack.extend(tree.children[v])
    for v in reversed(post):
        ch = tree.children[v]
        smallest[v] = names[v] if not ch else min(smallest[c] for c in ch)

    out: list[str] = []
    # work items are node indices or literal text
    work: list = [tree.root]
    while work:
        item = work.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        ann = f"[&height={format_real(tree.heights[item])}]"
        ch = tree.children[item]
        if not ch:
            out.append(quote_name(names[item]) + ann)
            continue
        out.append("(")
        work.append(")" + ann)
        ordered = sorted(ch, key=smallest.__getitem__)
        for k in range(len(ordered) - 1, -1, -1):
            work.append(ordered[k])
            if k > 0:
                work.append(",")
    return "".join(out) + ";"


def dumps(trees) -> str:
    return "".join(serialize(t) + "\n" for t in trees)
