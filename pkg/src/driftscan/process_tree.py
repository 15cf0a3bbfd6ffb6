"""Block-structured process trees, their text notation and Petri net conversion.

Text notation::

    seq(A, and(B, C), D, xor(E, F), G)
    loop(B, seq(C, D))          # body first, then redo parts
    xor(H, tau)                 # tau is the silent leaf

Labels containing spaces, commas, parentheses or quotes, or equal to ``tau``,
are written single-quoted with backslash escapes.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum

from .exceptions import TreeSyntaxError
from .petri_net import PetriNet, Transition

__all__ = [
    "Operator",
    "ProcessTree",
    "leaf",
    "tau",
    "seq",
    "xor",
    "par",
    "loop",
    "parse_tree",
    "format_tree",
    "to_petri_net",
]


class Operator(str, Enum):
    SEQUENCE = "seq"
    XOR = "xor"
    PARALLEL = "and"
    LOOP = "loop"


@dataclass(frozen=True)
class ProcessTree:
    operator: Operator | None = None
    children: tuple[ProcessTree, ...] = ()
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.operator is None:
            if self.children:
                raise ValueError("leaves cannot have children")
        else:
            object.__setattr__(self, "operator", Operator(self.operator))
            if self.label is not None:
                raise ValueError("operator nodes carry no label")
            if len(self.children) < 2:
                raise ValueError(f"{self.operator.value} node needs at least 2 children")

    @property
    def is_leaf(self) -> bool:
        return self.operator is None

    @property
    def is_silent(self) -> bool:
        return self.operator is None and self.label is None

    def activities(self) -> frozenset[str]:
        if self.is_leaf:
            return frozenset() if self.label is None else frozenset([self.label])
        return frozenset().union(*(c.activities() for c in self.children))

    def min_label(self) -> str:
        """Smallest activity label below this node; '' for purely silent subtrees."""
        acts = self.activities()
        return min(acts) if acts else ""

    def subtree(self, path) -> ProcessTree:
        node = self
        for k in path:
            if node.is_leaf or not 0 <= k < len(node.children):
                raise IndexError(f"path {tuple(path)} does not exist")
            node = node.children[k]
        return node

    def replace(self, path, new: ProcessTree) -> ProcessTree:
        path = tuple(path)
        if not path:
            return new
        if self.is_leaf or not 0 <= path[0] < len(self.children):
            raise IndexError(f"path {path} does not exist")
        kids = list(self.children)
        kids[path[0]] = kids[path[0]].replace(path[1:], new)
        return ProcessTree(self.operator, tuple(kids))

    def __str__(self):
        return format_tree(self)


def leaf(label: str) -> ProcessTree:
    return ProcessTree(label=label)


def tau() -> ProcessTree:
    return ProcessTree()


def seq(*children) -> ProcessTree:
    return ProcessTree(Operator.SEQUENCE, _coerce(children))


def xor(*children) -> ProcessTree:
    return ProcessTree(Operator.XOR, _coerce(children))


def par(*children) -> ProcessTree:
    return ProcessTree(Operator.PARALLEL, _coerce(children))


def loop(body, *redo) -> ProcessTree:
    return ProcessTree(Operator.LOOP, _coerce((body, *redo)))


def _coerce(children):
    return tuple(leaf(c) if isinstance(c, str) else c for c in children)


# ---------------------------------------------------------------------------
# text form

_BARE = re.compile(r"^[^\s,()'\\]+$")


def _quote(label: str) -> str:
    if _BARE.match(label) and label != "tau" and label not in {o.value for o in Operator}:
        return label
    return "'" + label.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_tree(tree: ProcessTree) -> str:
    if tree.is_leaf:
        return "tau" if tree.label is None else _quote(tree.label)
    inner = ", ".join(format_tree(c) for c in tree.children)
    return f"{tree.operator.value}({inner})"


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|'(?P<quoted>(?:[^'\\]|\\.)*)'|(?P<bare>[^\s,()']+))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TreeSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        if m.group("punct"):
            tokens.append(("punct", m.group("punct"), m.start("punct")))
        elif m.group("quoted") is not None:
            tokens.append(("label", re.sub(r"\\(.)", r"\1", m.group("quoted")), m.start()))
        else:
            tokens.append(("word", m.group("bare"), m.start("bare")))
        pos = m.end()
    return tokens


def parse_tree(text: str) -> ProcessTree:
    tokens = _tokenize(text)
    if not tokens:
        raise TreeSyntaxError("empty tree text")
    pos = 0

    def expect(value):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][1] != value or tokens[pos][0] != "punct":
            where = tokens[pos][2] if pos < len(tokens) else len(text)
            raise TreeSyntaxError(f"expected {value!r} at offset {where}")
        pos += 1

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise TreeSyntaxError("unexpected end of input")
        kind, value, where = tokens[pos]
        pos += 1
        if kind == "label":
            return leaf(value)
        if kind == "punct":
            raise TreeSyntaxError(f"unexpected {value!r} at offset {where}")
        is_call = pos < len(tokens) and tokens[pos][1] == "(" and tokens[pos][0] == "punct"
        if is_call:
            try:
                op = Operator(value)
            except ValueError:
                raise TreeSyntaxError(f"unknown operator {value!r} at offset {where}") from None
            expect("(")
            kids = [node()]
            while pos < len(tokens) and tokens[pos][1] == "," and tokens[pos][0] == "punct":
                pos += 1
                kids.append(node())
            expect(")")
            if len(kids) < 2:
                raise TreeSyntaxError(f"{op.value} at offset {where} needs at least 2 children")
            return ProcessTree(op, tuple(kids))
        if value == "tau":
            return tau()
        return leaf(value)

    tree = node()
    if pos != len(tokens):
        raise TreeSyntaxError(f"trailing input at offset {tokens[pos][2]}")
    return tree


# ---------------------------------------------------------------------------
# Petri net conversion

def to_petri_net(tree: ProcessTree) -> PetriNet:
    """Workflow net with places ``source``/``sink``. Loops and parallel blocks
    get silent entry/exit transitions so that redo arcs never leak into
    neighbouring choice branches."""
    places = ["source", "sink"]
    transitions: list[Transition] = []
    arcs: list[tuple[str, str]] = []
    pc = itertools.count()
    tc = itertools.count()

    def new_place():
        p = f"p{next(pc)}"
        places.append(p)
        return p

    def new_transition(label):
        t = f"t{next(tc)}"
        transitions.append(Transition(t, label))
        return t

    def build(node: ProcessTree, p_in: str, p_out: str):
        if node.is_leaf:
            t = new_transition(node.label)
            arcs.extend([(p_in, t), (t, p_out)])
        elif node.operator is Operator.SEQUENCE:
            cur = p_in
            for k, child in enumerate(node.children):
                nxt = p_out if k == len(node.children) - 1 else new_place()
                build(child, cur, nxt)
                cur = nxt
        elif node.operator is Operator.XOR:
            for child in node.children:
                build(child, p_in, p_out)
        elif node.operator is Operator.PARALLEL:
            split, join = new_transition(None), new_transition(None)
            arcs.extend([(p_in, split), (join, p_out)])
            for child in node.children:
                a, b = new_place(), new_place()
                arcs.extend([(split, a), (b, join)])
                build(child, a, b)
        else:
            enter, leave = new_transition(None), new_transition(None)
            q1, q2 = new_place(), new_place()
            arcs.extend([(p_in, enter), (enter, q1), (q2, leave), (leave, p_out)])
            build(node.children[0], q1, q2)
            for redo in node.children[1:]:
                build(redo, q2, q1)

    build(tree, "source", "sink")
    return PetriNet(places, transitions, arcs, source="source", sink="sink")
