"""Flat prefix-order expression trees and their s-expression text form.

A program is a tuple of nodes in depth-first pre-order. A node is one of

* a :class:`~syrbo.primitives.Primitive` (internal node),
* an ``int`` (feature index, printed ``x<i>``),
* a ``float`` (ephemeral constant).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .primitives import Primitive

Node = Union[Primitive, int, float]


def node_arity(node: Node) -> int:
    return node.arity if isinstance(node, Primitive) else 0


def is_valid(nodes) -> bool:
    """True if ``nodes`` parses as exactly one complete prefix expression."""
    if not nodes:
        return False
    need = 1
    for i, node in enumerate(nodes):
        if isinstance(node, Primitive):
            need += node.arity - 1
        elif isinstance(node, (int, float)) and not isinstance(node, bool):
            need -= 1
        else:
            return False
        if need == 0:
            return i == len(nodes) - 1
    return False


def subtree_end(nodes, start: int) -> int:
    """Index one past the subtree rooted at ``start``."""
    need = 1
    end = start
    while need:
        node = nodes[end]
        if isinstance(node, Primitive):
            need += node.arity
        need -= 1
        end += 1
    return end


def depth(nodes) -> int:
    """Depth of the tree; a single terminal has depth 0."""
    best = 0
    stack = []  # remaining children per open primitive
    for node in nodes:
        d = len(stack)
        best = max(best, d)
        if stack:
            stack[-1] -= 1
        if isinstance(node, Primitive):
            stack.append(node.arity)
        while stack and stack[-1] == 0:
            stack.pop()
    return best


@dataclass(frozen=True)
class Program:
    nodes: tuple

    def __post_init__(self):
        if not isinstance(self.nodes, tuple):
            object.__setattr__(self, "nodes", tuple(self.nodes))
        if not is_valid(self.nodes):
            raise ValueError("node sequence is not a single complete prefix expression")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        return depth(self.nodes)

    @property
    def max_feature(self) -> int:
        """Largest feature index referenced, or -1 if none."""
        return max((n for n in self.nodes if type(n) is int), default=-1)

    def __str__(self) -> str:
        return to_sexpr(self)

    @classmethod
    def parse(cls, text: str) -> "Program":
        return parse_sexpr(text)


def _atom(node: Node) -> str:
    if type(node) is int:
        return f"x{node}"
    return repr(float(node))


def to_sexpr(program: Program) -> str:
    """Print a program as prefix s-expression text, e.g. ``(mul (add x0 0.5) x1)``.

    Constants use ``repr`` so that :func:`parse_sexpr` recovers them exactly.
    """
    out = []
    stack = []
    for node in program.nodes:
        if stack:
            out.append(" ")
        if isinstance(node, Primitive):
            out.append("(" + node.text)
            stack.append(node.arity)
            continue
        out.append(_atom(node))
        if stack:
            stack[-1] -= 1
        while stack and stack[-1] == 0:
            out.append(")")
            stack.pop()
            if stack:
                stack[-1] -= 1
    return "".join(out)


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_FEATURE = re.compile(r"x(\d+)\Z")


def _tokens(text: str):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize program at offset {pos}")
        yield m.group(1)
        pos = m.end()


def _parse_atom(tok: str) -> Node:
    m = _FEATURE.match(tok)
    if m:
        return int(m.group(1))
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"bad terminal {tok!r}") from None


def parse_sexpr(text: str) -> Program:
    """Inverse of :func:`to_sexpr`."""
    toks = list(_tokens(text))
    if not toks:
        raise ValueError("empty program text")
    nodes = []
    stack = []  # [primitive, children seen]
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok == "(":
            if i + 1 >= len(toks):
                raise ValueError("unterminated expression")
            nodes.append(Primitive.from_text(toks[i + 1]))
            stack.append([nodes[-1], 0])
            i += 2
            continue
        if tok == ")":
            if not stack:
                raise ValueError("unbalanced ')'")
            prim, seen = stack.pop()
            if seen != prim.arity:
                raise ValueError(f"{prim.text} expects {prim.arity} argument(s), got {seen}")
            if stack:
                stack[-1][1] += 1
            elif i != len(toks) - 1:
                raise ValueError("trailing tokens after program")
        else:
            nodes.append(_parse_atom(tok))
            if stack:
                stack[-1][1] += 1
            elif i != len(toks) - 1:
                raise ValueError("trailing tokens after program")
        i += 1
    if stack:
        raise ValueError("unterminated expression")
    return Program(tuple(nodes))
