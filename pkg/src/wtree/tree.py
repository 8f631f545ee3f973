"""Weighted rooted trees: the value type, bracket notation, predicates and
canonical forms.

A tree is written as ``o[a(2),b[c(1),d(1)]]``: a label, an optional
parenthesised non-negative weight (omitted means 0) and an optional bracketed
list of children.  Siblings carry no order; printing sorts them by their
canonical encoding so that isomorphic trees print alike up to labels.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "WeightedTree",
    "TreeClassification",
    "BracketParseError",
    "parse",
    "to_bracket",
    "classify",
    "canonical_form",
    "unweighted_canonical_form",
    "label_sequence",
    "random_tree",
    "random_isomorphic_copy",
]


class BracketParseError(ValueError):
    """Malformed bracket text.  ``pos`` is the 0-based offset of the problem."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


# Sort key of a subtree: (height, -weight, child keys).  Leaves come first,
# heavier before lighter; the key is a complete invariant of the weighted
# rooted isomorphism class.
Key = tuple


class WeightedTree:
    """Immutable rooted tree with non-negative integer vertex weights.

    Vertex ids are strings and unique; ``label`` is a display name only.
    Equality compares ids, parent relation and weights (not labels); use
    :func:`canonical_form` to compare up to isomorphism.
    """

    def __init__(
        self,
        root: str,
        parent: Mapping[str, str],
        weight: Mapping[str, int],
        label: Mapping[str, str] | None = None,
    ):
        vertices = set(weight)
        if root not in vertices:
            raise ValueError(f"root {root!r} has no weight")
        if root in parent:
            raise ValueError("the root cannot have a parent")
        if set(parent) != vertices - {root}:
            raise ValueError("every non-root vertex needs exactly one parent")
        for v, w in weight.items():
            if not isinstance(w, int) or w < 0:
                raise ValueError(f"weight of {v!r} must be a non-negative integer, got {w!r}")
        children: dict[str, list[str]] = {v: [] for v in weight}
        for v, p in parent.items():
            if p not in vertices:
                raise ValueError(f"parent {p!r} of {v!r} is not a vertex")
            children[p].append(v)
        # reachability from the root rules out cycles
        seen = {root}
        stack = [root]
        while stack:
            for c in children[stack.pop()]:
                seen.add(c)
                stack.append(c)
        if seen != vertices:
            raise ValueError("parent relation is not a tree rooted at the root")
        labels = {v: v for v in weight}
        if label:
            labels.update({v: label[v] for v in weight if v in label})
        self.root = root
        self.parent = MappingProxyType(dict(parent))
        self.weight = MappingProxyType(dict(weight))
        self.label = MappingProxyType(labels)
        self._children = {v: tuple(cs) for v, cs in children.items()}

    # construction helpers

    @classmethod
    def single(cls, weight: int = 0, root: str = "o") -> WeightedTree:
        return cls(root, {}, {root: weight})

    @classmethod
    def from_nested(cls, nested: tuple) -> WeightedTree:
        """Build from ``(weight, (child, ...))`` with generated labels.

        The root is ``o``; other vertices get ``a, b, c, ...`` in preorder.
        """
        parent: dict[str, str] = {}
        weight: dict[str, int] = {}
        names = label_sequence()

        def walk(node: tuple, vid: str) -> None:
            weight[vid] = node[0]
            for child in node[1]:
                cid = next(names)
                parent[cid] = vid
                walk(child, cid)

        walk(nested, "o")
        return cls("o", parent, weight)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> WeightedTree:
        parent: dict[str, str] = {}
        weight: dict[str, int] = {}
        label: dict[str, str] = {}
        ids = _IdAllocator()

        def walk(node: Mapping[str, Any], up: str | None) -> None:
            lab = node["label"]
            w = node.get("weight", 0)
            if not isinstance(w, int) or w < 0:
                raise ValueError(f"bad weight {w!r} for {lab!r}")
            vid = ids.fresh(lab)
            weight[vid] = w
            label[vid] = lab
            if up is not None:
                parent[vid] = up
            for child in node.get("children", ()):
                walk(child, vid)

        walk(data, None)
        root = next(iter(weight))
        return cls(root, parent, weight, label)

    def to_json(self) -> dict[str, Any]:
        def walk(v: str) -> dict[str, Any]:
            return {
                "label": self.label[v],
                "weight": self.weight[v],
                "children": [walk(c) for c in self.sorted_children(v)],
            }

        return walk(self.root)

    def replace(
        self,
        parent: Mapping[str, str] | None = None,
        weight: Mapping[str, int] | None = None,
    ) -> WeightedTree:
        """New tree on the surviving vertices, keeping root and labels."""
        parent = self.parent if parent is None else parent
        weight = self.weight if weight is None else weight
        return WeightedTree(self.root, parent, weight, {v: self.label[v] for v in weight})

    # structure

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.preorder())

    def non_root_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.preorder() if v != self.root)

    def children(self, v: str) -> tuple[str, ...]:
        return self._children[v]

    def sorted_children(self, v: str) -> list[str]:
        keys = self._keys
        return sorted(self._children[v], key=lambda c: (keys[c], self.label[c], c))

    def preorder(self, start: str | None = None) -> Iterator[str]:
        stack = [self.root if start is None else start]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(self.sorted_children(v)))

    def descendants(self, v: str) -> list[str]:
        """Strict descendants of ``v``."""
        return [u for u in self.preorder(v) if u != v]

    def ancestors(self, v: str) -> list[str]:
        """Path from the parent of ``v`` up to the root."""
        out = []
        while v != self.root:
            v = self.parent[v]
            out.append(v)
        return out

    def depth(self, v: str) -> int:
        return len(self.ancestors(v))

    def edge_count(self, v: str) -> int:
        return len(self._children[v]) + (0 if v == self.root else 1)

    def is_terminal(self, v: str) -> bool:
        # the root is terminal only in the one-vertex tree
        return not self._children[v]

    def terminals(self) -> list[str]:
        return [v for v in self.preorder() if self.is_terminal(v)]

    @property
    def total_weight(self) -> int:
        return sum(self.weight.values())

    def __len__(self) -> int:
        return len(self.weight)

    def __contains__(self, v: object) -> bool:
        return v in self.weight

    def require(self, v: str) -> None:
        if v not in self.weight:
            raise KeyError(f"unknown vertex {v!r}")

    def find(self, name: str) -> str:
        """Vertex id for an id or a label (labels must be unambiguous)."""
        if name in self.weight:
            return name
        hits = [v for v, lab in self.label.items() if lab == name]
        if len(hits) == 1:
            return hits[0]
        if hits:
            raise KeyError(f"label {name!r} is ambiguous")
        raise KeyError(f"unknown vertex {name!r}")

    # canonical encoding

    @cached_property
    def _keys(self) -> dict[str, Key]:
        keys: dict[str, Key] = {}
        for v in reversed(self._bfs()):
            kids = sorted(keys[c] for c in self._children[v])
            height = 1 + max((k[0] for k in kids), default=-1)
            keys[v] = (height, -self.weight[v], tuple(kids))
        return keys

    @cached_property
    def _shape_keys(self) -> dict[str, Key]:
        keys: dict[str, Key] = {}
        for v in reversed(self._bfs()):
            kids = sorted(keys[c] for c in self._children[v])
            keys[v] = (1 + max((k[0] for k in kids), default=-1), tuple(kids))
        return keys

    def _bfs(self) -> list[str]:
        order = [self.root]
        for v in order:
            order.extend(self._children[v])
        return order

    def subtree_key(self, v: str | None = None) -> Key:
        return self._keys[self.root if v is None else v]

    # value semantics

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedTree):
            return NotImplemented
        return (
            self.root == other.root
            and self.parent == other.parent
            and self.weight == other.weight
        )

    def __hash__(self) -> int:
        return hash((self.root, frozenset(self.parent.items()), frozenset(self.weight.items())))

    def __repr__(self) -> str:
        return f"WeightedTree({to_bracket(self)!r})"

    def __str__(self) -> str:
        return to_bracket(self)


@dataclass(frozen=True)
class TreeClassification:
    terminally_weighted: bool
    stable: bool
    semistable: bool
    path_tree: bool
    simple: bool
    trunk: tuple[str, ...]
    branch_vertex: str | None
    br: int

    def to_json(self) -> dict[str, Any]:
        return {
            "terminally_weighted": self.terminally_weighted,
            "stable": self.stable,
            "semistable": self.semistable,
            "path_tree": self.path_tree,
            "simple": self.simple,
            "trunk": list(self.trunk),
            "branch_vertex": self.branch_vertex,
            "br": self.br,
        }


# ---------------------------------------------------------------------------
# bracket notation

_TOKEN = re.compile(
    r"\s*(?:(?P<label>[A-Za-z_][A-Za-z0-9_]*)|(?P<weight>\(\s*-?\s*[0-9]*\s*\)?)|(?P<punct>[\[\],]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "label", "weight", "[", "]", ",", "end"
    text: str
    pos: int
    value: int = 0


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            tokens.append(Token("end", "", n))
            return tokens
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise BracketParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        if m.lastgroup == "label":
            tokens.append(Token("label", m.group("label"), start))
        elif m.lastgroup == "weight":
            raw = m.group("weight")
            inner = raw[1:].rstrip()
            if not inner.endswith(")"):
                raise BracketParseError("unterminated weight", start, text)
            inner = inner[:-1].strip()
            if inner.startswith("-"):
                raise BracketParseError("negative weight", start, text)
            if not inner:
                raise BracketParseError("empty weight", start, text)
            tokens.append(Token("weight", raw, start, int(inner)))
        else:
            tokens.append(Token(m.group("punct"), m.group("punct"), start))
        pos = m.end()


class _IdAllocator:
    """Vertex ids from labels; repeated labels get ``label_2``, ``label_3``..."""

    def __init__(self) -> None:
        self.used: set[str] = set()

    def fresh(self, label: str) -> str:
        if label not in self.used:
            self.used.add(label)
            return label
        i = 2
        while f"{label}_{i}" in self.used:
            i += 1
        vid = f"{label}_{i}"
        self.used.add(vid)
        return vid


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.ids = _IdAllocator()
        self.parent: dict[str, str] = {}
        self.weight: dict[str, int] = {}
        self.label: dict[str, str] = {}
        self.bracketed: dict[str, bool] = {}

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise BracketParseError(f"expected {what}, found {found}", tok.pos, self.text)
        self.i += 1
        return tok

    def vertex(self, up: str | None) -> str:
        tok = self.take("label", "a vertex label")
        vid = self.ids.fresh(tok.text)
        self.label[vid] = tok.text
        self.weight[vid] = 0
        if up is not None:
            self.parent[vid] = up
        if self.peek().kind == "weight":
            self.weight[vid] = self.take("weight", "a weight").value
        self.bracketed[vid] = False
        if self.peek().kind == "[":
            open_tok = self.take("[", "'['")
            if self.peek().kind == "]":
                raise BracketParseError("empty bracket", open_tok.pos, self.text)
            self.bracketed[vid] = True
            self.vertex(vid)
            while self.peek().kind == ",":
                self.i += 1
                self.vertex(vid)
            self.take("]", "',' or ']'")
        return vid

    def run(self) -> WeightedTree:
        root = self.vertex(None)
        self.take("end", "end of input")
        return WeightedTree(root, self.parent, self.weight, self.label)


def parse(text: str) -> WeightedTree:
    """Parse bracket notation, e.g. ``o[a(2),b[c(1),d(1)]]``."""
    return _Parser(text).run()


def to_bracket(t: WeightedTree, show_zero_weights: bool = False) -> str:
    """Print in bracket notation with siblings in canonical order."""
    out: list[str] = []

    def emit(v: str) -> None:
        out.append(t.label[v])
        w = t.weight[v]
        if w or show_zero_weights:
            out.append(f"({w})")
        kids = t.sorted_children(v)
        if kids:
            out.append("[")
            for j, c in enumerate(kids):
                if j:
                    out.append(",")
                emit(c)
            out.append("]")

    emit(t.root)
    return "".join(out)


def label_sequence() -> Iterator[str]:
    """a, b, ..., z (skipping o, reserved for roots), then aa, ab, ..."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    size = 1
    while True:
        for idx in range(len(letters) ** size):
            name = ""
            for _ in range(size):
                idx, r = divmod(idx, len(letters))
                name = letters[r] + name
            if name != "o":
                yield name
        size += 1


def canonical_form(t: WeightedTree) -> str:
    """Bracket text that is equal for two trees iff they are isomorphic."""
    return _regenerated(t, t._keys, weights=True)


def unweighted_canonical_form(t: WeightedTree) -> str:
    """Canonical text of the underlying unweighted rooted tree."""
    return _regenerated(t, t._shape_keys, weights=False)


def _regenerated(t: WeightedTree, keys: Mapping[str, Key], weights: bool) -> str:
    names = label_sequence()
    out: list[str] = []

    def emit(v: str, name: str) -> None:
        out.append(name)
        if weights and t.weight[v]:
            out.append(f"({t.weight[v]})")
        kids = sorted(t.children(v), key=keys.__getitem__)
        if kids:
            out.append("[")
            named = [(c, next(names)) for c in kids]
            for j, (c, cname) in enumerate(named):
                if j:
                    out.append(",")
                emit(c, cname)
            out.append("]")

    emit(t.root, "o")
    return "".join(out)


# ---------------------------------------------------------------------------
# predicates


def trunk(t: WeightedTree) -> tuple[str, ...]:
    chain = [t.root]
    while len(t.children(chain[-1])) == 1:
        chain.append(t.children(chain[-1])[0])
    return tuple(chain)


def is_terminally_weighted(t: WeightedTree) -> bool:
    return all((t.weight[v] > 0) == t.is_terminal(v) for v in t.weight)


def _ghosts_have_edges(t: WeightedTree, vertices: Iterable[str], edges: int) -> bool:
    return all(t.weight[v] > 0 or t.edge_count(v) >= edges for v in vertices)


def classify(t: WeightedTree) -> TreeClassification:
    chain = trunk(t)
    end = chain[-1]
    path = t.is_terminal(end)
    branch = None if path else end
    non_root = [v for v in t.weight if v != t.root]
    # Branches count as stable when their vertices are stable inside t, so a
    # branch root that is a ghost needs at least two children of its own.
    below = t.descendants(end)
    return TreeClassification(
        terminally_weighted=is_terminally_weighted(t),
        stable=_ghosts_have_edges(t, non_root, 3),
        semistable=_ghosts_have_edges(t, non_root, 2),
        path_tree=path,
        simple=_ghosts_have_edges(t, below, 3),
        trunk=chain,
        branch_vertex=branch,
        br=0 if path else len(t.children(end)),
    )


# ---------------------------------------------------------------------------
# randomized helpers for property checks


def random_tree(
    rng: random.Random,
    max_vertices: int = 10,
    max_weight: int = 4,
    terminal: bool = False,
) -> WeightedTree:
    """Random tree with random weights; ``terminal`` puts weight on leaves only."""
    n = rng.randint(1, max_vertices)
    names = label_sequence()
    ids = ["o"] + [next(names) for _ in range(n - 1)]
    parent = {ids[i]: ids[rng.randrange(i)] for i in range(1, n)}
    leaves = set(ids) - set(parent.values())
    weight = {}
    for v in ids:
        if terminal:
            weight[v] = rng.randint(1, max_weight) if v in leaves else 0
        else:
            weight[v] = rng.randint(0, max_weight)
    return WeightedTree("o", parent, weight)


def random_isomorphic_copy(t: WeightedTree, rng: random.Random) -> WeightedTree:
    """Apply a random relabelling and a random sibling order."""
    old = list(t.weight)
    new = [f"v{i}" for i in range(len(old))]
    rng.shuffle(new)
    rename = dict(zip(old, new))
    items = list(t.parent.items())
    rng.shuffle(items)
    parent = {rename[v]: rename[p] for v, p in items}
    weight = {rename[v]: t.weight[v] for v in rng.sample(old, len(old))}
    return WeightedTree(rename[t.root], parent, weight)


def isomorphism(a: WeightedTree, b: WeightedTree) -> dict[str, str] | None:
    """Explicit weighted rooted isomorphism ``a -> b`` by backtracking, or None.

    Deliberately naive; used as an independent check on canonical forms.
    """

    def match(u: str, v: str) -> dict[str, str] | None:
        if a.weight[u] != b.weight[v] or len(a.children(u)) != len(b.children(v)):
            return None
        return assign(list(a.children(u)), list(b.children(v)), {u: v})

    def assign(us: Sequence[str], vs: list[str], acc: dict[str, str]) -> dict[str, str] | None:
        if not us:
            return acc
        head, rest = us[0], us[1:]
        for j, v in enumerate(vs):
            sub = match(head, v)
            if sub is None:
                continue
            found = assign(rest, vs[:j] + vs[j + 1:], {**acc, **sub})
            if found is not None:
                return found
        return None

    return match(a.root, b.root)
