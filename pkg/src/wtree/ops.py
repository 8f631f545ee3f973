"""Pruning, collapsing, advancing, monoidal transforms and dual-graph reduction.

Every operation keeps vertex ids of the surviving vertices, so equation
systems built before and after an operation share variable names.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .tree import WeightedTree, canonical_form, classify

__all__ = [
    "prune",
    "terminalize",
    "collapse",
    "advance",
    "is_collapse_of",
    "mon",
    "collapse_at_support",
    "collapse_sequence",
    "DualGraph",
    "reduce_dual_graph",
    "TreeOperationError",
]


class TreeOperationError(ValueError):
    """A tree operation was applied outside its domain."""


def prune(t: WeightedTree, v: str) -> WeightedTree:
    """Remove the strict descendants of ``v``; ``v`` absorbs their weight."""
    t.require(v)
    gone = t.descendants(v)
    if not gone:
        return t
    dropped = set(gone)
    weight = {u: w for u, w in t.weight.items() if u not in dropped}
    weight[v] += sum(t.weight[u] for u in gone)
    parent = {u: p for u, p in t.parent.items() if u not in dropped}
    return t.replace(parent, weight)


def terminalize(t: WeightedTree) -> WeightedTree:
    """Prune at positive non-terminal vertices until there are none."""
    while True:
        # topmost first: one prune there covers everything below it
        bad = [v for v in t.preorder() if t.weight[v] > 0 and not t.is_terminal(v)]
        if not bad:
            return t
        t = prune(t, min(bad, key=t.depth))


def _merge_into_parent(t: WeightedTree, v: str) -> WeightedTree:
    p = t.parent[v]
    weight = dict(t.weight)
    weight[p] += weight.pop(v)
    parent = {u: (p if q == v else q) for u, q in t.parent.items() if u != v}
    return t.replace(parent, weight)


def collapse(t: WeightedTree, v: str) -> WeightedTree:
    """Merge ``v`` into its parent, then terminalize.

    Only pruning is repeated afterwards; a collapse never cascades into
    further collapses.
    """
    t.require(v)
    if v == t.root:
        raise TreeOperationError("cannot collapse the root")
    return terminalize(_merge_into_parent(t, v))


def advance(t: WeightedTree, v: str) -> WeightedTree:
    """Re-attach every sibling of ``v`` below ``v``, then terminalize."""
    t.require(v)
    if v == t.root:
        raise TreeOperationError("cannot advance the root")
    p = t.parent[v]
    parent = {u: (v if q == p and u != v else q) for u, q in t.parent.items()}
    return terminalize(t.replace(parent))


def is_collapse_of(general: WeightedTree, special: WeightedTree) -> bool:
    """True when collapsing one vertex of ``special`` gives ``general``."""
    target = canonical_form(general)
    return any(
        canonical_form(collapse(special, v)) == target for v in special.non_root_vertices()
    )


def mon(t: WeightedTree) -> list[WeightedTree]:
    """Monoidal transforms: advance each child of the branch vertex.

    Returned sorted by canonical form, one per isomorphism class.
    """
    info = classify(t)
    if not (info.simple and info.terminally_weighted):
        raise TreeOperationError("monoidal transforms need a simple terminally weighted tree")
    if info.branch_vertex is None:
        return []
    found: dict[str, WeightedTree] = {}
    for c in t.sorted_children(info.branch_vertex):
        found.setdefault(canonical_form(advance(t, c)), advance(t, c))
    return [found[k] for k in sorted(found)]


def collapse_sequence(t: WeightedTree, order: Sequence[str]) -> WeightedTree:
    """Collapse the vertices of ``order`` one after another.

    A vertex already absorbed by an earlier prune is skipped; its weight has
    travelled to a surviving ancestor.
    """
    for v in order:
        if v == t.root:
            raise TreeOperationError("cannot collapse the root")
        if v in t:
            t = collapse(t, v)
    return t


def collapse_at_support(t: WeightedTree, support: Iterable[str]) -> WeightedTree:
    """Collapse ``t`` at every vertex of ``support`` (deepest first)."""
    support = set(support)
    for v in support:
        t.require(v)
    if t.root in support:
        raise TreeOperationError("the support may not contain the root")
    order = sorted(support, key=lambda v: (-t.depth(v), v))
    return collapse_sequence(t, order)


# ---------------------------------------------------------------------------
# dual graphs of genus-one nodal curves


@dataclass(frozen=True)
class DualGraph:
    """Weighted dual graph; ``edges`` may repeat (multi-edges) or be loops."""

    weight: Mapping[str, int]
    genus: Mapping[str, int]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> DualGraph:
        weight: dict[str, int] = {}
        genus: dict[str, int] = {}
        for entry in data["vertices"]:
            vid = str(entry["id"])
            if vid in weight:
                raise ValueError(f"duplicate vertex id {vid!r}")
            weight[vid] = int(entry.get("weight", 0))
            genus[vid] = int(entry.get("genus", 0))
        edges = tuple((str(a), str(b)) for a, b in data.get("edges", ()))
        return cls(weight, genus, edges)

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": [
                {"id": v, "weight": self.weight[v], "genus": self.genus.get(v, 0)}
                for v in self.weight
            ],
            "edges": [list(e) for e in self.edges],
        }

    def validate(self) -> None:
        for v, w in self.weight.items():
            if w < 0:
                raise ValueError(f"negative weight on {v!r}")
            if self.genus.get(v, 0) not in (0, 1):
                raise ValueError(f"genus of {v!r} must be 0 or 1")
        for a, b in self.edges:
            if a not in self.weight or b not in self.weight:
                raise ValueError(f"edge ({a!r}, {b!r}) uses an unknown vertex")
        if not self.weight:
            raise ValueError("empty dual graph")
        adj = self._adjacency()
        start = next(iter(self.weight))
        seen = {start}
        stack = [start]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != len(self.weight):
            raise ValueError("dual graph is disconnected")
        betti = len(self.edges) - len(self.weight) + 1
        if betti + sum(self.genus.get(v, 0) for v in self.weight) != 1:
            raise ValueError("dual graph does not have arithmetic genus one")

    def _adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.weight}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def reduce_dual_graph(g: DualGraph) -> WeightedTree:
    """Reduced dual tree of a genus-one weighted dual graph, terminalized.

    The genus-one vertex becomes the root; otherwise the unique loop
    (multi-edges and self-loops included) is contracted into a root carrying
    the loop's total weight.
    """
    g.validate()
    adj = g._adjacency()
    core = [v for v in g.weight if g.genus.get(v, 0) == 1]
    if not core:
        # the 2-core of a unicyclic graph is its cycle
        degree = Counter({v: len(adj[v]) for v in g.weight})
        alive = set(g.weight)
        leaves = [v for v in alive if degree[v] <= 1]
        while leaves:
            v = leaves.pop()
            if v not in alive:
                continue
            alive.discard(v)
            for u in adj[v]:
                if u in alive:
                    degree[u] -= 1
                    if degree[u] == 1:
                        leaves.append(u)
        core = sorted(alive)
    core_set = set(core)
    root = "o"
    while root in g.weight and root not in core_set:
        root += "_"
    parent: dict[str, str] = {}
    weight = {root: sum(g.weight[v] for v in core)}
    stack = list(core)
    seen = set(core)
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = root if v in core_set else v
                weight[u] = g.weight[u]
                stack.append(u)
    labels = {u: u for u in parent}
    labels[root] = "o"
    return terminalize(WeightedTree(root, parent, weight, labels))
