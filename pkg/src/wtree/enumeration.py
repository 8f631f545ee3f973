"""Stable terminally weighted trees of fixed total weight, and the staged
index sets obtained by repeatedly replacing trees with ``br = k`` by their
monoidal transforms.

:func:`lambda_trees` generates directly (root plus a multiset of stable
subtrees); :func:`oracle_lambda` is a deliberately separate brute force over
level sequences of all rooted trees and all weight assignments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .ops import mon
from .tree import WeightedTree, canonical_form, classify, unweighted_canonical_form

__all__ = [
    "TreeSet",
    "lambda_trees",
    "lambda_staged",
    "staged_sequence",
    "sim_classes",
    "oracle_lambda",
    "rooted_level_sequences",
    "simple_trees",
]


@dataclass(frozen=True)
class TreeSet:
    """Trees keyed by canonical form (sorted)."""

    d: int
    members: tuple[WeightedTree, ...]
    k: int | None = None

    @classmethod
    def of(cls, d: int, trees: Iterable[WeightedTree], k: int | None = None) -> TreeSet:
        keyed: dict[str, WeightedTree] = {}
        for t in trees:
            if t.total_weight != d:
                raise ValueError(f"{t} has total weight {t.total_weight}, expected {d}")
            keyed.setdefault(canonical_form(t), t)
        return cls(d, tuple(keyed[f] for f in sorted(keyed)), k)

    def forms(self) -> list[str]:
        return [canonical_form(t) for t in self.members]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[WeightedTree]:
        return iter(self.members)

    def __contains__(self, t: object) -> bool:
        return isinstance(t, WeightedTree) and canonical_form(t) in set(self.forms())


# Nested shapes (weight, (child, ...)) with children sorted by _shape_order.


def _shape_order(shape: tuple) -> tuple:
    return WeightedTree.from_nested(shape).subtree_key()


@lru_cache(maxsize=None)
def _stable_subtrees(w: int) -> tuple[tuple, ...]:
    """Subtrees hanging below some parent: a positive leaf, or a ghost with
    at least two children (three edges)."""
    out = [(w, ())]
    for forest in _forests(w, min_size=2):
        out.append((0, forest))
    return tuple(out)


@lru_cache(maxsize=None)
def _forests(w: int, min_size: int) -> tuple[tuple, ...]:
    """Multisets of stable subtrees with total weight ``w`` and at least
    ``min_size`` members, each as a sorted tuple."""
    # with two or more members no single part can carry all of w
    top = w if min_size <= 1 else w - 1
    pool = [s for part in range(1, top + 1) for s in _stable_subtrees(part)]
    pool.sort(key=_shape_order)
    out: list[tuple] = []

    def extend(start: int, remaining: int, acc: list[tuple]) -> None:
        if remaining == 0:
            if len(acc) >= min_size:
                out.append(tuple(acc))
            return
        for idx in range(start, len(pool)):
            s = pool[idx]
            weight = _shape_weight(s)
            if weight <= remaining:
                acc.append(s)
                extend(idx, remaining - weight, acc)
                acc.pop()

    extend(0, w, [])
    return tuple(out)


def _shape_weight(shape: tuple) -> int:
    return shape[0] + sum(_shape_weight(c) for c in shape[1])


def lambda_trees(d: int) -> TreeSet:
    """All stable terminally weighted trees of total weight ``d``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    shapes = [(d, ())] + [(0, forest) for forest in _forests(d, min_size=1)]
    return TreeSet.of(d, (WeightedTree.from_nested(s) for s in shapes))


def simple_trees(max_weight: int, max_trunk: int = 2) -> list[WeightedTree]:
    """Simple terminally weighted trees of total weight ``1..max_weight``
    whose trunk has at most ``max_trunk`` edges.

    The trunk length is unbounded in general, so it has to be capped.
    """
    out: list[WeightedTree] = []
    for w in range(1, max_weight + 1):
        tops = [(w, ())] + [(0, forest) for forest in _forests(w, min_size=2)]
        for top in tops:
            for r in range(max_trunk + 1):
                shape = top
                for _ in range(r):
                    shape = (0, (shape,))
                out.append(WeightedTree.from_nested(shape))
    keyed = {canonical_form(t): t for t in out}
    return [keyed[f] for f in sorted(keyed)]


def staged_sequence(d: int, literal: bool = False) -> list[TreeSet]:
    """``[Λ_{d,[1]}, ..., Λ_{d,[d]}]``.

    Trees with ``br = k`` are replaced by their monoidal transforms at stage
    ``k``; trees with larger ``br`` survive.  Path trees (``br = 0``) survive
    too unless ``literal`` is set, which applies the recursion word for word
    and lets them drop out.
    """
    current = lambda_trees(d)
    stages = [TreeSet(d, current.members, 1)]
    for k in range(2, d + 1):
        nxt: list[WeightedTree] = []
        for t in current:
            br = classify(t).br
            if br >= k + 1 or (br == 0 and not literal):
                nxt.append(t)
            elif br == k:
                nxt.extend(mon(t))
            elif br:
                raise RuntimeError(f"{t} has br={br} < {k} at stage {k}")
        current = TreeSet.of(d, nxt, k)
        stages.append(current)
    return stages


def lambda_staged(d: int, k: int, literal: bool = False) -> TreeSet:
    if d < 1:
        raise ValueError("d must be at least 1")
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}]")
    return staged_sequence(d, literal)[k - 1]


def sim_classes(trees: Iterable[WeightedTree]) -> list[list[WeightedTree]]:
    """Partition by shape with weights erased."""
    classes: dict[str, list[WeightedTree]] = {}
    for t in trees:
        classes.setdefault(unweighted_canonical_form(t), []).append(t)
    return [
        sorted(classes[key], key=canonical_form) for key in sorted(classes)
    ]


# ---------------------------------------------------------------------------
# brute-force oracle


def rooted_level_sequences(n: int) -> Iterator[list[int]]:
    """Every unlabelled rooted tree on ``n`` vertices once, as the depth
    sequence of a canonical preorder (Beyer–Hedetniemi successor rule)."""
    if n < 1:
        return
    levels = list(range(n))
    while True:
        yield list(levels)
        p = max((i for i in range(n) if levels[i] > 1), default=None)
        if p is None:
            return
        q = max(i for i in range(p) if levels[i] == levels[p] - 1)
        for i in range(p, n):
            levels[i] = levels[i - (p - q)]


def _parents(levels: list[int]) -> list[int]:
    parent = [-1] * len(levels)
    last_at: dict[int, int] = {}
    for i, lev in enumerate(levels):
        if lev:
            parent[i] = last_at[lev - 1]
        last_at[lev] = i
    return parent


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts + (total + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


def _encode(v: int, kids: list[list[int]], weight: tuple[int, ...]) -> str:
    return f"{weight[v]}(" + "".join(sorted(_encode(c, kids, weight) for c in kids[v])) + ")"


def oracle_lambda(d: int, vertex_cap: int | None = None) -> TreeSet:
    """Brute force over all rooted trees with at most ``vertex_cap`` vertices
    and all weight assignments summing to ``d``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    cap = 2 * d + 1 if vertex_cap is None else vertex_cap
    if cap < 2 * d + 1:
        raise ValueError(f"vertex cap {cap} is below the sound bound {2 * d + 1}")
    found: dict[str, WeightedTree] = {}
    for n in range(1, cap + 1):
        for levels in rooted_level_sequences(n):
            parent = _parents(levels)
            kids: list[list[int]] = [[] for _ in range(n)]
            for i, p in enumerate(parent):
                if p >= 0:
                    kids[p].append(i)
            for weight in _compositions(d, n):
                if not _oracle_keeps(kids, weight):
                    continue
                code = _encode(0, kids, weight)
                if code not in found:
                    found[code] = WeightedTree(
                        "v0",
                        {f"v{i}": f"v{p}" for i, p in enumerate(parent) if p >= 0},
                        {f"v{i}": w for i, w in enumerate(weight)},
                    )
    return TreeSet.of(d, found.values())


def _oracle_keeps(kids: list[list[int]], weight: tuple[int, ...]) -> bool:
    for v, cs in enumerate(kids):
        leaf = not cs
        if (weight[v] > 0) != leaf:
            return False
        if v and weight[v] == 0 and len(cs) + 1 < 3:
            return False
    return True
