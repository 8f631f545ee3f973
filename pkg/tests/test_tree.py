import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wtree.enumeration import lambda_trees, rooted_level_sequences
from wtree.tree import (
    BracketParseError,
    WeightedTree,
    canonical_form,
    classify,
    isomorphism,
    parse,
    random_isomorphic_copy,
    random_tree,
    to_bracket,
    unweighted_canonical_form,
)


def test_parse_example_tree():
    t = parse("o[a(2),b[c(1),d(1)]]")
    assert len(t) == 5
    assert t.root == "o" and t.weight["o"] == 0
    assert {v: t.weight[v] for v in t.terminals()} == {"a": 2, "c": 1, "d": 1}
    assert t.weight["b"] == 0 and not t.is_terminal("b")
    assert t.parent["c"] == "b"
    assert t.total_weight == 4


def test_parse_small_cases():
    t = parse("o(2)")
    assert len(t) == 1 and t.weight["o"] == 2 and t.terminals() == ["o"]
    t = parse("o[x(7)]")
    assert len(t) == 2 and t.weight["x"] == 7
    assert classify(t).path_tree


def test_parse_ignores_whitespace():
    assert parse(" o [ a ( 2 ) , b [ c(1) ,d(1)] ] ") == parse("o[a(2),b[c(1),d(1)]]")


def test_repeated_labels_get_distinct_ids():
    t = parse("o[a(1),a(1)]")
    assert len(t) == 3
    assert sorted(t.label.values()) == ["a", "a", "o"]
    assert to_bracket(t) == "o[a(1),a(1)]"


@pytest.mark.parametrize(
    "text, pos, fragment",
    [
        ("o[]", 1, "empty bracket"),
        ("o[a(-1)]", 3, "negative weight"),
        ("o[a,", 4, "expected a vertex label"),
        ("o[a b]", 4, "expected ',' or ']'"),
        ("o(2", 1, "unterminated weight"),
        ("o[1]", 2, "unexpected character"),
        ("", 0, "expected a vertex label"),
        ("o[a]]", 4, "expected end of input"),
        ("o()", 1, "empty weight"),
        ("o[a,,b]", 4, "expected a vertex label"),
    ],
)
def test_parse_errors_are_positioned(text, pos, fragment):
    with pytest.raises(BracketParseError) as info:
        parse(text)
    assert info.value.pos == pos
    assert fragment in info.value.message


def test_print_orders_siblings_canonically():
    assert to_bracket(parse("o[b[d(1),c(1)],a(2)]")) == "o[a(2),b[c(1),d(1)]]"
    assert to_bracket(WeightedTree.single(2)) == "o(2)"
    assert to_bracket(parse("o[v[w(3)]]"), show_zero_weights=True) == "o(0)[v(0)[w(3)]]"


@pytest.mark.parametrize(
    "text",
    ["o[a(2),b[c(1),d(1)]]", "o(3)", "o[a[b[c(1),d(1),e(1)]]]", "o[a(1),b[c(1),d(1)]]"],
)
def test_print_parse_identity_on_canonical_strings(text):
    assert to_bracket(parse(text)) == text
    assert canonical_form(parse(text)) == text


def test_classify_example_tree():
    info = classify(parse("o[a(2),b[c(1),d(1)]]"))
    assert info.br == 2
    assert info.branch_vertex == "o"
    assert info.trunk == ("o",)
    assert info.stable and info.semistable and info.simple and info.terminally_weighted
    assert not info.path_tree


def test_classify_unstable_chain():
    # v is a ghost with two edges: semistable (two edges suffice) but not stable
    info = classify(parse("o[v[w(3)]]"))
    assert info.semistable and not info.stable
    assert info.path_tree and info.br == 0 and info.branch_vertex is None
    assert info.trunk == ("o", "v", "w")


def test_classify_semistable_not_stable():
    info = classify(parse("o[a[b[c(1),d(1),e(1)]]]"))
    assert info.semistable and not info.stable
    assert info.branch_vertex == "b" and info.br == 3
    assert info.trunk == ("o", "a", "b")


def test_terminal_weighting_conventions():
    assert classify(parse("o(3)")).terminally_weighted
    assert not classify(parse("o")).terminally_weighted
    assert not classify(parse("o(1)[a(1)]")).terminally_weighted
    assert not classify(parse("o[a(1),b]")).terminally_weighted


def test_simple_needs_branch_ghosts_with_two_children():
    # branch root b has a single child: not simple
    assert not classify(parse("o[a(1),b[c[d(1),e(1)]]]")).simple
    assert classify(parse("o[a(1),b[c(1),d(1)]]")).simple
    # path trees have no branches
    assert classify(parse("o[a[b(2)]]")).simple


def test_canonical_form_examples():
    assert canonical_form(parse("o[a(1),b(1)]")) == canonical_form(parse("o[b(1),a(1)]"))
    assert canonical_form(parse("o[a(2)]")) != canonical_form(parse("o[a(1)]"))
    assert canonical_form(parse("x[y(1),z[p(2),q(1)]]")) == canonical_form(parse("o[b[c(1),d(2)],a(1)]"))


def test_unweighted_canonical_form_examples():
    assert unweighted_canonical_form(parse("o[a(3)]")) == unweighted_canonical_form(parse("o[a(1)]"))
    assert unweighted_canonical_form(parse("o[a(1),b(1)]")) != unweighted_canonical_form(parse("o[a(2)]"))


def test_unweighted_classes_of_lambda_2():
    # brute force: compare every pair of the four trees of weight 2
    trees = [parse(s) for s in ["o(2)", "o[a(2)]", "o[a(1),b(1)]", "o[v[a(1),b(1)]]"]]
    for a, b in itertools.combinations(trees, 2):
        assert unweighted_canonical_form(a) != unweighted_canonical_form(b)


def test_canonical_form_invariant_under_random_isomorphisms():
    rng = random.Random(1234)
    for _ in range(1000):
        t = random_tree(rng, max_vertices=12, max_weight=3)
        assert canonical_form(random_isomorphic_copy(t, rng)) == canonical_form(t)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_canonical_form_is_complete_on_lambda(d):
    trees = list(lambda_trees(d))
    copies = [random_isomorphic_copy(t, random.Random(d)) for t in trees]
    for a, b in itertools.product(trees, copies):
        same_form = canonical_form(a) == canonical_form(b)
        assert same_form == (isomorphism(a, b) is not None)


def _all_small_trees(max_vertices, max_weight):
    for n in range(1, max_vertices + 1):
        for levels in rooted_level_sequences(n):
            parent = {}
            last = {}
            for i, lev in enumerate(levels):
                if lev:
                    parent[f"v{i}"] = last[lev - 1]
                last[lev] = f"v{i}"
            for weights in itertools.product(range(max_weight + 1), repeat=n):
                if sum(weights) <= max_weight:
                    yield WeightedTree("v0", parent, {f"v{i}": w for i, w in enumerate(weights)})


def test_stable_implies_semistable_exhaustively():
    count = 0
    for t in _all_small_trees(7, 4):
        info = classify(t)
        assert not info.stable or info.semistable
        assert info.path_tree != (info.branch_vertex is not None)
        assert info.path_tree == (info.br == 0)
        count += 1
    assert count > 10000


def test_weighted_tree_validation():
    with pytest.raises(ValueError):
        WeightedTree("o", {"a": "b", "b": "a"}, {"o": 0, "a": 1, "b": 1})
    with pytest.raises(ValueError):
        WeightedTree("o", {}, {"o": -1})
    with pytest.raises(ValueError):
        WeightedTree("o", {"a": "o"}, {"o": 0})


def test_json_round_trip():
    t = parse("o[b[d(1),c(1)],a(2)]")
    data = t.to_json()
    assert [c["label"] for c in data["children"]] == ["a", "b"]
    assert canonical_form(WeightedTree.from_json(data)) == canonical_form(t)


@st.composite
def weighted_trees(draw):
    n = draw(st.integers(1, 10))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    weights = draw(st.lists(st.integers(0, 5), min_size=n, max_size=n))
    ids = [f"n{i}" for i in range(n)]
    return WeightedTree(
        ids[0],
        {ids[i]: ids[p] for i, p in zip(range(1, n), parents)},
        dict(zip(ids, weights)),
    )


@settings(max_examples=300, deadline=None)
@given(weighted_trees())
def test_parse_print_round_trip_property(t):
    text = to_bracket(t)
    back = parse(text)
    assert canonical_form(back) == canonical_form(t)
    assert to_bracket(parse(canonical_form(t))) == canonical_form(t)


@settings(max_examples=200, deadline=None)
@given(weighted_trees(), st.randoms(use_true_random=False))
def test_canonical_form_matches_backtracking_isomorphism(t, rnd):
    copy = random_isomorphic_copy(t, rnd)
    assert isomorphism(t, copy) is not None
    assert canonical_form(copy) == canonical_form(t)
