import itertools

import pytest

from wtree.enumeration import (
    TreeSet,
    lambda_staged,
    lambda_trees,
    oracle_lambda,
    rooted_level_sequences,
    sim_classes,
    simple_trees,
    staged_sequence,
)
from wtree.ops import mon
from wtree.tree import canonical_form, classify, parse, unweighted_canonical_form


def forms(texts):
    return sorted(canonical_form(parse(s)) for s in texts)


def test_rooted_tree_counts():
    # OEIS A000081
    assert [sum(1 for _ in rooted_level_sequences(n)) for n in range(1, 11)] == [
        1, 1, 2, 4, 9, 20, 48, 115, 286, 719,
    ]


def test_lambda_small_cases():
    assert lambda_trees(1).forms() == forms(["o(1)", "o[a(1)]"])
    assert lambda_trees(2).forms() == forms(["o(2)", "o[a(2)]", "o[a(1),b(1)]", "o[v[a(1),b(1)]]"])


def test_lambda_sizes():
    assert [len(lambda_trees(d)) for d in range(1, 6)] == [2, 4, 8, 22, 60]


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_lambda_members_are_stable_and_terminal(d):
    for t in lambda_trees(d):
        info = classify(t)
        assert info.stable and info.terminally_weighted
        assert t.total_weight == d


@pytest.mark.parametrize("d, cap", [(1, 5), (2, 7), (3, 9)])
def test_oracle_matches_generator(d, cap):
    assert oracle_lambda(d, cap).forms() == lambda_trees(d).forms()


def test_oracle_rejects_unsound_cap():
    with pytest.raises(ValueError):
        oracle_lambda(3, 6)
    with pytest.raises(ValueError):
        lambda_trees(0)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_staged_sets(d):
    assert lambda_staged(d, 1).forms() == lambda_trees(d).forms()
    for k in range(1, d + 1):
        for t in lambda_staged(d, k):
            info = classify(t)
            assert info.br == 0 or k + 1 <= info.br <= d
            assert info.simple and info.terminally_weighted
    assert all(classify(t).path_tree for t in lambda_staged(d, d))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_staged_sets_contain_every_transform(d):
    stages = staged_sequence(d)
    for k in range(2, d + 1):
        have = set(stages[k - 1].forms())
        for t in stages[k - 2]:
            if classify(t).br == k:
                assert {canonical_form(m) for m in mon(t)} <= have


def test_literal_staging_drops_path_trees():
    assert lambda_staged(2, 2).forms() == forms(["o(2)", "o[a(2)]", "o[a[b(2)]]"])
    assert lambda_staged(2, 2, literal=True).forms() == forms(["o[a(2)]", "o[a[b(2)]]"])
    with pytest.raises(ValueError):
        lambda_staged(3, 4)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_final_stage_classes_are_trunk_lengths(d):
    final = lambda_staged(d, d)
    classes = sim_classes(final)
    lengths = {len(classify(t).trunk) for t in final}
    assert len(classes) == len(lengths)


def test_sim_classes_small():
    t = parse("o[a(1)]")
    assert sim_classes([t]) == [[t]]
    assert len(sim_classes(lambda_trees(2))) == 4
    groups = sim_classes([parse("o[a(3)]"), parse("o[a(1)]"), parse("o(2)")])
    assert sorted(len(g) for g in groups) == [1, 2]
    for g in groups:
        assert len({unweighted_canonical_form(t) for t in g}) == 1


def test_treeset_checks_weight():
    with pytest.raises(ValueError):
        TreeSet.of(2, [parse("o(3)")])


def _brute_simple(max_weight, max_vertices, max_trunk):
    from wtree.tree import WeightedTree

    found = set()
    for size in range(1, max_vertices + 1):
        for levels in rooted_level_sequences(size):
            parent, last = {}, {}
            for i, lev in enumerate(levels):
                if lev:
                    parent[f"v{i}"] = last[lev - 1]
                last[lev] = f"v{i}"
            shape = WeightedTree("v0", parent, {f"v{i}": 0 for i in range(size)})
            leaves = shape.terminals()
            if len(leaves) > max_weight:
                continue
            for ws in itertools.product(range(1, max_weight + 1), repeat=len(leaves)):
                if sum(ws) > max_weight:
                    continue
                t = shape.replace(weight={**shape.weight, **dict(zip(leaves, ws))})
                info = classify(t)
                if info.simple and info.terminally_weighted and len(info.trunk) - 1 <= max_trunk:
                    found.add(canonical_form(t))
    return found


def test_simple_trees_match_brute_force():
    # weight <= 4: at most 4 leaves, 3 branching ghosts, root and one trunk vertex
    assert {canonical_form(t) for t in simple_trees(4, max_trunk=1)} == _brute_simple(4, 9, 1)
