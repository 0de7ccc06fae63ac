from __future__ import annotations

import pytest

from seqauction.lattice import Node, all_nodes, child, decision_nodes, make_node, nodes_by_remaining, subtree


@pytest.mark.parametrize("T", [1, 2, 3, 7])
def test_node_counts(T):
    assert len(all_nodes(T)) == (T + 1) * (T + 2) // 2
    assert len(decision_nodes(T)) == T * (T + 1) // 2


@pytest.mark.parametrize("T", [1, 4])
def test_children_precede_parents(T):
    seen = set()
    for t, group in nodes_by_remaining(T):
        for x in group:
            assert x.t == t
            if not x.is_terminal:
                assert child(x, 1) in seen and child(x, 2) in seen
        seen.update(group)


def test_child_and_validation():
    x = make_node(1, 0, 3)
    assert x.child(1) == Node(2, 0, 3)
    assert x.child(2) == Node(1, 1, 3)
    assert x.shifted(-2, 0) is None
    with pytest.raises(ValueError):
        make_node(2, 2, 3)
    with pytest.raises(ValueError):
        Node(3, 0, 3).child(1)
    with pytest.raises(ValueError):
        x.child(3)


def test_subtree_size():
    x = Node(1, 1, 5)
    assert len(set(subtree(x))) == 10
