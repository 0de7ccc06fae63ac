"""The lattice of auction states and its backward-induction order."""

from __future__ import annotations

from typing import Iterator, NamedTuple


class Node(NamedTuple):
    """Auction state: items won so far by each buyer, out of ``T``."""

    x1: int
    x2: int
    T: int

    @property
    def t(self) -> int:
        """Items still to be sold."""
        return self.T - self.x1 - self.x2

    @property
    def is_terminal(self) -> bool:
        return self.x1 + self.x2 == self.T

    def won(self, i: int) -> int:
        return self.x1 if i == 1 else self.x2

    def child(self, winner: int) -> "Node":
        return child(self, winner)

    def shifted(self, d1: int, d2: int) -> "Node | None":
        """``self + (d1, d2)`` if that is still a lattice node, else None."""
        y1, y2 = self.x1 + d1, self.x2 + d2
        if y1 < 0 or y2 < 0 or y1 + y2 > self.T:
            return None
        return Node(y1, y2, self.T)

    def label(self) -> str:
        return f"({self.x1},{self.x2})"


def make_node(x1: int, x2: int, T: int) -> Node:
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    if x1 < 0 or x2 < 0 or x1 + x2 > T:
        raise ValueError(f"({x1},{x2}) is not a node of the lattice with T={T}")
    return Node(x1, x2, T)


def remaining(x: Node) -> int:
    return x.T - x.x1 - x.x2


def other(i: int) -> int:
    return 3 - i


def child(x: Node, winner: int) -> Node:
    """The node reached when ``winner`` takes the current item."""
    if x.is_terminal:
        raise ValueError(f"{x.label()} is terminal and has no children")
    if winner == 1:
        return Node(x.x1 + 1, x.x2, x.T)
    if winner == 2:
        return Node(x.x1, x.x2 + 1, x.T)
    raise ValueError(f"buyer id must be 1 or 2, got {winner}")


def nodes_with_remaining(T: int, t: int) -> list[Node]:
    """All nodes with exactly ``t`` items left, ordered by x1."""
    s = T - t
    return [Node(x1, s - x1, T) for x1 in range(s + 1)]


def nodes_by_remaining(T: int) -> Iterator[tuple[int, list[Node]]]:
    """Yield ``(t, nodes)`` groups for t = 0, 1, ..., T.

    Visiting groups in this order guarantees both children of a node were seen
    before the node itself.
    """
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    for t in range(T + 1):
        yield t, nodes_with_remaining(T, t)


def all_nodes(T: int) -> list[Node]:
    return [x for _, group in nodes_by_remaining(T) for x in group]


def decision_nodes(T: int) -> list[Node]:
    """Decision nodes in backward-induction order (t ascending)."""
    return [x for t, group in nodes_by_remaining(T) if t > 0 for x in group]


def subtree(x: Node) -> Iterator[Node]:
    """Nodes reachable from ``x`` (including ``x``)."""
    for d in range(x.t + 1):
        for a in range(d + 1):
            yield Node(x.x1 + a, x.x2 + d - a, x.T)
