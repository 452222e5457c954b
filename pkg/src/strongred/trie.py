"""Prefix tree over input sequences."""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, Sequence, Tuple


class PrefixTree:
    """Set of input sequences stored as a tree; every node is a prefix.

    Leaves are exactly the sequences that are not a proper prefix of another
    stored sequence, so the prefix-free reduction of the stored set is
    :meth:`leaves`.
    """

    __slots__ = ("children",)

    def __init__(self, sequences: Iterable[Sequence[str]] = ()):
        self.children: Dict[str, "PrefixTree"] = {}
        for seq in sequences:
            self.add(seq)

    def add(self, seq: Sequence[str]) -> "PrefixTree":
        node = self
        for x in seq:
            child = node.children.get(x)
            if child is None:
                child = node.children[x] = PrefixTree()
            node = child
        return node

    def find(self, seq: Sequence[str]):
        node = self
        for x in seq:
            node = node.children.get(x)
            if node is None:
                return None
        return node

    def __contains__(self, seq) -> bool:
        """True when ``seq`` is a prefix of some stored sequence."""
        return self.find(seq) is not None

    def leaves(self) -> Iterator[Tuple[str, ...]]:
        stack = [(self, ())]
        while stack:
            node, path = stack.pop()
            if not node.children:
                yield path
                continue
            for x, child in node.children.items():
                stack.append((child, path + (x,)))

    def prefixes(self) -> Iterator[Tuple[str, ...]]:
        stack = [(self, ())]
        while stack:
            node, path = stack.pop()
            yield path
            for x, child in node.children.items():
                stack.append((child, path + (x,)))

    def __len__(self) -> int:
        """Number of nodes, the empty prefix included."""
        return 1 + sum(len(c) for c in self.children.values())
