"""Deterministic reachability and state covers.

The reachability automaton erases the outputs of the model, sends every
undefined input to a fresh sink state and determinises the result.  An input
sequence d-reaches ``s`` when it leads to the node ``{s}``: every response of
the model ends in ``s`` and no prefix ever hits an undefined input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Sequence, Tuple

from .fsm import Fsm, InputSequence, IoTrace, format_inputs, responses


class _Sink:
    __slots__ = ()

    def __repr__(self):
        return "⊥"


SINK = _Sink()

Node = FrozenSet[object]


@dataclass(frozen=True)
class ReachAutomaton:
    nodes: Tuple[Node, ...]
    edges: Mapping[Tuple[int, str], int]
    inputs: Tuple[str, ...]

    @property
    def initial(self) -> int:
        return 0

    def run(self, xs: Sequence[str]) -> int:
        node = 0
        for x in xs:
            node = self.edges[node, x]
        return node

    def node_states(self, node: int) -> Node:
        return self.nodes[node]


def _step(model: Fsm, node: Node, x: str) -> Node:
    nxt = set()
    for s in node:
        if s is SINK:
            nxt.add(SINK)
            continue
        targets = model.moves(s, x)
        if targets:
            nxt.update(targets.values())
        else:
            nxt.add(SINK)
    return frozenset(nxt)


def build_reach_automaton(model: Fsm) -> ReachAutomaton:
    start = frozenset([model.initial])
    index: Dict[Node, int] = {start: 0}
    nodes = [start]
    edges = {}
    todo = deque([0])
    while todo:
        i = todo.popleft()
        for x in model.inputs:
            nxt = _step(model, nodes[i], x)
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(nodes)
                nodes.append(nxt)
                todo.append(j)
            edges[i, x] = j
    return ReachAutomaton(tuple(nodes), edges, model.inputs)


def _walk(model: Fsm, xs: Sequence[str]) -> Optional[frozenset]:
    """States reached by ``xs``, or None when some prefix hits an undefined input."""
    current = {model.initial}
    for x in xs:
        nxt = set()
        for s in current:
            targets = model.moves(s, x)
            if not targets:
                return None
            nxt.update(targets.values())
        current = nxt
    return frozenset(current)


def is_strongly_defined(model: Fsm, xs: Sequence[str]) -> bool:
    return _walk(model, xs) is not None


def d_reached_state(model: Fsm, xs: Sequence[str]) -> Optional[str]:
    reached = _walk(model, xs)
    if reached is not None and len(reached) == 1:
        return next(iter(reached))
    return None


@dataclass(frozen=True)
class StateCover:
    """d-reaching sequence per d-reachable state plus all responses to them.

    ``entries`` is ordered by the canonical state order.
    """

    entries: Mapping[str, InputSequence]
    responses: FrozenSet[IoTrace]

    @property
    def states(self) -> Tuple[str, ...]:
        return tuple(self.entries)

    @property
    def sequences(self) -> Tuple[InputSequence, ...]:
        return tuple(self.entries.values())

    def __contains__(self, s) -> bool:
        return s in self.entries

    def __getitem__(self, s) -> InputSequence:
        return self.entries[s]

    def __len__(self) -> int:
        return len(self.entries)

    def format(self) -> str:
        return "".join(f"{s}\t{format_inputs(v)}\n" for s, v in self.entries.items())


def compute_state_cover(model: Fsm, automaton: Optional[ReachAutomaton] = None) -> StateCover:
    """Shortest, then lexicographically least, d-reaching sequence for each d-reachable state."""
    A = automaton or build_reach_automaton(model)
    found: Dict[str, InputSequence] = {model.initial: ()}
    paths = {0: ()}
    todo = deque([0])
    while todo:
        i = todo.popleft()
        for x in model.inputs:
            j = A.edges[i, x]
            if j in paths:
                continue
            paths[j] = paths[i] + (x,)
            todo.append(j)
            node = A.nodes[j]
            if len(node) == 1:
                (s,) = node
                if s is not SINK and s not in found:
                    found[s] = paths[j]
    entries = {s: found[s] for s in model.states if s in found}
    resp = frozenset(trace for v in entries.values() for trace, _ in responses(model, v))
    return StateCover(entries, resp)
