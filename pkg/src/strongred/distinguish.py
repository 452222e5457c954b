"""Reliable distinguishability of states and r-distinguishing sets.

Three variants are supported:

``rd1``
    states with different defined inputs are distinguished by any set (the
    r(0) base case); otherwise an input defined in both states is applied.
``rd2``
    no r(0) base case, but an input defined in only one of the two states
    separates them immediately.
``rd3``
    classical reliable distinguishability: only inputs defined in both states
    may be used.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .fsm import Fsm, InputSequence, format_inputs
from .trie import PrefixTree

log = logging.getLogger(__name__)

Pair = FrozenSet[str]


class RdVariant(str, enum.Enum):
    RD1 = "rd1"
    RD2 = "rd2"
    RD3 = "rd3"

    def __str__(self):
        return self.value


def _variant(v) -> RdVariant:
    return v if isinstance(v, RdVariant) else RdVariant(str(v))


def pair(s1: str, s2: str) -> Pair:
    return frozenset((s1, s2))


def r0_distinguishable(model: Fsm, s1: str, s2: str) -> bool:
    return set(model.delta(s1)) != set(model.delta(s2))


def candidate_inputs(model: Fsm, s1: str, s2: str, variant) -> Tuple[str, ...]:
    """Inputs that may be applied to separate ``s1`` and ``s2``, canonical order."""
    d1, d2 = model.delta(s1), model.delta(s2)
    if _variant(variant) is RdVariant.RD2:
        both = set(d1) | set(d2)
    else:
        both = set(d1) & set(d2)
    return tuple(x for x in model.inputs if x in both)


@dataclass(frozen=True)
class RDistTable:
    """r-distinguishing set for every r-distinguishable pair of distinct states."""

    entries: Mapping[Pair, FrozenSet[InputSequence]]
    variant: RdVariant

    def __contains__(self, p) -> bool:
        return frozenset(p) in self.entries

    def get(self, s1: str, s2: str) -> Optional[FrozenSet[InputSequence]]:
        return self.entries.get(pair(s1, s2))

    def distinguishable(self, s1: str, s2: str) -> bool:
        return s1 != s2 and pair(s1, s2) in self.entries

    def pairs(self) -> FrozenSet[Pair]:
        return frozenset(self.entries)

    def format(self, model: Fsm) -> str:
        lines = []
        for s1, s2 in combinations(model.states, 2):
            seqs = self.entries.get(pair(s1, s2))
            if seqs is None:
                continue
            listed = "; ".join(format_inputs(w) for w in sorted(seqs, key=lambda w: (len(w), model.input_key(w))))
            lines.append(f"{{{s1},{s2}}} -> {{{listed}}}")
        return "".join(line + "\n" for line in lines)


def collect_rd_sets(model: Fsm, variant=RdVariant.RD1) -> RDistTable:
    """Fixpoint computation of r-distinguishing sets.

    Pairs are swept in canonical order; entries added during a sweep are
    visible to the rest of that sweep.  When several inputs qualify the least
    one in canonical order is used.
    """
    variant = _variant(variant)
    R: Dict[Pair, FrozenSet[InputSequence]] = {}
    pending: List[Tuple[str, str]] = []
    for s1, s2 in combinations(model.states, 2):
        if variant is RdVariant.RD1 and r0_distinguishable(model, s1, s2):
            R[pair(s1, s2)] = frozenset()
        else:
            pending.append((s1, s2))

    changed = True
    while pending and changed:
        changed = False
        remaining = []
        for s1, s2 in pending:
            seqs = _try_extend(model, R, s1, s2, variant)
            if seqs is None:
                remaining.append((s1, s2))
            else:
                R[pair(s1, s2)] = seqs
                changed = True
        pending = remaining
    return RDistTable(R, variant)


def _try_extend(model, R, s1, s2, variant) -> Optional[FrozenSet[InputSequence]]:
    for x in candidate_inputs(model, s1, s2, variant):
        m1, m2 = model.moves(s1, x), model.moves(s2, x)
        tails = set()
        for y in m1:
            if y not in m2:
                continue
            t1, t2 = m1[y], m2[y]
            seqs = R.get(pair(t1, t2)) if t1 != t2 else None
            if seqs is None:
                break
            tails |= seqs
        else:
            return frozenset((x,) + w for w in tails) if tails else frozenset([(x,)])
    return None


def rdist_trees(
    model: Fsm,
    node1: PrefixTree,
    node2: PrefixTree,
    s1: str,
    s2: str,
    variant,
    known: Optional[set] = None,
) -> bool:
    """Does the common part of two prefix trees r-distinguish ``s1`` and ``s2``?

    ``node1`` and ``node2`` are the subtrees of test-suite prefixes hanging
    below the two sequences reaching ``s1`` and ``s2``; the sequences usable
    after both are the paths present in both subtrees.  Passing the same tree
    twice decides whether that tree's sequence set r-distinguishes the states.

    ``known`` caches positive answers across calls.  Trees may only grow
    between calls sharing it, since growth can never turn a positive answer
    into a negative one.
    """
    return _rdist(model, node1, node2, s1, s2, _variant(variant), {}, known if known is not None else set())


def _rdist(model, n1, n2, s1, s2, variant, memo, known) -> bool:
    if s1 == s2:
        return False
    if variant is RdVariant.RD1 and set(model.delta(s1)) != set(model.delta(s2)):
        return True
    key = (id(n1), id(n2), s1, s2)
    if key in known:
        return True
    hit = memo.get(key)
    if hit is not None:
        return hit
    result = False
    c1, c2 = n1.children, n2.children
    for x in candidate_inputs(model, s1, s2, variant):
        if x not in c1 or x not in c2:
            continue
        m1, m2 = model.moves(s1, x), model.moves(s2, x)
        if all(
            _rdist(model, c1[x], c2[x], m1[y], m2[y], variant, memo, known)
            for y in m1
            if y in m2
        ):
            result = True
            break
    memo[key] = result
    if result:
        known.add(key)
    return result


def rdistinguishes(model: Fsm, seqs: Iterable[Sequence[str]], s1: str, s2: str, variant=RdVariant.RD1) -> bool:
    tree = PrefixTree(seqs)
    return rdist_trees(model, tree, tree, s1, s2, variant)


@dataclass(frozen=True)
class SdFamily:
    """Maximal sets of pairwise r-distinguishable states, canonical order."""

    sets: Tuple[FrozenSet[str], ...]
    complete: bool = True

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, i):
        return self.sets[i]

    def containing(self, s: str) -> Tuple[int, ...]:
        return tuple(i for i, members in enumerate(self.sets) if s in members)

    def format(self, model: Fsm) -> str:
        return "".join(
            "{" + ",".join(s for s in model.states if s in members) + "}\n" for members in self.sets
        )


DEFAULT_CLIQUE_CAP = 10_000


def compute_sd_family(model: Fsm, table: RDistTable, cap: int = DEFAULT_CLIQUE_CAP) -> SdFamily:
    """All maximal cliques of the r-distinguishability graph.

    States distinguishable from no other state end up as singletons.  If more
    than ``cap`` cliques exist, a greedy family of maximal cliques covering
    every state is returned instead and ``complete`` is False.
    """
    G = nx.Graph()
    G.add_nodes_from(model.states)
    G.add_edges_from(tuple(p) for p in table.entries)
    key = lambda members: tuple(sorted(model.state_index(s) for s in members))

    cliques = []
    for clique in nx.find_cliques(G):
        cliques.append(frozenset(clique))
        if len(cliques) > cap:
            log.warning("more than %d maximal cliques; using a covering subfamily", cap)
            return SdFamily(tuple(sorted(_greedy_cover(model, G), key=key)), complete=False)
    return SdFamily(tuple(sorted(cliques, key=key)))


def _greedy_cover(model: Fsm, G) -> List[FrozenSet[str]]:
    covered, family = set(), []
    for s in model.states:
        if s in covered:
            continue
        clique = [s]
        for t in model.states:
            if t != s and all(G.has_edge(t, c) for c in clique):
                clique.append(t)
        family.append(frozenset(clique))
        covered.update(clique)
    return family
