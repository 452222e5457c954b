"""m-complete test suites for strong reduction via state counting.

Starting from each d-reachable state, traces are grown until they have
visited one pairwise r-distinguishable state set often enough that an
implementation with at most m states must have repeated a state.  The
input parts of those traces, prefixed with the state's d-reaching sequence,
make up the traversal cases.  Each pair of visited sequences that should
reach distinct states then gets an r-distinguishing extension, skipped when
the suite already separates the pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .distinguish import (
    DEFAULT_CLIQUE_CAP,
    RDistTable,
    RdVariant,
    SdFamily,
    _variant,
    collect_rd_sets,
    compute_sd_family,
    rdist_trees,
)
from .fsm import Fsm, InputSequence, IoTrace, format_inputs, parse_inputs
from .reach import StateCover, compute_state_cover
from .trie import PrefixTree

POLICIES = ("canonical-last", "canonical-least")
POLICY = POLICIES[0]
DEFAULT_MAX_TRACES = 1_000_000


class BudgetExceeded(RuntimeError):
    """Traversal materialised more traces than the configured budget allows."""

    def __init__(self, limit: int, stats: dict):
        super().__init__(f"trace budget of {limit} exceeded ({stats})")
        self.limit = limit
        self.stats = stats


class Budget:
    """Counts traces held in memory; extended and terminated ones alike."""

    def __init__(self, max_traces: Optional[int] = DEFAULT_MAX_TRACES):
        self.max_traces = max_traces
        self.extended = 0
        self.terminated = 0

    def charge(self, terminated: bool = False):
        if terminated:
            self.terminated += 1
        else:
            self.extended += 1
        if self.max_traces is not None and self.extended + self.terminated > self.max_traces:
            raise BudgetExceeded(self.max_traces, self.stats())

    def stats(self) -> dict:
        return {"extended_traces": self.extended, "terminated_traces": self.terminated}


@dataclass(frozen=True)
class TerminatedTrace:
    source: str
    trace: IoTrace
    terminators: Tuple[int, ...]  # indices into the SdFamily

    @property
    def inputs(self) -> InputSequence:
        return tuple(x for x, _ in self.trace)


@dataclass
class TraversalSet:
    source: str
    tree: PrefixTree

    @property
    def sequences(self) -> FrozenSet[InputSequence]:
        return frozenset(self.tree.prefixes())

    def maximal(self) -> List[InputSequence]:
        return list(self.tree.leaves())


def termination_thresholds(m: int, sd: SdFamily, cover: StateCover) -> Tuple[int, ...]:
    return tuple(m - sum(1 for s in members if s in cover) + 1 for members in sd)


def compute_traversal(
    model: Fsm,
    cover: StateCover,
    sd: SdFamily,
    s: str,
    m: int,
    budget: Optional[Budget] = None,
) -> Tuple[TraversalSet, List[TerminatedTrace]]:
    """Extend traces from ``s`` until the state-counting criterion terminates them.

    Traces ending in a state without defined inputs cannot be extended; their
    inputs are kept in the traversal set although nothing terminates them.
    """
    if m < len(model):
        raise ValueError(f"m={m} is smaller than the model size {len(model)}")
    if budget is None:
        budget = Budget(None)
    limits = termination_thresholds(m, sd, cover)
    member = {t: sd.containing(t) for t in model.states}
    if any(not idx for idx in member.values()):
        raise ValueError("every state must belong to some terminating set")

    tree = PrefixTree()
    terminated: List[TerminatedTrace] = []
    zero = (0,) * len(sd)
    # explicit stack; children pushed in reverse so they pop in canonical order
    stack = [(s, zero, (), tree)]
    while stack:
        state, counts, trace, node = stack.pop()
        budget.charge()
        children = []
        for x in model.delta(state):
            child_node = node.children.get(x)
            for y, t in model.moves(state, x).items():
                c = list(counts)
                for j in member[t]:
                    c[j] += 1
                new_trace = trace + ((x, y),)
                if child_node is None:
                    child_node = node.add((x,))
                hit = tuple(j for j in member[t] if c[j] >= limits[j])
                if hit:
                    budget.charge(terminated=True)
                    terminated.append(TerminatedTrace(s, new_trace, hit))
                else:
                    children.append((t, tuple(c), new_trace, child_node))
        stack.extend(reversed(children))
    # DFS order above is per depth-first pop; sort terminated traces canonically for reproducibility
    terminated.sort(key=lambda tt: _trace_key(model, tt.trace))
    return TraversalSet(s, tree), terminated


def _trace_key(model: Fsm, trace: IoTrace):
    return tuple((model.input_index(x), model.output_index(y)) for x, y in trace)


@dataclass(frozen=True)
class TestSuite:
    """Prefix-free set of input sequences.

    ``cases`` is in listing order: longest first, then lexicographic in the
    canonical input order.
    """

    __test__ = False  # keep pytest from collecting this class

    cases: Tuple[InputSequence, ...]
    model: str = ""
    m: int = 0
    variant: str = ""
    policy: str = POLICY
    stats: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    @property
    def total_inputs(self) -> int:
        return sum(len(c) for c in self.cases)

    def format(self) -> str:
        return "".join(format_inputs(c) + "\n" for c in self.cases)

    def stats_line(self) -> str:
        return f"cases={len(self.cases)} inputs={self.total_inputs} variant={self.variant}"


def order_cases(model: Fsm, cases) -> Tuple[InputSequence, ...]:
    return tuple(sorted(set(cases), key=lambda c: (-len(c), model.input_key(c))))


def parse_suite(text: str) -> Tuple[InputSequence, ...]:
    cases = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            cases.append(parse_inputs(line))
    return tuple(cases)


def generate_test_suite(
    model: Fsm,
    m: int,
    variant=RdVariant.RD1,
    max_traces: Optional[int] = DEFAULT_MAX_TRACES,
    clique_cap: int = DEFAULT_CLIQUE_CAP,
    policy: str = POLICY,
) -> TestSuite:
    """Test suite that is m-complete for strong reduction against the model.

    ``policy`` fixes the free choices of the construction.  Under
    ``canonical-least`` the least terminating set is used and prefix pairs are
    visited shortest first.  ``canonical-last`` (the default) uses the last
    terminating set and visits longer prefixes first, which lets later
    extensions cover earlier ones and yields smaller suites.  Both choices
    keep the suite m-complete.
    """
    variant = _variant(variant)
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {', '.join(POLICIES)}")
    if m < len(model):
        raise ValueError(f"m={m} is smaller than the model size {len(model)}")
    cover = compute_state_cover(model)
    table = collect_rd_sets(model, variant)
    sd = compute_sd_family(model, table, cap=clique_cap)
    uncovered = [s for s in model.states if not sd.containing(s)]
    if uncovered:
        raise ValueError(f"states outside every terminating set: {', '.join(uncovered)}")

    budget = Budget(max_traces)
    suite_tree = PrefixTree()
    all_terminated: List[TerminatedTrace] = []
    for s, v in cover.entries.items():
        trav, terminated = compute_traversal(model, cover, sd, s, m, budget)
        for seq in trav.tree.leaves():
            suite_tree.add(v + seq)
        all_terminated.extend(terminated)

    added = _add_distinguishing(model, cover, sd, table, suite_tree, all_terminated, policy)
    cases = order_cases(model, suite_tree.leaves())
    stats = dict(budget.stats(), d_size=len(all_terminated), distinguishing_additions=added, sd_sets=len(sd))
    return TestSuite(cases, model.name, m, variant.value, policy, stats)


def _add_distinguishing(model, cover, sd, table: RDistTable, suite_tree: PrefixTree, all_terminated, policy: str) -> int:
    variant = table.variant
    cover_nodes = [(v, s) for s, v in cover.entries.items()]
    done = set()
    known = set()
    added = 0
    for tt in all_terminated:
        if policy == "canonical-least":
            chosen = sd[tt.terminators[0]]
        else:
            chosen = sd[tt.terminators[-1]]
        v = cover[tt.source]
        nodes = [n for n in cover_nodes if n[1] in chosen]
        state = tt.source
        xs = v
        along = []
        for x, y in tt.trace:
            state = model.succ(state, x, y)
            xs = xs + (x,)
            if state in chosen:
                along.append((xs, state))
        if policy != "canonical-least":
            # longer prefixes first: their extensions often cover shorter ones
            along.reverse()
        seen = set(nodes)
        for n in along:
            if n not in seen:
                seen.add(n)
                nodes.append(n)
        for (x1, s1), (x2, s2) in combinations(nodes, 2):
            if s1 == s2:
                continue
            key = frozenset(((x1, s1), (x2, s2)))
            if key in done:
                continue
            done.add(key)
            n1, n2 = suite_tree.find(x1), suite_tree.find(x2)
            if rdist_trees(model, n1, n2, s1, s2, variant, known):
                continue
            seqs = table.get(s1, s2)
            if not seqs:
                suite_tree.add(x1)
                suite_tree.add(x2)
            else:
                for w in seqs:
                    suite_tree.add(x1 + w)
                    suite_tree.add(x2 + w)
            added += 1
    return added


# -- size bounds for the corner cases ------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    case: str
    bound: Optional[int]
    size: int
    max_length: int

    @property
    def holds(self) -> Optional[bool]:
        return None if self.bound is None else self.size <= self.bound


def deterministic_bound(n: int, k: int, a: int) -> int:
    """Suite-size bound for deterministic, completely specified, minimal models."""
    p = k ** (a + 1)
    return n * p + (n * n - n) + 2 * n * n * (a + 1) * p + n * p * (a * a + a)


def classify_corner_case(model: Fsm, variant=RdVariant.RD1) -> str:
    cover = compute_state_cover(model)
    table = collect_rd_sets(model, variant)
    n = len(model)
    all_pairs = n * (n - 1) // 2
    if model.is_deterministic and model.is_complete and len(table.entries) == all_pairs:
        return "deterministic"
    if len(cover) == n and all(
        set(model.delta(s1)) != set(model.delta(s2)) for s1, s2 in combinations(model.states, 2)
    ):
        return "best"
    if len(cover) == 1 and not table.entries:
        return "worst"
    return "none"


def verify_bounds(model: Fsm, m: int, suite: TestSuite, variant=RdVariant.RD1) -> BoundReport:
    case = classify_corner_case(model, variant)
    n, k, a = len(model), len(model.inputs), m - len(model)
    bound = {
        "deterministic": deterministic_bound(n, k, a),
        "best": n * k ** (a + 1),
        "worst": k ** (m * n),
    }.get(case)
    longest = max((len(c) for c in suite.cases), default=0)
    return BoundReport(case if bound is not None else "no corner-case bound", bound, len(suite), longest)
