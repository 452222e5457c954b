"""Strong-reduction oracle, the pass relation and fault-domain mutants.

An implementation is a strong reduction of a model when each of its traces
is a trace of the model and, after every shared trace, both machines enable
the same inputs.  The oracle decides this on the product of the two machines; the
pass relation decides it only along the input sequences of a test suite.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .distinguish import RdVariant, rdistinguishes
from .fsm import Fsm, FsmError, IoTrace, format_trace
from .trie import PrefixTree


class FailureKind(str, enum.Enum):
    OUTPUT_VIOLATION = "output-violation"
    ENABLED_INPUT_MISMATCH = "enabled-input-mismatch"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Verdict:
    conforms: bool
    witness: Optional[IoTrace] = None
    kind: Optional[FailureKind] = None

    def __bool__(self):
        return self.conforms

    def describe(self) -> str:
        if self.conforms:
            return "CONFORMS"
        return f"VIOLATION {self.kind}: {format_trace(self.witness) or 'eps'}"


ConformanceVerdict = Verdict
PASS = Verdict(True)


class AlphabetMismatch(FsmError):
    pass


def _check_alphabets(impl: Fsm, model: Fsm):
    if set(impl.inputs) != set(model.inputs):
        raise AlphabetMismatch("input alphabets differ")
    if set(impl.outputs) != set(model.outputs):
        raise AlphabetMismatch("output alphabets differ")


def _step_violation(impl, model, t, s, trace) -> Optional[Verdict]:
    """Violation visible in product state ``(t, s)`` reached by ``trace``, if any."""
    if set(impl.delta(t)) != set(model.delta(s)):
        return Verdict(False, trace, FailureKind.ENABLED_INPUT_MISMATCH)
    return None


def check_strong_reduction(impl: Fsm, model: Fsm) -> Verdict:
    """Decide strong reduction by breadth-first search of the product.

    The witness is a shortest trace of the implementation exposing the violation.
    """
    _check_alphabets(impl, model)
    start = (impl.initial, model.initial)
    seen = {start}
    todo = deque([(start, ())])
    while todo:
        (t, s), trace = todo.popleft()
        bad = _step_violation(impl, model, t, s, trace)
        if bad is not None:
            return bad
        for x in model.delta(s):
            allowed = model.moves(s, x)
            for y, t2 in impl.moves(t, x).items():
                s2 = allowed.get(y)
                if s2 is None:
                    return Verdict(False, trace + ((x, y),), FailureKind.OUTPUT_VIOLATION)
                if (t2, s2) not in seen:
                    seen.add((t2, s2))
                    todo.append(((t2, s2), trace + ((x, y),)))
    return PASS


def evaluate_pass(impl: Fsm, suite: Iterable[Sequence[str]], model: Fsm) -> Verdict:
    """Does the implementation pass every test case, observing all of its responses?

    For every prefix of every case and every response of the implementation to it, the
    response must be a trace of the model and both machines must enable the same
    inputs afterwards.  Shared prefixes are evaluated once.
    """
    _check_alphabets(impl, model)
    cases = [tuple(c) for c in suite]
    if not cases:
        return PASS
    tree = PrefixTree(cases)
    todo = deque([(tree, impl.initial, model.initial, ())])
    while todo:
        node, t, s, trace = todo.popleft()
        bad = _step_violation(impl, model, t, s, trace)
        if bad is not None:
            return bad
        for x, child in node.children.items():
            allowed = model.moves(s, x)
            for y, t2 in impl.moves(t, x).items():
                s2 = allowed.get(y)
                if s2 is None:
                    return Verdict(False, trace + ((x, y),), FailureKind.OUTPUT_VIOLATION)
                todo.append((child, t2, s2, trace + ((x, y),)))
    return PASS


def replay_witness(impl: Fsm, model: Fsm, verdict: Verdict) -> bool:
    """Confirm that a failing verdict's witness shows the reported violation."""
    if verdict.conforms:
        return verdict.witness is None
    w = verdict.witness
    t = impl.after(impl.initial, w)
    if t is None:
        return False
    if verdict.kind is FailureKind.OUTPUT_VIOLATION:
        return bool(w) and model.after(model.initial, w) is None and model.after(model.initial, w[:-1]) is not None
    s = model.after(model.initial, w)
    return s is not None and set(impl.delta(t)) != set(model.delta(s))


# -- fault domain and mutants ----------------------------------------------


@dataclass(frozen=True)
class FaultDomain:
    """Observable FSMs over the reference alphabets with at most ``m`` states."""

    m: int

    def contains(self, impl: Fsm, model: Fsm) -> bool:
        return (
            len(impl) <= self.m
            and set(impl.inputs) == set(model.inputs)
            and set(impl.outputs) == set(model.outputs)
        )



@dataclass(frozen=True)
class Mutant:
    fsm: Fsm
    operators: tuple
    verdict: Verdict


OPERATORS = (
    "change-output",
    "redirect",
    "add-disabled",
    "remove",
    "add-output",
    "prune-output",
    "extra-state",
)


def _apply(op: str, rng: random.Random, model: Fsm, states: list, trans: set, m: int) -> bool:
    """Apply one operator in place; False when it is not applicable."""
    by_sx = {}
    for t in trans:
        by_sx.setdefault((t[0], t[1]), []).append(t)
    ordered = sorted(trans)
    if op == "change-output" and ordered:
        s, x, y, d = rng.choice(ordered)
        free = [o for o in model.outputs if o not in {t[2] for t in by_sx[s, x]}]
        if not free:
            return False
        trans.discard((s, x, y, d))
        trans.add((s, x, rng.choice(free), d))
        return True
    if op == "redirect" and ordered:
        s, x, y, d = rng.choice(ordered)
        trans.discard((s, x, y, d))
        trans.add((s, x, y, rng.choice(states)))
        return True
    if op == "add-disabled":
        options = [(s, x) for s in states for x in model.inputs if (s, x) not in by_sx]
        if not options:
            return False
        s, x = rng.choice(options)
        trans.add((s, x, rng.choice(model.outputs), rng.choice(states)))
        return True
    if op == "remove" and ordered:
        trans.discard(rng.choice(ordered))
        return True
    if op == "add-output" and by_sx:
        s, x = rng.choice(sorted(by_sx))
        free = [o for o in model.outputs if o not in {t[2] for t in by_sx[s, x]}]
        if not free:
            return False
        trans.add((s, x, rng.choice(free), rng.choice(states)))
        return True
    if op == "prune-output":
        options = sorted(k for k, ts in by_sx.items() if len(ts) > 1)
        if not options:
            return False
        trans.discard(rng.choice(sorted(by_sx[rng.choice(options)])))
        return True
    if op == "extra-state" and len(states) < m:
        src = rng.choice(states)
        q = f"q{len(states)}"
        while q in states:
            q += "'"
        states.append(q)
        for s, x, y, d in list(trans):
            if s == src:
                trans.add((q, x, y, d))
        incoming = sorted(t for t in trans if t[3] == src and t[0] != q)
        if incoming:
            s, x, y, d = rng.choice(incoming)
            trans.discard((s, x, y, d))
            trans.add((s, x, y, q))
        return True
    return False


def mutate(model: Fsm, rng: random.Random, m: int, operators: int = 1) -> tuple:
    """Random observable mutant of the model with at most ``m`` states."""
    states = list(model.states)
    trans = set(model.transitions)
    applied = []
    while len(applied) < operators:
        op = rng.choice(OPERATORS)
        if _apply(op, rng, model, states, trans, m):
            applied.append(op)
    impl = Fsm.build(model.name + "-mutant", states, model.initial, model.inputs, model.outputs, trans, prune=True)
    return impl, tuple(applied)


def sample_mutants(
    model: Fsm, domain: FaultDomain, count: int, seed: int, max_operators: int = 3
) -> List[Mutant]:
    """``count`` seeded mutants, each labelled with its oracle verdict."""
    if domain.m < len(model):
        raise ValueError("fault domain bound is smaller than the reference model")
    rng = random.Random(seed)
    result = []
    for _ in range(count):
        impl, ops = mutate(model, rng, domain.m, rng.randint(1, max_operators))
        result.append(Mutant(impl, ops, check_strong_reduction(impl, model)))
    return result


# -- distinct states after distinguishing sets ------------------------------


class PreconditionError(ValueError):
    """The inputs do not satisfy the assumptions of :func:`reaches_distinct_states`."""


def reaches_distinct_states(
    model: Fsm,
    impl: Fsm,
    seqs: Iterable[Sequence[str]],
    alpha: IoTrace,
    beta: IoTrace,
    variant=RdVariant.RD1,
) -> bool:
    """Do ``alpha`` and ``beta`` reach distinct states of the implementation?

    Requires both traces in both languages, ``seqs`` r-distinguishing the
    model states they reach, and the implementation passing every sequence
    of ``seqs`` appended to the inputs of either trace.
    Under these assumptions the answer is always True.
    """
    seqs = [tuple(w) for w in seqs]
    s1, s2 = model.after(model.initial, alpha), model.after(model.initial, beta)
    t1, t2 = impl.after(impl.initial, alpha), impl.after(impl.initial, beta)
    if None in (s1, s2, t1, t2):
        raise PreconditionError("traces must belong to both languages")
    if not rdistinguishes(model, seqs, s1, s2, variant):
        raise PreconditionError(f"the sequences do not r-distinguish {s1} and {s2}")
    x1 = tuple(x for x, _ in alpha)
    x2 = tuple(x for x, _ in beta)
    cases = [x + w for x in (x1, x2) for w in (seqs or [()])]
    if not evaluate_pass(impl, cases, model):
        raise PreconditionError("implementation does not pass the distinguishing cases")
    return t1 != t2


# -- random models ----------------------------------------------------------


def random_fsm(
    rng: random.Random,
    n: int,
    n_inputs: int = 2,
    n_outputs: int = 2,
    p_defined: float = 0.8,
    max_outputs: int = 2,
    name: str = "random",
) -> Fsm:
    """Random observable FSM with all states reachable from ``s0``."""
    states = [f"s{i}" for i in range(n)]
    inputs = [chr(ord("a") + i) for i in range(n_inputs)]
    outputs = [str(i) for i in range(n_outputs)]
    trans = set()
    used_labels = set()
    for i in range(1, n):
        # spanning tree keeps every state reachable; labels stay observable
        free = [
            (states[j], x, y)
            for j in range(i)
            for x in inputs
            for y in outputs
            if (states[j], x, y) not in used_labels
        ]
        label = rng.choice(free)
        used_labels.add(label)
        trans.add(label + (states[i],))
    for s in states:
        for x in inputs:
            used = {t[2] for t in trans if t[0] == s and t[1] == x}
            if not used and rng.random() > p_defined:
                continue
            k = rng.randint(1, max_outputs)
            for y in rng.sample(outputs, min(k, len(outputs))):
                if y not in used:
                    trans.add((s, x, y, rng.choice(states)))
                    used.add(y)
    return Fsm.build(name, states, states[0], inputs, outputs, trans)
