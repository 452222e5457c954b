"""Observable, possibly partial and nondeterministic Mealy machines.

States, inputs and outputs are plain strings.  The order in which they are
declared is the canonical order used everywhere a choice has to be made.

The text format is line based::

    fsm <name>
    inputs <sym> ...
    outputs <sym> ...
    states <id> ...
    initial <id>
    trans <src> <input> <output> <dst>     # zero or more

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Tuple

InputSequence = Tuple[str, ...]
IoTrace = Tuple[Tuple[str, str], ...]
Transition = Tuple[str, str, str, str]

EMPTY: IoTrace = ()


class FsmError(ValueError):
    """Raised for models that cannot be parsed or are not valid."""


class FsmSyntaxError(FsmError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Fsm:
    """A finite state machine given by states, initial state, alphabets and transitions.

    Construction validates the model: every transition must use declared
    states and symbols, the machine must be observable and every state must
    be reachable from ``initial``.  Use :meth:`build` with ``prune=True`` to
    drop unreachable states instead of rejecting them.
    """

    name: str
    states: Tuple[str, ...]
    initial: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    transitions: frozenset
    _table: dict = field(init=False, repr=False, compare=False, hash=False)
    _order: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        for kind, seq in (("state", self.states), ("input", self.inputs), ("output", self.outputs)):
            if len(set(seq)) != len(seq):
                raise FsmError(f"duplicate {kind} declaration")
        if self.initial not in self.states:
            raise FsmError(f"initial state {self.initial!r} is not declared")

        state_set, input_set, output_set = set(self.states), set(self.inputs), set(self.outputs)
        table = {s: {} for s in self.states}
        for t in sorted(self.transitions):
            src, x, y, dst = t
            if src not in state_set or dst not in state_set:
                raise FsmError(f"transition {_fmt_t(t)} references an undeclared state")
            if x not in input_set:
                raise FsmError(f"transition {_fmt_t(t)} uses undeclared input {x!r}")
            if y not in output_set:
                raise FsmError(f"transition {_fmt_t(t)} uses undeclared output {y!r}")
            by_output = table[src].setdefault(x, {})
            if y in by_output and by_output[y] != dst:
                raise FsmError(
                    f"observability violated: transition {_fmt_t(t)} conflicts with "
                    f"{_fmt_t((src, x, y, by_output[y]))}"
                )
            by_output[y] = dst

        order = {
            "state": {s: i for i, s in enumerate(self.states)},
            "input": {x: i for i, x in enumerate(self.inputs)},
            "output": {y: i for i, y in enumerate(self.outputs)},
        }
        # canonical order inside the lookup table makes every iteration deterministic
        for s in self.states:
            row = table[s]
            table[s] = {
                x: dict(sorted(row[x].items(), key=lambda kv: order["output"][kv[0]]))
                for x in sorted(row, key=order["input"].__getitem__)
            }
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_order", order)

        unreachable = set(self.states) - reachable_states(self)
        if unreachable:
            names = ", ".join(s for s in self.states if s in unreachable)
            raise FsmError(f"unreachable states: {names}")

    @classmethod
    def build(
        cls,
        name: str,
        states: Iterable[str],
        initial: str,
        inputs: Iterable[str],
        outputs: Iterable[str],
        transitions: Iterable[Transition],
        prune: bool = False,
    ) -> "Fsm":
        states = tuple(states)
        transitions = frozenset(tuple(t) for t in transitions)
        if prune and initial in states:
            keep = _reachable_raw(initial, transitions)
            states = tuple(s for s in states if s in keep)
            transitions = frozenset(t for t in transitions if t[0] in keep)
        return cls(name, states, initial, tuple(inputs), tuple(outputs), transitions)

    def __len__(self) -> int:
        return len(self.states)

    # -- lookups ---------------------------------------------------------

    def delta(self, s: str) -> Tuple[str, ...]:
        """Inputs defined in ``s``, in canonical order."""
        return tuple(self._table[s])

    def out(self, s: str, x: str) -> Tuple[str, ...]:
        row = self._table[s].get(x)
        return tuple(row) if row else ()

    def succ(self, s: str, x: str, y: str) -> Optional[str]:
        row = self._table[s].get(x)
        return row.get(y) if row else None

    def moves(self, s: str, x: str) -> Mapping[str, str]:
        """Output to target map for ``(s, x)``; empty when ``x`` is undefined."""
        return self._table[s].get(x, {})

    def after(self, s: str, trace: IoTrace) -> Optional[str]:
        for x, y in trace:
            row = self._table[s].get(x)
            if not row or y not in row:
                return None
            s = row[y]
        return s

    def state_index(self, s: str) -> int:
        return self._order["state"][s]

    def input_index(self, x: str) -> int:
        return self._order["input"][x]

    def output_index(self, y: str) -> int:
        return self._order["output"][y]

    def input_key(self, xs: Sequence[str]) -> Tuple[int, ...]:
        """Sort key giving the canonical lexicographic order on input sequences."""
        idx = self._order["input"]
        return tuple(idx[x] for x in xs)

    @property
    def is_deterministic(self) -> bool:
        return all(len(row) <= 1 for s in self.states for row in self._table[s].values())

    @property
    def is_complete(self) -> bool:
        return all(len(self._table[s]) == len(self.inputs) for s in self.states)


def _fmt_t(t: Transition) -> str:
    return "({})".format(", ".join(t))


def _reachable_raw(initial: str, transitions: Iterable[Transition]) -> set:
    succ = {}
    for src, _, _, dst in transitions:
        succ.setdefault(src, set()).add(dst)
    seen = {initial}
    todo = deque([initial])
    while todo:
        s = todo.popleft()
        for t in succ.get(s, ()):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def reachable_states(model: Fsm) -> set:
    return _reachable_raw(model.initial, model.transitions)


# -- semantic operations --------------------------------------------------


def defined_inputs(model: Fsm, s: str) -> frozenset:
    return frozenset(model.delta(s))


def out(model: Fsm, s: str, x: str) -> frozenset:
    return frozenset(model.out(s, x))


def after(model: Fsm, s: str, trace: IoTrace) -> Optional[str]:
    return model.after(s, tuple(trace))


def language_member(model: Fsm, trace: IoTrace) -> bool:
    return model.after(model.initial, tuple(trace)) is not None


def responses(model: Fsm, xs: Sequence[str], start: Optional[str] = None):
    """Yield ``(trace, state)`` for every response of ``start`` to the full input sequence ``xs``."""
    frontier = [((), model.initial if start is None else start)]
    for x in xs:
        frontier = [
            (trace + ((x, y),), t)
            for trace, s in frontier
            for y, t in model.moves(s, x).items()
        ]
    yield from frontier


def complete_ignored(
    model: Fsm, ignored: Mapping[str, Iterable[str]], null_output: str = "null"
) -> Fsm:
    """Turn ignored inputs into self-loops producing ``null_output``.

    Inputs left undefined afterwards are disabled.
    """
    extra = set()
    for s, xs in ignored.items():
        if s not in model.states:
            raise FsmError(f"unknown state {s!r} in ignored map")
        for x in xs:
            if x not in model.inputs:
                raise FsmError(f"unknown input {x!r} in ignored map")
            if model.out(s, x):
                raise FsmError(f"input {x!r} is already defined in state {s!r}")
            extra.add((s, x, null_output, s))
    if not extra:
        return model
    outputs = model.outputs if null_output in model.outputs else model.outputs + (null_output,)
    return Fsm(model.name, model.states, model.initial, model.inputs, outputs, model.transitions | extra)


# -- text format ------------------------------------------------------------

_DIRECTIVES = ("fsm", "inputs", "outputs", "states", "initial")


def parse_fsm(text: str, prune: bool = False) -> Fsm:
    header = {}
    transitions = []
    expected = 0
    seen_trans = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        fields = line.split()
        if not fields:
            continue
        col = len(line) - len(line.lstrip()) + 1
        word = fields[0]
        if expected < len(_DIRECTIVES):
            if word != _DIRECTIVES[expected]:
                raise FsmSyntaxError(f"expected '{_DIRECTIVES[expected]}', got '{word}'", lineno, col)
            args = fields[1:]
            if word in ("fsm", "initial") and len(args) != 1:
                raise FsmSyntaxError(f"'{word}' takes exactly one argument", lineno, col)
            header[word] = args
            expected += 1
            continue
        if word != "trans":
            raise FsmSyntaxError(f"expected 'trans', got '{word}'", lineno, col)
        if len(fields) != 5:
            raise FsmSyntaxError("'trans' takes four arguments: src input output dst", lineno, col)
        t = tuple(fields[1:])
        key = t[:3]
        if key in seen_trans and seen_trans[key][0] != t[3]:
            raise FsmError(
                f"line {lineno}: observability violated: transition {_fmt_t(t)} conflicts "
                f"with line {seen_trans[key][1]}"
            )
        seen_trans.setdefault(key, (t[3], lineno))
        transitions.append(t)
    if expected < len(_DIRECTIVES):
        raise FsmSyntaxError(f"missing '{_DIRECTIVES[expected]}' directive", lineno_end(text), 1)
    return Fsm.build(
        header["fsm"][0],
        header["states"],
        header["initial"][0],
        header["inputs"],
        header["outputs"],
        transitions,
        prune=prune,
    )


def lineno_end(text: str) -> int:
    return text.count("\n") + 1


def format_fsm(model: Fsm) -> str:
    lines = [
        f"fsm {model.name}",
        "inputs " + " ".join(model.inputs),
        "outputs " + " ".join(model.outputs),
        "states " + " ".join(model.states),
        f"initial {model.initial}",
    ]
    for s in model.states:
        for x in model.delta(s):
            for y, t in model.moves(s, x).items():
                lines.append(f"trans {s} {x} {y} {t}")
    return "\n".join(lines) + "\n"


def load_fsm(path, prune: bool = False) -> Fsm:
    with open(path, encoding="utf-8") as fh:
        return parse_fsm(fh.read(), prune=prune)


def export_dot(model: Fsm) -> str:
    def q(s):
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = [f"digraph {q(model.name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for s in model.states:
        shape = "doublecircle" if s == model.initial else "circle"
        lines.append(f"  {q(s)} [shape={shape}];")
    lines.append(f"  __start -> {q(model.initial)};")
    for s in model.states:
        for x in model.delta(s):
            for y, t in model.moves(s, x).items():
                lines.append(f"  {q(s)} -> {q(t)} [label={q(x + '/' + y)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- sequences ----------------------------------------------------------------
# Symbols containing '.', '/', '(' or ')' are wrapped in parentheses, so
# "(pr.A).(ci.in.v)" is the two-symbol sequence pr.A, ci.in.v.

_SPECIAL = set("./()")


def _sym(s: str) -> str:
    return f"({s})" if _SPECIAL & set(s) else s


def _split_dots(text: str) -> list:
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {text!r}")
        if ch == "." and depth == 0:
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced parentheses in {text!r}")
    items.append("".join(cur))
    return items


def _unsym(s: str) -> str:
    if s.startswith("(") and s.endswith(")"):
        return s[1:-1]
    if not s or _SPECIAL & set(s):
        raise ValueError(f"malformed symbol {s!r}")
    return s


def format_inputs(xs: Sequence[str]) -> str:
    return ".".join(_sym(x) for x in xs) if xs else "eps"


def parse_inputs(text: str) -> InputSequence:
    text = text.strip()
    if text in ("", "eps"):
        return ()
    return tuple(_unsym(item) for item in _split_dots(text))


def format_trace(trace: IoTrace) -> str:
    return ".".join(f"{_sym(x)}/{_sym(y)}" for x, y in trace) if trace else "eps"


def parse_trace(text: str) -> IoTrace:
    text = text.strip()
    if text in ("", "eps"):
        return ()
    pairs = []
    for item in _split_dots(text):
        # split on the '/' that sits outside parentheses
        depth = 0
        for i, ch in enumerate(item):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "/" and depth == 0:
                pairs.append((_unsym(item[:i]), _unsym(item[i + 1:])))
                break
        else:
            raise ValueError(f"malformed IO pair {item!r}")
    return tuple(pairs)
