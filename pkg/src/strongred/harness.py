"""Grey-box execution of test suites against a system under test (SUT).

The SUT hides its state but reveals which inputs it currently accepts.  A
line-based protocol over a channel drives it::

    RESET        -> READY
    ENABLED?     -> ENABLED <sym> <sym> ...
    INPUT <sym>  -> OUTPUT <sym> | REFUSED
    QUIT         -> (no reply)

Each test case is run ``k`` times back to back with a simulation of the
reference model, comparing every output and every enabled set.
"""

from __future__ import annotations

import queue
import random
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Protocol, Sequence, TextIO, Tuple

from .conformance import PASS, FailureKind, Verdict
from .fsm import Fsm, InputSequence, IoTrace, format_inputs, format_trace


class HarnessError(RuntimeError):
    """The SUT could not be driven; this is not a test verdict."""


class ProtocolError(HarnessError):
    pass


class SutTimeout(HarnessError):
    pass


class ResetError(HarnessError):
    pass


class SutChannel(Protocol):
    def request(self, line: str) -> Optional[str]:
        """Send one command line and return the reply line (None for QUIT)."""

    def close(self) -> None: ...


# -- SUT side ----------------------------------------------------------------


class FsmSut:
    """In-process SUT simulating the implementation; nondeterminism resolved by a seeded RNG."""

    def __init__(self, impl: Fsm, seed: int = 0):
        self.fsm = impl
        self.rng = random.Random(seed)
        self.state = impl.initial

    def handle(self, line: str) -> Optional[str]:
        cmd, _, arg = line.strip().partition(" ")
        if cmd == "RESET":
            self.state = self.fsm.initial
            return "READY"
        if cmd == "ENABLED?":
            return " ".join(("ENABLED",) + self.fsm.delta(self.state))
        if cmd == "INPUT":
            moves = self.fsm.moves(self.state, arg)
            if not moves:
                return "REFUSED"
            y, self.state = self.rng.choice(list(moves.items()))
            return f"OUTPUT {y}"
        if cmd == "QUIT":
            return None
        return f"ERROR unknown command {cmd}"

    request = handle

    def close(self):
        pass


def serve_fsm_as_sut(impl: Fsm, seed: int = 0) -> FsmSut:
    return FsmSut(impl, seed)


def serve_stream(impl: Fsm, seed: int, stdin: TextIO, stdout: TextIO) -> None:
    """Serve the protocol on text streams until QUIT or end of input."""
    sut = FsmSut(impl, seed)
    for line in stdin:
        if not line.strip():
            continue
        reply = sut.handle(line)
        if reply is None:
            break
        stdout.write(reply + "\n")
        stdout.flush()


class ProcessSut:
    """SUT spoken to over the standard streams of a child process."""

    def __init__(self, argv: Sequence[str], timeout: float = 10.0):
        self.timeout = timeout
        self.proc = subprocess.Popen(
            list(argv),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self.lines: "queue.Queue[Optional[str]]" = queue.Queue()
        # reader thread so a silent SUT can time out instead of blocking forever
        self.reader = threading.Thread(target=self._read, daemon=True)
        self.reader.start()

    def _read(self):
        for line in self.proc.stdout:
            self.lines.put(line.rstrip("\n"))
        self.lines.put(None)

    def request(self, line: str) -> Optional[str]:
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"SUT closed its input: {exc}") from exc
        if line == "QUIT":
            return None
        try:
            reply = self.lines.get(timeout=self.timeout)
        except queue.Empty:
            raise SutTimeout(f"no reply to {line!r} within {self.timeout}s") from None
        if reply is None:
            raise ProtocolError(f"SUT exited before replying to {line!r}")
        return reply

    def close(self):
        if self.proc.poll() is None:
            try:
                self.request("QUIT")
                self.proc.stdin.close()
            except HarnessError:
                pass
            try:
                self.proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# -- runner side -------------------------------------------------------------


@dataclass(frozen=True)
class FairnessConfig:
    """Every test case is repeated ``k`` times."""

    k: int = 50

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("fairness constant k must be at least 1")


@dataclass
class Run:
    case: InputSequence
    repetition: int
    trace: IoTrace
    enabled: List[frozenset]  # one entry per reached state, initial included
    verdict_step: Optional[int] = None


@dataclass
class ExecutionLog:
    runs: List[Run] = field(default_factory=list)


def _enabled(sut: SutChannel, model: Fsm) -> frozenset:
    reply = sut.request("ENABLED?")
    parts = (reply or "").split()
    if not parts or parts[0] != "ENABLED":
        raise ProtocolError(f"expected ENABLED reply, got {reply!r}")
    unknown = [x for x in parts[1:] if x not in model.inputs]
    if unknown:
        raise ProtocolError(f"SUT reports unknown inputs {unknown}")
    return frozenset(parts[1:])


def _run_case(sut: SutChannel, model: Fsm, case: InputSequence, rep: int) -> Tuple[Run, Verdict]:
    reply = sut.request("RESET")
    if reply != "READY":
        raise ResetError(f"expected READY after RESET, got {reply!r}")
    s = model.initial
    trace: IoTrace = ()
    run = Run(tuple(case), rep, trace, [])
    enabled = _enabled(sut, model)
    run.enabled.append(enabled)
    if enabled != frozenset(model.delta(s)):
        run.verdict_step = 0
        return run, Verdict(False, trace, FailureKind.ENABLED_INPUT_MISMATCH)
    for x in case:
        reply = sut.request(f"INPUT {x}")
        if reply == "REFUSED":
            if x in enabled:
                raise ProtocolError(f"SUT refused {x} after reporting it enabled")
            # x is disabled in both machines; nothing further can be applied
            break
        if reply is None or not reply.startswith("OUTPUT "):
            raise ProtocolError(f"expected OUTPUT or REFUSED, got {reply!r}")
        if x not in enabled:
            raise ProtocolError(f"SUT accepted {x} after reporting it disabled")
        y = reply[len("OUTPUT "):].strip()
        trace = trace + ((x, y),)
        run.trace = trace
        s = model.succ(s, x, y)
        if s is None:
            run.verdict_step = len(trace)
            return run, Verdict(False, trace, FailureKind.OUTPUT_VIOLATION)
        enabled = _enabled(sut, model)
        run.enabled.append(enabled)
        if enabled != frozenset(model.delta(s)):
            run.verdict_step = len(trace)
            return run, Verdict(False, trace, FailureKind.ENABLED_INPUT_MISMATCH)
    return run, PASS


def run_suite(
    sut: SutChannel,
    model: Fsm,
    suite: Iterable[Sequence[str]],
    fairness: FairnessConfig = FairnessConfig(),
) -> Tuple[Verdict, ExecutionLog]:
    """Execute every case ``k`` times; stop at the first failing run."""
    log = ExecutionLog()
    for case in suite:
        for rep in range(fairness.k):
            run, verdict = _run_case(sut, model, tuple(case), rep)
            log.runs.append(run)
            if not verdict.conforms:
                return verdict, log
    return PASS, log


def format_log(log: ExecutionLog) -> str:
    lines = []
    for r in log.runs:
        enabled = " | ".join(",".join(sorted(e)) for e in r.enabled)
        step = "" if r.verdict_step is None else f"\tFAIL@{r.verdict_step}"
        lines.append(
            f"{format_inputs(r.case)}\t#{r.repetition}\t{format_trace(r.trace)}\t[{enabled}]{step}"
        )
    return "".join(line + "\n" for line in lines)
