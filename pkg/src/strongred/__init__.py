"""Complete test suites for strong reduction of observable nondeterministic FSMs."""

from .conformance import (
    AlphabetMismatch,
    FailureKind,
    FaultDomain,
    Mutant,
    Verdict,
    reaches_distinct_states,
    check_strong_reduction,
    evaluate_pass,
    random_fsm,
    sample_mutants,
)
from .distinguish import RDistTable, RdVariant, SdFamily, collect_rd_sets, compute_sd_family, rdistinguishes
from .fsm import Fsm, FsmError, FsmSyntaxError, format_fsm, load_fsm, parse_fsm
from .generate import (
    BudgetExceeded,
    TestSuite,
    compute_traversal,
    generate_test_suite,
    parse_suite,
    verify_bounds,
)
from .harness import FairnessConfig, FsmSut, HarnessError, ProcessSut, run_suite
from .reach import StateCover, build_reach_automaton, compute_state_cover

__all__ = [
    "AlphabetMismatch", "BudgetExceeded", "FailureKind", "FairnessConfig", "FaultDomain",
    "Fsm", "FsmError", "FsmSut", "FsmSyntaxError", "HarnessError", "Mutant", "ProcessSut",
    "RDistTable", "RdVariant", "SdFamily", "StateCover", "TestSuite", "Verdict",
    "build_reach_automaton", "reaches_distinct_states", "check_strong_reduction", "collect_rd_sets",
    "compute_sd_family", "compute_state_cover", "compute_traversal", "evaluate_pass",
    "format_fsm", "generate_test_suite", "load_fsm", "parse_fsm", "parse_suite",
    "random_fsm", "rdistinguishes", "run_suite", "sample_mutants", "verify_bounds",
]
