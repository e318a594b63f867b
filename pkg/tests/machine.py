"""Bounded exhaustive exploration of the workflow state machine for tests."""

from __future__ import annotations

from fractions import Fraction

from icaflow.alpha import AlphaResult, VARIANT_CU_GLOBAL
from icaflow.workflow import (
    CoreSelected,
    DataCollected,
    DiaryEntry,
    DiaryRecorded,
    GateEvaluated,
    MeetingClosed,
    OUTCOME_FAIL,
    OUTCOME_PASS,
    ProcessState,
    RoundSubmitted,
    SATURATION_CHECK,
    SELECTIVE_GATE,
    SaturationDecision,
    SaturationRecorded,
    THEORY_BUILDING,
    TransitionError,
    advance,
    evaluate_gate,
    initial_state,
)


def cu_result(alpha: float) -> AlphaResult:
    """A syntactically valid global coefficient with the requested value."""
    if alpha >= 1.0:
        return AlphaResult(
            alpha=1.0,
            observed_disagreement=Fraction(0),
            expected_disagreement=Fraction(1, 2),
            pairable_items=10,
            variant=VARIANT_CU_GLOBAL,
        )
    return AlphaResult(
        alpha=alpha,
        observed_disagreement=Fraction(1 - Fraction(alpha).limit_denominator(10**6)),
        expected_disagreement=Fraction(1),
        pairable_items=10,
        variant=VARIANT_CU_GLOBAL,
    )


def gate_event(state: ProcessState, passing: bool) -> GateEvaluated:
    alpha = state.threshold if passing else state.threshold - 0.24
    decision = evaluate_gate(cu_result(alpha), state.threshold, state.last_round_id or "r0")
    return GateEvaluated(decision=decision)


def candidate_events(state: ProcessState, depth: int) -> list:
    """Every concrete event symbol the enumeration tries in this state."""
    entry = DiaryEntry(
        id=f"e{depth}",
        iteration=state.phase.iteration,
        refs=(),
        description="x",
        resolution="y",
    )
    return [
        DataCollected(),
        RoundSubmitted(round_id=f"r{depth}", document_ids=(f"doc{depth}",)),
        gate_event(state, passing=True),
        gate_event(state, passing=False),
        DiaryRecorded(entry=entry),
        MeetingClosed(),
        MeetingClosed(no_change_note="reviewed; definitions already aligned"),
        SaturationRecorded(
            decision=SaturationDecision(
                round_id=state.last_round_id or "r0",
                saturated=True,
                rationale="z",
                deciders=("A", "B"),
            )
        ),
        SaturationRecorded(
            decision=SaturationDecision(
                round_id=state.last_round_id or "r0",
                saturated=False,
                rationale="z",
                deciders=("A", "B"),
            )
        ),
        CoreSelected(),
    ]


def explore(max_depth: int):
    """DFS over all legal event sequences up to max_depth.

    Yields (trace, states) for every legal trace (including prefixes), where
    states[k] is the state after trace[k - 1] and states[0] the initial one.
    """
    start = initial_state()
    stack = [((), (start,))]
    while stack:
        trace, states = stack.pop()
        yield trace, states
        if len(trace) == max_depth:
            continue
        state = states[-1]
        for event in candidate_events(state, len(trace)):
            try:
                nxt = advance(state, event)
            except TransitionError:
                continue
            stack.append((trace + (event,), states + (nxt,)))


def violates_exit_rule(trace, states) -> bool:
    """True when the trace reaches theory building without the required tail.

    The only admissible entry is: selective gate passed, then a positive
    saturation decision.
    """
    for k, state in enumerate(states):
        if state.phase.kind != THEORY_BUILDING:
            continue
        if k < 2:
            return True
        enter_event = trace[k - 1]
        if not (
            isinstance(enter_event, SaturationRecorded)
            and enter_event.decision.saturated
        ):
            return True
        if states[k - 1].phase.kind != SATURATION_CHECK:
            return True
        gate = trace[k - 2]
        if not (
            isinstance(gate, GateEvaluated) and gate.decision.outcome == OUTCOME_PASS
        ):
            return True
        if states[k - 2].phase.kind != SELECTIVE_GATE:
            return True
    return False


def fail_without_meeting(trace) -> bool:
    """True when some gate failure is not followed by a meeting before coding."""
    pending = False
    for event in trace:
        if isinstance(event, GateEvaluated) and event.decision.outcome == OUTCOME_FAIL:
            pending = True
        elif isinstance(event, MeetingClosed):
            pending = False
        elif isinstance(event, RoundSubmitted) and pending:
            return True
    return False
