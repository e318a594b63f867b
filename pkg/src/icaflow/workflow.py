"""The gated iterative coding process as a replayable state machine.

Phases follow the coding lifecycle: collect data, run an open-coding round
(all coders, sequentially), evaluate the global agreement gate, hold a review
meeting on failure (documented in the disagreements diary), select core
categories on success, then iterate selective coding under the same gate
until the coders also record theoretical saturation. Theory building is
reachable only through a passed selective gate followed by a positive
saturation decision -- saturation alone is never sufficient.

State never mutates: ``advance`` folds events into new states, and replaying
an event log from the initial state reproduces the final state exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .alpha import AlphaResult, VARIANT_CU_GLOBAL
from .errors import (
    ReusedDocumentsError,
    TransitionError,
    ValidationError,
    WrongCoefficientError,
)

# Phase kinds
COLLECTING = "Collecting"
OPEN_CODING = "OpenCoding"
OPEN_GATE = "OpenGate"
REVIEW_MEETING = "ReviewMeeting"
CORE_SELECTION = "CoreSelection"
SELECTIVE_CODING = "SelectiveCoding"
SELECTIVE_GATE = "SelectiveGate"
SATURATION_CHECK = "SaturationCheck"
THEORY_BUILDING = "TheoryBuilding"

ORIGIN_OPEN = "open"
ORIGIN_SELECTIVE = "selective"

OUTCOME_PASS = "pass"
OUTCOME_FAIL = "fail"

DEFAULT_THRESHOLD = 0.8


@dataclass(frozen=True, slots=True)
class Phase:
    """Current activity, with iteration counter and origin where relevant."""

    kind: str
    iteration: int = 0  # coding/gate phases: 1-based iteration
    origin: str | None = None  # ReviewMeeting and Collecting: open | selective
    entries_added: int = 0  # ReviewMeeting: diary entries recorded so far

    def describe(self) -> str:
        if self.kind in (OPEN_CODING, OPEN_GATE, SELECTIVE_CODING, SELECTIVE_GATE, SATURATION_CHECK):
            return f"{self.kind}({self.iteration})"
        if self.kind == REVIEW_MEETING:
            return f"{self.kind}({self.origin}, iteration {self.iteration})"
        if self.kind == COLLECTING and self.origin == ORIGIN_SELECTIVE:
            return f"{self.kind}(theoretical sampling)"
        return self.kind


@dataclass(frozen=True, slots=True)
class GateDecision:
    """One agreement-gate evaluation against the reliability threshold."""

    round_id: str
    result: AlphaResult
    threshold: float
    outcome: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        expected = (
            OUTCOME_PASS
            if self.result.alpha >= self.threshold or self.result.forced_perfect
            else OUTCOME_FAIL
        )
        if self.outcome != expected:
            raise ValidationError(
                f"gate outcome {self.outcome!r} contradicts alpha "
                f"{self.result.alpha} vs threshold {self.threshold}"
            )


def evaluate_gate(result: AlphaResult, threshold: float, round_id: str) -> GateDecision:
    """Pass iff the global coefficient reaches the threshold (inclusive).

    Only the global Cu variant gates the process; per-domain values are
    advisory drill-down material. A forced-perfect result passes with a
    warning.
    """
    if result.variant != VARIANT_CU_GLOBAL:
        raise WrongCoefficientError(
            f"gates accept the global {VARIANT_CU_GLOBAL} coefficient, "
            f"got variant {result.variant!r}"
        )
    warnings: tuple[str, ...] = ()
    if result.forced_perfect:
        warnings = (
            "zero observed and zero expected disagreement; alpha forced to 1.0",
        )
    outcome = (
        OUTCOME_PASS
        if result.alpha >= threshold or result.forced_perfect
        else OUTCOME_FAIL
    )
    return GateDecision(
        round_id=round_id,
        result=result,
        threshold=threshold,
        outcome=outcome,
        warnings=warnings,
    )


@dataclass(frozen=True, slots=True)
class DiaryEntry:
    """One documented disagreement and its resolution from a review meeting."""

    id: str
    iteration: int
    refs: tuple[str, ...]  # domain/code ids the disagreement concerned
    description: str
    resolution: str
    changelog_versions: tuple[int, ...] = ()  # codebook versions it produced
    timestamp: str = ""


@dataclass(frozen=True, slots=True)
class SaturationDecision:
    """A human judgment that new data added no new information (or did)."""

    round_id: str
    saturated: bool
    rationale: str
    deciders: tuple[str, ...]


# -- events -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DataCollected:
    pass


@dataclass(frozen=True, slots=True)
class RoundSubmitted:
    round_id: str
    document_ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class GateEvaluated:
    decision: GateDecision


@dataclass(frozen=True, slots=True)
class DiaryRecorded:
    entry: DiaryEntry


@dataclass(frozen=True, slots=True)
class MeetingClosed:
    no_change_note: str | None = None


@dataclass(frozen=True, slots=True)
class CoreSelected:
    codebook_version: int | None = None


@dataclass(frozen=True, slots=True)
class SaturationRecorded:
    decision: SaturationDecision


Event = Union[
    DataCollected,
    RoundSubmitted,
    GateEvaluated,
    DiaryRecorded,
    MeetingClosed,
    CoreSelected,
    SaturationRecorded,
]

EVENT_KINDS = {
    DataCollected: "data_collected",
    RoundSubmitted: "round_submitted",
    GateEvaluated: "gate_evaluated",
    DiaryRecorded: "diary_recorded",
    MeetingClosed: "meeting_closed",
    CoreSelected: "core_selected",
    SaturationRecorded: "saturation_recorded",
}


@dataclass(frozen=True, slots=True)
class ProcessState:
    """Everything the process has decided so far; a pure fold over events."""

    phase: Phase
    threshold: float = DEFAULT_THRESHOLD
    history: tuple[GateDecision, ...] = ()
    diary: tuple[DiaryEntry, ...] = ()
    saturation_records: tuple[SaturationDecision, ...] = ()
    coded_document_ids: frozenset[str] = frozenset()
    last_round_id: str | None = None

    def is_terminal(self) -> bool:
        return self.phase.kind == THEORY_BUILDING


def initial_state(threshold: float = DEFAULT_THRESHOLD) -> ProcessState:
    if not 0 < threshold <= 1:
        raise ValidationError(f"threshold must be in (0, 1], got {threshold}")
    return ProcessState(phase=Phase(kind=COLLECTING, origin=ORIGIN_OPEN), threshold=threshold)


def allowed_events(state: ProcessState) -> tuple[str, ...]:
    kind = state.phase.kind
    if kind == COLLECTING:
        return ("data_collected",)
    if kind in (OPEN_CODING, SELECTIVE_CODING):
        return ("round_submitted",)
    if kind in (OPEN_GATE, SELECTIVE_GATE):
        return ("gate_evaluated",)
    if kind == REVIEW_MEETING:
        return ("diary_recorded", "meeting_closed")
    if kind == CORE_SELECTION:
        return ("core_selected",)
    if kind == SATURATION_CHECK:
        return ("saturation_recorded",)
    return ()  # TheoryBuilding is terminal


def _illegal(state: ProcessState, event: Event) -> TransitionError:
    return TransitionError(
        f"event {EVENT_KINDS[type(event)]!r} is illegal in phase {state.phase.describe()}",
        allowed=allowed_events(state),
    )


def advance(state: ProcessState, event: Event) -> ProcessState:
    """Apply one event; raises TransitionError naming the allowed events."""
    phase = state.phase
    kind = phase.kind

    if isinstance(event, DataCollected):
        if kind != COLLECTING:
            raise _illegal(state, event)
        if phase.origin == ORIGIN_OPEN:
            return replace(state, phase=Phase(kind=OPEN_CODING, iteration=1))
        return replace(
            state, phase=Phase(kind=SELECTIVE_CODING, iteration=phase.iteration + 1)
        )

    if isinstance(event, RoundSubmitted):
        if kind not in (OPEN_CODING, SELECTIVE_CODING):
            raise _illegal(state, event)
        reused = set(event.document_ids) & state.coded_document_ids
        if reused:
            raise ReusedDocumentsError(
                "each iteration must code previously uncoded documents; "
                f"already coded: {', '.join(sorted(reused))}"
            )
        gate = OPEN_GATE if kind == OPEN_CODING else SELECTIVE_GATE
        return replace(
            state,
            phase=Phase(kind=gate, iteration=phase.iteration),
            coded_document_ids=state.coded_document_ids | set(event.document_ids),
            last_round_id=event.round_id,
        )

    if isinstance(event, GateEvaluated):
        if kind not in (OPEN_GATE, SELECTIVE_GATE):
            raise _illegal(state, event)
        decision = event.decision
        if state.last_round_id is not None and decision.round_id != state.last_round_id:
            raise ValidationError(
                f"gate decision is for round {decision.round_id!r}, but the round "
                f"under evaluation is {state.last_round_id!r}"
            )
        state = replace(state, history=state.history + (decision,))
        if decision.outcome == OUTCOME_PASS:
            if kind == OPEN_GATE:
                return replace(state, phase=Phase(kind=CORE_SELECTION))
            return replace(
                state, phase=Phase(kind=SATURATION_CHECK, iteration=phase.iteration)
            )
        origin = ORIGIN_OPEN if kind == OPEN_GATE else ORIGIN_SELECTIVE
        return replace(
            state,
            phase=Phase(kind=REVIEW_MEETING, iteration=phase.iteration, origin=origin),
        )

    if isinstance(event, DiaryRecorded):
        if kind != REVIEW_MEETING:
            raise _illegal(state, event)
        return replace(
            state,
            diary=state.diary + (event.entry,),
            phase=replace(phase, entries_added=phase.entries_added + 1),
        )

    if isinstance(event, MeetingClosed):
        if kind != REVIEW_MEETING:
            raise _illegal(state, event)
        if phase.entries_added == 0 and not event.no_change_note:
            raise TransitionError(
                "a review meeting cannot close without at least one diary entry "
                "or an explicit no-change note",
                allowed=allowed_events(state),
            )
        next_kind = OPEN_CODING if phase.origin == ORIGIN_OPEN else SELECTIVE_CODING
        return replace(
            state, phase=Phase(kind=next_kind, iteration=phase.iteration + 1)
        )

    if isinstance(event, CoreSelected):
        if kind != CORE_SELECTION:
            raise _illegal(state, event)
        return replace(state, phase=Phase(kind=SELECTIVE_CODING, iteration=1))

    if isinstance(event, SaturationRecorded):
        if kind != SATURATION_CHECK:
            raise _illegal(state, event)
        state = replace(
            state, saturation_records=state.saturation_records + (event.decision,)
        )
        if event.decision.saturated:
            return replace(state, phase=Phase(kind=THEORY_BUILDING))
        return replace(
            state,
            phase=Phase(kind=COLLECTING, iteration=phase.iteration, origin=ORIGIN_SELECTIVE),
        )

    raise _illegal(state, event)


def replay(events: tuple[Event, ...] | list[Event], threshold: float = DEFAULT_THRESHOLD) -> ProcessState:
    state = initial_state(threshold)
    for event in events:
        state = advance(state, event)
    return state


# -- dual selection schedule ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class PlanBatch:
    """A contiguous item range [start, end) reviewed dually or split."""

    kind: str  # dual | split
    start: int
    end: int
    control: bool = False  # dual batch verifying that agreement holds

    def size(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class SelectionPlan:
    total_items: int
    batches: tuple[PlanBatch, ...]

    def __post_init__(self) -> None:
        cursor = 0
        for b in self.batches:
            if b.start != cursor or b.end <= b.start:
                raise ValidationError("plan batches must partition the item range")
            cursor = b.end
        if cursor != self.total_items:
            raise ValidationError("plan does not cover all items exactly once")


def dual_selection_schedule(
    total_items: int,
    dual_batch: int,
    control_interval: int,
    control_batch: int,
) -> SelectionPlan:
    """Screening plan: dual batch first, then split work with dual controls.

    The first ``dual_batch`` items are rated by every rater. Once agreement
    is established, work proceeds in split batches of up to
    ``control_interval`` items (divided among raters), each followed by a
    dual control batch of up to ``control_batch`` fresh items re-checking
    that the agreement is still in force. A remaining tail no larger than
    ``control_batch`` becomes one final control batch. Every item is covered
    exactly once.
    """
    for name, value in (
        ("total_items", total_items),
        ("dual_batch", dual_batch),
        ("control_interval", control_interval),
        ("control_batch", control_batch),
    ):
        if value < 1:
            raise ValidationError(f"{name} must be >= 1, got {value}")

    batches = [PlanBatch("dual", 0, min(dual_batch, total_items))]
    cursor = batches[0].end
    while cursor < total_items:
        remaining = total_items - cursor
        if remaining <= control_batch:
            batches.append(PlanBatch("dual", cursor, total_items, control=True))
            cursor = total_items
            break
        step = min(control_interval, remaining)
        batches.append(PlanBatch("split", cursor, cursor + step))
        cursor += step
        remaining = total_items - cursor
        if remaining > 0:
            step = min(control_batch, remaining)
            batches.append(PlanBatch("dual", cursor, cursor + step, control=True))
            cursor += step
    return SelectionPlan(total_items=total_items, batches=tuple(batches))
