"""Project-file persistence, CSV ingestion, and report emission.

The project file is a single human-diffable JSON document with a canonical
key order and newline convention, so version-control diffs line up with
diary entries. It is self-contained: documents, every codebook version with
its change set, coders, rounds with per-coder submissions, the workflow
event log (replayed on load to rebuild the process state), the disagreements
diary, and saturation records. Saving a loaded project reproduces the file
byte for byte.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import workflow
from .alpha import AlphaReport, AlphaResult, ReliabilityMatrix, ReportRow
from .errors import IntegrityError, ParseError, SchemaError, ValidationError
from .model import (
    Assignment,
    ChangeRecord,
    ChangeSet,
    Code,
    Codebook,
    Document,
    MaskedView,
    Quotation,
    Round,
    SemanticDomain,
    UNIT_CHAR,
    UNIT_TOKEN,
    masked_view,
)
from .workflow import (
    CoreSelected,
    DataCollected,
    DiaryEntry,
    DiaryRecorded,
    Event,
    GateDecision,
    GateEvaluated,
    MeetingClosed,
    ProcessState,
    RoundSubmitted,
    SaturationDecision,
    SaturationRecorded,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True, slots=True)
class ProjectConfig:
    atomic_unit: str = UNIT_CHAR
    threshold: float = workflow.DEFAULT_THRESHOLD
    batch_size: int = 6  # documents per coding iteration

    def __post_init__(self) -> None:
        if self.atomic_unit not in (UNIT_CHAR, UNIT_TOKEN):
            raise ValidationError(f"unknown atomic unit {self.atomic_unit!r}")
        if not 0 < self.threshold <= 1:
            raise ValidationError("threshold must lie in (0, 1]")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")


@dataclass(frozen=True)
class ProjectFile:
    """Everything one study needs, as one immutable value."""

    config: ProjectConfig = field(default_factory=ProjectConfig)
    coders: tuple[str, ...] = ()
    documents: tuple[Document, ...] = ()
    codebooks: tuple[Codebook, ...] = ()  # ascending versions, contiguous from 1
    rounds: tuple[Round, ...] = ()
    events: tuple[Event, ...] = ()
    diary: tuple[DiaryEntry, ...] = ()
    saturation: tuple[SaturationDecision, ...] = ()
    migration_notes: tuple[str, ...] = field(default=(), compare=False)

    # -- lookups -----------------------------------------------------------

    def documents_by_id(self) -> dict[str, Document]:
        return {d.id: d for d in self.documents}

    def codebook(self, version: int) -> Codebook:
        for cb in self.codebooks:
            if cb.version == version:
                return cb
        raise IntegrityError(f"no codebook with version {version}")

    def latest_codebook(self) -> Codebook:
        if not self.codebooks:
            raise IntegrityError("project has no codebook")
        return self.codebooks[-1]

    def round(self, round_id: str) -> Round:
        for rnd in self.rounds:
            if rnd.id == round_id:
                return rnd
        raise IntegrityError(f"no round with id {round_id!r}")

    def state(self) -> ProcessState:
        return workflow.replay(self.events, threshold=self.config.threshold)

    def with_round(self, rnd: Round) -> "ProjectFile":
        others = tuple(r for r in self.rounds if r.id != rnd.id)
        if len(others) == len(self.rounds):  # new round
            return replace(self, rounds=self.rounds + (rnd,))
        return replace(
            self, rounds=tuple(r if r.id != rnd.id else rnd for r in self.rounds)
        )

    def validate(self) -> None:
        """Cross-entity integrity; raises with a field path on violation."""
        if len(set(self.coders)) != len(self.coders):
            raise SchemaError("duplicate coder ids", "coders")
        doc_ids = [d.id for d in self.documents]
        if len(set(doc_ids)) != len(doc_ids):
            raise SchemaError("duplicate document ids", "documents")
        for i, d in enumerate(self.documents):
            d.check_text_consistency(self.config.atomic_unit)
        versions = [cb.version for cb in self.codebooks]
        if versions != list(range(1, len(versions) + 1)):
            raise SchemaError(
                f"codebook versions must be contiguous from 1, got {versions}",
                "codebooks",
            )
        docs = self.documents_by_id()
        round_ids = set()
        for i, rnd in enumerate(self.rounds):
            path = f"rounds[{i}]"
            if rnd.id in round_ids:
                raise SchemaError(f"duplicate round id {rnd.id!r}", path)
            round_ids.add(rnd.id)
            codebook = self.codebook(rnd.codebook_version)
            for coder in rnd.coder_ids:
                if coder not in self.coders:
                    raise IntegrityError(f"{path}: unknown coder {coder!r}")
            for doc_id in rnd.document_ids:
                if doc_id not in docs:
                    raise IntegrityError(f"{path}: unknown document {doc_id!r}")
            for j, a in enumerate(rnd.assignments):
                if not codebook.has_code(a.code_id):
                    raise IntegrityError(
                        f"{path}.assignments[{j}]: unknown code {a.code_id!r} "
                        f"in codebook v{rnd.codebook_version}"
                    )
                doc = docs.get(a.quotation.document_id)
                if doc is None:
                    raise IntegrityError(
                        f"{path}.assignments[{j}]: unknown document "
                        f"{a.quotation.document_id!r}"
                    )
                if a.quotation.end > doc.length:
                    raise IntegrityError(
                        f"{path}.assignments[{j}]: quotation exceeds document "
                        f"{doc.id!r} of length {doc.length}"
                    )
        self.state()  # replay must succeed


# -- canonical JSON ------------------------------------------------------------


def _fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _quotation_dict(q: Quotation) -> dict:
    return {"document_id": q.document_id, "start": q.start, "end": q.end}


def _codebook_dict(cb: Codebook) -> dict:
    return {
        "version": cb.version,
        "domains": [
            {"id": d.id, "label": d.label, "code_ids": list(d.code_ids)}
            for d in cb.domains
        ],
        "codes": [
            {
                "id": c.id,
                "label": c.label,
                "domain_id": c.domain_id,
                "definition": c.definition,
                "memo": c.memo,
            }
            for c in cb.codes
        ],
        "changelog": [
            {
                "version": cs.version,
                "timestamp": cs.timestamp,
                "diary_ref": cs.diary_ref,
                "changes": [
                    {"action": r.action, "ref": r.ref, "note": r.note}
                    for r in cs.changes
                ],
            }
            for cs in cb.changelog
        ],
    }


def _round_dict(rnd: Round) -> dict:
    return {
        "id": rnd.id,
        "phase": rnd.phase,
        "codebook_version": rnd.codebook_version,
        "document_ids": list(rnd.document_ids),
        "coder_ids": list(rnd.coder_ids),
        "submitted": list(rnd.submitted),
        "assignments": [
            {
                "coder_id": a.coder_id,
                "document_id": a.quotation.document_id,
                "start": a.quotation.start,
                "end": a.quotation.end,
                "code_id": a.code_id,
            }
            for a in rnd.assignments
        ],
    }


def _alpha_result_dict(r: AlphaResult) -> dict:
    return {
        "alpha": r.alpha,
        "observed_disagreement": _fraction_str(r.observed_disagreement),
        "expected_disagreement": _fraction_str(r.expected_disagreement),
        "pairable_items": r.pairable_items,
        "variant": r.variant,
        "domain_id": r.domain_id,
        "forced_perfect": r.forced_perfect,
        "degenerate_expected": r.degenerate_expected,
    }


def _event_dict(event: Event) -> dict:
    if isinstance(event, DataCollected):
        return {"kind": "data_collected"}
    if isinstance(event, RoundSubmitted):
        return {
            "kind": "round_submitted",
            "round_id": event.round_id,
            "document_ids": list(event.document_ids),
        }
    if isinstance(event, GateEvaluated):
        d = event.decision
        return {
            "kind": "gate_evaluated",
            "round_id": d.round_id,
            "result": _alpha_result_dict(d.result),
            "threshold": d.threshold,
            "outcome": d.outcome,
            "warnings": list(d.warnings),
        }
    if isinstance(event, DiaryRecorded):
        return {"kind": "diary_recorded", "entry_id": event.entry.id}
    if isinstance(event, MeetingClosed):
        return {"kind": "meeting_closed", "no_change_note": event.no_change_note}
    if isinstance(event, CoreSelected):
        return {"kind": "core_selected", "codebook_version": event.codebook_version}
    if isinstance(event, SaturationRecorded):
        return {"kind": "saturation_recorded", "round_id": event.decision.round_id}
    raise ValidationError(f"unserializable event {event!r}")


def _project_dict(project: ProjectFile) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "atomic_unit": project.config.atomic_unit,
            "threshold": project.config.threshold,
            "batch_size": project.config.batch_size,
        },
        "coders": list(project.coders),
        "documents": [
            {"id": d.id, "length": d.length, "text": d.text} for d in project.documents
        ],
        "codebooks": [_codebook_dict(cb) for cb in project.codebooks],
        "rounds": [_round_dict(rnd) for rnd in project.rounds],
        "events": [_event_dict(e) for e in project.events],
        "diary": [
            {
                "id": e.id,
                "iteration": e.iteration,
                "refs": list(e.refs),
                "description": e.description,
                "resolution": e.resolution,
                "changelog_versions": list(e.changelog_versions),
                "timestamp": e.timestamp,
            }
            for e in project.diary
        ],
        "saturation": [
            {
                "round_id": s.round_id,
                "saturated": s.saturated,
                "rationale": s.rationale,
                "deciders": list(s.deciders),
            }
            for s in project.saturation
        ],
    }


def dumps_project(project: ProjectFile) -> str:
    return json.dumps(_project_dict(project), indent=2, ensure_ascii=False) + "\n"


def save_project(project: ProjectFile, path: str | Path) -> None:
    Path(path).write_text(dumps_project(project), encoding="utf-8")


# -- loading -------------------------------------------------------------------


def _expect(obj: Mapping, key: str, kind: type | tuple[type, ...], path: str):
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    value = obj[key]
    if not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaError(
            f"field {key!r} must be {names}, got {type(value).__name__}", path
        )
    return value


def _opt_str(obj: Mapping, key: str, path: str) -> str | None:
    value = obj.get(key)
    if value is not None and not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be a string or null", path)
    return value


def _str_list(obj: Mapping, key: str, path: str) -> list[str]:
    value = _expect(obj, key, list, path)
    for i, v in enumerate(value):
        if not isinstance(v, str):
            raise SchemaError("must be a string", f"{path}.{key}[{i}]")
    return value


def _load_codebook(obj: Mapping, path: str) -> Codebook:
    version = _expect(obj, "version", int, path)
    domains = []
    for i, d in enumerate(_expect(obj, "domains", list, path)):
        dpath = f"{path}.domains[{i}]"
        domains.append(
            SemanticDomain(
                id=_expect(d, "id", str, dpath),
                label=_expect(d, "label", str, dpath),
                code_ids=tuple(_str_list(d, "code_ids", dpath)),
            )
        )
    codes = []
    for i, c in enumerate(_expect(obj, "codes", list, path)):
        cpath = f"{path}.codes[{i}]"
        codes.append(
            Code(
                id=_expect(c, "id", str, cpath),
                label=_expect(c, "label", str, cpath),
                domain_id=_expect(c, "domain_id", str, cpath),
                definition=_expect(c, "definition", str, cpath),
                memo=_expect(c, "memo", str, cpath),
            )
        )
    changelog = []
    for i, cs in enumerate(_expect(obj, "changelog", list, path)):
        cs_path = f"{path}.changelog[{i}]"
        changelog.append(
            ChangeSet(
                version=_expect(cs, "version", int, cs_path),
                timestamp=_expect(cs, "timestamp", str, cs_path),
                diary_ref=_opt_str(cs, "diary_ref", cs_path),
                changes=tuple(
                    ChangeRecord(
                        action=_expect(r, "action", str, f"{cs_path}.changes[{j}]"),
                        ref=_expect(r, "ref", str, f"{cs_path}.changes[{j}]"),
                        note=_expect(r, "note", str, f"{cs_path}.changes[{j}]"),
                    )
                    for j, r in enumerate(_expect(cs, "changes", list, cs_path))
                ),
            )
        )
    return Codebook(
        version=version,
        domains=tuple(domains),
        codes=tuple(codes),
        changelog=tuple(changelog),
    )


def _load_round(obj: Mapping, path: str) -> Round:
    round_id = _expect(obj, "id", str, path)
    assignments = []
    for i, a in enumerate(_expect(obj, "assignments", list, path)):
        apath = f"{path}.assignments[{i}]"
        assignments.append(
            Assignment(
                coder_id=_expect(a, "coder_id", str, apath),
                quotation=Quotation(
                    document_id=_expect(a, "document_id", str, apath),
                    start=_expect(a, "start", int, apath),
                    end=_expect(a, "end", int, apath),
                ),
                code_id=_expect(a, "code_id", str, apath),
                round_id=round_id,
            )
        )
    return Round(
        id=round_id,
        phase=_expect(obj, "phase", str, path),
        codebook_version=_expect(obj, "codebook_version", int, path),
        document_ids=tuple(_str_list(obj, "document_ids", path)),
        coder_ids=tuple(_str_list(obj, "coder_ids", path)),
        assignments=tuple(assignments),
        submitted=tuple(_str_list(obj, "submitted", path)),
    )


def _load_alpha_result(obj: Mapping, path: str) -> AlphaResult:
    return AlphaResult(
        alpha=float(_expect(obj, "alpha", (int, float), path)),
        observed_disagreement=Fraction(_expect(obj, "observed_disagreement", str, path)),
        expected_disagreement=Fraction(_expect(obj, "expected_disagreement", str, path)),
        pairable_items=_expect(obj, "pairable_items", int, path),
        variant=_expect(obj, "variant", str, path),
        domain_id=_opt_str(obj, "domain_id", path),
        forced_perfect=_expect(obj, "forced_perfect", bool, path),
        degenerate_expected=_expect(obj, "degenerate_expected", bool, path),
    )


def _load_event(
    obj: Mapping,
    diary_by_id: Mapping[str, DiaryEntry],
    saturation_by_round: Mapping[str, SaturationDecision],
    path: str,
) -> Event:
    kind = _expect(obj, "kind", str, path)
    if kind == "data_collected":
        return DataCollected()
    if kind == "round_submitted":
        return RoundSubmitted(
            round_id=_expect(obj, "round_id", str, path),
            document_ids=tuple(_str_list(obj, "document_ids", path)),
        )
    if kind == "gate_evaluated":
        return GateEvaluated(
            decision=GateDecision(
                round_id=_expect(obj, "round_id", str, path),
                result=_load_alpha_result(_expect(obj, "result", dict, path), f"{path}.result"),
                threshold=float(_expect(obj, "threshold", (int, float), path)),
                outcome=_expect(obj, "outcome", str, path),
                warnings=tuple(_str_list(obj, "warnings", path)),
            )
        )
    if kind == "diary_recorded":
        entry_id = _expect(obj, "entry_id", str, path)
        entry = diary_by_id.get(entry_id)
        if entry is None:
            raise IntegrityError(f"{path}: diary_recorded references unknown entry {entry_id!r}")
        return DiaryRecorded(entry=entry)
    if kind == "meeting_closed":
        return MeetingClosed(no_change_note=_opt_str(obj, "no_change_note", path))
    if kind == "core_selected":
        version = obj.get("codebook_version")
        if version is not None and not isinstance(version, int):
            raise SchemaError("field 'codebook_version' must be an int or null", path)
        return CoreSelected(codebook_version=version)
    if kind == "saturation_recorded":
        round_id = _expect(obj, "round_id", str, path)
        decision = saturation_by_round.get(round_id)
        if decision is None:
            raise IntegrityError(
                f"{path}: saturation_recorded references unknown round {round_id!r}"
            )
        return SaturationRecorded(decision=decision)
    raise SchemaError(f"unknown event kind {kind!r}", path)


def _migrate(raw: dict) -> tuple[dict, tuple[str, ...]]:
    """Lift older schema versions to the current one."""
    notes: list[str] = []
    version = raw.get("schema_version")
    if version == 0:
        # v0 had no batch_size in config
        raw.setdefault("config", {}).setdefault("batch_size", 6)
        raw["schema_version"] = 1
        notes.append("migrated schema v0 -> v1: default batch_size 6 added")
    return raw, tuple(notes)


def loads_project(text: str) -> ProjectFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise SchemaError("project file must be a JSON object", "")
    version = _expect(raw, "schema_version", int, "")
    if version not in (0, SCHEMA_VERSION):
        raise SchemaError(
            f"unsupported schema_version {version}; this build reads <= {SCHEMA_VERSION}",
            "schema_version",
        )
    raw, notes = _migrate(raw)

    cfg = _expect(raw, "config", dict, "")
    config = ProjectConfig(
        atomic_unit=_expect(cfg, "atomic_unit", str, "config"),
        threshold=float(_expect(cfg, "threshold", (int, float), "config")),
        batch_size=_expect(cfg, "batch_size", int, "config"),
    )

    documents = []
    for i, d in enumerate(_expect(raw, "documents", list, "")):
        dpath = f"documents[{i}]"
        documents.append(
            Document(
                id=_expect(d, "id", str, dpath),
                length=_expect(d, "length", int, dpath),
                text=_opt_str(d, "text", dpath),
            )
        )

    codebooks = [
        _load_codebook(cb, f"codebooks[{i}]")
        for i, cb in enumerate(_expect(raw, "codebooks", list, ""))
    ]

    rounds = [
        _load_round(r, f"rounds[{i}]") for i, r in enumerate(_expect(raw, "rounds", list, ""))
    ]

    diary = []
    for i, e in enumerate(_expect(raw, "diary", list, "")):
        epath = f"diary[{i}]"
        versions = _expect(e, "changelog_versions", list, epath)
        for j, v in enumerate(versions):
            if not isinstance(v, int):
                raise SchemaError("must be an int", f"{epath}.changelog_versions[{j}]")
        diary.append(
            DiaryEntry(
                id=_expect(e, "id", str, epath),
                iteration=_expect(e, "iteration", int, epath),
                refs=tuple(_str_list(e, "refs", epath)),
                description=_expect(e, "description", str, epath),
                resolution=_expect(e, "resolution", str, epath),
                changelog_versions=tuple(versions),
                timestamp=_expect(e, "timestamp", str, epath),
            )
        )

    saturation = []
    for i, s in enumerate(_expect(raw, "saturation", list, "")):
        spath = f"saturation[{i}]"
        saturation.append(
            SaturationDecision(
                round_id=_expect(s, "round_id", str, spath),
                saturated=_expect(s, "saturated", bool, spath),
                rationale=_expect(s, "rationale", str, spath),
                deciders=tuple(_str_list(s, "deciders", spath)),
            )
        )

    diary_by_id = {e.id: e for e in diary}
    if len(diary_by_id) != len(diary):
        raise SchemaError("duplicate diary entry ids", "diary")
    saturation_by_round = {s.round_id: s for s in saturation}
    events = tuple(
        _load_event(e, diary_by_id, saturation_by_round, f"events[{i}]")
        for i, e in enumerate(_expect(raw, "events", list, ""))
    )

    project = ProjectFile(
        config=config,
        coders=tuple(_str_list(raw, "coders", "")),
        documents=tuple(documents),
        codebooks=tuple(codebooks),
        rounds=tuple(rounds),
        events=events,
        diary=tuple(diary),
        saturation=tuple(saturation),
        migration_notes=notes,
    )
    project.validate()
    return project


def load_project(path: str | Path) -> ProjectFile:
    return loads_project(Path(path).read_text(encoding="utf-8"))


# -- rating CSV ingestion --------------------------------------------------------


def import_rating_csv(path: str | Path) -> ReliabilityMatrix:
    """Items-by-raters CSV: first column item id, one column per rater.

    The header row names the raters; an empty cell is a missing rating.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty CSV") from None
        if len(header) < 3:
            raise ParseError(
                f"{path}: need an item column plus at least 2 rater columns, "
                f"got {len(header)} columns"
            )
        raters = tuple(h.strip() for h in header[1:])
        items: list[str] = []
        values: dict[tuple[str, str], str] = {}
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: ragged row with {len(row)} cells, expected {len(header)}",
                    line=lineno,
                )
            item = row[0].strip()
            if item in seen:
                raise ParseError(f"{path}: duplicate item id {item!r}", line=lineno)
            seen.add(item)
            items.append(item)
            for rater, cell in zip(raters, row[1:]):
                cell = cell.strip()
                if cell:
                    values[(item, rater)] = cell
    return ReliabilityMatrix(items=tuple(items), raters=raters, values=values)


# -- report emission --------------------------------------------------------------

FORMAT_MARKDOWN = "markdown"
FORMAT_CSV = "csv"

_FLAG = "*"


def _cell(row: ReportRow, threshold: float) -> str:
    if row.insufficient or row.alpha is None:
        return "n/a"
    text = f"{row.alpha:.2f}"
    if row.alpha < threshold:
        text += _FLAG
    return text


def emit_alpha_table(report: AlphaReport, fmt: str = FORMAT_MARKDOWN) -> str:
    """Render per-domain coefficients plus the global column.

    Markdown shows 2-decimal values (below-threshold cells flagged with *);
    CSV keeps full precision for machine use. Output is a pure function of
    the report.
    """
    rows = list(report.rows)
    if fmt == FORMAT_CSV:
        lines = ["coefficient,label,alpha,band,below_threshold,insufficient"]
        for row in rows + ([report.global_row] if report.global_row else []):
            kind = "Cu" if row is report.global_row else "cu"
            if row.insufficient or row.alpha is None:
                lines.append(f"{kind},{row.label},,,,true")
            else:
                below = "true" if row.alpha < report.threshold else "false"
                lines.append(
                    f"{kind},{row.label},{row.alpha!r},{row.band},{below},false"
                )
        return "\n".join(lines) + "\n"
    if fmt != FORMAT_MARKDOWN:
        raise ValidationError(f"unknown table format {fmt!r}")

    labels = [row.label for row in rows]
    cells = [_cell(row, report.threshold) for row in rows]
    if report.global_row is not None:
        labels.append(report.global_row.label)
        cells.append(_cell(report.global_row, report.threshold))
    header = "| " + " | ".join(labels) + " |"
    separator = "| " + " | ".join("----" for _ in labels) + " |"
    if not labels:
        return "| |\n"
    lines = [header, separator]
    if cells:
        lines.append("| " + " | ".join(cells) + " |")
    out = "\n".join(lines) + "\n"
    if any(c.endswith(_FLAG) for c in cells):
        out += f"\n{_FLAG} below the {report.threshold:.2f} reliability threshold\n"
    return out


# -- masked round export -----------------------------------------------------------


def _masked_view_dict(view: MaskedView) -> dict:
    return {
        "round_id": view.round_id,
        "coder_id": view.coder_id,
        "quotations": [_quotation_dict(q) for q in view.quotations],
        "codebook": _codebook_dict(view.codebook),
    }


def export_masked_round(
    project: ProjectFile, round_id: str, coder_id: str, path: str | Path
) -> MaskedView:
    """Write the sequential-coding view for the round's next pending coder.

    The exported file carries earlier coders' spans and the full codebook,
    with no code attached to any quotation.
    """
    rnd = project.round(round_id)
    codebook = project.codebook(rnd.codebook_version)
    view = masked_view(rnd, codebook, coder_id)
    payload = json.dumps(_masked_view_dict(view), indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(payload, encoding="utf-8")
    return view


def load_masked_round(path: str | Path) -> MaskedView:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    quotations = tuple(
        Quotation(
            document_id=_expect(q, "document_id", str, f"quotations[{i}]"),
            start=_expect(q, "start", int, f"quotations[{i}]"),
            end=_expect(q, "end", int, f"quotations[{i}]"),
        )
        for i, q in enumerate(_expect(raw, "quotations", list, ""))
    )
    codebook = _load_codebook(_expect(raw, "codebook", dict, ""), "codebook")
    return MaskedView(
        round_id=_expect(raw, "round_id", str, ""),
        coder_id=_expect(raw, "coder_id", str, ""),
        quotations=quotations,
        codebook=codebook,
    )
