"""Command-line interface binding the researcher's per-iteration loop.

Exit codes: 0 success, 1 gate failure (for ``gate``), 2 validation or
integrity error, 3 usage error. Read-only commands never touch the project
file; write commands take an advisory lock on it. Everything is an explicit
flag except the default project path, which may come from the
ICAFLOW_PROJECT environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from datetime import datetime
from pathlib import Path

from . import categories, workflow
from .alpha import (
    AlphaReport,
    GLOBAL_LABEL,
    ReportRow,
    alpha_report,
    binary_alpha,
    cu_alpha,
    cu_alpha_global,
    disagreement_drilldown,
)
from .errors import IcaflowError, IntegrityError, ParseError, TransitionError, ValidationError
from .model import (
    Code,
    Codebook,
    Document,
    PHASE_OPEN,
    PHASE_SELECTIVE,
    Quotation,
    Round,
    SemanticDomain,
    validate_mutual_exclusiveness,
)
from .project import (
    FORMAT_CSV,
    FORMAT_MARKDOWN,
    ProjectConfig,
    ProjectFile,
    emit_alpha_table,
    export_masked_round,
    import_rating_csv,
    load_project,
    save_project,
)
from .synth import PerturbationMix, SynthConfig, generate_round
from .workflow import (
    CoreSelected,
    DataCollected,
    DiaryEntry,
    DiaryRecorded,
    GateEvaluated,
    MeetingClosed,
    RoundSubmitted,
    SaturationDecision,
    SaturationRecorded,
    evaluate_gate,
)

EXIT_OK = 0
EXIT_GATE_FAIL = 1
EXIT_ERROR = 2
EXIT_USAGE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 3 instead of argparse's default 2
        raise _UsageError(f"{self.prog}: {message}")


def _now() -> str:
    return datetime.now().isoformat(timespec="seconds")


def _split_csv(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _require_project(args) -> Path:
    if not args.project:
        raise _UsageError(
            "no project file; pass --project or set ICAFLOW_PROJECT"
        )
    return Path(args.project)


def _load(args) -> ProjectFile:
    return load_project(_require_project(args))


def _save(args, project: ProjectFile) -> None:
    path = _require_project(args)
    with _exclusive_lock(path):
        save_project(project, path)


class _exclusive_lock:
    """Advisory write lock next to the project file (POSIX flock)."""

    def __init__(self, path: Path):
        self._path = Path(str(path) + ".lock")
        self._handle = None

    def __enter__(self):
        try:
            import fcntl
        except ImportError:  # non-POSIX: proceed unlocked
            return self
        self._handle = open(self._path, "w")
        fcntl.flock(self._handle, fcntl.LOCK_EX)
        return self

    def __exit__(self, *exc):
        if self._handle is not None:
            self._handle.close()
        return False


# -- project setup ---------------------------------------------------------


def _cmd_init(args) -> int:
    path = _require_project(args)
    if path.exists() and not args.force:
        raise ValidationError(f"{path} already exists (use --force to overwrite)")
    coders = _split_csv(args.coders)
    if len(coders) < 2:
        raise ValidationError("at least 2 coders required")
    project = ProjectFile(
        config=ProjectConfig(
            atomic_unit=args.unit, threshold=args.threshold, batch_size=args.batch_size
        ),
        coders=coders,
    )
    with _exclusive_lock(path):
        save_project(project, path)
    print(f"initialized project {path} with coders {', '.join(coders)}")
    return EXIT_OK


def _cmd_add_doc(args) -> int:
    project = _load(args)
    if args.text is not None:
        doc = Document.from_text(args.id, args.text, project.config.atomic_unit)
    elif args.text_file is not None:
        doc = Document.from_text(
            args.id, Path(args.text_file).read_text(encoding="utf-8"), project.config.atomic_unit
        )
    elif args.length is not None:
        doc = Document(id=args.id, length=args.length)
    else:
        raise _UsageError("add-doc needs --text, --text-file or --length")
    if args.id in project.documents_by_id():
        raise ValidationError(f"document {args.id!r} already exists")

    _save(args, replace(project, documents=project.documents + (doc,)))
    print(f"added document {doc.id} ({doc.length} {project.config.atomic_unit} units)")
    return EXIT_OK


def _cmd_codebook_edit(args) -> int:
    project = _load(args)
    timestamp = args.timestamp or _now()
    add_domains = [
        SemanticDomain(id=d[0], label=d[1], code_ids=())
        for d in args.add_domain or []
    ]
    add_codes = [
        Code(id=c[0], domain_id=c[1], label=c[2]) for c in args.add_code or []
    ]
    redefine = [(r[0], r[1]) for r in args.redefine_code or []]
    remove = list(args.remove_code or [])
    if not project.codebooks:
        if remove or redefine:
            raise IntegrityError("cannot remove or redefine codes in an empty codebook")
        domain_ids = {d.id for d in add_domains}
        domains = [
            SemanticDomain(
                id=d.id,
                label=d.label,
                code_ids=tuple(c.id for c in add_codes if c.domain_id == d.id),
            )
            for d in add_domains
        ]
        missing = [c.id for c in add_codes if c.domain_id not in domain_ids]
        if missing:
            raise IntegrityError(
                f"codes {', '.join(missing)} reference domains not being added"
            )
        codebook = Codebook.initial(domains, add_codes, timestamp=timestamp)
    else:
        codebook = project.latest_codebook().edit(
            add_domains=add_domains,
            add_codes=add_codes,
            remove_codes=remove,
            redefine_codes=redefine,
            timestamp=timestamp,
            diary_ref=args.diary_ref,
        )

    _save(args, replace(project, codebooks=project.codebooks + (codebook,)))
    print(f"codebook now at version {codebook.version}")
    return EXIT_OK


def _cmd_codebook_show(args) -> int:
    project = _load(args)
    codebook = project.latest_codebook()
    print(f"codebook v{codebook.version}")
    for domain in codebook.domains:
        print(f"  {domain.id}: {domain.label}")
        for code_id in domain.code_ids:
            code = codebook.code(code_id)
            definition = f" -- {code.definition}" if code.definition else ""
            print(f"    {code.id}: {code.label}{definition}")
    return EXIT_OK


# -- round lifecycle ---------------------------------------------------------


def _cmd_round_new(args) -> int:
    project = _load(args)
    state = project.state()
    events = project.events
    if state.phase.kind == workflow.COLLECTING:
        events = events + (DataCollected(),)
        state = workflow.advance(state, DataCollected())
    if state.phase.kind == workflow.OPEN_CODING:
        phase = PHASE_OPEN
    elif state.phase.kind == workflow.SELECTIVE_CODING:
        phase = PHASE_SELECTIVE
    else:
        raise TransitionError(
            f"cannot start a round in phase {state.phase.describe()}",
            allowed=workflow.allowed_events(state),
        )
    document_ids = _split_csv(args.documents)
    docs = project.documents_by_id()
    for doc_id in document_ids:
        if doc_id not in docs:
            raise IntegrityError(f"unknown document {doc_id!r}")
        if doc_id in state.coded_document_ids:
            raise IntegrityError(f"document {doc_id!r} was coded in an earlier iteration")
    coder_ids = _split_csv(args.coders) if args.coders else project.coders
    codebook = project.latest_codebook()
    rnd = Round(
        id=args.id,
        phase=phase,
        codebook_version=codebook.version,
        document_ids=document_ids,
        coder_ids=coder_ids,
    )
    if any(r.id == rnd.id for r in project.rounds):
        raise ValidationError(f"round {rnd.id!r} already exists")

    project = replace(project, rounds=project.rounds + (rnd,), events=events)
    _save(args, project)
    if len(document_ids) != project.config.batch_size:
        print(
            f"note: batch of {len(document_ids)} documents "
            f"(configured batch size is {project.config.batch_size})",
            file=sys.stderr,
        )
    print(
        f"round {rnd.id} ({phase}) created: {len(document_ids)} documents, "
        f"coding order {', '.join(coder_ids)}"
    )
    return EXIT_OK


def _cmd_mask_export(args) -> int:
    project = _load(args)
    view = export_masked_round(project, args.round, args.coder, args.out)
    print(
        f"masked view for {args.coder} written to {args.out}: "
        f"{len(view.quotations)} quotations, codebook v{view.codebook.version}"
    )
    return EXIT_OK


def _parse_assignment_file(path: str) -> list[tuple[Quotation, str]]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(raw, list):
        raise ParseError(f"{path}: expected a JSON list of assignments")
    out = []
    for i, item in enumerate(raw):
        try:
            out.append(
                (
                    Quotation(
                        document_id=item["document_id"],
                        start=item["start"],
                        end=item["end"],
                    ),
                    item["code_id"],
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(
                f"{path}: assignment {i} needs document_id, start, end, code_id"
            ) from exc
    return out


def _cmd_submit(args) -> int:
    project = _load(args)
    rnd = project.round(args.round)
    codebook = project.codebook(rnd.codebook_version)
    items = _parse_assignment_file(args.file)
    new_round = rnd.with_submission(args.coder, items)
    documents = project.documents_by_id()
    violations = validate_mutual_exclusiveness(new_round, codebook, documents)
    mine = [v for v in violations if v.coder_id == args.coder]
    if mine:
        for v in mine:
            print(_violation_line(v), file=sys.stderr)
        raise ValidationError(
            f"submission violates mutual exclusiveness ({len(mine)} conflicts)"
        )
    project = project.with_round(new_round)
    if new_round.is_complete():
        event = RoundSubmitted(round_id=new_round.id, document_ids=new_round.document_ids)
        workflow.advance(project.state(), event)  # raises before we persist anything

        project = replace(project, events=project.events + (event,))
        print(f"round {new_round.id} complete; ready for the agreement gate")
    else:
        print(f"submission recorded; next coder: {new_round.next_pending()}")
    _save(args, project)
    return EXIT_OK


def _violation_line(v) -> str:
    qa, qb = v.quotation_a, v.quotation_b
    return (
        f"coder {v.coder_id}, domain {v.domain_id}: {v.code_a}@[{qa.start},{qa.end}) "
        f"overlaps {v.code_b}@[{qb.start},{qb.end}) in {qa.document_id}"
    )


def _cmd_validate(args) -> int:
    project = _load(args)
    rnd = project.round(args.round)
    codebook = project.codebook(rnd.codebook_version)
    violations = validate_mutual_exclusiveness(rnd, codebook, project.documents_by_id())
    if args.format == FORMAT_CSV:
        print("coder,domain,document,start_a,end_a,code_a,start_b,end_b,code_b")
        for v in violations:
            print(
                f"{v.coder_id},{v.domain_id},{v.quotation_a.document_id},"
                f"{v.quotation_a.start},{v.quotation_a.end},{v.code_a},"
                f"{v.quotation_b.start},{v.quotation_b.end},{v.code_b}"
            )
    else:
        for v in violations:
            print(_violation_line(v))
    if violations:
        print(f"{len(violations)} mutual-exclusiveness violations", file=sys.stderr)
        return EXIT_ERROR
    print("round is mutually exclusive")
    return EXIT_OK


# -- coefficients -------------------------------------------------------------


def _cmd_alpha(args) -> int:
    project = _load(args)
    rnd = project.round(args.round)
    codebook = project.codebook(rnd.codebook_version)
    documents = project.documents_by_id()
    if args.domain:
        result = cu_alpha(rnd, codebook, documents, args.domain)
        if args.format == FORMAT_CSV:
            report = AlphaReport(
                rows=(ReportRow.from_alpha(args.domain, result.alpha),),
                global_row=None,
                threshold=project.config.threshold,
            )
            print(emit_alpha_table(report, FORMAT_CSV), end="")
        else:
            print(
                f"cu-α({args.domain}) = {result.alpha:.4f} "
                f"(Do={result.observed_disagreement}, De={result.expected_disagreement}, "
                f"{result.pairable_items} pairable units)"
            )
        return EXIT_OK
    report = alpha_report(rnd, codebook, documents, threshold=project.config.threshold)
    fmt = FORMAT_CSV if args.format == FORMAT_CSV else FORMAT_MARKDOWN
    print(emit_alpha_table(report, fmt), end="")
    return EXIT_OK


def _cmd_alpha_binary(args) -> int:
    matrix = import_rating_csv(args.csv)
    result = binary_alpha(matrix)
    if args.format == FORMAT_CSV:
        print("alpha,observed_disagreement,expected_disagreement,pairable_items")
        print(
            f"{result.alpha!r},{result.observed_disagreement},"
            f"{result.expected_disagreement},{result.pairable_items}"
        )
    else:
        print(
            f"binary α = {result.alpha:.2f} "
            f"(Do={result.observed_disagreement}, De={result.expected_disagreement}, "
            f"{result.pairable_items} pairable items)"
        )
    return EXIT_OK


def _cmd_gate(args) -> int:
    project = _load(args)
    rnd = project.round(args.round)
    codebook = project.codebook(rnd.codebook_version)
    threshold = args.threshold if args.threshold is not None else project.config.threshold
    result = cu_alpha_global(rnd, codebook, project.documents_by_id())
    decision = evaluate_gate(result, threshold, rnd.id)
    state = project.state()
    workflow.advance(state, GateEvaluated(decision=decision))  # validate before persisting

    project = replace(project, events=project.events + (GateEvaluated(decision=decision),))
    _save(args, project)
    for warning in decision.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if decision.outcome == workflow.OUTCOME_PASS:
        print(f"Cu-α = {result.alpha:.2f} >= threshold {threshold:.2f}: PASS")
        return EXIT_OK
    print(
        f"Cu-α = {result.alpha:.2f} < threshold {threshold:.2f}: FAIL -- "
        "hold a review meeting and record the disagreements diary"
    )
    return EXIT_GATE_FAIL


def _cmd_drilldown(args) -> int:
    project = _load(args)
    rnd = project.round(args.round)
    codebook = project.codebook(rnd.codebook_version)
    ranges = disagreement_drilldown(
        rnd, codebook, project.documents_by_id(), args.domain
    )
    if args.format == FORMAT_CSV:
        print("document,start,end,contribution,values")
        for r in ranges:
            rendered = ";".join(f"{coder}={value}" for coder, value in r.values)
            print(f"{r.document_id},{r.start},{r.end},{r.contribution},{rendered}")
    else:
        if not ranges:
            print(f"domain {args.domain}: no disagreement")
        for r in ranges:
            rendered = " ".join(f"{coder}={value}" for coder, value in r.values)
            print(
                f"{r.document_id} [{r.start},{r.end}): {rendered} "
                f"(share of disagreement {r.contribution})"
            )
    return EXIT_OK


# -- workflow records ----------------------------------------------------------


def _cmd_diary_add(args) -> int:
    project = _load(args)
    state = project.state()
    entry = DiaryEntry(
        id=args.id or f"diary-{len(project.diary) + 1}",
        iteration=state.phase.iteration,
        refs=_split_csv(args.refs) if args.refs else (),
        description=args.description,
        resolution=args.resolution,
        changelog_versions=tuple(
            int(v) for v in _split_csv(args.changelog_versions or "")
        ),
        timestamp=args.timestamp or _now(),
    )
    workflow.advance(state, DiaryRecorded(entry=entry))

    project = replace(
        project,
        diary=project.diary + (entry,),
        events=project.events + (DiaryRecorded(entry=entry),),
    )
    _save(args, project)
    print(f"diary entry {entry.id} recorded (iteration {entry.iteration})")
    return EXIT_OK


def _cmd_meeting_close(args) -> int:
    project = _load(args)
    event = MeetingClosed(no_change_note=args.no_change)
    state = workflow.advance(project.state(), event)

    project = replace(project, events=project.events + (event,))
    _save(args, project)
    print(f"meeting closed; next up: {state.phase.describe()}")
    return EXIT_OK


def _cmd_saturation_record(args) -> int:
    project = _load(args)
    state = project.state()
    if state.last_round_id is None:
        raise TransitionError("no gated round to record saturation for")
    decision = SaturationDecision(
        round_id=state.last_round_id,
        saturated=args.yes,
        rationale=args.rationale,
        deciders=_split_csv(args.deciders),
    )
    new_state = workflow.advance(state, SaturationRecorded(decision=decision))

    project = replace(
        project,
        saturation=project.saturation + (decision,),
        events=project.events + (SaturationRecorded(decision=decision),),
    )
    _save(args, project)
    print(
        f"saturation recorded: {'yes' if args.yes else 'no'}; "
        f"next up: {new_state.phase.describe()}"
    )
    return EXIT_OK


# -- category analysis -----------------------------------------------------------


def _cmd_candidates(args) -> int:
    project = _load(args)
    if args.rounds:
        rounds = [project.round(r) for r in _split_csv(args.rounds)]
    else:
        rounds = list(project.rounds)
    codebook = project.latest_codebook()
    ranking = categories.rank_candidates(rounds, codebook)
    if args.format == FORMAT_CSV:
        print("kind,id,groundedness,partners,links")
        for s in ranking.codes:
            print(f"code,{s.code_id},{s.groundedness},{s.density_partners},{s.density_links}")
        for d in ranking.domains:
            print(f"domain,{d.domain_id},{d.groundedness},,{d.density_links}")
    else:
        for s in ranking.codes:
            print(
                f"{s.code_id}: grounded in {s.groundedness} quotations, "
                f"related to {s.density_partners} codes {s.density_links} times"
            )
        for d in ranking.domains:
            print(
                f"domain {d.domain_id}: groundedness {d.groundedness}, "
                f"links {d.density_links}"
            )
    return EXIT_OK


def _cmd_select_core(args) -> int:
    project = _load(args)
    state = project.state()
    codebook = categories.select_core(
        project.latest_codebook(),
        _split_csv(args.domains),
        _split_csv(args.codes),
        timestamp=args.timestamp or _now(),
    )
    event = CoreSelected(codebook_version=codebook.version)
    workflow.advance(state, event)

    project = replace(
        project,
        codebooks=project.codebooks + (codebook,),
        events=project.events + (event,),
    )
    _save(args, project)
    print(
        f"core selection committed as codebook v{codebook.version}: "
        f"{len(codebook.domains)} domains, {len(codebook.codes)} codes"
    )
    return EXIT_OK


# -- planning and synthesis --------------------------------------------------------


def _cmd_schedule(args) -> int:
    plan = workflow.dual_selection_schedule(
        args.total, args.dual_batch, args.control_interval, args.control_batch
    )
    if args.format == FORMAT_CSV:
        print("index,kind,control,start,end,size")
        for i, b in enumerate(plan.batches):
            control = "true" if b.control else "false"
            print(f"{i},{b.kind},{control},{b.start},{b.end},{b.size()}")
    else:
        for i, b in enumerate(plan.batches):
            role = " (control point)" if b.control else ""
            print(f"batch {i + 1}: {b.kind} items [{b.start}, {b.end}){role} -- {b.size()} items")
    return EXIT_OK


def _cmd_synth(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        coders=args.coders,
        documents=args.documents,
        doc_length=args.doc_length,
        domains=args.domains,
        codes_per_domain=args.codes_per_domain,
        quotations_per_document=args.quotations,
        quotation_density=args.density,
        perturbation_rate=args.p,
        mix=PerturbationMix(
            swap_code=args.swap_weight,
            drop_assignment=args.drop_weight,
            boundary_shift=args.shift_weight,
            shift_units=args.shift_units,
        ),
    )
    bundle = generate_round(config)
    project = ProjectFile(
        config=ProjectConfig(),
        coders=bundle.round.coder_ids,
        documents=bundle.documents,
        codebooks=(bundle.codebook,),
        rounds=(bundle.round,),
        events=(
            DataCollected(),
            RoundSubmitted(
                round_id=bundle.round.id, document_ids=bundle.round.document_ids
            ),
        ),
    )
    with _exclusive_lock(Path(args.out)):
        save_project(project, args.out)
    print(
        f"synthetic project written to {args.out}: round {bundle.round.id}, "
        f"{config.coders} coders, perturbation rate {config.perturbation_rate}"
    )
    return EXIT_OK


def _cmd_status(args) -> int:
    project = _load(args)
    state = project.state()
    print(f"phase: {state.phase.describe()}")
    print(f"threshold: {state.threshold}")
    version = project.codebooks[-1].version if project.codebooks else 0
    print(f"codebook version: {version}")
    print(f"documents: {len(project.documents)} ({len(state.coded_document_ids)} coded)")
    print(f"rounds: {len(project.rounds)}")
    for decision in state.history:
        print(
            f"  gate {decision.round_id}: {GLOBAL_LABEL} = {decision.result.alpha:.2f} "
            f"vs {decision.threshold:.2f} -> {decision.outcome}"
        )
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="icaflow", description=__doc__)
    parser.add_argument(
        "-p",
        "--project",
        default=os.environ.get("ICAFLOW_PROJECT"),
        help="project file path (default: $ICAFLOW_PROJECT)",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def fmt_flag(p):
        p.add_argument("--format", choices=[FORMAT_CSV, FORMAT_MARKDOWN], default=None)

    p = sub.add_parser("init", help="create a project file")
    p.add_argument("--coders", required=True, help="comma-separated coder ids, in coding order")
    p.add_argument("--unit", choices=["char", "token"], default="char")
    p.add_argument("--threshold", type=float, default=workflow.DEFAULT_THRESHOLD)
    p.add_argument("--batch-size", type=int, default=6)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("add-doc", help="add a document to the corpus")
    p.add_argument("--id", required=True)
    p.add_argument("--text")
    p.add_argument("--text-file")
    p.add_argument("--length", type=int)
    p.set_defaults(func=_cmd_add_doc)

    p = sub.add_parser("codebook", help="inspect or edit the codebook")
    csub = p.add_subparsers(dest="codebook_command", parser_class=_Parser)
    pe = csub.add_parser("edit", help="commit one codebook change set")
    pe.add_argument("--add-domain", nargs=2, action="append", metavar=("ID", "LABEL"))
    pe.add_argument("--add-code", nargs=3, action="append", metavar=("ID", "DOMAIN", "LABEL"))
    pe.add_argument("--remove-code", action="append", metavar="ID")
    pe.add_argument("--redefine-code", nargs=2, action="append", metavar=("ID", "DEFINITION"))
    pe.add_argument("--diary-ref")
    pe.add_argument("--timestamp")
    pe.set_defaults(func=_cmd_codebook_edit)
    ps = csub.add_parser("show", help="print the current codebook")
    ps.set_defaults(func=_cmd_codebook_show)

    p = sub.add_parser("round", help="manage coding rounds")
    rsub = p.add_subparsers(dest="round_command", parser_class=_Parser)
    pr = rsub.add_parser("new", help="start the next coding iteration")
    pr.add_argument("--id", required=True)
    pr.add_argument("--documents", required=True, help="comma-separated document ids")
    pr.add_argument("--coders", help="coding order (default: project coders)")
    pr.set_defaults(func=_cmd_round_new)

    p = sub.add_parser("mask-export", help="export the next coder's masked view")
    p.add_argument("--round", required=True)
    p.add_argument("--coder", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mask_export)

    p = sub.add_parser("submit", help="ingest a coder's assignments (sequential order)")
    p.add_argument("--round", required=True)
    p.add_argument("--coder", required=True)
    p.add_argument("--file", required=True, help="JSON list of assignments")
    p.set_defaults(func=_cmd_submit)

    p = sub.add_parser("validate", help="mutual-exclusiveness report for a round")
    p.add_argument("--round", required=True)
    fmt_flag(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("alpha", help="cu-α per domain and global Cu-α")
    p.add_argument("--round", required=True)
    p.add_argument("--domain")
    fmt_flag(p)
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("alpha-binary", help="binary α from an items-by-raters CSV")
    p.add_argument("--csv", required=True)
    fmt_flag(p)
    p.set_defaults(func=_cmd_alpha_binary)

    p = sub.add_parser("gate", help="evaluate the agreement gate; exit 1 on fail")
    p.add_argument("--round", required=True)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("drilldown", help="where a domain's disagreement comes from")
    p.add_argument("--round", required=True)
    p.add_argument("--domain", required=True)
    fmt_flag(p)
    p.set_defaults(func=_cmd_drilldown)

    p = sub.add_parser("diary", help="disagreements diary")
    dsub = p.add_subparsers(dest="diary_command", parser_class=_Parser)
    pd = dsub.add_parser("add", help="record one disagreement and its resolution")
    pd.add_argument("--id")
    pd.add_argument("--refs", help="comma-separated domain/code ids")
    pd.add_argument("--description", required=True)
    pd.add_argument("--resolution", required=True)
    pd.add_argument("--changelog-versions", help="codebook versions this produced")
    pd.add_argument("--timestamp")
    pd.set_defaults(func=_cmd_diary_add)

    p = sub.add_parser("meeting", help="review meeting lifecycle")
    msub = p.add_subparsers(dest="meeting_command", parser_class=_Parser)
    pm = msub.add_parser("close", help="close the review meeting")
    pm.add_argument("--no-change", help="explicit note when no diary entry was needed")
    pm.set_defaults(func=_cmd_meeting_close)

    p = sub.add_parser("saturation", help="theoretical saturation records")
    ssub = p.add_subparsers(dest="saturation_command", parser_class=_Parser)
    pr = ssub.add_parser("record", help="record the coders' saturation judgment")
    group = pr.add_mutually_exclusive_group(required=True)
    group.add_argument("--yes", action="store_true")
    group.add_argument("--no", dest="yes", action="store_false")
    pr.add_argument("--rationale", required=True)
    pr.add_argument("--deciders", required=True, help="comma-separated coder ids")
    pr.set_defaults(func=_cmd_saturation_record)

    p = sub.add_parser("candidates", help="rank codes by groundedness and density")
    p.add_argument("--rounds", help="comma-separated round ids (default: all)")
    fmt_flag(p)
    p.set_defaults(func=_cmd_candidates)

    p = sub.add_parser("select-core", help="commit the core-category selection")
    p.add_argument("--domains", required=True)
    p.add_argument("--codes", required=True)
    p.add_argument("--timestamp")
    p.set_defaults(func=_cmd_select_core)

    p = sub.add_parser("schedule", help="dual screening plan with control points")
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--dual-batch", type=int, required=True)
    p.add_argument("--control-interval", type=int, required=True)
    p.add_argument("--control-batch", type=int, required=True)
    fmt_flag(p)
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("synth", help="generate a synthetic project")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coders", type=int, default=2)
    p.add_argument("--documents", type=int, default=2)
    p.add_argument("--doc-length", type=int, default=60)
    p.add_argument("--domains", type=int, default=3)
    p.add_argument("--codes-per-domain", type=int, default=2)
    p.add_argument("--quotations", type=int, default=4)
    p.add_argument("--density", type=float, default=0.8)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--swap-weight", type=float, default=1.0)
    p.add_argument("--drop-weight", type=float, default=0.0)
    p.add_argument("--shift-weight", type=float, default=0.0)
    p.add_argument("--shift-units", type=int, default=2)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("status", help="current phase and gate history")
    p.set_defaults(func=_cmd_status)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IcaflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
