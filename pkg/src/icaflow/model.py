"""Coding entities and their structural rules.

Documents, codebooks (semantic domains and codes), quotations, assignments
and rounds are immutable values. Mutual exclusiveness -- at most one code of
a given semantic domain per coder per text unit -- is validated here, and the
per-unit projections that the agreement coefficients consume are derived
here. Masked views implement sequential coding: a coder sees the spans that
earlier coders highlighted, never the codes they attached.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace

from .errors import IntegrityError, OrderingError, ProjectionError, ValidationError

UNIT_CHAR = "char"
UNIT_TOKEN = "token"

PHASE_OPEN = "open"
PHASE_SELECTIVE = "selective"

STATUS_PENDING = "pending"
STATUS_SUBMITTED = "submitted"


def text_length(text: str, atomic_unit: str = UNIT_CHAR) -> int:
    """Number of atomic units in a text (characters or whitespace tokens)."""
    if atomic_unit == UNIT_CHAR:
        return len(text)
    if atomic_unit == UNIT_TOKEN:
        return len(text.split())
    raise ValidationError(f"unknown atomic unit {atomic_unit!r}")


@dataclass(frozen=True, slots=True)
class Document:
    """A codable text continuum measured in atomic units."""

    id: str
    length: int
    text: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("document id must be non-empty")
        if self.length < 1:
            raise ValidationError(f"document {self.id!r}: length must be >= 1")

    @classmethod
    def from_text(cls, doc_id: str, text: str, atomic_unit: str = UNIT_CHAR) -> "Document":
        return cls(id=doc_id, length=text_length(text, atomic_unit), text=text)

    def check_text_consistency(self, atomic_unit: str) -> None:
        """Length must equal the unit count of the text, when text is stored."""
        if self.text is not None and text_length(self.text, atomic_unit) != self.length:
            raise ValidationError(
                f"document {self.id!r}: length {self.length} does not match its "
                f"text ({text_length(self.text, atomic_unit)} {atomic_unit} units)"
            )


@dataclass(frozen=True, slots=True, order=True)
class Quotation:
    """A half-open span [start, end) of atomic units in one document."""

    document_id: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.start >= self.end:
            raise ValidationError(
                f"quotation [{self.start}, {self.end}) in {self.document_id!r}: "
                "require 0 <= start < end"
            )

    def overlaps(self, other: "Quotation") -> bool:
        return (
            self.document_id == other.document_id
            and max(self.start, other.start) < min(self.end, other.end)
        )


@dataclass(frozen=True, slots=True)
class Code:
    id: str
    label: str
    domain_id: str
    definition: str = ""
    memo: str = ""

    def __post_init__(self) -> None:
        if not self.id or not self.domain_id:
            raise ValidationError("code id and domain id must be non-empty")


@dataclass(frozen=True, slots=True)
class SemanticDomain:
    """A meta-category whose codes are mutually exclusive on any unit."""

    id: str
    label: str
    code_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("domain id must be non-empty")
        if not self.label:
            raise ValidationError(f"domain {self.id!r}: label must be non-empty")
        if len(set(self.code_ids)) != len(self.code_ids):
            raise ValidationError(f"domain {self.id!r}: duplicate code ids")


@dataclass(frozen=True, slots=True)
class ChangeRecord:
    """One atomic codebook change inside a committed change set."""

    action: str  # created_domain|created_code|added_domain|added_code|removed_domain|removed_code|redefined_code|core_selection
    ref: str
    note: str = ""


@dataclass(frozen=True, slots=True)
class ChangeSet:
    """All changes committed together as one codebook version bump."""

    version: int
    changes: tuple[ChangeRecord, ...]
    timestamp: str = ""
    diary_ref: str | None = None


@dataclass(frozen=True, slots=True)
class Codebook:
    """A versioned set of semantic domains and codes with full change history.

    The version equals the number of committed change sets; every edit
    produces a new value with version + 1 and one appended change set.
    """

    version: int
    domains: tuple[SemanticDomain, ...]
    codes: tuple[Code, ...]
    changelog: tuple[ChangeSet, ...]

    def __post_init__(self) -> None:
        if self.version < 1:
            raise ValidationError("codebook version must be >= 1")
        if len(self.changelog) != self.version:
            raise ValidationError(
                f"codebook v{self.version}: changelog has {len(self.changelog)} "
                "change sets, expected one per version"
            )
        seen: set[str] = set()
        for d in self.domains:
            if d.id in seen:
                raise ValidationError(f"duplicate id {d.id!r} in codebook")
            seen.add(d.id)
        code_by_id: dict[str, Code] = {}
        for c in self.codes:
            if c.id in seen or c.id in code_by_id:
                raise ValidationError(f"duplicate id {c.id!r} in codebook")
            code_by_id[c.id] = c
        domain_ids = {d.id for d in self.domains}
        for c in self.codes:
            if c.domain_id not in domain_ids:
                raise IntegrityError(
                    f"code {c.id!r} references missing domain {c.domain_id!r}"
                )
        # domain.code_ids must list exactly the codes claiming that domain
        claimed: dict[str, list[str]] = {d.id: [] for d in self.domains}
        for c in self.codes:
            claimed[c.domain_id].append(c.id)
        for d in self.domains:
            if not claimed[d.id]:
                raise ValidationError(f"domain {d.id!r}: at least one code required")
            if sorted(d.code_ids) != sorted(claimed[d.id]):
                raise ValidationError(
                    f"domain {d.id!r}: code_ids {d.code_ids} disagree with the "
                    f"codes declaring domain_id={d.id!r}"
                )

    # -- lookups ---------------------------------------------------------

    def domain(self, domain_id: str) -> SemanticDomain:
        for d in self.domains:
            if d.id == domain_id:
                return d
        raise IntegrityError(f"unknown domain {domain_id!r}")

    def code(self, code_id: str) -> Code:
        for c in self.codes:
            if c.id == code_id:
                return c
        raise IntegrityError(f"unknown code {code_id!r}")

    def has_code(self, code_id: str) -> bool:
        return any(c.id == code_id for c in self.codes)

    def domain_of(self, code_id: str) -> str:
        return self.code(code_id).domain_id

    def domain_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.domains)

    # -- construction and editing ----------------------------------------

    @classmethod
    def initial(
        cls,
        domains: Sequence[SemanticDomain],
        codes: Sequence[Code],
        timestamp: str = "",
        note: str = "",
    ) -> "Codebook":
        changes = tuple(
            [ChangeRecord("created_domain", d.id, note) for d in domains]
            + [ChangeRecord("created_code", c.id, note) for c in codes]
        )
        return cls(
            version=1,
            domains=tuple(domains),
            codes=tuple(codes),
            changelog=(ChangeSet(version=1, changes=changes, timestamp=timestamp),),
        )

    def edit(
        self,
        add_domains: Sequence[SemanticDomain] = (),
        add_codes: Sequence[Code] = (),
        remove_codes: Sequence[str] = (),
        redefine_codes: Sequence[tuple[str, str]] = (),
        timestamp: str = "",
        diary_ref: str | None = None,
    ) -> "Codebook":
        """Commit one change set; returns a codebook with version + 1.

        Removing the last code of a domain removes the domain as well.
        """
        changes: list[ChangeRecord] = []
        domains = {d.id: d for d in self.domains}
        codes = {c.id: c for c in self.codes}
        for d in add_domains:
            if d.id in domains or d.id in codes:
                raise ValidationError(f"id {d.id!r} already exists in codebook")
            # code_ids are filled as codes arrive
            domains[d.id] = replace(d, code_ids=())
            changes.append(ChangeRecord("added_domain", d.id))
        for c in add_codes:
            if c.id in codes or c.id in domains:
                raise ValidationError(f"id {c.id!r} already exists in codebook")
            if c.domain_id not in domains:
                raise IntegrityError(f"code {c.id!r} references missing domain {c.domain_id!r}")
            codes[c.id] = c
            changes.append(ChangeRecord("added_code", c.id))
        for code_id in remove_codes:
            if code_id not in codes:
                raise IntegrityError(f"unknown code {code_id!r}")
            del codes[code_id]
            changes.append(ChangeRecord("removed_code", code_id))
        for code_id, definition in redefine_codes:
            if code_id not in codes:
                raise IntegrityError(f"unknown code {code_id!r}")
            codes[code_id] = replace(codes[code_id], definition=definition)
            changes.append(ChangeRecord("redefined_code", code_id))
        if not changes:
            raise ValidationError("empty change set")

        new_domains = []
        added_ids = {d.id for d in add_domains}
        ordered_domains = list(self.domains) + [domains[d.id] for d in add_domains]
        for d in ordered_domains:
            member_ids = tuple(c.id for c in codes.values() if c.domain_id == d.id)
            if not member_ids:
                if d.id in added_ids:
                    raise ValidationError(
                        f"new domain {d.id!r} needs at least one code in the same change set"
                    )
                changes.append(ChangeRecord("removed_domain", d.id, "no codes left"))
                continue
            ordered = tuple(i for i in d.code_ids if i in member_ids) + tuple(
                i for i in member_ids if i not in d.code_ids
            )
            new_domains.append(replace(d, code_ids=ordered))
        return Codebook(
            version=self.version + 1,
            domains=tuple(new_domains),
            codes=tuple(codes.values()),
            changelog=self.changelog
            + (
                ChangeSet(
                    version=self.version + 1,
                    changes=tuple(changes),
                    timestamp=timestamp,
                    diary_ref=diary_ref,
                ),
            ),
        )

    def restricted(
        self,
        domain_ids: Sequence[str],
        code_ids: Sequence[str],
        timestamp: str = "",
        diary_ref: str | None = None,
        note: str = "core selection",
    ) -> "Codebook":
        """Reduce to the given selections, committing one change set."""
        keep_domains = set(domain_ids)
        keep_codes = set(code_ids)
        for d in keep_domains:
            self.domain(d)
        for c in keep_codes:
            if not self.has_code(c):
                raise IntegrityError(f"unknown code {c!r}")
            if self.domain_of(c) not in keep_domains:
                raise IntegrityError(
                    f"selected code {c!r} belongs to domain {self.domain_of(c)!r}, "
                    "which was not selected"
                )
        changes = [ChangeRecord("core_selection", "", note)]
        new_domains = []
        for d in self.domains:
            if d.id not in keep_domains:
                changes.append(ChangeRecord("removed_domain", d.id, note))
                continue
            member_ids = tuple(i for i in d.code_ids if i in keep_codes)
            if not member_ids:
                raise ValidationError(
                    f"selected domain {d.id!r} would keep no codes"
                )
            for i in d.code_ids:
                if i not in keep_codes:
                    changes.append(ChangeRecord("removed_code", i, note))
            new_domains.append(replace(d, code_ids=member_ids))
        new_codes = tuple(c for c in self.codes if c.id in keep_codes)
        return Codebook(
            version=self.version + 1,
            domains=tuple(new_domains),
            codes=new_codes,
            changelog=self.changelog
            + (
                ChangeSet(
                    version=self.version + 1,
                    changes=tuple(changes),
                    timestamp=timestamp,
                    diary_ref=diary_ref,
                ),
            ),
        )


@dataclass(frozen=True, slots=True)
class Assignment:
    """One (coder, code) labeling of a quotation within a round."""

    coder_id: str
    quotation: Quotation
    code_id: str
    round_id: str


@dataclass(frozen=True, slots=True)
class Round:
    """One coding iteration: a document batch coded sequentially by coders.

    ``submitted`` is the prefix of ``coder_ids`` whose work is committed;
    coders submit strictly in ``coder_ids`` order.
    """

    id: str
    phase: str  # open | selective
    codebook_version: int
    document_ids: tuple[str, ...]
    coder_ids: tuple[str, ...]
    assignments: tuple[Assignment, ...] = ()
    submitted: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.phase not in (PHASE_OPEN, PHASE_SELECTIVE):
            raise ValidationError(f"round {self.id!r}: unknown phase {self.phase!r}")
        if len(self.coder_ids) < 2:
            raise ValidationError(f"round {self.id!r}: at least 2 coders required")
        if len(set(self.coder_ids)) != len(self.coder_ids):
            raise ValidationError(f"round {self.id!r}: duplicate coder ids")
        if len(set(self.document_ids)) != len(self.document_ids):
            raise ValidationError(f"round {self.id!r}: duplicate document ids")
        if self.submitted != self.coder_ids[: len(self.submitted)]:
            raise ValidationError(
                f"round {self.id!r}: submissions must follow coder order "
                f"{self.coder_ids}"
            )
        submitted = set(self.submitted)
        for a in self.assignments:
            if a.coder_id not in submitted:
                raise ValidationError(
                    f"round {self.id!r}: assignment by {a.coder_id!r} who has not submitted"
                )
            if a.round_id != self.id:
                raise ValidationError(
                    f"round {self.id!r}: assignment tagged with round {a.round_id!r}"
                )

    def status_of(self, coder_id: str) -> str:
        if coder_id not in self.coder_ids:
            raise IntegrityError(f"coder {coder_id!r} is not part of round {self.id!r}")
        return STATUS_SUBMITTED if coder_id in self.submitted else STATUS_PENDING

    def next_pending(self) -> str | None:
        """The coder whose turn it is, or None when the round is complete."""
        remaining = self.coder_ids[len(self.submitted) :]
        return remaining[0] if remaining else None

    def is_complete(self) -> bool:
        return len(self.submitted) == len(self.coder_ids)

    def assignments_of(self, coder_id: str) -> tuple[Assignment, ...]:
        return tuple(a for a in self.assignments if a.coder_id == coder_id)

    def with_submission(
        self, coder_id: str, quotation_codes: Iterable[tuple[Quotation, str]]
    ) -> "Round":
        """Commit a coder's work; the coder must be the next pending one."""
        expected = self.next_pending()
        if expected is None:
            raise OrderingError(f"round {self.id!r} is already complete")
        if coder_id != expected:
            raise OrderingError(
                f"round {self.id!r}: expected submission from {expected!r}, "
                f"got {coder_id!r}",
                expected_coder=expected,
            )
        new = normalize_assignments(self.id, coder_id, quotation_codes)
        return replace(
            self,
            assignments=self.assignments + new,
            submitted=self.submitted + (coder_id,),
        )


def normalize_assignments(
    round_id: str, coder_id: str, quotation_codes: Iterable[tuple[Quotation, str]]
) -> tuple[Assignment, ...]:
    """Canonicalize one coder's raw labelings.

    Exact duplicates collapse; same-code overlapping spans merge into their
    union (one semantic application). Output is sorted for determinism.
    """
    by_key: dict[tuple[str, str], list[tuple[int, int]]] = {}
    for quotation, code_id in quotation_codes:
        by_key.setdefault((quotation.document_id, code_id), []).append(
            (quotation.start, quotation.end)
        )
    out: list[Assignment] = []
    for (doc_id, code_id), spans in by_key.items():
        spans.sort()
        merged: list[list[int]] = []
        for start, end in spans:
            if merged and start < merged[-1][1]:  # true overlap only; adjacency kept apart
                merged[-1][1] = max(merged[-1][1], end)
            else:
                merged.append([start, end])
        for start, end in merged:
            out.append(
                Assignment(coder_id, Quotation(doc_id, start, end), code_id, round_id)
            )
    out.sort(key=lambda a: (a.quotation.document_id, a.quotation.start, a.quotation.end, a.code_id))
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Violation:
    """Two same-domain codes by one coder on overlapping spans."""

    coder_id: str
    domain_id: str
    quotation_a: Quotation
    quotation_b: Quotation
    code_a: str
    code_b: str


def _check_assignment_integrity(
    rnd: Round, codebook: Codebook, documents: Mapping[str, Document]
) -> None:
    for a in rnd.assignments:
        if not codebook.has_code(a.code_id):
            raise IntegrityError(
                f"round {rnd.id!r}: assignment references unknown code {a.code_id!r}"
            )
        doc = documents.get(a.quotation.document_id)
        if doc is None:
            raise IntegrityError(
                f"round {rnd.id!r}: assignment references unknown document "
                f"{a.quotation.document_id!r}"
            )
        if a.quotation.document_id not in rnd.document_ids:
            raise IntegrityError(
                f"round {rnd.id!r}: document {a.quotation.document_id!r} is not in this round"
            )
        if a.quotation.end > doc.length:
            raise IntegrityError(
                f"round {rnd.id!r}: quotation [{a.quotation.start}, {a.quotation.end}) "
                f"exceeds document {doc.id!r} of length {doc.length}"
            )


def validate_mutual_exclusiveness(
    rnd: Round, codebook: Codebook, documents: Mapping[str, Document]
) -> tuple[Violation, ...]:
    """All same-coder, same-domain, overlapping pairs with differing codes.

    An empty result means the round is mutually exclusive. Dangling code or
    document references raise IntegrityError instead of being reported as
    violations. Overlap across coders or across domains is not a violation.
    """
    _check_assignment_integrity(rnd, codebook, documents)
    violations: list[Violation] = []
    by_coder_domain: dict[tuple[str, str], list[Assignment]] = {}
    for a in rnd.assignments:
        key = (a.coder_id, codebook.domain_of(a.code_id))
        by_coder_domain.setdefault(key, []).append(a)
    for (coder_id, domain_id), group in sorted(by_coder_domain.items()):
        group.sort(key=lambda a: (a.quotation.document_id, a.quotation.start, a.quotation.end, a.code_id))
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                if a.code_id != b.code_id and a.quotation.overlaps(b.quotation):
                    violations.append(
                        Violation(coder_id, domain_id, a.quotation, b.quotation, a.code_id, b.code_id)
                    )
    return tuple(violations)


def domain_projection(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    coder_id: str,
    domain_id: str,
    document_id: str,
) -> list[str | None]:
    """Per unit of the document: the coder's unique code of the domain, or None."""
    codebook.domain(domain_id)
    doc = documents.get(document_id)
    if doc is None:
        raise IntegrityError(f"unknown document {document_id!r}")
    cells: list[str | None] = [None] * doc.length
    for a in rnd.assignments:
        if a.coder_id != coder_id or a.quotation.document_id != document_id:
            continue
        if codebook.domain_of(a.code_id) != domain_id:
            continue
        if a.quotation.end > doc.length:
            raise IntegrityError(
                f"quotation [{a.quotation.start}, {a.quotation.end}) exceeds "
                f"document {document_id!r} of length {doc.length}"
            )
        for unit in range(a.quotation.start, a.quotation.end):
            if cells[unit] is not None and cells[unit] != a.code_id:
                raise ProjectionError(coder_id, domain_id, document_id, unit)
            cells[unit] = a.code_id
    return cells


def domain_set_projection(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    coder_id: str,
    document_id: str,
) -> list[frozenset[str]]:
    """Per unit: the set of domains for which the coder applied any code."""
    doc = documents.get(document_id)
    if doc is None:
        raise IntegrityError(f"unknown document {document_id!r}")
    sets: list[set[str]] = [set() for _ in range(doc.length)]
    for domain in codebook.domains:
        cells = domain_projection(rnd, codebook, documents, coder_id, domain.id, document_id)
        for unit, value in enumerate(cells):
            if value is not None:
                sets[unit].add(domain.id)
    return [frozenset(s) for s in sets]


@dataclass(frozen=True, slots=True)
class MaskedView:
    """What the next coder in sequence is allowed to see.

    Earlier coders' spans, deduplicated, with every code stripped; plus the
    full current codebook. Never carries an assignment.
    """

    round_id: str
    coder_id: str
    quotations: tuple[Quotation, ...]
    codebook: Codebook


def masked_view(rnd: Round, codebook: Codebook, next_coder_id: str) -> MaskedView:
    """The sequential-coding view for the round's next pending coder."""
    expected = rnd.next_pending()
    if expected is None:
        raise OrderingError(f"round {rnd.id!r} is already complete")
    if next_coder_id != expected:
        raise OrderingError(
            f"round {rnd.id!r}: the next coder in sequence is {expected!r}, "
            f"not {next_coder_id!r}",
            expected_coder=expected,
        )
    spans = sorted({a.quotation for a in rnd.assignments})
    return MaskedView(
        round_id=rnd.id,
        coder_id=next_coder_id,
        quotations=tuple(spans),
        codebook=codebook,
    )
