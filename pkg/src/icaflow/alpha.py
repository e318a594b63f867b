"""Krippendorff's alpha family over rating matrices and coded text.

Three coefficients are computed from the same coincidence-matrix machinery:

* nominal alpha on an items-by-raters matrix (binary variant for two-value
  vocabularies such as include/exclude screening decisions);
* cu-alpha, per semantic domain: agreement on *which code* of the domain
  applies at each text unit the domain was applied to;
* Cu-alpha, global: agreement on the *decision to apply* each domain at each
  covered unit, regardless of the chosen code.

All intermediate quantities (coincidence counts, marginals, observed and
expected disagreement) are exact rationals; only the final alpha is a float.
Alpha is at most 1, may be negative, and is reported as computed.

Two chance models are in play. Item-rating matrices use the classic
small-sample expected disagreement with the n(n-1) denominator (so two
crossed ratings over two items give exactly -0.5). The continuum
coefficients treat unit counts as lengths -- proportions of the coded
continuum -- so their expected disagreement is the plain product of value
proportions (n^2 denominator). That makes cu-alpha and Cu-alpha exactly
invariant under rescaling the atomic unit: replicating every unit k times
changes nothing, as a coefficient over a continuum must behave.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateMatrixError,
    InsufficientDataError,
    ValidationError,
    VocabularyError,
)
from .model import Codebook, Document, Round, domain_projection, domain_set_projection

VARIANT_NOMINAL = "nominal"
VARIANT_BINARY = "binary"
VARIANT_CU = "cu"  # per-domain, code-level
VARIANT_CU_GLOBAL = "Cu"  # global, domain-application level

# Literature rule-of-thumb bands for interpreting alpha.
TENTATIVE_FLOOR = 0.667
RELIABILITY_FLOOR = 0.8

BAND_UNRELIABLE = "unreliable"
BAND_TENTATIVE = "tentative"
BAND_ACCEPTABLE = "acceptable"

DOMAIN_PRESENT = "present"
DOMAIN_ABSENT = "absent"


class _NoCode:
    """Explicit 'coder applied no code of this domain here' rating value."""

    __slots__ = ()

    def __repr__(self) -> str:  # rendered in drill-downs and reports
        return "NONE"


NO_CODE = _NoCode()


def classify_band(alpha: float) -> str:
    if alpha >= RELIABILITY_FLOOR:
        return BAND_ACCEPTABLE
    if alpha >= TENTATIVE_FLOOR:
        return BAND_TENTATIVE
    return BAND_UNRELIABLE


@dataclass(frozen=True)
class ReliabilityMatrix:
    """Items-by-raters nominal ratings; cells may be missing."""

    items: tuple[Hashable, ...]
    raters: tuple[str, ...]
    values: Mapping[tuple[Hashable, str], Hashable]

    def __post_init__(self) -> None:
        if len(self.raters) < 2:
            raise ValidationError("a reliability matrix needs at least 2 raters")
        if len(set(self.items)) != len(self.items):
            raise ValidationError("duplicate item ids")
        if len(set(self.raters)) != len(self.raters):
            raise ValidationError("duplicate rater ids")
        known_items = set(self.items)
        known_raters = set(self.raters)
        for item, rater in self.values:
            if item not in known_items or rater not in known_raters:
                raise ValidationError(
                    f"value cell ({item!r}, {rater!r}) outside the declared items/raters"
                )

    def ratings_of(self, item: Hashable) -> list[Hashable]:
        """The item's ratings in rater order, skipping missing cells."""
        out = []
        for rater in self.raters:
            v = self.values.get((item, rater))
            if v is not None:
                out.append(v)
        return out

    @classmethod
    def from_rows(
        cls, raters: Sequence[str], rows: Mapping[Hashable, Sequence[Hashable | None]]
    ) -> "ReliabilityMatrix":
        """Build from {item: [value per rater, None = missing]}."""
        values: dict[tuple[Hashable, str], Hashable] = {}
        for item, cells in rows.items():
            if len(cells) != len(raters):
                raise ValidationError(
                    f"item {item!r}: {len(cells)} cells for {len(raters)} raters"
                )
            for rater, v in zip(raters, cells):
                if v is not None:
                    values[(item, rater)] = v
        return cls(items=tuple(rows), raters=tuple(raters), values=values)


@dataclass(frozen=True)
class CoincidenceMatrix:
    """Symmetric value-pair counts, each item pair weighted 1/(m_u - 1)."""

    vocabulary: tuple[Hashable, ...]
    counts: Mapping[tuple[Hashable, Hashable], Fraction]
    marginals: Mapping[Hashable, Fraction]
    total: Fraction
    pairable_items: int

    def __post_init__(self) -> None:
        for (v, k), c in self.counts.items():
            if c < 0:
                raise ValidationError("negative coincidence count")
            if self.counts.get((k, v), Fraction(0)) != c:
                raise ValidationError("coincidence counts must be symmetric")
        for v in self.vocabulary:
            row = sum(
                (self.counts.get((v, k), Fraction(0)) for k in self.vocabulary),
                Fraction(0),
            )
            if row != self.marginals.get(v, Fraction(0)):
                raise ValidationError(f"marginal of {v!r} does not match its row sum")
        if sum(self.marginals.values()) != self.total:
            raise ValidationError("total does not match the marginal sum")


def _vocab_sort_key(value: Hashable) -> tuple[int, str]:
    return (1 if isinstance(value, _NoCode) else 0, str(value))


def build_coincidence(matrix: ReliabilityMatrix) -> CoincidenceMatrix:
    """Pair every item's ratings; items with fewer than 2 ratings drop out.

    For an item with m ratings, each ordered pair of distinct ratings adds
    1/(m - 1) to its value-pair cell, so each item contributes m to the total.
    """
    per_item = [matrix.ratings_of(item) for item in matrix.items]
    pairable = [r for r in per_item if len(r) >= 2]
    if not pairable:
        raise InsufficientDataError("no item has 2 or more ratings")

    scale = math.lcm(*{len(r) - 1 for r in pairable})
    scaled: Counter[tuple[Hashable, Hashable]] = Counter()
    for ratings in pairable:
        w = scale // (len(ratings) - 1)
        for i, v in enumerate(ratings):
            for j, k in enumerate(ratings):
                if i != j:
                    scaled[(v, k)] += w

    counts = {pair: Fraction(c, scale) for pair, c in scaled.items()}
    vocabulary = tuple(sorted({v for pair in counts for v in pair}, key=_vocab_sort_key))
    marginals = {
        v: sum((counts.get((v, k), Fraction(0)) for k in vocabulary), Fraction(0))
        for v in vocabulary
    }
    return CoincidenceMatrix(
        vocabulary=vocabulary,
        counts=counts,
        marginals=marginals,
        total=sum(marginals.values(), Fraction(0)),
        pairable_items=len(pairable),
    )


@dataclass(frozen=True)
class AlphaResult:
    """An alpha coefficient with its exact disagreement terms.

    ``forced_perfect`` marks the degenerate all-one-value case where zero
    observed disagreement forces alpha to 1.0 even though expected
    disagreement is zero too.
    """

    alpha: float
    observed_disagreement: Fraction
    expected_disagreement: Fraction
    pairable_items: int
    variant: str
    domain_id: str | None = None
    forced_perfect: bool = False
    degenerate_expected: bool = False

    def __post_init__(self) -> None:
        if self.alpha > 1.0:
            raise ValidationError("alpha cannot exceed 1.0")
        if self.observed_disagreement == 0 and self.alpha != 1.0:
            raise ValidationError("zero observed disagreement must yield alpha 1.0")
        if self.expected_disagreement == 0:
            if self.observed_disagreement > 0:
                raise DegenerateMatrixError(
                    "expected disagreement is zero but observed disagreement is not"
                )
            if not (self.forced_perfect and self.degenerate_expected):
                raise ValidationError(
                    "zero expected disagreement must set the forced_perfect and "
                    "degenerate_expected flags"
                )


def _alpha_from_coincidence(
    co: CoincidenceMatrix,
    variant: str,
    domain_id: str | None = None,
    continuum: bool = False,
) -> AlphaResult:
    n = co.total
    off_diagonal = sum(
        (c for (v, k), c in co.counts.items() if v != k), Fraction(0)
    )
    do = off_diagonal / n
    sum_sq = sum((m * m for m in co.marginals.values()), Fraction(0))
    # continuum: lengths, not samples, so no finite-sample -1 correction
    de_denominator = n * n if continuum else n * (n - 1)
    de = (n * n - sum_sq) / de_denominator
    if do == 0:
        return AlphaResult(
            alpha=1.0,
            observed_disagreement=do,
            expected_disagreement=de,
            pairable_items=co.pairable_items,
            variant=variant,
            domain_id=domain_id,
            forced_perfect=de == 0,
            degenerate_expected=de == 0,
        )
    if de == 0:  # unreachable: do > 0 implies two distinct values, hence de > 0
        raise DegenerateMatrixError(
            "expected disagreement is zero but observed disagreement is not"
        )
    return AlphaResult(
        alpha=float(1 - do / de),
        observed_disagreement=do,
        expected_disagreement=de,
        pairable_items=co.pairable_items,
        variant=variant,
        domain_id=domain_id,
    )


def nominal_alpha(matrix: ReliabilityMatrix) -> AlphaResult:
    """alpha = 1 - Do/De with the nominal (identity) difference function."""
    return _alpha_from_coincidence(build_coincidence(matrix), VARIANT_NOMINAL)


def binary_alpha(matrix: ReliabilityMatrix) -> AlphaResult:
    """Nominal alpha restricted to a two-value vocabulary.

    Suits include/exclude style dual screening decisions; any third value in
    the data is rejected.
    """
    distinct = set(matrix.values.values())
    if len(distinct) > 2:
        raise VocabularyError(
            f"binary alpha permits 2 values, found {len(distinct)}: "
            f"{', '.join(sorted(str(v) for v in distinct))}"
        )
    return _alpha_from_coincidence(build_coincidence(matrix), VARIANT_BINARY)


# -- coefficients over coded text ------------------------------------------


def _submitted_raters(rnd: Round) -> tuple[str, ...]:
    if len(rnd.submitted) < 2:
        raise ValidationError(
            f"round {rnd.id!r}: at least 2 submitted coders required, "
            f"have {len(rnd.submitted)}"
        )
    return rnd.submitted


def _domain_unit_values(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    domain_id: str,
) -> dict[tuple[str, int], dict[str, Hashable]]:
    """Per (document, unit) with the domain applied by someone: coder -> code/NO_CODE."""
    raters = _submitted_raters(rnd)
    table: dict[tuple[str, int], dict[str, Hashable]] = {}
    for doc_id in rnd.document_ids:
        per_coder = {
            coder: domain_projection(rnd, codebook, documents, coder, domain_id, doc_id)
            for coder in raters
        }
        length = documents[doc_id].length
        for unit in range(length):
            cells = {coder: per_coder[coder][unit] for coder in raters}
            if any(v is not None for v in cells.values()):
                table[(doc_id, unit)] = {
                    coder: (v if v is not None else NO_CODE) for coder, v in cells.items()
                }
    return table


def cu_alpha(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    domain_id: str,
) -> AlphaResult:
    """Per-domain agreement on which code of the domain applies where.

    Items are the atomic units at which at least one submitted coder applied
    some code of the domain; a coder who applied nothing there rates the
    explicit NONE value, so unilateral application counts as disagreement.
    Expected disagreement follows the continuum (length-proportion) chance
    model, keeping the value independent of the atomic-unit granularity.
    """
    codebook.domain(domain_id)
    table = _domain_unit_values(rnd, codebook, documents, domain_id)
    if not table:
        raise InsufficientDataError(
            f"domain {domain_id!r} was not applied by any coder in round {rnd.id!r}"
        )
    raters = _submitted_raters(rnd)
    matrix = ReliabilityMatrix(
        items=tuple(table),
        raters=raters,
        values={(item, coder): table[item][coder] for item in table for coder in raters},
    )
    return _alpha_from_coincidence(
        build_coincidence(matrix), VARIANT_CU, domain_id, continuum=True
    )


def cu_alpha_global(
    rnd: Round, codebook: Codebook, documents: Mapping[str, Document]
) -> AlphaResult:
    """Global agreement on the decision to apply domains, any code.

    Items are (unit, domain) pairs over every unit covered by at least one
    quotation of any submitted coder, crossed with every codebook domain;
    each coder rates the item 'present' or 'absent'. Uses the continuum
    chance model, like cu_alpha.
    """
    raters = _submitted_raters(rnd)
    covered: dict[str, set[int]] = {doc_id: set() for doc_id in rnd.document_ids}
    for a in rnd.assignments:
        covered[a.quotation.document_id].update(
            range(a.quotation.start, a.quotation.end)
        )
    if not any(covered.values()):
        raise InsufficientDataError(f"round {rnd.id!r} has no quotations")

    sets = {
        (coder, doc_id): domain_set_projection(rnd, codebook, documents, coder, doc_id)
        for coder in raters
        for doc_id in rnd.document_ids
    }
    items: list[tuple[str, int, str]] = []
    values: dict[tuple[Hashable, str], Hashable] = {}
    for doc_id in rnd.document_ids:
        for unit in sorted(covered[doc_id]):
            for domain in codebook.domains:
                item = (doc_id, unit, domain.id)
                items.append(item)
                for coder in raters:
                    applied = domain.id in sets[(coder, doc_id)][unit]
                    values[(item, coder)] = DOMAIN_PRESENT if applied else DOMAIN_ABSENT
    matrix = ReliabilityMatrix(items=tuple(items), raters=raters, values=values)
    return _alpha_from_coincidence(
        build_coincidence(matrix), VARIANT_CU_GLOBAL, continuum=True
    )


# -- reporting ---------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    """One coefficient line of an agreement report."""

    label: str  # domain id, or the global column label
    alpha: float | None  # None when there is not enough data
    band: str | None = None
    insufficient: bool = False
    note: str = ""

    @classmethod
    def from_alpha(cls, label: str, value: float, note: str = "") -> "ReportRow":
        return cls(label=label, alpha=value, band=classify_band(value), note=note)

    @classmethod
    def no_data(cls, label: str, note: str = "insufficient data") -> "ReportRow":
        return cls(label=label, alpha=None, band=None, insufficient=True, note=note)


GLOBAL_LABEL = "Cu-α"


@dataclass(frozen=True)
class AlphaReport:
    """Per-domain cu-alpha rows plus the global Cu-alpha row."""

    rows: tuple[ReportRow, ...]
    global_row: ReportRow | None
    threshold: float = RELIABILITY_FLOOR

    @classmethod
    def from_values(
        cls,
        domain_values: Sequence[tuple[str, float | None]],
        global_value: float | None,
        threshold: float = RELIABILITY_FLOOR,
    ) -> "AlphaReport":
        rows = tuple(
            ReportRow.from_alpha(d, v) if v is not None else ReportRow.no_data(d)
            for d, v in domain_values
        )
        global_row = (
            ReportRow.from_alpha(GLOBAL_LABEL, global_value)
            if global_value is not None
            else None
        )
        return cls(rows=rows, global_row=global_row, threshold=threshold)


def alpha_report(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    threshold: float = RELIABILITY_FLOOR,
) -> AlphaReport:
    """cu-alpha per domain (codebook order) and the global Cu-alpha.

    Domains without data are marked insufficient rather than omitted.
    """
    rows = []
    for domain in codebook.domains:
        try:
            result = cu_alpha(rnd, codebook, documents, domain.id)
        except InsufficientDataError:
            rows.append(ReportRow.no_data(domain.id))
            continue
        note = "forced perfect: no observed disagreement" if result.forced_perfect else ""
        rows.append(ReportRow.from_alpha(domain.id, result.alpha, note))
    global_result = cu_alpha_global(rnd, codebook, documents)
    note = "forced perfect: no observed disagreement" if global_result.forced_perfect else ""
    return AlphaReport(
        rows=tuple(rows),
        global_row=ReportRow.from_alpha(GLOBAL_LABEL, global_result.alpha, note),
        threshold=threshold,
    )


@dataclass(frozen=True)
class DisagreementRange:
    """A maximal run of units with one constant pattern of conflicting codes."""

    document_id: str
    start: int
    end: int
    values: tuple[tuple[str, str], ...]  # (coder id, rendered value), coder order
    contribution: Fraction  # this range's share of Do * n

    def units(self) -> int:
        return self.end - self.start


def disagreement_drilldown(
    rnd: Round,
    codebook: Codebook,
    documents: Mapping[str, Document],
    domain_id: str,
) -> tuple[DisagreementRange, ...]:
    """Where a domain's observed disagreement comes from, largest share first.

    Covers exactly the units that contribute to cu-alpha's observed
    disagreement; the contributions sum to Do * n. Perfect agreement yields
    an empty sequence.
    """
    table = _domain_unit_values(rnd, codebook, documents, domain_id)
    if not table:
        raise InsufficientDataError(
            f"domain {domain_id!r} was not applied by any coder in round {rnd.id!r}"
        )
    raters = _submitted_raters(rnd)

    def unit_disagreement(cells: dict[str, Hashable]) -> Fraction:
        ratings = [cells[c] for c in raters]
        m = len(ratings)
        discordant = sum(
            1 for i, v in enumerate(ratings) for j, k in enumerate(ratings) if i != j and v != k
        )
        return Fraction(discordant, m - 1)

    runs: list[DisagreementRange] = []
    for doc_id in rnd.document_ids:
        units = sorted(u for (d, u) in table if d == doc_id)
        current: DisagreementRange | None = None
        for unit in units:
            cells = table[(doc_id, unit)]
            share = unit_disagreement(cells)
            if share == 0:
                current = None
                continue
            rendered = tuple((c, repr(cells[c]) if isinstance(cells[c], _NoCode) else str(cells[c])) for c in raters)
            if (
                current is not None
                and unit == current.end
                and rendered == current.values
            ):
                current = DisagreementRange(
                    doc_id, current.start, unit + 1, rendered, current.contribution + share
                )
                runs[-1] = current
            else:
                current = DisagreementRange(doc_id, unit, unit + 1, rendered, share)
                runs.append(current)
    runs.sort(key=lambda r: (-r.contribution, r.document_id, r.start))
    return tuple(runs)
