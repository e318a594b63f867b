"""Groundedness and density of codes; core-category candidate ranking.

Groundedness counts the quotations a code labels; density counts the code's
co-occurrences, i.e. the same coder applying another code to an overlapping
or identical span. Both feed the ranking that supports (but never replaces)
the human selection of core categories.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .errors import IntegrityError, ValidationError
from .model import Codebook, Round

# One concrete application of a code: (coder, document, start, end, code).
_Labeling = tuple[str, str, int, int, str]


def _labelings(rounds: Sequence[Round]) -> set[_Labeling]:
    return {
        (
            a.coder_id,
            a.quotation.document_id,
            a.quotation.start,
            a.quotation.end,
            a.code_id,
        )
        for rnd in rounds
        for a in rnd.assignments
    }


def _overlap(a: _Labeling, b: _Labeling) -> bool:
    return a[0] == b[0] and a[1] == b[1] and max(a[2], b[2]) < min(a[3], b[3])


@dataclass(frozen=True, slots=True)
class CodeStats:
    code_id: str
    groundedness: int
    density_partners: int  # distinct co-occurring codes
    density_links: int  # total co-occurrence incidences

    def __post_init__(self) -> None:
        if min(self.groundedness, self.density_partners, self.density_links) < 0:
            raise ValidationError("code statistics cannot be negative")
        if self.density_partners > self.density_links:
            raise ValidationError("partners cannot exceed links")


@dataclass(frozen=True, slots=True)
class DomainStats:
    domain_id: str
    groundedness: int  # sum over the domain's codes
    density_links: int  # sum over the domain's codes


@dataclass(frozen=True, slots=True)
class CandidateRanking:
    codes: tuple[CodeStats, ...]  # ranking order
    domains: tuple[DomainStats, ...]  # codebook order


def groundedness(rounds: Sequence[Round], codebook: Codebook, code_id: str) -> int:
    """Distinct (coder, document, span) quotations carrying the code.

    The same span coded by two coders counts twice; per-coder quotations are
    distinct observations.
    """
    codebook.code(code_id)
    return sum(1 for lab in _labelings(rounds) if lab[4] == code_id)


def density(
    rounds: Sequence[Round], codebook: Codebook, code_id: str
) -> tuple[int, int]:
    """(partners, links): distinct co-occurring codes and total incidences.

    Codes co-occur when the same coder assigned them to overlapping or
    identical spans; cross-coder overlap is disagreement, not co-occurrence.
    """
    codebook.code(code_id)
    labelings = _labelings(rounds)
    mine = [lab for lab in labelings if lab[4] == code_id]
    partners: set[str] = set()
    links = 0
    for lab in mine:
        for other in labelings:
            if other[4] == code_id:
                continue
            if _overlap(lab, other):
                partners.add(other[4])
                links += 1
    return len(partners), links


def code_stats(rounds: Sequence[Round], codebook: Codebook, code_id: str) -> CodeStats:
    partners, links = density(rounds, codebook, code_id)
    return CodeStats(
        code_id=code_id,
        groundedness=groundedness(rounds, codebook, code_id),
        density_partners=partners,
        density_links=links,
    )


def rank_candidates(rounds: Sequence[Round], codebook: Codebook) -> CandidateRanking:
    """All codes ordered by (groundedness desc, links desc, id asc).

    The order is total: ties beyond links break lexicographically on the
    code id, so equal inputs always rank identically.
    """
    stats = [code_stats(rounds, codebook, c.id) for c in codebook.codes]
    stats.sort(key=lambda s: (-s.groundedness, -s.density_links, s.code_id))
    domains = []
    for domain in codebook.domains:
        member = [s for s in stats if codebook.domain_of(s.code_id) == domain.id]
        domains.append(
            DomainStats(
                domain_id=domain.id,
                groundedness=sum(s.groundedness for s in member),
                density_links=sum(s.density_links for s in member),
            )
        )
    return CandidateRanking(codes=tuple(stats), domains=tuple(domains))


def select_core(
    codebook: Codebook,
    selected_domain_ids: Sequence[str],
    selected_code_ids: Sequence[str],
    timestamp: str = "",
    diary_ref: str | None = None,
) -> Codebook:
    """Apply a recorded human core-category selection.

    Returns a new codebook version containing only the selections; every
    selected code's domain must itself be selected.
    """
    if len(set(selected_domain_ids)) != len(tuple(selected_domain_ids)):
        raise IntegrityError("duplicate domain ids in selection")
    if len(set(selected_code_ids)) != len(tuple(selected_code_ids)):
        raise IntegrityError("duplicate code ids in selection")
    return codebook.restricted(
        selected_domain_ids, selected_code_ids, timestamp=timestamp, diary_ref=diary_ref
    )
