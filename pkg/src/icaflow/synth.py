"""Synthetic multi-coder rounds with a controlled perturbation rate.

A ground-truth coding is laid out on a slot grid (one quotation slot per
document region, with margins wide enough that boundary shifts can never
collide), then each coder after the first receives an independently
perturbed copy: swap the code within its domain, drop the assignment, or
shift the span. The first coder carries the ground truth unchanged, so the
perturbation rate p directly controls how far the round drifts from perfect
agreement: p = 0 reproduces identical coders and alpha 1.0 everywhere.

Perturbation draws are nested across rates: for a fixed seed, the set of
perturbed assignments at rate p is a subset of the set at any p' > p, which
makes degradation monotone per seed, not just on average.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import GeometryError, ValidationError
from .model import (
    Assignment,
    Code,
    Codebook,
    Document,
    PHASE_OPEN,
    Quotation,
    Round,
    SemanticDomain,
)


@dataclass(frozen=True, slots=True)
class PerturbationMix:
    """Relative weights of the three perturbation kinds."""

    swap_code: float = 1.0
    drop_assignment: float = 0.0
    boundary_shift: float = 0.0
    shift_units: int = 2

    def __post_init__(self) -> None:
        weights = (self.swap_code, self.drop_assignment, self.boundary_shift)
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValidationError("perturbation weights must be >= 0 and not all zero")
        if self.shift_units < 0:
            raise ValidationError("shift_units must be >= 0")


@dataclass(frozen=True, slots=True)
class SynthConfig:
    seed: int = 0
    coders: int = 2
    documents: int = 2
    doc_length: int = 60
    domains: int = 3
    codes_per_domain: int = 2
    quotations_per_document: int = 4
    quotation_density: float = 0.8  # chance a (slot, domain) carries a code
    perturbation_rate: float = 0.0
    mix: PerturbationMix = field(default_factory=PerturbationMix)

    def __post_init__(self) -> None:
        if self.coders < 2:
            raise ValidationError("at least 2 coders required")
        if min(self.documents, self.doc_length, self.domains, self.codes_per_domain) < 1:
            raise ValidationError("documents, lengths and codebook sizes must be >= 1")
        if self.quotations_per_document < 1:
            raise ValidationError("at least one quotation slot per document")
        if not 0 <= self.quotation_density <= 1:
            raise ValidationError("quotation_density must lie in [0, 1]")
        if not 0 <= self.perturbation_rate <= 1:
            raise ValidationError("perturbation_rate must lie in [0, 1]")


@dataclass(frozen=True, slots=True)
class SynthRound:
    """A fully submitted synthetic round plus its generation context."""

    round: Round
    codebook: Codebook
    documents: tuple[Document, ...]
    ground_truth: tuple[Assignment, ...]  # the first coder's (unperturbed) coding

    def documents_by_id(self) -> Mapping[str, Document]:
        return {d.id: d for d in self.documents}


def _build_codebook(config: SynthConfig) -> Codebook:
    domains = []
    codes = []
    for i in range(1, config.domains + 1):
        code_ids = tuple(f"S{i}C{j}" for j in range(1, config.codes_per_domain + 1))
        domains.append(SemanticDomain(id=f"S{i}", label=f"domain {i}", code_ids=code_ids))
        codes.extend(
            Code(id=cid, label=f"code {cid}", domain_id=f"S{i}") for cid in code_ids
        )
    return Codebook.initial(domains, codes, note="synthetic")


def _slot_spans(config: SynthConfig) -> list[tuple[int, int]]:
    """Quotation spans, one per slot, with shift-safe margins."""
    slots = config.quotations_per_document
    width = config.doc_length // slots
    margin = config.mix.shift_units
    if width - 2 * margin < 1:
        raise GeometryError(
            f"cannot fit {slots} quotations with shift margin {margin} in "
            f"documents of length {config.doc_length}"
        )
    return [(k * width + margin, (k + 1) * width - margin) for k in range(slots)]


def generate_round(config: SynthConfig) -> SynthRound:
    """Deterministic for a fixed config; the round id encodes the seed."""
    codebook = _build_codebook(config)
    documents = tuple(
        Document(id=f"d{i}", length=config.doc_length)
        for i in range(1, config.documents + 1)
    )
    spans = _slot_spans(config)
    round_id = f"synth-{config.seed}"
    coders = tuple(f"R{i}" for i in range(1, config.coders + 1))

    truth_rng = random.Random(f"{config.seed}:truth")
    truth: list[tuple[Quotation, str]] = []
    for doc in documents:
        for start, end in spans:
            for domain in codebook.domains:
                if truth_rng.random() < config.quotation_density:
                    code_id = truth_rng.choice(domain.code_ids)
                    truth.append((Quotation(doc.id, start, end), code_id))

    rnd = Round(
        id=round_id,
        phase=PHASE_OPEN,
        codebook_version=codebook.version,
        document_ids=tuple(d.id for d in documents),
        coder_ids=coders,
        assignments=(),
        submitted=(),
    )
    mix = config.mix
    kinds = ("swap", "drop", "shift")
    weights = (mix.swap_code, mix.drop_assignment, mix.boundary_shift)
    for index, coder in enumerate(coders):
        if index == 0:
            rnd = rnd.with_submission(coder, truth)
            continue
        rate_rng = random.Random(f"{config.seed}:{coder}:rate")
        labeled: list[tuple[Quotation, str]] = []
        for t, (quotation, code_id) in enumerate(truth):
            if rate_rng.random() >= config.perturbation_rate:
                labeled.append((quotation, code_id))
                continue
            payload_rng = random.Random(f"{config.seed}:{coder}:{t}")
            kind = payload_rng.choices(kinds, weights=weights)[0]
            if kind == "drop":
                continue
            if kind == "swap":
                domain = codebook.domain(codebook.domain_of(code_id))
                others = [c for c in domain.code_ids if c != code_id]
                # single-code domains leave nothing to swap to
                labeled.append(
                    (quotation, payload_rng.choice(others) if others else code_id)
                )
                continue
            delta = payload_rng.randint(-mix.shift_units, mix.shift_units)
            labeled.append(
                (
                    Quotation(
                        quotation.document_id,
                        quotation.start + delta,
                        quotation.end + delta,
                    ),
                    code_id,
                )
            )
        rnd = rnd.with_submission(coder, labeled)

    return SynthRound(
        round=rnd,
        codebook=codebook,
        documents=documents,
        ground_truth=rnd.assignments_of(coders[0]),
    )
