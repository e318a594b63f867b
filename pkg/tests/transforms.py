"""Structure-preserving transformations of coded rounds for invariance tests.

Each transform returns (round, codebook, documents) expected to leave every
alpha variant unchanged: bijective renaming of coders, codes, or domains;
permutation/concatenation of documents with spans shifted; and k-fold
replication of every atomic unit.
"""

from __future__ import annotations

from dataclasses import replace

from icaflow import Assignment, Code, Codebook, Document, Quotation, Round, SemanticDomain


def _rebuild_round(rnd: Round, assignments, document_ids=None, coder_ids=None) -> Round:
    return Round(
        id=rnd.id,
        phase=rnd.phase,
        codebook_version=rnd.codebook_version,
        document_ids=document_ids or rnd.document_ids,
        coder_ids=coder_ids or rnd.coder_ids,
        assignments=tuple(assignments),
        submitted=coder_ids or rnd.submitted,
    )


def rename_coders(rnd: Round, codebook: Codebook, documents: dict):
    mapping = {c: f"coder-{i}" for i, c in enumerate(reversed(rnd.coder_ids))}
    new_order = tuple(mapping[c] for c in rnd.coder_ids)
    assignments = [
        replace(a, coder_id=mapping[a.coder_id]) for a in rnd.assignments
    ]
    return _rebuild_round(rnd, assignments, coder_ids=new_order), codebook, documents


def permute_codes_within_domains(rnd: Round, codebook: Codebook, documents: dict):
    """Reverse each domain's code list; an isomorphic relabeling of the data."""
    mapping = {}
    for domain in codebook.domains:
        for old, new in zip(domain.code_ids, reversed(domain.code_ids)):
            mapping[old] = new
    domains = tuple(
        SemanticDomain(d.id, d.label, tuple(reversed(d.code_ids)))
        for d in codebook.domains
    )
    codes = tuple(
        Code(id=c.id, label=c.label, domain_id=c.domain_id) for c in codebook.codes
    )
    new_codebook = Codebook(
        version=codebook.version,
        domains=domains,
        codes=codes,
        changelog=codebook.changelog,
    )
    assignments = [replace(a, code_id=mapping[a.code_id]) for a in rnd.assignments]
    return _rebuild_round(rnd, assignments), new_codebook, documents


def rename_domains(rnd: Round, codebook: Codebook, documents: dict):
    mapping = {d.id: f"domain-{i}" for i, d in enumerate(reversed(codebook.domains))}
    domains = tuple(
        SemanticDomain(mapping[d.id], d.label, d.code_ids) for d in codebook.domains
    )
    codes = tuple(
        Code(id=c.id, label=c.label, domain_id=mapping[c.domain_id])
        for c in codebook.codes
    )
    new_codebook = Codebook(
        version=codebook.version,
        domains=domains,
        codes=codes,
        changelog=codebook.changelog,
    )
    return rnd, new_codebook, documents


def concatenate_documents(rnd: Round, codebook: Codebook, documents: dict):
    """Glue all documents into one continuum, shifting spans accordingly."""
    offsets = {}
    cursor = 0
    for doc_id in rnd.document_ids:
        offsets[doc_id] = cursor
        cursor += documents[doc_id].length
    merged = {"all": Document("all", cursor)}
    assignments = [
        Assignment(
            coder_id=a.coder_id,
            quotation=Quotation(
                "all",
                a.quotation.start + offsets[a.quotation.document_id],
                a.quotation.end + offsets[a.quotation.document_id],
            ),
            code_id=a.code_id,
            round_id=a.round_id,
        )
        for a in rnd.assignments
    ]
    return _rebuild_round(rnd, assignments, document_ids=("all",)), codebook, merged


def permute_documents(rnd: Round, codebook: Codebook, documents: dict):
    return (
        _rebuild_round(
            rnd, rnd.assignments, document_ids=tuple(reversed(rnd.document_ids))
        ),
        codebook,
        documents,
    )


def replicate_units(k: int):
    """Every atomic unit becomes k units; Do and De are ratios, so alpha holds."""

    def transform(rnd: Round, codebook: Codebook, documents: dict):
        scaled_docs = {
            doc_id: Document(doc_id, doc.length * k, None)
            for doc_id, doc in documents.items()
        }
        assignments = [
            replace(
                a,
                quotation=Quotation(
                    a.quotation.document_id, a.quotation.start * k, a.quotation.end * k
                ),
            )
            for a in rnd.assignments
        ]
        return _rebuild_round(rnd, assignments), codebook, scaled_docs

    return transform


ALL_TRANSFORMS = (
    ("coder renaming", rename_coders),
    ("code permutation within domains", permute_codes_within_domains),
    ("domain renaming", rename_domains),
    ("document permutation", permute_documents),
    ("document concatenation", concatenate_documents),
    ("3-fold unit replication", replicate_units(3)),
)


def alpha_profile(rnd: Round, codebook: Codebook, documents: dict) -> dict:
    """Every variant's value, keyed by domain position (id-independent)."""
    from icaflow import InsufficientDataError, cu_alpha, cu_alpha_global

    profile = {}
    for position, domain in enumerate(codebook.domains):
        try:
            profile[position] = cu_alpha(rnd, codebook, documents, domain.id).alpha
        except InsufficientDataError:
            profile[position] = None
    profile["global"] = cu_alpha_global(rnd, codebook, documents).alpha
    return profile
