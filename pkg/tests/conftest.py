from __future__ import annotations

import pytest

from icaflow import Code, Codebook, Document, Quotation, Round, SemanticDomain


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_c" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{name}: {verdict}")


def make_codebook(spec: dict[str, tuple[str, ...]], version_note: str = "") -> Codebook:
    """{'S1': ('C11', 'C12'), ...} -> a version-1 codebook."""
    domains = [
        SemanticDomain(id=domain_id, label=f"domain {domain_id}", code_ids=code_ids)
        for domain_id, code_ids in spec.items()
    ]
    codes = [
        Code(id=code_id, label=f"code {code_id}", domain_id=domain_id)
        for domain_id, code_ids in spec.items()
        for code_id in code_ids
    ]
    return Codebook.initial(domains, codes, note=version_note)


@pytest.fixture
def fig7():
    """Two coders, four quotations over a 40-unit document, three domains.

    Coder c1: Q1=C11, Q2={C21,C11}, Q3={C11,C31}, Q4=C31.
    Coder c2: Q1=C12, Q2=C21, Q3={C11,C31}, Q4=C12.
    """
    codebook = make_codebook(
        {"S1": ("C11", "C12"), "S2": ("C21", "C22"), "S3": ("C31", "C32")}
    )
    documents = {"d1": Document("d1", 40)}
    rnd = Round(
        id="r1",
        phase="open",
        codebook_version=1,
        document_ids=("d1",),
        coder_ids=("c1", "c2"),
    )
    coder1 = [
        (Quotation("d1", 0, 10), "C11"),
        (Quotation("d1", 10, 20), "C21"),
        (Quotation("d1", 10, 20), "C11"),
        (Quotation("d1", 20, 30), "C11"),
        (Quotation("d1", 20, 30), "C31"),
        (Quotation("d1", 30, 40), "C31"),
    ]
    coder2 = [
        (Quotation("d1", 0, 10), "C12"),
        (Quotation("d1", 10, 20), "C21"),
        (Quotation("d1", 20, 30), "C11"),
        (Quotation("d1", 20, 30), "C31"),
        (Quotation("d1", 30, 40), "C12"),
    ]
    rnd = rnd.with_submission("c1", coder1).with_submission("c2", coder2)
    return rnd, codebook, documents


TABLE5_IDS = tuple(str(i) for i in range(1, 15))
TABLE5_RATINGS = ("Y", "N", "N", "N", "Y", "N", "Y", "Y", "N", "N", "Y", "Y", "Y", "N")


@pytest.fixture
def screening_table():
    """14 items, 2 raters, identical include/exclude decisions."""
    from icaflow import ReliabilityMatrix

    rows = {item: (value, value) for item, value in zip(TABLE5_IDS, TABLE5_RATINGS)}
    return ReliabilityMatrix.from_rows(("R1", "R2"), rows)
