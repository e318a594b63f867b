from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest

from icaflow.cli import main

from conftest import TABLE5_IDS, TABLE5_RATINGS


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def project(tmp_path) -> Path:
    path = tmp_path / "study.json"
    assert run("-p", path, "init", "--coders", "R1,R2") == 0
    assert run("-p", path, "add-doc", "--id", "d1", "--length", "40") == 0
    assert run("-p", path, "add-doc", "--id", "d2", "--length", "40") == 0
    assert (
        run(
            "-p", path, "codebook", "edit",
            "--add-domain", "S1", "colors",
            "--add-domain", "S2", "types",
            "--add-code", "C11", "S1", "black",
            "--add-code", "C12", "S1", "white",
            "--add-code", "C21", "S2", "dress",
            "--timestamp", "2024-01-01T00:00:00",
        )
        == 0
    )
    return path


def write_assignments(tmp_path, name, items) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(items))
    return path


def submit(path, tmp_path, round_id, coder, items) -> int:
    file = write_assignments(tmp_path, f"{round_id}-{coder}.json", items)
    return run("-p", path, "submit", "--round", round_id, "--coder", coder, "--file", file)


SPAN_A = {"document_id": "d1", "start": 0, "end": 10}
SPAN_B = {"document_id": "d1", "start": 20, "end": 30}


class TestLoop:
    def test_full_open_iteration(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1,d2") == 0

        view_path = tmp_path / "view-r1.json"
        assert run("-p", project, "mask-export", "--round", "r1", "--coder", "R1", "--out", view_path) == 0
        assert json.loads(view_path.read_text())["quotations"] == []

        assert submit(project, tmp_path, "r1", "R1", [
            {**SPAN_A, "code_id": "C11"},
            {**SPAN_B, "code_id": "C21"},
        ]) == 0

        view_path = tmp_path / "view-r2.json"
        assert run("-p", project, "mask-export", "--round", "r1", "--coder", "R2", "--out", view_path) == 0
        raw = json.loads(view_path.read_text())
        assert len(raw["quotations"]) == 2
        assert "code_id" not in json.dumps(raw["quotations"])

        assert submit(project, tmp_path, "r1", "R2", [
            {**SPAN_A, "code_id": "C11"},
            {**SPAN_B, "code_id": "C21"},
        ]) == 0

        assert run("-p", project, "validate", "--round", "r1") == 0
        assert run("-p", project, "alpha", "--round", "r1") == 0
        capsys.readouterr()
        assert run("-p", project, "gate", "--round", "r1") == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "0.80" in out

    def test_failing_gate_exits_one_and_cites_threshold(self, project, tmp_path, capsys):
        # R2 applies a different domain on the first span and skips the second:
        # domain-application disagreement is what the global gate measures
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [
            {**SPAN_A, "code_id": "C11"},
            {**SPAN_B, "code_id": "C21"},
        ]) == 0
        assert submit(project, tmp_path, "r1", "R2", [
            {**SPAN_A, "code_id": "C21"},
        ]) == 0
        capsys.readouterr()
        code = run("-p", project, "gate", "--round", "r1")
        out = capsys.readouterr().out
        assert code == 1
        assert "0.80" in out and "FAIL" in out

        # the meeting loop: diary entry, close, then the next iteration opens
        assert run(
            "-p", project, "diary", "add",
            "--refs", "S1",
            "--description", "C11 vs C12 confusion",
            "--resolution", "clarified definitions",
            "--timestamp", "2024-01-01T00:00:00",
        ) == 0
        assert run("-p", project, "meeting", "close") == 0
        assert run("-p", project, "round", "new", "--id", "r2", "--documents", "d2") == 0

    def test_submit_out_of_order_names_expected_coder(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        code = submit(project, tmp_path, "r1", "R2", [])
        err = capsys.readouterr().err
        assert code == 2
        assert "R1" in err

    def test_submit_rejects_mutual_exclusiveness_conflicts(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        code = submit(project, tmp_path, "r1", "R1", [
            {"document_id": "d1", "start": 0, "end": 10, "code_id": "C11"},
            {"document_id": "d1", "start": 5, "end": 15, "code_id": "C12"},
        ])
        err = capsys.readouterr().err
        assert code == 2
        assert "mutual exclusiveness" in err

    def test_round_documents_cannot_be_reused(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [{**SPAN_A, "code_id": "C11"}]) == 0
        assert submit(project, tmp_path, "r1", "R2", [{**SPAN_A, "code_id": "C11"}]) == 0
        assert run("-p", project, "gate", "--round", "r1") == 0
        assert run("-p", project, "select-core", "--domains", "S1", "--codes", "C11,C12",
                   "--timestamp", "2024-01-01T00:00:00") == 0
        code = run("-p", project, "round", "new", "--id", "r2", "--documents", "d1")
        assert code == 2
        assert "earlier iteration" in capsys.readouterr().err


class TestStandaloneCommands:
    def write_table5(self, tmp_path) -> Path:
        lines = ["item,R1,R2"]
        for item, value in zip(TABLE5_IDS, TABLE5_RATINGS):
            lines.append(f"{item},{value},{value}")
        path = tmp_path / "screening.csv"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_alpha_binary_prints_one(self, tmp_path, capsys):
        csv_path = self.write_table5(tmp_path)
        assert run("alpha-binary", "--csv", csv_path) == 0
        assert "1.00" in capsys.readouterr().out

    def test_alpha_binary_csv_format(self, tmp_path, capsys):
        csv_path = self.write_table5(tmp_path)
        assert run("alpha-binary", "--csv", csv_path, "--format", "csv") == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "alpha,observed_disagreement,expected_disagreement,pairable_items"
        assert out.splitlines()[1].startswith("1.0,0,")

    def test_schedule_matches_reference_run(self, capsys):
        assert run("schedule", "--total", "168", "--dual-batch", "14",
                   "--control-interval", "46", "--control-batch", "8",
                   "--format", "csv") == 0
        rows = capsys.readouterr().out.strip().splitlines()[1:]
        kinds = [r.split(",")[1] for r in rows]
        sizes = [int(r.split(",")[5]) for r in rows]
        assert kinds == ["dual", "split", "dual", "split", "dual", "split"]
        assert sizes == [14, 46, 8, 46, 8, 46]

    def test_synth_emits_gateable_project(self, tmp_path, capsys):
        out = tmp_path / "synthetic.json"
        assert run("synth", "--out", out, "--seed", "11", "--p", "0.0") == 0
        assert run("-p", out, "status") == 0
        capsys.readouterr()
        assert run("-p", out, "gate", "--round", "synth-11") == 0
        assert "PASS" in capsys.readouterr().out

    def test_usage_error_exit_three(self, capsys):
        assert run("alpha") == 3  # missing required --round and project
        assert run("no-such-command") == 3


class TestReplaySafety:
    def test_read_only_commands_leave_the_file_alone(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [{**SPAN_A, "code_id": "C11"}]) == 0
        assert submit(project, tmp_path, "r1", "R2", [{**SPAN_A, "code_id": "C12"}]) == 0

        def digest() -> str:
            return hashlib.sha256(Path(project).read_bytes()).hexdigest()

        before = digest()
        run("-p", project, "status")
        run("-p", project, "alpha", "--round", "r1")
        run("-p", project, "alpha", "--round", "r1", "--domain", "S1")
        run("-p", project, "validate", "--round", "r1")
        run("-p", project, "drilldown", "--round", "r1", "--domain", "S1")
        run("-p", project, "candidates")
        run("-p", project, "codebook", "show")
        capsys.readouterr()
        assert digest() == before

    def test_drilldown_output(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [{**SPAN_A, "code_id": "C11"}]) == 0
        assert submit(project, tmp_path, "r1", "R2", [{**SPAN_A, "code_id": "C12"}]) == 0
        capsys.readouterr()
        assert run("-p", project, "drilldown", "--round", "r1", "--domain", "S1",
                   "--format", "csv") == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert rows[0] == "document,start,end,contribution,values"
        assert rows[1].startswith("d1,0,10,")
        assert "R1=C11" in rows[1] and "R2=C12" in rows[1]

    def test_alpha_csv_format(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [{**SPAN_A, "code_id": "C11"}]) == 0
        assert submit(project, tmp_path, "r1", "R2", [{**SPAN_A, "code_id": "C11"}]) == 0
        capsys.readouterr()
        assert run("-p", project, "alpha", "--round", "r1", "--format", "csv") == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert rows[0] == "coefficient,label,alpha,band,below_threshold,insufficient"
        assert any(r.startswith("Cu,") for r in rows)

    def test_token_unit_project(self, tmp_path, capsys):
        path = tmp_path / "tokens.json"
        assert run("-p", path, "init", "--coders", "R1,R2", "--unit", "token") == 0
        assert run("-p", path, "add-doc", "--id", "d1", "--text", "alpha beta gamma") == 0
        out = capsys.readouterr().out
        assert "3 token units" in out

    def test_candidates_output(self, project, tmp_path, capsys):
        assert run("-p", project, "round", "new", "--id", "r1", "--documents", "d1") == 0
        assert submit(project, tmp_path, "r1", "R1", [
            {**SPAN_A, "code_id": "C11"},
            {**SPAN_A, "code_id": "C21"},
        ]) == 0
        assert submit(project, tmp_path, "r1", "R2", [{**SPAN_A, "code_id": "C11"}]) == 0
        capsys.readouterr()
        assert run("-p", project, "candidates") == 0
        out = capsys.readouterr().out
        assert "C11: grounded in 2 quotations, related to 1 codes 1 times" in out
