import json
import shutil
from pathlib import Path

import jsonschema
import pytest

from dsx.cli import main
from dsx.codegen import SCHEMAS_DIR

from conftest import FIXTURES


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def copy_fixture(name: str, workdir: Path, as_name: str | None = None) -> Path:
    destination = workdir / (as_name or Path(name).name)
    shutil.copy(FIXTURES / name, destination)
    return destination


class TestCheck:
    def test_valid_file_exits_zero(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["check", str(path)]) == 0
        assert capsys.readouterr().out == ""

    def test_error_file_exits_one_with_text_line(self, workdir, capsys):
        path = copy_fixture("invalid/e203-date-order.dsx", workdir)
        assert main(["check", str(path)]) == 1
        out = capsys.readouterr().out
        assert out.count("\n") == 1
        assert out.startswith(f"{path}:")
        assert "error[E203]" in out

    def test_empty_glob_exits_two(self, workdir, capsys):
        assert main(["check", "*.dsx"]) == 2
        assert "no input files" in capsys.readouterr().err

    def test_unreadable_file_exits_two(self, workdir, capsys):
        assert main(["check", "missing.dsx"]) == 2
        assert "missing.dsx" in capsys.readouterr().err

    def test_glob_expansion(self, workdir):
        copy_fixture("production-machine.dsx", workdir)
        copy_fixture("machine-opcua.dsx", workdir)
        assert main(["check", "*.dsx"]) == 0

    def test_fail_on_warning(self, workdir):
        path = copy_fixture("invalid/w204-expired.dsx", workdir)
        assert main(["check", str(path)]) == 0
        assert main(["check", "--fail-on-warning", str(path)]) == 1

    def test_json_report_matches_schema(self, workdir, capsys):
        path = copy_fixture("invalid/e202-bad-bpn.dsx", workdir)
        assert main(["check", "--report", "json", str(path)]) == 1
        report = json.loads(capsys.readouterr().out)
        schema = json.loads((SCHEMAS_DIR / "diagnostics-report.schema.json").read_text())
        jsonschema.validate(report, schema)
        assert [d["code"] for d in report["diagnostics"]] == ["E202"]
        assert report["diagnostics"][0]["severity"] == "error"

    def test_batch_aggregates_worst_exit(self, workdir):
        good = copy_fixture("production-machine.dsx", workdir)
        bad = copy_fixture("invalid/e203-date-order.dsx", workdir)
        assert main(["check", str(good), str(bad)]) == 1
        assert main(["check", str(good), str(bad), "missing.dsx"]) == 2


class TestGen:
    def test_edc_and_idlink_targets_write_five_files(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        code = main(["gen", str(path), "--out", "out", "--targets", "edc,idlink-aas"])
        assert code == 0
        written = sorted(p.relative_to(workdir).as_posix() for p in (workdir / "out").rglob("*") if p.is_file())
        assert written == [
            "out/production-machine/edc/asset.json",
            "out/production-machine/edc/contract.json",
            "out/production-machine/edc/policy.json",
            "out/production-machine/idlink-aas/aas-security.json",
            "out/production-machine/idlink-aas/idlink.txt",
        ]
        manifest = capsys.readouterr().out
        assert manifest.count("wrote ") == 5

    def test_mixed_batch_writes_valid_only(self, workdir):
        good = copy_fixture("sensor-idlink.dsx", workdir)
        bad = copy_fixture("invalid/e202-bad-bpn.dsx", workdir)
        code = main(["gen", str(good), str(bad), "--out", "out", "--targets", "idlink-aas"])
        assert code == 1
        written = list((workdir / "out").rglob("*.json")) + list((workdir / "out").rglob("*.txt"))
        assert {p.parts[-3] for p in written} == {"flow-sensor"}

    def test_target_mismatch_exits_one(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["gen", str(path), "--out", "out", "--targets", "opcua"]) == 1
        assert "usage mismatch" in capsys.readouterr().err
        assert not (workdir / "out").exists()

    def test_missing_out_flag_is_usage_error(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["gen", str(path), "--targets", "edc"]) == 2

    def test_unknown_target_is_usage_error(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["gen", str(path), "--out", "out", "--targets", "nope"]) == 2

    def test_empty_target_list_is_usage_error(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["gen", str(path), "--out", "out", "--targets", ","]) == 2

    def test_written_files_are_deterministic(self, workdir):
        path = copy_fixture("production-machine.dsx", workdir)
        main(["gen", str(path), "--out", "a", "--targets", "edc"])
        main(["gen", str(path), "--out", "b", "--targets", "edc"])
        for first in (workdir / "a").rglob("*.json"):
            second = workdir / "b" / first.relative_to(workdir / "a")
            assert first.read_bytes() == second.read_bytes()

    def test_json_report_lists_written_files(self, workdir, capsys):
        path = copy_fixture("sensor-idlink.dsx", workdir)
        code = main(
            ["gen", str(path), "--out", "out", "--targets", "idlink-aas", "--report", "json"]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["written"]) == 2
        schema = json.loads((SCHEMAS_DIR / "diagnostics-report.schema.json").read_text())
        jsonschema.validate(report, schema)


class TestFmt:
    def test_canonical_file_passes_check(self, workdir):
        path = copy_fixture("production-machine.dsx", workdir)
        assert main(["fmt", "--check", str(path)]) == 0

    def test_check_mode_never_writes(self, workdir):
        path = copy_fixture("production-machine.dsx", workdir)
        noisy = path.read_text().replace("  discovery {", "  discovery   {")
        path.write_text(noisy)
        assert main(["fmt", "--check", str(path)]) == 1
        assert path.read_text() == noisy

    def test_reformat_then_noop(self, workdir, capsys):
        path = copy_fixture("production-machine.dsx", workdir)
        original = path.read_text()
        # Perturb formatting without changing meaning: collapse to one line
        # chunks by stripping indentation.
        path.write_text("\n".join(line.strip() for line in original.splitlines()) + "\n")
        assert main(["fmt", str(path)]) == 0
        assert "reformatted" in capsys.readouterr().out
        first_pass = path.read_text()
        assert first_pass == original
        assert main(["fmt", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert path.read_text() == first_pass

    def test_broken_file_untouched(self, workdir, capsys):
        path = workdir / "broken.dsx"
        path.write_text('connector "x" { discovery {')
        assert main(["fmt", str(path)]) == 1
        assert path.read_text() == 'connector "x" { discovery {'
        assert "error[" in capsys.readouterr().out

    def test_reordered_sections_are_canonicalized(self, workdir):
        path = copy_fixture("sensor-idlink.dsx", workdir)
        original = path.read_text()
        discovery = original[original.index("  discovery") : original.index("  metadata")]
        metadata = original[original.index("  metadata") : original.index("  usage")]
        path.write_text(original.replace(discovery + metadata, metadata + discovery))
        assert main(["fmt", str(path)]) == 0
        assert path.read_text() == original
        assert main(["fmt", "--check", str(path)]) == 0

    def test_crlf_files_are_not_canonical(self, workdir):
        path = copy_fixture("sensor-idlink.dsx", workdir)
        lf_bytes = path.read_bytes()
        path.write_bytes(lf_bytes.replace(b"\n", b"\r\n"))
        assert main(["fmt", "--check", str(path)]) == 1
        assert main(["fmt", str(path)]) == 0
        assert path.read_bytes() == lf_bytes


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        assert main([]) == 2

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["frobnicate", "x.dsx"]) == 2
