"""Command-line behaviour: exit codes, reports, filtering, fault injection."""
import json
import shutil
import subprocess
import sys

from wdvvsym.cli import main
from wdvvsym.fixtures_io import PACKAGED_FIXTURES


def run_cli(args, capsys):
    rc = main(args)
    out = capsys.readouterr().out
    return rc, out


def test_verify_lax_exit_zero(capsys):
    rc, out = run_cli(["verify", "lax"], capsys)
    assert rc == 0
    assert "0 fail" in out


def test_filter_restricts_checks(capsys):
    rc, out = run_cli(["verify", "pde", "--filter", "hodograph/scaling"], capsys)
    assert rc == 0
    body = [l for l in out.splitlines() if l.startswith("[")]
    assert body and all("hodograph/scaling" in l for l in body)


def test_json_report_stable_and_schema(tmp_path, capsys):
    p = tmp_path / "report.json"
    rc, _ = run_cli(["verify", "lax", "--json", str(p), "--quiet"], capsys)
    assert rc == 0
    payload = json.loads(p.read_text())
    assert payload["tool"] == "wdvvsym"
    assert payload["counts"]["fail"] == 0
    ids = [c["id"] for c in payload["checks"]]
    assert ids == sorted(ids)
    for c in payload["checks"]:
        assert set(c) == {"id", "tag", "status", "residual", "seconds"}
    rc2, _ = run_cli(["verify", "lax", "--json", str(tmp_path / "r2.json"), "--quiet"], capsys)
    a = json.loads(p.read_text())
    b = json.loads((tmp_path / "r2.json").read_text())
    stripped = lambda d: [{k: v for k, v in c.items() if k != "seconds"} for c in d["checks"]]
    assert stripped(a) == stripped(b)


def test_markdown_report(tmp_path, capsys):
    p = tmp_path / "report.md"
    rc, _ = run_cli(["verify", "wdvv", "--md", str(p), "--quiet"], capsys)
    assert rc == 0
    text = p.read_text()
    assert text.startswith("# Verification report")
    assert "| `wdvv/" in text


def test_fault_injection_names_cell(tmp_path, capsys):
    fix = tmp_path / "fixtures"
    shutil.copytree(PACKAGED_FIXTURES, fix)
    table = fix / "table_commutators.txt"
    text = table.read_text().replace("c_1_3 = v1", "c_1_3 = 2*v1")
    table.write_text(text)
    rc, out = run_cli(["--fixtures", str(fix), "verify", "algebra", "--quiet"], capsys)
    assert rc == 1
    assert "commutator/c_1_3" in out


def test_malformed_fixtures_exit_two(tmp_path, capsys):
    fix = tmp_path / "fixtures"
    shutil.copytree(PACKAGED_FIXTURES, fix)
    (fix / "generators.txt").write_text("[generator 1]\nxi = = =\n")
    rc, _ = run_cli(["--fixtures", str(fix), "verify", "algebra"], capsys)
    assert rc == 2


def test_env_var_override(tmp_path, capsys, monkeypatch):
    fix = tmp_path / "fixtures"
    shutil.copytree(PACKAGED_FIXTURES, fix)
    table = fix / "table_commutators.txt"
    table.write_text(table.read_text().replace("c_1_3 = v1", "c_1_3 = 2*v1"))
    monkeypatch.setenv("WDVVSYM_FIXTURES", str(fix))
    rc, out = run_cli(["verify", "algebra", "--quiet"], capsys)
    assert rc == 1 and "c_1_3" in out


def test_derive_determining_cli(capsys):
    rc, out = run_cli(["derive", "determining", "--degree", "1"], capsys)
    assert rc == 0
    assert "dimension 7" in out


def test_derive_f1_cli(capsys):
    rc, out = run_cli(["derive", "f1-polys"], capsys)
    assert rc == 0
    assert "degree-4" in out and "degree-8" in out


def test_report_format_md(capsys):
    rc, out = run_cli(["--filter", "lax/", "report", "--format", "md"], capsys)
    assert "| `lax/" in out


def test_console_script_help():
    proc = subprocess.run(
        [sys.executable, "-m", "wdvvsym.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "verify" in proc.stdout
