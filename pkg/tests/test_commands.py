import json
from datetime import date
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from satoCertify.models import CertificationRun
from satoseries import CATALOG_DIR


def run(name, *args):
    out = StringIO()
    call_command(name, *args, stdout=out)
    return out.getvalue()


@pytest.fixture
def catalog_copy(settings, tmp_path):
    """A private catalog directory holding series.txt with a wrong target."""
    root = tmp_path / "catalog"
    (root / "tables").mkdir(parents=True)
    text = (CATALOG_DIR / "series.txt").read_text(encoding="utf-8")
    start = text.index("[t2_n3]")
    end = text.index("[t2_n5]")
    (root / "series.txt").write_text(text[start:end].replace("target = 4/pi", "target = 3/pi"), encoding="utf-8")
    (root / "tables" / "jvals.txt").write_text(
        "i | j | 1728 | classical\ni*sqrt(2) | j | 8000 | classical\n", encoding="utf-8"
    )
    settings.SATO_CATALOG_DIR = root
    return root


@pytest.mark.django_db
def test_certify_single_series(sato_dirs):
    output = run("certify", "--series", "t2_n3", "--digits", "30")
    assert "id=t2_n3" in output
    assert "passed=true" in output
    assert "✅ Certification: 1 passed, 0 failed, 0 flagged, 0 errors" in output


@pytest.mark.django_db
def test_certify_accepts_catalog_alias(sato_dirs):
    output = run("certify", "--series", "sect4ex3", "--digits", "50")
    assert "id=t2_n3" in output
    assert "passed=true" in output
    assert "✅ Certification: 1 passed, 0 failed, 0 flagged, 0 errors" in output


@pytest.mark.django_db
def test_certify_unknown_series_exits_2(sato_dirs):
    with pytest.raises(CommandError) as exc:
        run("certify", "--series", "nope", "--digits", "30")
    assert exc.value.returncode == 2


@pytest.mark.django_db
def test_certify_rejects_low_digits(sato_dirs):
    with pytest.raises(CommandError) as exc:
        run("certify", "--series", "t2_n3", "--digits", "10")
    assert exc.value.returncode == 2


@pytest.mark.django_db
def test_failing_series_writes_report_then_exits_1(sato_dirs, catalog_copy, tmp_path):
    out = tmp_path / "out" / "certify.txt"
    with pytest.raises(CommandError) as exc:
        run("certify", "--series", "t2_n3", "--digits", "30", "--out", str(out))
    assert exc.value.returncode == 1
    report = out.read_text(encoding="utf-8")
    assert "failed=1" in report
    assert "exit_code=1" in report
    assert "passed=false" in report


@pytest.mark.django_db
def test_certify_record_and_csv(sato_dirs):
    output = run("certify", "--series", "t2_n3", "--digits", "30", "--record", "--report")
    run_row = CertificationRun.objects.get()
    assert run_row.command == "certify"
    assert run_row.target == "t2_n3"
    assert run_row.passed == 1
    assert run_row.ok
    assert "id=t2_n3" in run_row.report_output
    assert f"Recorded run #{run_row.pk}" in output
    csv_path = sato_dirs / "reports" / f"certify_{date.today().isoformat()}.csv"
    assert csv_path.read_text().splitlines()[0] == "metric,value"


@pytest.mark.django_db
def test_modpoly_missing_level_exits_2(sato_dirs):
    with pytest.raises(CommandError) as exc:
        run("modpoly", "--group", "t3", "--level", "7", "--order", "60")
    assert exc.value.returncode == 2


@pytest.mark.django_db
def test_modpoly_single_polynomial(sato_dirs):
    output = run("modpoly", "--group", "G02", "--level", "3", "--order", "60")
    assert "id=Phi_3[t2]" in output
    assert "Modular Polynomial: 1 passed" in output


@pytest.mark.django_db
def test_verify_identities_json(sato_dirs, tmp_path):
    out = tmp_path / "identities.json"
    run("verify_identities", "--name", "jacobi", "--order", "60", "--digits", "30", "--json", "--out", str(out))
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["command"] == "verify_identities"
    assert data["exit_code"] == 0
    assert [r["name"] for r in data["records"]] == ["jacobi"]
    assert data["records"][0]["passed"] is True


@pytest.mark.django_db
def test_tables_against_private_catalog(sato_dirs, catalog_copy):
    output = run("tables", "--name", "jvals", "--digits", "40")
    assert "id=jvals:j(i)" in output
    assert "Value Table: 2 passed, 0 failed" in output


@pytest.mark.django_db
def test_tables_missing_file_exits_2(sato_dirs, catalog_copy):
    with pytest.raises(CommandError) as exc:
        run("tables", "--name", "etavals", "--digits", "40")
    assert exc.value.returncode == 2
