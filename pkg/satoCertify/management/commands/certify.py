"""
───────────────────────────────────────────────────────────────────────────────
certify.py
───────────────────────────────────────────────────────────────────────────────
Purpose:
    Sum cataloged Ramanujan-Sato series to the requested number of digits and
    compare each sum with its closed-form target.  Every entry is also rebuilt
    from machinery-derived constants; disagreements with the printed display
    are flagged in the report but do not fail the run.

    Typical use:
        python manage.py certify --series t2_n3 --digits 50
        python manage.py certify --series sect4ex3 --digits 50    # alias of t2_n3
        python manage.py certify --series all --jobs 4 --out archive/reports/all.txt

Exit codes:
    0  every selected series matched its target
    1  at least one series fell short (report is still written)
    2  unknown series id or invalid flags
───────────────────────────────────────────────────────────────────────────────
"""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from satoseries.exceptions import SatoSeriesError
from satoseries.runners import CertifyRunner

from ...utils.reports import check_run_config, finish_command


def parse_ids(values):
    ids = [part.strip() for value in values for part in value.split(",") if part.strip()]
    if not ids or "all" in ids:
        return "all"
    return ids


class Command(BaseCommand):
    help = "Certify cataloged Ramanujan-Sato series against their closed-form targets."

    def add_arguments(self, parser):
        parser.add_argument("--series", nargs="+", default=["all"],
                            help="Catalog ids (space or comma separated) or 'all'")
        parser.add_argument("--digits", type=int, default=settings.SATO_DEFAULT_DIGITS,
                            help="Digits of agreement required (default: SATO_DEFAULT_DIGITS)")
        parser.add_argument("--jobs", type=int, default=settings.SATO_JOBS,
                            help="Worker processes; report order stays in catalog order")
        parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
        parser.add_argument("--json", action="store_true", help="JSON report instead of key=value blocks")
        parser.add_argument("--record", action="store_true", help="Store the run as a CertificationRun")
        parser.add_argument("--report", action="store_true",
                            help="Also write a metric CSV into SATO_REPORT_DIR")

    def handle(self, *args, **opts):
        digits = opts["digits"]
        check_run_config(digits=digits, jobs=opts["jobs"])
        ids = parse_ids(opts["series"])

        runner = CertifyRunner(
            log_to_console=opts.get("verbosity", 1) > 1,
            report=opts["report"],
            report_dir=settings.SATO_REPORT_DIR,
            log_dir=settings.SATO_LOG_DIR,
        )
        try:
            runner.run(
                ids,
                digits,
                jobs=opts["jobs"],
                guard=settings.SATO_GUARD_DIGITS,
                recheck_delta=settings.SATO_RECHECK_DELTA,
                catalog_dir=settings.SATO_CATALOG_DIR,
            )
        except SatoSeriesError as exc:
            runner.close()
            raise CommandError(f"❌ {exc}", returncode=2)

        target = "all" if ids == "all" else ",".join(ids)
        finish_command(self, runner, opts, target=target, digits=digits)
