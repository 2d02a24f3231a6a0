"""Verify the special-value tables: closed forms against direct evaluation."""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from satoseries.constexpr import TABLE_NAMES
from satoseries.exceptions import SatoSeriesError
from satoseries.runners import TableRunner

from ...utils.reports import check_run_config, finish_command


class Command(BaseCommand):
    help = "Verify special-value tables (j, eta, E_k, E_2,N and worked examples)."

    def add_arguments(self, parser):
        parser.add_argument("--name", nargs="+", choices=TABLE_NAMES, help="Tables to verify (default: all)")
        parser.add_argument("--digits", type=int, default=max(40, settings.SATO_DEFAULT_DIGITS),
                            help="Working digits; tables need at least 40")
        parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
        parser.add_argument("--json", action="store_true", help="JSON report instead of key=value blocks")
        parser.add_argument("--record", action="store_true", help="Store the run as a CertificationRun")
        parser.add_argument("--report", action="store_true",
                            help="Also write a metric CSV into SATO_REPORT_DIR")

    def handle(self, *args, **opts):
        digits = opts["digits"]
        check_run_config(digits=digits)

        runner = TableRunner(
            log_to_console=opts.get("verbosity", 1) > 1,
            report=opts["report"],
            report_dir=settings.SATO_REPORT_DIR,
            log_dir=settings.SATO_LOG_DIR,
        )
        try:
            runner.run(
                opts["name"],
                digits,
                guard=settings.SATO_GUARD_DIGITS,
                recheck_delta=settings.SATO_RECHECK_DELTA,
                catalog_dir=settings.SATO_CATALOG_DIR,
            )
        except SatoSeriesError as exc:
            runner.close()
            raise CommandError(f"❌ {exc}", returncode=2)

        target = ",".join(opts["name"]) if opts["name"] else "all"
        finish_command(self, runner, opts, target=target, digits=digits)
