"""Check cataloged modular polynomials Phi_N(X(q), X(q^N)) = 0 as exact q-series."""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from satoseries.exceptions import SatoSeriesError
from satoseries.runners import ModpolyRunner

from ...utils.reports import check_run_config, finish_command


class Command(BaseCommand):
    help = "Verify modular polynomials from the catalog coefficient-exactly."

    def add_arguments(self, parser):
        parser.add_argument("--group", type=str,
                            help="Group name (G02) or Hauptmodul symbol (t2); default: every group")
        parser.add_argument("--level", type=int, help="Level N; default: every cataloged level")
        parser.add_argument("--order", type=int, default=settings.SATO_DEFAULT_ORDER,
                            help="q-expansion truncation order (default: SATO_DEFAULT_ORDER)")
        parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
        parser.add_argument("--json", action="store_true", help="JSON report instead of key=value blocks")
        parser.add_argument("--record", action="store_true", help="Store the run as a CertificationRun")
        parser.add_argument("--report", action="store_true",
                            help="Also write a metric CSV into SATO_REPORT_DIR")

    def handle(self, *args, **opts):
        order = opts["order"]
        check_run_config(order=order)

        runner = ModpolyRunner(
            log_to_console=opts.get("verbosity", 1) > 1,
            report=opts["report"],
            report_dir=settings.SATO_REPORT_DIR,
            log_dir=settings.SATO_LOG_DIR,
        )
        try:
            records = runner.run(opts["group"], opts["level"], order, catalog_dir=settings.SATO_CATALOG_DIR)
        except SatoSeriesError as exc:
            runner.close()
            raise CommandError(f"❌ {exc}", returncode=2)
        if not records:
            runner.close()
            raise CommandError("❌ no cataloged polynomial matches the selection", returncode=2)

        target = f"{opts['group'] or 'all'}:{opts['level'] or 'all'}"
        finish_command(self, runner, opts, target=target, order=order)
