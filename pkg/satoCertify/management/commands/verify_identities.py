"""Prove the q-series identity suite by Sturm bounds and run the numeric transformation checks."""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from satoseries.exceptions import SatoSeriesError
from satoseries.identities import DEFAULT_SEED, identity_names
from satoseries.runners import IdentityRunner

from ...utils.reports import check_run_config, finish_command


class Command(BaseCommand):
    help = "Verify the Sturm, coefficient and numeric identity suites."

    def add_arguments(self, parser):
        parser.add_argument("--name", nargs="+", choices=identity_names(),
                            help="Run only these identities (default: all)")
        parser.add_argument("--order", type=int, default=settings.SATO_DEFAULT_ORDER,
                            help="q-expansion truncation order (default: SATO_DEFAULT_ORDER)")
        parser.add_argument("--digits", type=int, default=settings.SATO_DEFAULT_DIGITS,
                            help="Working digits for the numeric checks")
        parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for the random test points")
        parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
        parser.add_argument("--json", action="store_true", help="JSON report instead of key=value blocks")
        parser.add_argument("--record", action="store_true", help="Store the run as a CertificationRun")
        parser.add_argument("--report", action="store_true",
                            help="Also write a metric CSV into SATO_REPORT_DIR")

    def handle(self, *args, **opts):
        order, digits = opts["order"], opts["digits"]
        check_run_config(digits=digits, order=order)

        runner = IdentityRunner(
            log_to_console=opts.get("verbosity", 1) > 1,
            report=opts["report"],
            report_dir=settings.SATO_REPORT_DIR,
            log_dir=settings.SATO_LOG_DIR,
        )
        try:
            runner.run(
                opts["name"],
                order,
                digits,
                guard=settings.SATO_GUARD_DIGITS,
                recheck_delta=settings.SATO_RECHECK_DELTA,
                seed=opts["seed"],
            )
        except SatoSeriesError as exc:
            runner.close()
            raise CommandError(f"❌ {exc}", returncode=2)

        target = ",".join(opts["name"]) if opts["name"] else "all"
        finish_command(self, runner, opts, target=target, digits=digits, order=order)
