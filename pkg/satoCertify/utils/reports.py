"""Report rendering and run bookkeeping shared by the certification commands."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

from django.core.management.base import CommandError
from django.utils import timezone

from satoseries._base_Runner import BaseRunner

from ..models import CertificationRun

MIN_DIGITS = 20
MIN_ORDER = 50


def check_run_config(digits: int | None = None, order: int | None = None, jobs: int | None = None) -> None:
    """Reject flag values outside the supported range with exit code 2."""

    if digits is not None and digits < MIN_DIGITS:
        raise CommandError(f"--digits must be at least {MIN_DIGITS}, got {digits}", returncode=2)
    if order is not None and order < MIN_ORDER:
        raise CommandError(f"--order must be at least {MIN_ORDER}, got {order}", returncode=2)
    if jobs is not None and jobs < 1:
        raise CommandError(f"--jobs must be positive, got {jobs}", returncode=2)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value).replace("\n", " ")


def flatten_record(record: Mapping, prefix: str = "") -> list[tuple[str, str]]:
    """Nested mappings become dotted keys: ``detail.kappa=...``."""

    pairs: list[tuple[str, str]] = []
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            pairs.extend(flatten_record(value, f"{name}."))
        else:
            pairs.append((name, format_value(value)))
    return pairs


def render_blocks(header: Mapping, records: Iterable[Mapping]) -> str:
    """Line-oriented ``key=value`` blocks separated by blank lines; header block first."""

    blocks = ["\n".join(f"{k}={v}" for k, v in flatten_record(header))]
    for record in records:
        blocks.append("\n".join(f"{k}={v}" for k, v in flatten_record(record)))
    return "\n\n".join(blocks) + "\n"


def render_json(header: Mapping, records: Iterable[Mapping]) -> str:
    return json.dumps({**header, "records": list(records)}, indent=2, sort_keys=False, default=str) + "\n"


def report_header(runner: BaseRunner, **settings_used) -> dict:
    header = {"command": runner.command}
    header.update({k: v for k, v in settings_used.items() if v is not None})
    header.update(runner.counters)
    header["exit_code"] = runner.exit_code
    return header


def render_report(runner: BaseRunner, *, as_json: bool = False, **settings_used) -> str:
    header = report_header(runner, **settings_used)
    if as_json:
        return render_json(header, runner.records)
    return render_blocks(header, runner.records)


def write_report(text: str, out: str | Path) -> Path:
    destination = Path(out)
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(text, encoding="utf-8")
    return destination


def record_run(runner: BaseRunner, *, target: str, digits=None, order=None, summary="", report_output="") -> CertificationRun:
    """Persist the run in the audit table."""

    tz = timezone.get_current_timezone()
    finished = runner.finish_time or runner.start_time
    return CertificationRun.objects.create(
        command=runner.command,
        target=target[:255],
        digits=digits,
        order=order,
        passed=runner.counters["passed"],
        failed=runner.counters["failed"],
        flagged=runner.counters["flagged"],
        errors=runner.counters["errors"],
        exit_code=runner.exit_code,
        summary=summary,
        report_output=report_output,
        log_output=runner.get_output(),
        started_at=timezone.make_aware(runner.start_time, tz),
        finished_at=timezone.make_aware(finished, tz),
    )


def finish_command(command, runner: BaseRunner, options: Mapping, *, target: str, digits=None, order=None) -> str:
    """Summarize, write the report, optionally record, then map the outcome to an exit code.

    The report is written before a failing run raises ``CommandError(returncode=1)``.
    """

    summary = runner.summarize()
    runner.close()
    text = render_report(runner, as_json=options.get("json", False), target=target, digits=digits, order=order)
    out = options.get("out")
    if out:
        destination = write_report(text, out)
        command.stdout.write(command.style.SUCCESS(f"📝 Report written to {destination}"))
    else:
        command.stdout.write(text)

    if options.get("record"):
        run = record_run(runner, target=target, digits=digits, order=order, summary=summary, report_output=text)
        command.stdout.write(f"🗂️ Recorded run #{run.pk}")

    counters = runner.counters
    line = (
        f"{runner.title}: {counters['passed']} passed, {counters['failed']} failed, "
        f"{counters['flagged']} flagged, {counters['errors']} errors"
    )
    if runner.exit_code:
        command.stdout.write(command.style.WARNING(f"⚠️ {line}"))
        raise CommandError(line, returncode=runner.exit_code)
    command.stdout.write(command.style.SUCCESS(f"✅ {line}"))
    return text
