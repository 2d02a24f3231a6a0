"""Shared runner base class used by the certification and verification workflows."""

from __future__ import annotations

import csv
import io
import logging
from datetime import date, datetime
from pathlib import Path


class BaseRunner:
    """
    Abstract runner class providing:
    - structured logging (to console or buffer, optionally to a log file)
    - pass/fail/flag counters for exit codes and test assertions
    - one record per checked item for the report writers
    """

    command = "run"
    title = "Run"

    def __init__(self, log_to_console=False, *, report=False, report_dir=None, log_dir=None):
        self.log_to_console = log_to_console
        self.buffer = io.StringIO()
        self.counters = {
            "passed": 0,
            "failed": 0,
            "flagged": 0,
            "errors": 0,
        }
        self.records: list[dict] = []
        self.start_time = datetime.now()
        self.finish_time: datetime | None = None
        self.report_enabled = report
        self.report_dir = Path(report_dir) if report_dir else Path("archive/reports")
        self.report_date = date.today()
        self.logger = logging.getLogger(f"satoseries.{self.command}")
        self._file_handler = None
        if log_dir:
            self._attach_file_log(Path(log_dir))

    # ---------------------------------------------------------------------
    # Logging
    # ---------------------------------------------------------------------
    def log(self, message, emoji="💬"):
        timestamp = datetime.now().strftime("%H:%M:%S")
        line = f"[{timestamp}] {emoji} {message}"
        self.buffer.write(line + "\n")
        self.logger.info("%s %s", emoji, message)
        if self.log_to_console:
            print(line)

    def _attach_file_log(self, log_dir: Path) -> None:
        try:
            log_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            self.log(f"Unable to create log directory {log_dir}: {exc}", "⚠️")
            return
        log_file = log_dir / f"{self.command}_{self.start_time:%Y%m%d_%H%M}.log"
        handler = logging.FileHandler(log_file, encoding="utf-8")
        handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
        root = logging.getLogger("satoseries")
        root.addHandler(handler)
        if root.level == logging.NOTSET or root.level > logging.INFO:
            root.setLevel(logging.INFO)
        self._file_handler = handler
        self.log_file = log_file

    def close(self) -> None:
        if self._file_handler is not None:
            logging.getLogger("satoseries").removeHandler(self._file_handler)
            self._file_handler.close()
            self._file_handler = None

    # ---------------------------------------------------------------------
    # Results
    # ---------------------------------------------------------------------
    def add_record(self, record: dict, *, passed: bool, flagged: bool = False, error: bool = False) -> None:
        """Store one report record and bump exactly one counter."""

        self.records.append(record)
        label = record.get("id") or record.get("name") or record.get("point") or "?"
        if error:
            self.counters["errors"] += 1
            self.log(f"{label}: {record.get('error', 'error')}", "❌")
        elif passed:
            self.counters["passed"] += 1
            self.log(f"{label}: pass", "✅")
        elif flagged:
            self.counters["flagged"] += 1
            self.log(f"{label}: flagged", "⚠️")
        else:
            self.counters["failed"] += 1
            self.log(f"{label}: FAIL", "❌")

    @property
    def all_passed(self) -> bool:
        return not self.counters["failed"] and not self.counters["errors"]

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def run(self, *args, **kwargs) -> list[dict]:
        raise NotImplementedError

    # ---------------------------------------------------------------------
    # Summary
    # ---------------------------------------------------------------------
    def summarize(self):
        self.finish_time = datetime.now()
        elapsed = (self.finish_time - self.start_time).total_seconds()
        summary = (
            f"\n📊 {self.title} Summary\n"
            f"Passed: {self.counters['passed']}\n"
            f"Failed: {self.counters['failed']}\n"
            f"Flagged: {self.counters['flagged']}\n"
            f"Errors: {self.counters['errors']}\n"
            f"Elapsed: {elapsed:.2f}s\n"
        )
        self.log(summary, "✅" if self.all_passed else "⚠️")
        if self.report_enabled:
            self._write_report(elapsed)
        return summary

    def get_output(self) -> str:
        """Return the buffered runner log for the current run."""

        return self.buffer.getvalue()

    # ---------------------------------------------------------------------
    # Reporting helpers
    # ---------------------------------------------------------------------
    def _write_report(self, elapsed_seconds: float) -> None:
        """Persist the run counters as a metric/value CSV."""

        try:
            self.report_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            self.log(f"Unable to create report directory {self.report_dir}: {exc}", "⚠️")
            return

        destination = self.report_dir / f"{self.command}_{self.report_date.isoformat()}.csv"
        rows = [
            ("command", self.command),
            ("started_at", self.start_time.isoformat()),
            ("elapsed_seconds", f"{elapsed_seconds:.2f}"),
            ("exit_code", str(self.exit_code)),
        ]
        rows.extend((key, str(value)) for key, value in self.counters.items())

        with destination.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["metric", "value"])
            for metric, value in rows:
                writer.writerow([metric, value])
        self.report_path = destination
