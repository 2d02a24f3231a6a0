"""Audit trail for certification and verification runs."""
from django.db import models
from django.utils import timezone


class CertificationRun(models.Model):
    """One management-command run with its counters, summary and full report."""
    COMMAND_CHOICES = [
        ("certify", "Certify series"),
        ("verify_identities", "Verify identities"),
        ("modpoly", "Modular polynomials"),
        ("tables", "Value tables"),
    ]

    command = models.CharField(max_length=32, choices=COMMAND_CHOICES)
    target = models.CharField(max_length=255, blank=True)
    digits = models.PositiveIntegerField(null=True, blank=True)
    order = models.PositiveIntegerField(null=True, blank=True)
    passed = models.PositiveIntegerField(default=0)
    failed = models.PositiveIntegerField(default=0)
    flagged = models.PositiveIntegerField(default=0)
    errors = models.PositiveIntegerField(default=0)
    exit_code = models.PositiveSmallIntegerField(default=0)
    summary = models.TextField(blank=True)
    report_output = models.TextField(blank=True)
    log_output = models.TextField(blank=True)
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ("-created_at",)

    def __str__(self):
        timestamp = self.created_at.astimezone(timezone.get_current_timezone()) if self.created_at else None
        ts_display = timestamp.strftime("%Y-%m-%d %H:%M") if timestamp else "pending"
        return f"{self.get_command_display()} {self.target or 'all'} @ {ts_display}"

    @property
    def ok(self) -> bool:
        return self.exit_code == 0

    @property
    def duration_seconds(self):
        if not (self.started_at and self.finished_at):
            return None
        return (self.finished_at - self.started_at).total_seconds()
