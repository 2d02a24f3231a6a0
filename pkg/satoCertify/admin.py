"""Admin registration for the certification audit trail."""
from django.contrib import admin

from .models import CertificationRun


@admin.register(CertificationRun)
class CertificationRunAdmin(admin.ModelAdmin):
    """Show high-level stats for each certification run."""
    list_display = (
        "command",
        "target",
        "digits",
        "order",
        "passed",
        "failed",
        "flagged",
        "exit_code",
        "created_at",
        "short_summary",
    )
    list_filter = ("command", "exit_code")
    search_fields = ("target", "summary", "report_output")
    readonly_fields = (
        "command",
        "target",
        "digits",
        "order",
        "passed",
        "failed",
        "flagged",
        "errors",
        "exit_code",
        "summary",
        "report_output",
        "log_output",
        "started_at",
        "finished_at",
        "created_at",
    )
    ordering = ("-created_at",)

    def short_summary(self, obj):
        if not obj.summary:
            return "—"
        lines = [line for line in obj.summary.strip().splitlines() if line.strip()]
        preview = " · ".join(lines[1:4]) if len(lines) > 1 else lines[0]
        return (preview[:75] + "…") if len(preview) > 75 else preview

    short_summary.short_description = "Summary"
