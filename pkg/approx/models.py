from django.db import models


class RunRecord(models.Model):
    STATUS_CHOICES = (
        (0, "ok"),
        (1, "invalid"),
        (2, "infeasible"),
    )

    subcommand = models.CharField(max_length=40)
    action = models.CharField(max_length=40, blank=True)
    config = models.JSONField(default=dict)
    tool_version = models.CharField(max_length=20)
    # decimal string; seeds go up to 2**64 - 1, past a signed bigint
    seed = models.CharField(max_length=20, blank=True)

    started_at = models.DateTimeField(auto_now_add=True)
    wall_time = models.FloatField(default=0.0)
    exit_status = models.PositiveSmallIntegerField(choices=STATUS_CHOICES, default=0)
    message = models.TextField(blank=True)

    # output path -> sha256 of its bytes
    outputs = models.JSONField(default=dict)
    manifest_path = models.CharField(max_length=500, blank=True)

    class Meta:
        ordering = ("-started_at",)

    def __str__(self):
        label = f"{self.subcommand} {self.action}".strip()
        return f"{label} ({self.get_exit_status_display()})"


class RegressionPin(models.Model):
    """Value recorded by the first passing `repro` run, checked by later runs."""

    name = models.CharField(max_length=100, unique=True)
    value = models.FloatField()
    tolerance = models.FloatField(default=0.10)
    first_run = models.ForeignKey(
        RunRecord, null=True, blank=True, on_delete=models.SET_NULL, related_name="pins"
    )
    created_at = models.DateTimeField(auto_now_add=True)

    def __str__(self):
        return f"{self.name} = {self.value!r} (+/-{self.tolerance:.0%})"

    def matches(self, value):
        return abs(value - self.value) <= self.tolerance * abs(self.value)
