from django.db import models

from .managers import RunRecordManager


class RunRecord(models.Model):
    """One execution of a subcommand"""

    class Subcommand(models.TextChoices):
        SOLVE = "solve", "solve"
        SWEEP = "sweep", "sweep"
        VERIFY = "verify", "verify"
        ENERGY = "energy", "energy"
        CONVOLVE = "convolve", "convolve"

    subcommand = models.CharField(
        max_length=16, choices=Subcommand.choices, db_index=True
    )
    config_digest = models.CharField(
        max_length=64,
        db_index=True,
        help_text="SHA-256 of the canonical config with all defaults",
    )
    seed = models.PositiveIntegerField(default=0)
    exit_status = models.PositiveSmallIntegerField()
    summary = models.TextField(default="", blank=True, help_text="summary as JSON")
    output_directory = models.CharField(max_length=255, default="", blank=True)
    created_at = models.DateTimeField(auto_now_add=True, db_index=True)

    objects = RunRecordManager()

    def __str__(self) -> str:
        return f"{self.subcommand} #{self.pk}"

    def __repr__(self) -> str:
        return "{}(pk={}, subcommand='{}', exit_status={})".format(
            type(self).__name__, self.pk, self.subcommand, self.exit_status
        )

    @property
    def succeeded(self) -> bool:
        return self.exit_status == 0


class SweepRowRecord(models.Model):
    """A row of a sweep report"""

    run = models.ForeignKey(
        RunRecord, on_delete=models.CASCADE, related_name="sweep_rows"
    )
    case = models.CharField(max_length=1)
    position = models.PositiveIntegerField()
    s = models.FloatField()
    delta = models.FloatField()
    distance = models.FloatField()
    weak_gap = models.FloatField(default=None, null=True)
    energy = models.FloatField()
    limit_energy = models.FloatField(default=None, null=True)

    class Meta:
        ordering = ["run", "position"]
        constraints = [
            models.UniqueConstraint(
                fields=["run", "position"], name="functional_pk_sweeprowrecord"
            )
        ]

    def __str__(self) -> str:
        return f"{self.run}: s={self.s:g}, delta={self.delta:g}"
