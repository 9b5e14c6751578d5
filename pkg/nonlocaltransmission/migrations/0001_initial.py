# Generated by Django 3.1.4 on 2021-01-12 10:21

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunRecord",
            fields=[
                (
                    "id",
                    models.AutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "subcommand",
                    models.CharField(
                        choices=[
                            ("solve", "solve"),
                            ("sweep", "sweep"),
                            ("verify", "verify"),
                            ("energy", "energy"),
                            ("convolve", "convolve"),
                        ],
                        db_index=True,
                        max_length=16,
                    ),
                ),
                (
                    "config_digest",
                    models.CharField(
                        db_index=True,
                        help_text="SHA-256 of the canonical config with all defaults",
                        max_length=64,
                    ),
                ),
                ("seed", models.PositiveIntegerField(default=0)),
                ("exit_status", models.PositiveSmallIntegerField()),
                (
                    "summary",
                    models.TextField(
                        blank=True, default="", help_text="summary as JSON"
                    ),
                ),
                (
                    "output_directory",
                    models.CharField(blank=True, default="", max_length=255),
                ),
                ("created_at", models.DateTimeField(auto_now_add=True, db_index=True)),
            ],
        ),
        migrations.CreateModel(
            name="SweepRowRecord",
            fields=[
                (
                    "id",
                    models.AutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("case", models.CharField(max_length=1)),
                ("position", models.PositiveIntegerField()),
                ("s", models.FloatField()),
                ("delta", models.FloatField()),
                ("distance", models.FloatField()),
                ("weak_gap", models.FloatField(default=None, null=True)),
                ("energy", models.FloatField()),
                ("limit_energy", models.FloatField(default=None, null=True)),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="sweep_rows",
                        to="nonlocaltransmission.runrecord",
                    ),
                ),
            ],
            options={
                "ordering": ["run", "position"],
            },
        ),
        migrations.AddConstraint(
            model_name="sweeprowrecord",
            constraint=models.UniqueConstraint(
                fields=("run", "position"), name="functional_pk_sweeprowrecord"
            ),
        ),
    ]
