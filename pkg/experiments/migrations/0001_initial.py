# Generated by Django 6.0.1 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="Sweep",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "name",
                    models.CharField(blank=True, max_length=100, verbose_name="Sweep Name"),
                ),
                (
                    "grid",
                    models.JSONField(
                        default=dict,
                        help_text="Generator, n, dim, eps and seed lists the cells were expanded from",
                        verbose_name="Grid",
                    ),
                ),
                (
                    "certify",
                    models.BooleanField(default=True, verbose_name="Certify Cells"),
                ),
                (
                    "allow_fallback",
                    models.BooleanField(default=False, verbose_name="Allow Ledger Fallback"),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("PENDING", "Pending"),
                            ("RUNNING", "Running"),
                            ("DONE", "Done"),
                            ("INTERRUPTED", "Interrupted"),
                        ],
                        default="PENDING",
                        max_length=15,
                        verbose_name="Status",
                    ),
                ),
                (
                    "output_path",
                    models.CharField(max_length=500, verbose_name="Output CSV"),
                ),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, verbose_name="Created At"),
                ),
                (
                    "finished_at",
                    models.DateTimeField(blank=True, null=True, verbose_name="Finished At"),
                ),
            ],
            options={
                "verbose_name": "Sweep",
                "verbose_name_plural": "Sweeps",
                "ordering": ["-created_at"],
            },
        ),
        migrations.CreateModel(
            name="SweepCell",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "generator",
                    models.CharField(
                        choices=[
                            ("uniform-cube", "uniform-cube"),
                            ("grid", "grid"),
                            ("clustered-gaussian", "clustered-gaussian"),
                            ("circle", "circle"),
                            ("collinear", "collinear"),
                        ],
                        max_length=30,
                        verbose_name="Generator",
                    ),
                ),
                ("n", models.PositiveIntegerField(verbose_name="Points")),
                ("dim", models.PositiveSmallIntegerField(verbose_name="Dimension")),
                ("eps", models.FloatField(verbose_name="Epsilon")),
                ("seed", models.BigIntegerField(verbose_name="Seed")),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("PENDING", "Pending"),
                            ("PROCESSING", "Processing"),
                            ("SUCCESS", "Success"),
                            ("FAILED", "Failed"),
                        ],
                        default="PENDING",
                        max_length=15,
                        verbose_name="Status",
                    ),
                ),
                ("lightness", models.FloatField(blank=True, null=True, verbose_name="Lightness")),
                ("sparsity", models.FloatField(blank=True, null=True, verbose_name="Sparsity")),
                ("max_stretch", models.FloatField(blank=True, null=True, verbose_name="Max Stretch")),
                ("build_ms", models.FloatField(blank=True, null=True, verbose_name="Build Time (ms)")),
                ("certified", models.BooleanField(default=False, verbose_name="Certified")),
                (
                    "min_c",
                    models.FloatField(
                        blank=True,
                        help_text="0 when certification was skipped or found no feasible constant",
                        null=True,
                        verbose_name="Min Feasible c",
                    ),
                ),
                ("error_message", models.TextField(blank=True, verbose_name="Error Message")),
                (
                    "all_metrics",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="Build metrics and the certification summary",
                        verbose_name="All Metrics",
                    ),
                ),
                (
                    "finished_at",
                    models.DateTimeField(blank=True, null=True, verbose_name="Finished At"),
                ),
                (
                    "sweep",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="cells",
                        to="experiments.sweep",
                        verbose_name="Sweep",
                    ),
                ),
            ],
            options={
                "verbose_name": "Sweep Cell",
                "verbose_name_plural": "Sweep Cells",
                "ordering": ["generator", "dim", "eps", "n", "seed"],
                "indexes": [
                    models.Index(fields=["sweep", "status"], name="sweepcell_sweep_status_idx")
                ],
            },
        ),
        migrations.CreateModel(
            name="CellLog",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "level",
                    models.CharField(
                        choices=[("INFO", "Info"), ("WARNING", "Warning"), ("ERROR", "Error")],
                        default="INFO",
                        max_length=10,
                        verbose_name="Level",
                    ),
                ),
                ("message", models.TextField(verbose_name="Message")),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, verbose_name="Created At"),
                ),
                (
                    "cell",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="logs",
                        to="experiments.sweepcell",
                        verbose_name="Cell",
                    ),
                ),
            ],
            options={
                "verbose_name": "Cell Log",
                "verbose_name_plural": "Cell Logs",
                "ordering": ["created_at"],
            },
        ),
    ]
