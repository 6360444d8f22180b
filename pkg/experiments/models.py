"""
Sweep bookkeeping.

- Sweep: one (generator x n x dim x eps x seed) grid and its CSV output
- SweepCell: one build (+ certify) run and its result columns
- CellLog: engine log lines of a cell, for debugging failed runs
"""

from django.db import models

from spanners.generators import GenKind


class SweepStatus(models.TextChoices):
    """Sweep lifecycle status."""
    PENDING = 'PENDING', 'Pending'
    RUNNING = 'RUNNING', 'Running'
    DONE = 'DONE', 'Done'
    INTERRUPTED = 'INTERRUPTED', 'Interrupted'


class CellStatus(models.TextChoices):
    """Cell processing status."""
    PENDING = 'PENDING', 'Pending'
    PROCESSING = 'PROCESSING', 'Processing'
    SUCCESS = 'SUCCESS', 'Success'
    FAILED = 'FAILED', 'Failed'


class LogLevel(models.TextChoices):
    """Log severity levels."""
    INFO = 'INFO', 'Info'
    WARNING = 'WARNING', 'Warning'
    ERROR = 'ERROR', 'Error'


GENERATOR_CHOICES = [(k.value, k.value) for k in GenKind if k != GenKind.EXPLICIT_FILE]


class Sweep(models.Model):
    """A grid of build/certify runs written to one CSV."""
    name = models.CharField(max_length=100, blank=True, verbose_name='Sweep Name')
    grid = models.JSONField(
        default=dict,
        verbose_name='Grid',
        help_text='Generator, n, dim, eps and seed lists the cells were expanded from',
    )
    certify = models.BooleanField(default=True, verbose_name='Certify Cells')
    allow_fallback = models.BooleanField(default=False, verbose_name='Allow Ledger Fallback')
    status = models.CharField(
        max_length=15,
        choices=SweepStatus.choices,
        default=SweepStatus.PENDING,
        verbose_name='Status'
    )
    output_path = models.CharField(max_length=500, verbose_name='Output CSV')
    created_at = models.DateTimeField(auto_now_add=True, verbose_name='Created At')
    finished_at = models.DateTimeField(null=True, blank=True, verbose_name='Finished At')

    class Meta:
        verbose_name = 'Sweep'
        verbose_name_plural = 'Sweeps'
        ordering = ['-created_at']

    def __str__(self) -> str:
        return self.name or f'Sweep #{self.id}'


class SweepCell(models.Model):
    """
    One grid point. Result columns stay null until the cell succeeds.
    """
    sweep = models.ForeignKey(
        Sweep,
        on_delete=models.CASCADE,
        related_name='cells',
        verbose_name='Sweep'
    )
    generator = models.CharField(max_length=30, choices=GENERATOR_CHOICES, verbose_name='Generator')
    n = models.PositiveIntegerField(verbose_name='Points')
    dim = models.PositiveSmallIntegerField(verbose_name='Dimension')
    eps = models.FloatField(verbose_name='Epsilon')
    seed = models.BigIntegerField(verbose_name='Seed')

    status = models.CharField(
        max_length=15,
        choices=CellStatus.choices,
        default=CellStatus.PENDING,
        verbose_name='Status'
    )
    lightness = models.FloatField(null=True, blank=True, verbose_name='Lightness')
    sparsity = models.FloatField(null=True, blank=True, verbose_name='Sparsity')
    max_stretch = models.FloatField(null=True, blank=True, verbose_name='Max Stretch')
    build_ms = models.FloatField(null=True, blank=True, verbose_name='Build Time (ms)')
    certified = models.BooleanField(default=False, verbose_name='Certified')
    min_c = models.FloatField(
        null=True,
        blank=True,
        verbose_name='Min Feasible c',
        help_text='0 when certification was skipped or found no feasible constant'
    )
    error_message = models.TextField(blank=True, verbose_name='Error Message')
    all_metrics = models.JSONField(
        default=dict,
        blank=True,
        verbose_name='All Metrics',
        help_text='Build metrics and the certification summary'
    )
    finished_at = models.DateTimeField(null=True, blank=True, verbose_name='Finished At')

    class Meta:
        verbose_name = 'Sweep Cell'
        verbose_name_plural = 'Sweep Cells'
        ordering = ['generator', 'dim', 'eps', 'n', 'seed']
        indexes = [
            models.Index(fields=['sweep', 'status'], name='sweepcell_sweep_status_idx'),
        ]

    def __str__(self) -> str:
        return f'{self.generator} n={self.n} d={self.dim} eps={self.eps} seed={self.seed}'


class CellLog(models.Model):
    """Engine log line of a sweep cell."""
    cell = models.ForeignKey(
        SweepCell,
        on_delete=models.CASCADE,
        related_name='logs',
        verbose_name='Cell'
    )
    level = models.CharField(
        max_length=10,
        choices=LogLevel.choices,
        default=LogLevel.INFO,
        verbose_name='Level'
    )
    message = models.TextField(verbose_name='Message')
    created_at = models.DateTimeField(auto_now_add=True, verbose_name='Created At')

    class Meta:
        verbose_name = 'Cell Log'
        verbose_name_plural = 'Cell Logs'
        ordering = ['created_at']

    def __str__(self) -> str:
        return f'[{self.level}] {self.message[:50]}'
