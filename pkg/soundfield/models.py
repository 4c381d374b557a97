from django.db import models


class RunRecord(models.Model):
    """One invocation of a generation or evaluation command."""

    STATUS_CHOICES = [
        ('running', 'Running'),
        ('succeeded', 'Succeeded'),
        ('failed', 'Failed'),
    ]

    command = models.CharField(max_length=32, db_index=True)
    # Unsigned 64-bit seeds do not fit a signed BigIntegerField
    seed = models.CharField(max_length=20, blank=True, null=True)
    input_paths = models.JSONField(default=dict, blank=True)
    output_path = models.CharField(max_length=1024, blank=True, null=True)
    algorithms = models.JSONField(default=list, blank=True)
    count = models.IntegerField(null=True, blank=True)
    near_prob = models.FloatField(null=True, blank=True)
    threads = models.IntegerField(null=True, blank=True)
    config = models.JSONField(default=dict, blank=True)

    status = models.CharField(max_length=16, choices=STATUS_CHOICES, default='running')
    message = models.TextField(blank=True, null=True)
    item_count = models.IntegerField(default=0)
    skipped_count = models.IntegerField(default=0)
    started_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-started_at']

    def __str__(self):
        return f"{self.command} #{self.pk} ({self.status})"


class AlgorithmResult(models.Model):
    run = models.ForeignKey(RunRecord, on_delete=models.CASCADE, related_name='results')
    algorithm = models.CharField(max_length=32)
    # Null means the bucket had no pairs
    mean_all_db = models.FloatField(null=True, blank=True)
    mean_close_db = models.FloatField(null=True, blank=True)
    mean_no_close_db = models.FloatField(null=True, blank=True)
    count_all = models.IntegerField(default=0)
    count_close = models.IntegerField(default=0)
    count_no_close = models.IntegerField(default=0)

    class Meta:
        unique_together = ('run', 'algorithm')

    def __str__(self):
        return f"{self.algorithm} @ run {self.run_id}"
