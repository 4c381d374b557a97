import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(db_index=True, max_length=32)),
                ('seed', models.CharField(blank=True, max_length=20, null=True)),
                ('input_paths', models.JSONField(blank=True, default=dict)),
                ('output_path', models.CharField(blank=True, max_length=1024, null=True)),
                ('algorithms', models.JSONField(blank=True, default=list)),
                ('count', models.IntegerField(blank=True, null=True)),
                ('near_prob', models.FloatField(blank=True, null=True)),
                ('threads', models.IntegerField(blank=True, null=True)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('status', models.CharField(choices=[('running', 'Running'), ('succeeded', 'Succeeded'), ('failed', 'Failed')], default='running', max_length=16)),
                ('message', models.TextField(blank=True, null=True)),
                ('item_count', models.IntegerField(default=0)),
                ('skipped_count', models.IntegerField(default=0)),
                ('started_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-started_at'],
            },
        ),
        migrations.CreateModel(
            name='AlgorithmResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('algorithm', models.CharField(max_length=32)),
                ('mean_all_db', models.FloatField(blank=True, null=True)),
                ('mean_close_db', models.FloatField(blank=True, null=True)),
                ('mean_no_close_db', models.FloatField(blank=True, null=True)),
                ('count_all', models.IntegerField(default=0)),
                ('count_close', models.IntegerField(default=0)),
                ('count_no_close', models.IntegerField(default=0)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='soundfield.runrecord')),
            ],
            options={
                'unique_together': {('run', 'algorithm')},
            },
        ),
    ]
