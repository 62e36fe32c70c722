# Generated by Django 5.2.6 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('subcommand', models.CharField(max_length=40)),
                ('action', models.CharField(blank=True, max_length=40)),
                ('config', models.JSONField(default=dict)),
                ('tool_version', models.CharField(max_length=20)),
                ('seed', models.CharField(blank=True, max_length=20)),
                ('started_at', models.DateTimeField(auto_now_add=True)),
                ('wall_time', models.FloatField(default=0.0)),
                ('exit_status', models.PositiveSmallIntegerField(choices=[(0, 'ok'), (1, 'invalid'), (2, 'infeasible')], default=0)),
                ('message', models.TextField(blank=True)),
                ('outputs', models.JSONField(default=dict)),
                ('manifest_path', models.CharField(blank=True, max_length=500)),
            ],
            options={
                'ordering': ('-started_at',),
            },
        ),
        migrations.CreateModel(
            name='RegressionPin',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100, unique=True)),
                ('value', models.FloatField()),
                ('tolerance', models.FloatField(default=0.1)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('first_run', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='pins', to='approx.runrecord')),
            ],
        ),
    ]
