# Generated by Django 5.2.1 on 2026-10-18 10:02

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='DiagnosticRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('symbol', models.CharField(max_length=500, verbose_name='Símbolo')),
                ('d', models.PositiveSmallIntegerField(default=1, verbose_name='Grados de libertad')),
                ('k', models.PositiveSmallIntegerField(default=1, verbose_name='Dimensión de coeficientes')),
                ('verdict', models.CharField(choices=[('PASS', 'Aprobado'), ('FAIL', 'Rechazado'), ('INCONCLUSIVE', 'No concluyente')], max_length=16, verbose_name='Veredicto')),
                ('report', models.JSONField(default=dict, verbose_name='Reporte')),
                ('config', models.JSONField(default=dict, verbose_name='Configuración efectiva')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Fecha de creación')),
            ],
            options={
                'verbose_name': 'Corrida de diagnóstico',
                'verbose_name_plural': 'Corridas de diagnóstico',
                'ordering': ['-created_at', '-id'],
                'indexes': [models.Index(fields=['symbol'], name='diagnostics_symbol_idx'), models.Index(fields=['verdict'], name='diagnostics_verdict_idx')],
            },
        ),
    ]
