# Generated by Django 5.2.4

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='InformeEjecucion',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Fecha de creación')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='Última modificación')),
                ('subcomando', models.CharField(max_length=50, verbose_name='Subcomando')),
                ('estado', models.CharField(choices=[('pass', 'Verificado'), ('fail', 'Falló la verificación'), ('error', 'Error de entrada')], max_length=10, verbose_name='Estado')),
                ('codigo_salida', models.PositiveSmallIntegerField(default=0, verbose_name='Código de salida')),
                ('huella', models.CharField(db_index=True, max_length=64, verbose_name='Huella sha256')),
                ('_configuracion', models.TextField(blank=True, default='{}', help_text='Configuración de la ejecución en formato JSON', verbose_name='Configuración')),
                ('_resultado', models.TextField(blank=True, default='{}', help_text='Informe completo en formato JSON', verbose_name='Resultado')),
            ],
            options={
                'verbose_name': 'Informe de ejecución',
                'verbose_name_plural': 'Informes de ejecución',
                'ordering': ['-created_at'],
            },
        ),
    ]
