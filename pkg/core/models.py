from django.db import models
import json


class TimeStampedModel(models.Model):
    """Modelo base con timestamps automáticos"""
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Fecha de creación")
    updated_at = models.DateTimeField(auto_now=True, verbose_name="Última modificación")

    class Meta:
        abstract = True


class InformeEjecucion(TimeStampedModel):
    """Informe de una ejecución archivado con --archive"""
    ESTADO_CHOICES = [
        ('pass', 'Verificado'),
        ('fail', 'Falló la verificación'),
        ('error', 'Error de entrada'),
    ]

    subcomando = models.CharField(max_length=50, verbose_name="Subcomando")
    estado = models.CharField(max_length=10, choices=ESTADO_CHOICES, verbose_name="Estado")
    codigo_salida = models.PositiveSmallIntegerField(default=0, verbose_name="Código de salida")
    huella = models.CharField(max_length=64, db_index=True, verbose_name="Huella sha256")

    # Configuración y resultado en formato JSON
    _configuracion = models.TextField(
        default='{}',
        blank=True,
        help_text="Configuración de la ejecución en formato JSON",
        verbose_name="Configuración"
    )
    _resultado = models.TextField(
        default='{}',
        blank=True,
        help_text="Informe completo en formato JSON",
        verbose_name="Resultado"
    )

    @property
    def configuracion(self):
        """Getter para configuracion - devuelve un diccionario"""
        try:
            return json.loads(self._configuracion) if self._configuracion else {}
        except json.JSONDecodeError:
            return {}

    @configuracion.setter
    def configuracion(self, value):
        self._configuracion = json.dumps(value, sort_keys=True) if value else '{}'

    @property
    def resultado(self):
        """Getter para resultado - devuelve un diccionario"""
        try:
            return json.loads(self._resultado) if self._resultado else {}
        except json.JSONDecodeError:
            return {}

    @resultado.setter
    def resultado(self, value):
        self._resultado = json.dumps(value, sort_keys=True) if value else '{}'

    class Meta:
        verbose_name = "Informe de ejecución"
        verbose_name_plural = "Informes de ejecución"
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.subcomando} [{self.estado}] {self.huella[:12]}"
