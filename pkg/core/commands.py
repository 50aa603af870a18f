"""
Clase base de los comandos de gestión que producen informes JSON.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from .error_handling import EXIT_OK
from .models import InformeEjecucion
from .runner import RunConfig, run
from .serialization import dump_report, load_json_document

logger = logging.getLogger(__name__)


def add_common_arguments(parser):
    """Opciones comunes a todos los subcomandos."""
    parser.add_argument('--output', help='Archivo donde escribir el informe JSON (por defecto, stdout)')
    parser.add_argument('--bound', type=int, help='Cota de enumeración de anillos de restos')
    parser.add_argument('--precision', type=int, help='Bits significativos de las salidas en coma flotante')
    parser.add_argument('--threads', type=int, help='Procesos para las tareas independientes')
    parser.add_argument('--archive', action='store_true', help='Guardar el informe en la base de datos')


class ReportCommand(BaseCommand):
    """
    Comando que ejecuta un cálculo, escribe el informe y termina con el
    código de salida correspondiente (0 verificado, 1 fallo, 2 entrada).
    """

    def add_arguments(self, parser):
        add_common_arguments(parser)

    def load_document(self, path):
        return load_json_document(path)

    def emit_report(self, subcommand, inputs, options, command_options, compute):
        config = RunConfig.from_options(subcommand, inputs, options, command_options)
        exit_code, envelope = run(config, compute)
        text = dump_report(envelope)
        if config.output:
            Path(config.output).write_text(text, encoding='utf-8')
            self.stdout.write(f"Informe escrito en {config.output} ({envelope['status']})")
        else:
            self.stdout.write(text, ending='')
        if config.archive:
            self.archive(envelope, exit_code)
        if exit_code != EXIT_OK:
            error = envelope['result'].get('error', {}) if isinstance(envelope['result'], dict) else {}
            message = error.get('technical_message') or f"{subcommand}: verificación fallida"
            raise CommandError(message, returncode=exit_code)
        return envelope

    def archive(self, envelope, exit_code):
        informe = InformeEjecucion(
            subcomando=envelope['subcommand'],
            estado=envelope['status'],
            codigo_salida=exit_code,
            huella=envelope['fingerprint'],
        )
        informe.configuracion = envelope['config']
        informe.resultado = envelope
        informe.save()
        logger.info(f"Informe archivado: {informe}")
        return informe
