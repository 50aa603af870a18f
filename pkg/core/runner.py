"""
Ejecución común de los subcomandos: configuración, sobre del informe y
traducción de errores a códigos de salida.
"""
import logging
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path

from django.conf import settings
from django.utils import timezone

from .error_handling import EXIT_OK, EXIT_VERIFICATION, ErrorClassifier, log_run_action
from .serialization import report_fingerprint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Configuración inmutable de una ejecución"""
    subcommand: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    enumeration_bound: int = None
    precision_bits: int = None
    threads: int = None
    output: str = None
    archive: bool = False

    @classmethod
    def from_options(cls, subcommand, inputs, options, command_options):
        # --threads nunca supera CUSPTOR_THREADS
        threads = command_options.get('threads') or settings.CUSPTOR_THREADS
        if threads > settings.CUSPTOR_THREADS:
            logger.warning(f"--threads {threads} recortado a CUSPTOR_THREADS = {settings.CUSPTOR_THREADS}")
            threads = settings.CUSPTOR_THREADS
        return cls(
            subcommand=subcommand,
            inputs={k: v for k, v in inputs.items() if v is not None},
            options=options,
            enumeration_bound=command_options.get('bound') or settings.CUSPTOR_ENUMERATION_BOUND,
            precision_bits=command_options.get('precision') or settings.CUSPTOR_FLOAT_PRECISION,
            threads=threads,
            output=command_options.get('output'),
            archive=bool(command_options.get('archive')),
        )

    def validate(self):
        if self.enumeration_bound is not None and self.enumeration_bound < 1:
            raise ValueError("La cota de enumeración debe ser positiva")
        if self.precision_bits is not None and self.precision_bits < 8:
            raise ValueError("La precisión debe ser de al menos 8 bits")
        if self.threads is not None and self.threads < 1:
            raise ValueError("El número de hilos debe ser positivo")
        for name, path in self.inputs.items():
            if not Path(path).is_file():
                raise FileNotFoundError(f"{name}: no existe el archivo {path}")

    def to_json(self):
        data = asdict(self)
        data.pop('output')
        data.pop('archive')
        return data


def build_envelope(config, status, result):
    envelope = {
        'subcommand': config.subcommand,
        'generated_at': timezone.now().isoformat(),
        'config': config.to_json(),
        'status': status,
        'result': result,
    }
    envelope['fingerprint'] = report_fingerprint(envelope)
    return envelope


def run(config, compute):
    """
    Ejecuta `compute(config)` y devuelve (código de salida, informe).

    compute devuelve (resultado, verificado). Un resultado no verificado
    sale con 1; los errores de entrada con 2.
    """
    log_run_action(config.subcommand, "inicio", config.inputs)
    try:
        config.validate()
        result, verified = compute(config)
    except Exception as e:
        details = ErrorClassifier.get_error_details(e)
        logger.error(f"{config.subcommand}: {details['exception_type']}: {details['technical_message']}")
        logger.debug(f"Traceback: {traceback.format_exc()}")
        errors = getattr(e, 'errors', None)
        if errors:
            details['errors'] = {k: str(v) for k, v in errors.items()}
        status = 'fail' if details['exit_code'] == EXIT_VERIFICATION else 'error'
        return details['exit_code'], build_envelope(config, status, {'error': details})
    exit_code = EXIT_OK if verified else EXIT_VERIFICATION
    status = 'pass' if verified else 'fail'
    log_run_action(config.subcommand, "fin", status)
    return exit_code, build_envelope(config, status, result)
