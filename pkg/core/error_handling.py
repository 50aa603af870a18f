import json
import logging
import traceback
from functools import wraps

from django.core.management.base import CommandError

# Configurar logger
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2


class ErrorTypes:
    """Tipos de errores del sistema"""
    INPUT = "INPUT_ERROR"
    VALIDATION = "VALIDATION_ERROR"
    LIMIT = "LIMIT_ERROR"
    UNSUPPORTED = "UNSUPPORTED_ERROR"
    VERIFICATION = "VERIFICATION_ERROR"
    FILE_OPERATION = "FILE_OPERATION_ERROR"
    UNKNOWN = "UNKNOWN_ERROR"


class ComputationError(Exception):
    """Excepción base de todos los cálculos"""
    error_type = ErrorTypes.UNKNOWN
    exit_code = EXIT_VERIFICATION
    user_message = "Error de cálculo"


class InputError(ComputationError):
    """Datos de entrada rechazados: la ejecución termina con código 2"""
    error_type = ErrorTypes.INPUT
    exit_code = EXIT_INPUT
    user_message = "Datos de entrada inválidos"


class VerificationError(ComputationError):
    """Una comprobación interna ha fallado: código 1"""
    error_type = ErrorTypes.VERIFICATION
    exit_code = EXIT_VERIFICATION
    user_message = "Falló una verificación"


# --- numberfield ---

class MalformedDocument(InputError):
    user_message = "Documento mal formado"

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class SignatureMismatch(InputError):
    user_message = "La signatura declarada no coincide con el número de raíces reales"


class UnitRankMismatch(InputError):
    user_message = "El número de unidades no coincide con el rango de Dirichlet"


class NonUnitGenerator(InputError):
    user_message = "Un generador declarado no tiene norma ±1"


class MalformedBasis(InputError):
    user_message = "La base entera no es válida"


class NotAnIdeal(InputError):
    user_message = "El retículo no es un ideal"


class TooLarge(InputError):
    error_type = ErrorTypes.LIMIT
    user_message = "La norma supera la cota de enumeración"


class NotNested(InputError):
    user_message = "Los niveles no están contenidos uno en otro"


# --- congruence ---

class NonDivisible(VerificationError):
    user_message = "División no exacta: indica un error previo"


# --- kostant ---

class DimensionOverflow(InputError):
    error_type = ErrorTypes.LIMIT
    user_message = "El complejo supera la dimensión máxima configurada"


class MismatchWithClosedForm(VerificationError):
    user_message = "El cálculo directo no coincide con la forma cerrada"


class NotAKernelMonomial(InputError):
    user_message = "El monomio no pertenece al núcleo"


class UnsupportedSignatureWeight(InputError):
    error_type = ErrorTypes.UNSUPPORTED
    user_message = "Combinación de signatura y peso no soportada"


class NotFredholm(InputError):
    error_type = ErrorTypes.UNSUPPORTED
    user_message = "El operador no es de Fredholm"


class MissingL2Dim(InputError):
    user_message = "Falta la dimensión del núcleo L2"


# --- integral ---

class RankOverflow(InputError):
    error_type = ErrorTypes.LIMIT
    user_message = "El rango del retículo supera el máximo configurado"


class NonCommuting(InputError):
    user_message = "Los generadores no conmutan"


class ConjugationMismatch(InputError):
    user_message = "Los datos de conjugación no son compatibles"


class NonUnimodular(InputError):
    user_message = "Un generador no es unimodular"


class NonCommutingLift(InputError):
    error_type = ErrorTypes.UNSUPPORTED
    user_message = "Los levantamientos de las unidades no conmutan"


class UnsupportedSignature(InputError):
    error_type = ErrorTypes.UNSUPPORTED
    user_message = "Signatura no soportada"


class MissingData(InputError):
    user_message = "Faltan datos"


# --- growth ---

class NoComplexPlace(InputError):
    error_type = ErrorTypes.UNSUPPORTED
    user_message = "El cuerpo no tiene lugares complejos"


class NotAcyclicWeight(InputError):
    user_message = "Los pesos deben ser distintos dos a dos"


class WrongSign(InputError):
    user_message = "El signo de t2 viola la condición de positividad"


class TrivialCohomology(InputError):
    user_message = "La cohomología del borde es trivial"


class ErrorClassifier:
    """Clasifica excepciones para los informes"""

    @staticmethod
    def get_error_details(exception):
        """Analiza la excepción y devuelve detalles estructurados"""
        error_type = ErrorTypes.UNKNOWN
        user_message = "Ha ocurrido un error inesperado"
        exit_code = EXIT_VERIFICATION

        if isinstance(exception, ComputationError):
            error_type = exception.error_type
            user_message = exception.user_message
            exit_code = exception.exit_code

        elif isinstance(exception, FileNotFoundError):
            error_type = ErrorTypes.FILE_OPERATION
            user_message = "Archivo no encontrado"
            exit_code = EXIT_INPUT

        elif isinstance(exception, PermissionError):
            error_type = ErrorTypes.FILE_OPERATION
            user_message = "Sin permisos para acceder al archivo"
            exit_code = EXIT_INPUT

        elif isinstance(exception, json.JSONDecodeError):
            error_type = ErrorTypes.INPUT
            user_message = "El archivo no es JSON válido"
            exit_code = EXIT_INPUT

        elif isinstance(exception, ValueError):
            error_type = ErrorTypes.VALIDATION
            user_message = "Valor inválido proporcionado"
            exit_code = EXIT_INPUT

        return {
            'type': error_type,
            'user_message': user_message,
            'technical_message': str(exception),
            'exception_type': type(exception).__name__,
            'exit_code': exit_code,
        }


def handle_errors(handler):
    """
    Decorador para los handle() de los comandos de gestión.

    Registra el error con su traza y lo convierte en CommandError con el
    código de salida que corresponde a su tipo.
    """
    @wraps(handler)
    def wrapper(*args, **kwargs):
        try:
            return handler(*args, **kwargs)
        except CommandError:
            raise
        except Exception as e:
            logger.error(f"Error en {handler.__qualname__}: {str(e)}")
            logger.debug(f"Traceback: {traceback.format_exc()}")
            details = ErrorClassifier.get_error_details(e)
            raise CommandError(
                f"{details['exception_type']}: {details['user_message']} ({details['technical_message']})",
                returncode=details['exit_code'],
            ) from e

    return wrapper


def validate_data(data, required_fields=None, validators=None):
    """
    Valida un documento JSON

    Args:
        data: Diccionario con los datos a validar
        required_fields: Lista de campos requeridos
        validators: Diccionario campo -> función que lanza ValueError/ComputationError
    """
    if not isinstance(data, dict):
        raise MalformedDocument("Se esperaba un objeto JSON")

    errors = {}

    if required_fields:
        for field in required_fields:
            if field not in data or data[field] is None:
                errors[field] = f"El campo {field} es requerido"

    if validators:
        for field, validator in validators.items():
            if field in data and field not in errors:
                try:
                    validator(data[field])
                except (ValueError, TypeError, ComputationError) as e:
                    errors[field] = str(e)

    if errors:
        raise MalformedDocument(
            "Errores de validación en los campos: " + ", ".join(sorted(errors)),
            errors=errors,
        )

    return True


def log_run_action(subcommand, action, details=None):
    """Registra las acciones de una ejecución"""
    logger.info(f"Subcomando {subcommand} - Acción: {action} - Detalles: {details}")
