"""
Formato de intercambio: JSON con enteros y racionales exactos como cadenas.
"""
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path

from django.conf import settings
from sympy import Float, Rational

from .error_handling import MalformedDocument


def parse_exact_integer(value):
    """Entero desde int o cadena decimal; rechaza floats y bools."""
    if isinstance(value, bool):
        raise ValueError(f"Entero inválido: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return int(text, 10)
        except ValueError:
            pass
    raise ValueError(f"Entero inválido: {value!r}")


def parse_exact_rational(value):
    """Racional desde int, cadena "p/q" o decimal ("-0.05")."""
    if isinstance(value, bool):
        raise ValueError(f"Racional inválido: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ValueError(f"Racional inválido: {value!r}")


def parse_integer_matrix(value, rows=None, cols=None):
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ValueError("Se esperaba una matriz (lista de filas)")
    matrix = [[parse_exact_integer(x) for x in row] for row in value]
    if rows is not None and len(matrix) != rows:
        raise ValueError(f"Se esperaban {rows} filas, hay {len(matrix)}")
    width = len(matrix[0]) if matrix else 0
    if any(len(r) != width for r in matrix):
        raise ValueError("Filas de longitud distinta")
    if cols is not None and width != cols:
        raise ValueError(f"Se esperaban {cols} columnas, hay {width}")
    return matrix


def exact_str(value):
    """Serializa un entero o racional exacto como "p/q" (o "n")."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def float_str(value, precision=None):
    """Representación decimal con `precision` bits significativos."""
    bits = precision or settings.CUSPTOR_FLOAT_PRECISION
    digits = max(1, int(bits * math.log10(2)))
    if isinstance(value, Fraction):
        value = Rational(value.numerator, value.denominator)
    return str(Float(value, digits))


def exact_and_float(value, precision=None):
    return {'exact': exact_str(value), 'float': float_str(value, precision)}


def load_json_document(path):
    """Lee un archivo JSON; FileNotFoundError y JSONDecodeError se propagan."""
    with open(Path(path), encoding='utf-8') as fh:
        return json.load(fh)


def dump_report(document):
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_fingerprint(document):
    """Huella sha256 del informe sin la marca temporal."""
    stripped = {k: v for k, v in document.items() if k not in ('generated_at', 'fingerprint')}
    return hashlib.sha256(dump_report(stripped).encode('utf-8')).hexdigest()


def require_list(value, name):
    if not isinstance(value, list):
        raise MalformedDocument(f"El campo {name} debe ser una lista", errors={name: "no es una lista"})
    return value
