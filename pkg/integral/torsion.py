"""
Contabilidad de torsión: fórmula de Cheeger, desigualdad de torsión
relativa y cotas de covolumen.
"""
import logging
import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from django.conf import settings
from sympy import Integer, Matrix, Rational, SympifyError, sqrt, sympify

from core.error_handling import MalformedDocument, MissingData
from core.serialization import parse_exact_integer, parse_exact_rational, require_list

logger = logging.getLogger(__name__)


def cheeger_torsion(table):
    """τ² = ∏_q |H^q_tor|^{(−1)^{q+1}}, racional exacto."""
    tau = Fraction(1)
    for entry in table.degrees:
        order = entry.torsion_order
        tau = tau * order if entry.degree % 2 else tau / order
    return tau


def _digits(precision=None):
    bits = precision or settings.CUSPTOR_FLOAT_PRECISION
    return max(1, int(bits * math.log10(2)))


def symbolic_json(value, precision=None):
    return {'exact': str(value), 'float': str(value.evalf(_digits(precision)))}


def parse_positive_real(value, name):
    """Número positivo exacto: entero, "p/q", decimal o expresión como "sqrt(2)"."""
    try:
        number = Rational(parse_exact_rational(value))
    except ValueError:
        if not isinstance(value, str):
            raise MalformedDocument(f"{name}: valor inválido {value!r}", errors={name: 'no numérico'})
        try:
            number = sympify(value, rational=True)
        except (SympifyError, TypeError) as e:
            raise MalformedDocument(f"{name}: expresión inválida {value!r}", errors={name: str(e)}) from e
    if not number.is_number or not number.is_positive:
        raise MalformedDocument(f"{name} debe ser positivo", errors={name: str(value)})
    return number


def gram_covolume(basis):
    """sqrt(det(B Bᵀ)) de una base de retículo dada por filas."""
    rows = [[Rational(parse_exact_rational(x)) for x in row] for row in basis]
    gram = Matrix(rows) * Matrix(rows).T
    det = gram.det()
    if det <= 0:
        raise MalformedDocument("La base del retículo es degenerada", errors={'basis': 'det Gram ≤ 0'})
    return sqrt(det)


def covolume_bounds(vol, dual_vol, index, b):
    """Cotas vol·I^{b/2} (superior) e I^{−b/2}/vol* (inferior)."""
    if index < 1:
        raise MalformedDocument("El índice debe ser positivo")
    exponent = Rational(b, 2)
    return {
        'upper': vol * Integer(index) ** exponent,
        'lower': Integer(index) ** (-exponent) / dual_vol,
    }


@dataclass(frozen=True)
class CovolumeData:
    """Covolúmenes por grado y signo, con su procedencia."""
    plus: dict
    minus: dict = dataclass_field(default_factory=dict)
    provenance: dict = dataclass_field(default_factory=dict)

    def to_json(self, precision=None):
        return {
            'plus': {str(q): symbolic_json(v, precision) for q, v in sorted(self.plus.items())},
            'minus': {str(q): symbolic_json(v, precision) for q, v in sorted(self.minus.items())},
            'provenance': {str(k): v for k, v in sorted(self.provenance.items())},
        }


def _parse_covolume_side(entries, name, provenance):
    values = {}
    if not isinstance(entries, dict):
        raise MalformedDocument(f"{name} debe ser un objeto grado → covolumen", errors={name: 'no es un objeto'})
    for key, entry in entries.items():
        q = parse_exact_integer(key)
        label = f"{name}[{q}]"
        if isinstance(entry, dict) and 'basis' in entry:
            values[q] = gram_covolume(require_list(entry['basis'], label))
            provenance[label] = entry.get('provenance', 'gram')
        elif isinstance(entry, dict):
            values[q] = parse_positive_real(entry.get('value'), label)
            provenance[label] = entry.get('provenance', 'ingested')
        else:
            values[q] = parse_positive_real(entry, label)
            provenance[label] = 'ingested'
    return values


def parse_covolumes(document):
    """{"plus": {q: valor | {"value"} | {"basis"}}, "minus": {...}}"""
    provenance = {}
    try:
        plus = _parse_covolume_side(document.get('plus', {}), 'plus', provenance)
        minus = _parse_covolume_side(document.get('minus', {}), 'minus', provenance)
    except ValueError as e:
        raise MalformedDocument(f"Covolúmenes mal formados: {e}", errors={'covolumes': str(e)}) from e
    return CovolumeData(plus, minus, provenance)


def _orders(values, name):
    try:
        orders = [parse_exact_integer(v) for v in require_list(values, name)]
    except ValueError as e:
        raise MalformedDocument(f"{name}: {e}", errors={name: str(e)}) from e
    if any(t < 1 for t in orders):
        raise MalformedDocument(f"{name}: los órdenes deben ser positivos")
    return orders


def relative_torsion_bound(r1, relative_torsion, covolumes, absolute_torsion=None):
    """
    Compara ambos lados de la desigualdad de torsión relativa.

    vol_rel(q) = vol_+(q−1)/I_q con 1 ≤ I_q ≤ |H^q_tor(X̄)|; el lado
    izquierdo se evalúa en los extremos de los índices. Sin torsión
    absoluta se usa |H^q(X̄)| = |H^{2r1+4−q}(X̄, ∂X̄)|.
    """
    top = len(relative_torsion) - 1
    if top < 0:
        raise MissingData("Falta la torsión relativa")
    if absolute_torsion is None:
        absolute_torsion = [
            relative_torsion[2 * r1 + 4 - q] if 0 <= 2 * r1 + 4 - q <= top else 1
            for q in range(top + 1)
        ]
    elif len(absolute_torsion) != top + 1:
        raise MissingData(f"La torsión absoluta tiene {len(absolute_torsion)} grados, se esperaban {top + 1}")
    missing = [q - 1 for q in range(1, top + 1) if q - 1 not in covolumes.plus]
    if missing:
        raise MissingData(f"Faltan covolúmenes vol_+ en grados {missing}")

    def previous_volume(q):
        return covolumes.plus[q - 1] if q >= 1 else Integer(1)

    lhs_min, lhs_max, rhs = Integer(1), Integer(1), Integer(1)
    for q in range(top + 1):
        t, bound, volume = Integer(relative_torsion[q]), Integer(absolute_torsion[q]), previous_volume(q)
        if (q + r1) % 2 == 0:
            lhs_max *= t * bound / volume
            lhs_min *= t / volume
            rhs *= t ** 2 / volume
        else:
            lhs_max *= volume / t
            lhs_min *= volume / (t * bound)
            rhs *= volume
    slack = (rhs - lhs_max).simplify()
    holds = bool(slack >= 0)
    if not holds:
        logger.warning(f"Desigualdad de torsión relativa violada: holgura {slack}")
    return {
        'lhs_min': lhs_min,
        'lhs_max': lhs_max,
        'rhs': rhs,
        'slack': slack,
        'holds': holds,
        'absolute_torsion': absolute_torsion,
    }


def parse_inequality_document(document):
    """{"r1", "relative_torsion", "absolute_torsion"?, "covolumes", "covolume_bounds"?}"""
    if not isinstance(document, dict):
        raise MalformedDocument("El documento de la desigualdad debe ser un objeto")
    for name in ('r1', 'relative_torsion', 'covolumes'):
        if name not in document:
            raise MissingData(f"Falta el campo {name}")
    try:
        r1 = parse_exact_integer(document['r1'])
    except ValueError as e:
        raise MalformedDocument(f"r1: {e}", errors={'r1': str(e)}) from e
    relative = _orders(document['relative_torsion'], 'relative_torsion')
    absolute = document.get('absolute_torsion')
    if absolute is not None:
        absolute = _orders(absolute, 'absolute_torsion')
    covolumes = parse_covolumes(document['covolumes'])
    bounds = []
    for entry in require_list(document.get('covolume_bounds', []), 'covolume_bounds'):
        try:
            bounds.append({
                'vol': parse_positive_real(entry['vol'], 'vol'),
                'dual_vol': parse_positive_real(entry['dual_vol'], 'dual_vol'),
                'index': parse_exact_integer(entry['index']),
                'b': parse_exact_integer(entry['b']),
            })
        except (KeyError, ValueError) as e:
            raise MalformedDocument(f"covolume_bounds: {e}", errors={'covolume_bounds': str(e)}) from e
    return r1, relative, absolute, covolumes, bounds
