"""
Niveles de congruencia Γ(n) ⊂ SL(2, O_K) y sus índices.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from core.error_handling import MalformedDocument, MismatchWithClosedForm, NonDivisible, NotNested, TooLarge
from core.serialization import parse_exact_integer, require_list

from numberfield.fields import parse_ideal
from numberfield.ideals import ideal_contains, ideal_sum
from numberfield.residues import residue_ring

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CongruenceLevel:
    """Subgrupo de congruencia principal Γ(n)"""
    field: object
    ideal: object
    # Declarado, no comprobado
    torsion_free_flag: bool = False
    # Factorización ingerida: ((N(p), e), ...)
    factorization: tuple = ()

    @property
    def norm(self):
        return self.ideal.norm

    def to_json(self):
        return {
            'ideal': self.ideal.to_json(),
            'norm': self.norm,
            'torsion_free': self.torsion_free_flag,
            'factorization': [{'norm': q, 'exponent': e} for q, e in self.factorization],
        }


def make_level(field, ideal, torsion_free_flag=False, factorization=()):
    if torsion_free_flag and ideal.norm == 1:
        raise MalformedDocument("Un nivel declarado sin torsión debe ser un ideal propio")
    factorization = tuple((int(q), int(e)) for q, e in factorization)
    if factorization:
        product = 1
        for q, e in factorization:
            if q < 2 or e < 1:
                raise MalformedDocument(f"Factor inválido ({q}, {e})")
            product *= q ** e
        if product != ideal.norm:
            raise MalformedDocument(f"La factorización tiene norma {product}, el ideal {ideal.norm}")
    return CongruenceLevel(field, ideal, bool(torsion_free_flag), factorization)


def load_level(field, document):
    """Nivel desde {"ideal": ..., "torsion_free": bool, "factorization": [...]}"""
    if not isinstance(document, dict) or 'ideal' not in document:
        document = {'ideal': document}
    ideal = parse_ideal(field, document['ideal'])
    factorization = []
    for entry in require_list(document.get('factorization', []), 'factorization'):
        try:
            factorization.append((parse_exact_integer(entry['norm']), parse_exact_integer(entry.get('exponent', 1))))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedDocument(f"Factorización mal formada: {e}", errors={'factorization': str(e)}) from e
    return make_level(field, ideal, bool(document.get('torsion_free', False)), factorization)


def unimodular_pair_count(ring):
    """
    Número de pares (a, b) de O_K/n que generan el ideal unidad.

    Agrupa los elementos por el ideal (a) + n y cuenta los pares de ideales
    coprimos.
    """
    field = ring.field
    classes = Counter(ring.ideal_classes.values())
    total = 0
    for first, count_first in classes.items():
        for second, count_second in classes.items():
            if ideal_sum(field, first, second).is_unit_ideal():
                total += count_first * count_second
    return total


def _formula_order(level):
    value = Fraction(level.norm) ** 3
    for q, _ in level.factorization:
        value *= 1 - Fraction(1, q * q)
    if value.denominator != 1:
        raise NonDivisible(f"La fórmula de |SL2(O/n)| no da un entero: {value}")
    return int(value)


def sl2_order_mod(field, ideal, factorization=(), bound=None):
    """
    |SL(2, O_K/n)|.

    Por enumeración cuando N(n) no supera la cota (cada par unimodular
    (a, b) admite exactamente N(n) pares (c, d) con ad − bc = 1); por la
    fórmula N³·∏(1 − N(p)^{-2}) solo si hay factorización ingerida. Si
    ambos caminos se ejecutan, deben coincidir.
    """
    level = make_level(field, ideal, factorization=factorization)
    enumerated = formula = None
    try:
        ring = residue_ring(field, ideal, bound)
    except TooLarge:
        if not level.factorization:
            raise
        logger.warning(f"N(n) = {ideal.norm} fuera de la cota: se usa la fórmula con factorización")
    else:
        enumerated = ideal.norm * unimodular_pair_count(ring)
    if level.factorization:
        formula = _formula_order(level)
    if enumerated is not None and formula is not None and enumerated != formula:
        raise MismatchWithClosedForm(f"|SL2(O/n)|: enumeración {enumerated}, fórmula {formula}")
    return enumerated if enumerated is not None else formula


def level_order(level, bound=None):
    return sl2_order_mod(level.field, level.ideal, level.factorization, bound)


def check_nested(level1, level2):
    if level1.field != level2.field:
        raise MalformedDocument("Los dos niveles pertenecen a cuerpos distintos")
    if not ideal_contains(level1.ideal, level2.ideal):
        raise NotNested(f"{level2.ideal} no está contenido en {level1.ideal}")


def exact_quotient(numerator, denominator, what):
    if numerator % denominator:
        raise NonDivisible(f"{what}: {numerator} no es múltiplo de {denominator}")
    return numerator // denominator


def index(level1, level2, bound=None):
    """[Γ(n1) : Γ(n2)] = |SL2(O/n2)| / |SL2(O/n1)|"""
    check_nested(level1, level2)
    if level1.ideal == level2.ideal:
        return 1
    return exact_quotient(level_order(level2, bound), level_order(level1, bound), "[Γ(n1):Γ(n2)]")
