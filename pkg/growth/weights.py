"""
Pesos acíclicos: pesos máximos λ = (d_σ) con entradas distintas y sus
constituyentes complejos (m, n, n̄) bajo la acción de Galois.
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass

from core.error_handling import (
    MalformedDocument,
    MismatchWithClosedForm,
    NoComplexPlace,
    NotAcyclicWeight,
    UnsupportedSignatureWeight,
)
from core.serialization import parse_exact_integer, require_list
from kostant.boundary import L2_ACYCLIC_AND_BOUNDARY, acyclicity_status, boundary_cohomology
from kostant.weights import Weight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaloisAction:
    """Grupo de permutaciones del conjunto de encajes."""
    permutations: tuple
    default: bool = False

    def to_json(self):
        return {
            'order': len(self.permutations),
            'default_symmetric_group': self.default,
            'permutations': [list(p) for p in self.permutations],
        }


def full_symmetric_group(degree):
    logger.warning(f"Sin datos de Galois: se usa el grupo simétrico S_{degree} (sobregeneración de constituyentes)")
    return GaloisAction(tuple(itertools.permutations(range(degree))), default=True)


def parse_galois_action(document, degree):
    """{"permutations": [[...], ...]}: debe ser un subgrupo de S_d."""
    raw = document.get('permutations') if isinstance(document, dict) else document
    try:
        perms = {tuple(parse_exact_integer(x) for x in p) for p in require_list(raw, 'permutations')}
    except (ValueError, TypeError) as e:
        raise MalformedDocument(f"Acción de Galois mal formada: {e}", errors={'galois': str(e)}) from e
    if any(sorted(p) != list(range(degree)) for p in perms):
        raise MalformedDocument(f"Las permutaciones deben serlo de 0..{degree - 1}")
    identity = tuple(range(degree))
    perms.add(identity)
    for p, q in itertools.product(list(perms), repeat=2):
        if tuple(p[q[i]] for i in range(degree)) not in perms:
            raise MalformedDocument("La acción de Galois no es cerrada por composición")
    return GaloisAction(tuple(sorted(perms)))


def check_weight_tuple(d_sigma):
    if len(set(d_sigma)) != len(d_sigma):
        raise NotAcyclicWeight(f"Las entradas de {list(d_sigma)} no son distintas dos a dos")
    if any(x < 0 for x in d_sigma):
        raise MalformedDocument(f"Las entradas de {list(d_sigma)} deben ser no negativas")
    return tuple(d_sigma)


@dataclass(frozen=True)
class AcyclicWeightSpec:
    d_sigma: tuple
    galois_action: GaloisAction

    def __post_init__(self):
        check_weight_tuple(self.d_sigma)


def constituents(spec, signature):
    """
    Pesos (m, n, n̄) de los constituyentes, con multiplicidad.

    Los encajes se ordenan: reales, después cada ν_j seguido de ν̄_j.
    """
    r1, r2 = signature
    if r1 + 2 * r2 != len(spec.d_sigma):
        raise MalformedDocument(f"{list(spec.d_sigma)} no tiene d_K = {r1 + 2 * r2} entradas")
    counts = Counter()
    for perm in spec.galois_action.permutations:
        slots = [spec.d_sigma[perm[k]] for k in range(len(perm))]
        counts[Weight(
            m=tuple(slots[:r1]),
            n=tuple(slots[r1 + 2 * j] for j in range(r2)),
            nbar=tuple(slots[r1 + 2 * j + 1] for j in range(r2)),
        )] += 1
    return sorted(counts.items(), key=lambda item: (item[0].m, item[0].n, item[0].nbar))


def describe_constituent(signature, weight, multiplicity):
    r1, _ = signature
    if any(x == y for x, y in zip(weight.n, weight.nbar)) or len(set(weight.m)) != len(weight.m):
        raise MismatchWithClosedForm(f"El constituyente {weight} es autoconjugado")
    status = acyclicity_status(signature, weight)
    try:
        boundary_total = sum(boundary_cohomology(signature, weight).dims)
    except UnsupportedSignatureWeight:
        boundary_total = None
    return {
        'weight': weight.to_json(),
        'multiplicity': multiplicity,
        'acyclicity': status.to_json(),
        'boundary_total_dimension': boundary_total,
        'fully_acyclic': r1 > 0 and status.status == L2_ACYCLIC_AND_BOUNDARY and boundary_total == 0,
    }


def generate_acyclic_weights(field, max_entry, galois_action=None):
    """Todas las tuplas d_σ con entradas distintas ≤ max_entry y sus constituyentes."""
    signature = (field.r1, field.r2)
    if field.r2 == 0:
        raise NoComplexPlace(f"El cuerpo {field.name} no tiene lugares complejos")
    if max_entry < 0:
        raise MalformedDocument("La cota de las entradas debe ser no negativa")
    action = galois_action or full_symmetric_group(field.degree)
    specs = []
    for d_sigma in itertools.permutations(range(max_entry + 1), field.degree):
        spec = AcyclicWeightSpec(d_sigma, action)
        specs.append({
            'd_sigma': list(d_sigma),
            'constituents': [
                describe_constituent(signature, weight, count)
                for weight, count in constituents(spec, signature)
            ],
        })
    logger.info(f"{len(specs)} pesos acíclicos con entradas ≤ {max_entry} para {field.name}")
    return specs
