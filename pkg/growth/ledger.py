"""
Bases de la cohomología del borde para la contabilidad de la torsión:
μ_+ , su dual de Poincaré μ_− y la matriz de emparejamiento.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from core.error_handling import MismatchWithClosedForm, TrivialCohomology
from core.linalg import determinant
from core.serialization import exact_str
from kostant.boundary import (
    L2_ACYCLIC_AND_BOUNDARY,
    MINUS,
    PLUS,
    acyclicity_status,
    base_rank,
    boundary_cohomology,
    ker_eth_S,
)

logger = logging.getLogger(__name__)


def _inversions(sequence):
    return sum(1 for i, j in itertools.combinations(range(len(sequence)), 2) if sequence[i] > sequence[j])


@dataclass(frozen=True)
class BasisElement:
    """Sección de la fibra por un monomio de formas de la base."""
    section: object
    base: tuple
    fiber_slots: int

    @property
    def degree(self):
        return self.section.fiber_degree + len(self.base)

    def forms(self):
        fiber = sorted(self.section.fiber_forms())
        return fiber + [self.fiber_slots + k for k in self.base]

    def to_json(self):
        return {'section': self.section.to_json(), 'base_forms': list(self.base), 'degree': self.degree}


def wedge_pairing(left, right, total_forms):
    """Coeficiente de left ∧ right frente a la forma de volumen (0 o ±1)."""
    forms = left.forms() + right.forms()
    if sorted(forms) != list(range(total_forms)):
        return 0
    return -1 if _inversions(forms) % 2 else 1


def _elements(sections, k, fiber_slots):
    return [
        BasisElement(sigma, subset, fiber_slots)
        for sigma in sections
        for size in range(k + 1)
        for subset in itertools.combinations(range(k), size)
    ]


def boundary_basis_ledger(signature, weight):
    """
    Registra μ_+ (formas de grado de fibra bajo), μ_− = dual de Poincaré de
    μ_+ y comprueba que el emparejamiento μ_+ × μ_− es la identidad.

    Cada μ_−[j] se multiplica por el signo de ⟨μ_+[j], μ_−[j]⟩; la matriz
    normalizada tiene entonces diagonal 1 por construcción y solo sus ceros
    fuera de la diagonal se comprueban. La torsión autodual se calcula con
    los bloques sin normalizar, cuyos determinantes son los signos.
    """
    cohomology = boundary_cohomology(signature, weight)
    if not cohomology.nontrivial:
        raise TrivialCohomology(f"H^*(∂X̄; E) = 0 para el peso {weight}")
    record = ker_eth_S(signature, weight)
    r1, r2 = signature
    k = base_rank(signature)
    fiber_slots = r1 + 2 * r2
    total_forms = fiber_slots + k
    plus = _elements(record.part(PLUS), k, fiber_slots)
    candidates = _elements(record.part(MINUS), k, fiber_slots)

    minus, signs = [], []
    for element in plus:
        partners = [c for c in candidates if wedge_pairing(element, c, total_forms)]
        if len(partners) != 1:
            raise MismatchWithClosedForm(f"{len(partners)} duales de Poincaré para {element.to_json()}")
        minus.append(partners[0])
        signs.append(wedge_pairing(element, partners[0], total_forms))
    if len(minus) != len(candidates):
        raise MismatchWithClosedForm("μ_− no es el dual de μ_+")

    raw = [[wedge_pairing(p, m, total_forms) for m in minus] for p in plus]
    pairing = [[raw[i][j] * signs[j] for j in range(len(minus))] for i in range(len(plus))]
    identity = all(pairing[i][j] == int(i == j) for i in range(len(plus)) for j in range(len(plus)))
    if not identity:
        raise MismatchWithClosedForm("El emparejamiento entre μ_+ y μ_− no es la identidad")

    torsion = Fraction(1)
    block_determinants = {}
    for q in sorted({p.degree for p in plus}):
        positions = [i for i, p in enumerate(plus) if p.degree == q]
        det = determinant([[raw[i][j] for j in positions] for i in positions])
        if det == 0:
            raise MismatchWithClosedForm(f"Emparejamiento degenerado en grado {q}")
        block_determinants[str(q)] = det
        torsion *= Fraction(abs(det)) ** (-1 if q % 2 else 1)

    status = acyclicity_status(signature, weight)
    l2_acyclic = status.status == L2_ACYCLIC_AND_BOUNDARY
    logger.debug(f"Base del borde para {weight}: {len(plus)} + {len(minus)} elementos")
    return {
        'signature': list(signature),
        'weight': weight.to_json(),
        'dims': list(cohomology.dims),
        'mu_plus': [e.to_json() for e in plus],
        'mu_minus': [dict(e.to_json(), sign=s) for e, s in zip(minus, signs)],
        'mu_plus_total': len(plus),
        'mu_minus_total': len(minus),
        'middle_total': sum(cohomology.middle_part),
        'pairing_is_identity': identity,
        'pairing_signs': signs,
        'block_determinants': block_determinants,
        'mu_X': {
            'l2': 'vacía (L²-acíclico)' if l2_acyclic else 'base ortonormal de H_(2)(X; E)',
            'infinity': 'preimagen de μ_− por la restricción H(X̄) → H(∂X̄)',
        },
        'mu_X_boundary': '∂(μ_+), dual de μ_− por el emparejamiento',
        'self_dual_torsion': exact_str(torsion),
        'change_of_basis': 'la matriz de paso de μ_∂X̄ a (μ_+, μ_−) tiene determinante 1',
        'acyclicity': status.to_json(),
    }
