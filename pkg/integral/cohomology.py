"""
Cohomología entera de complejos finitos: rangos libres, factores
invariantes (forma normal de Smith) y filtración por grado de la fibra.
"""
import itertools
import logging
from dataclasses import dataclass, replace

from core.error_handling import MalformedDocument, MismatchWithClosedForm, UnsupportedSignature
from core.linalg import (
    canonical_invariant_factors,
    exterior_minor,
    integer_invariant_factors,
    mat_sub_identity,
    nullspace_qq,
    rank_qq,
    transpose,
)
from core.serialization import parse_exact_integer, require_list

from .complexes import fiber_degree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegreeCohomology:
    degree: int
    free: int
    torsion: tuple
    filtration: tuple = ()

    @property
    def torsion_order(self):
        order = 1
        for factor in self.torsion:
            order *= factor
        return order

    def to_json(self):
        data = {
            'degree': self.degree,
            'free': self.free,
            'torsion': [str(t) for t in self.torsion],
            'torsion_order': str(self.torsion_order),
        }
        if self.filtration:
            data['filtration'] = list(self.filtration)
        return data


@dataclass(frozen=True)
class IntegralCohomologyTable:
    degrees: tuple
    signature: tuple = None

    @property
    def free_ranks(self):
        return [entry.free for entry in self.degrees]

    @property
    def torsion_orders(self):
        return [entry.torsion_order for entry in self.degrees]

    @property
    def euler_characteristic(self):
        return sum((-1) ** entry.degree * entry.free for entry in self.degrees)

    def to_json(self):
        data = {
            'degrees': [entry.to_json() for entry in self.degrees],
            'free_ranks': self.free_ranks,
            'euler_characteristic': self.euler_characteristic,
        }
        if self.signature is not None:
            data['signature'] = list(self.signature)
        return data


def parse_table(document):
    """Tabla desde {"degrees": [{"free": n, "torsion": [...]}, ...]}."""
    entries = document.get('degrees') if isinstance(document, dict) else document
    degrees = []
    try:
        for q, entry in enumerate(require_list(entries, 'degrees')):
            free = parse_exact_integer(entry.get('free', 0))
            torsion = [parse_exact_integer(t) for t in require_list(entry.get('torsion', []), 'torsion')]
            if free < 0 or any(t < 1 for t in torsion):
                raise ValueError(f"grado {q}: rangos y órdenes deben ser positivos")
            degrees.append(DegreeCohomology(q, free, tuple(canonical_invariant_factors(torsion))))
    except (ValueError, AttributeError) as e:
        raise MalformedDocument(f"Tabla de cohomología mal formada: {e}", errors={'table': str(e)}) from e
    return IntegralCohomologyTable(tuple(degrees))


def _columns(matrix):
    return transpose(matrix) if matrix else []


def fiber_filtration_ranks(complex_, q, max_fiber_degree):
    """
    rank F^p H^q para p = 0..max: clases representables por cociclos de
    grado de fibra ≥ p. rank F^p = rank(Z_p + B) − rank(B).
    """
    dim = complex_.dim(q)
    if dim == 0:
        return tuple(0 for _ in range(max_fiber_degree + 1))
    boundaries = _columns(complex_.matrix(q - 1)) if q >= 1 and complex_.dim(q - 1) else []
    boundary_rank = rank_qq(boundaries, dim) if boundaries else 0
    differential = complex_.matrix(q)
    labels = complex_.labels[q]
    ranks = []
    for p in range(max_fiber_degree + 1):
        support = [n for n, label in enumerate(labels) if fiber_degree(label) >= p]
        if not support:
            ranks.append(0)
            continue
        if complex_.dim(q + 1):
            restricted = [[row[n] for n in support] for row in differential]
            local = nullspace_qq(restricted, len(support))
        else:
            local = [[int(i == j) for j in range(len(support))] for i in range(len(support))]
        cycles = []
        for vector in local:
            full = [0] * dim
            for n, value in zip(support, vector):
                full[n] = value
            cycles.append(full)
        if not cycles:
            ranks.append(0)
            continue
        ranks.append(rank_qq(cycles + boundaries, dim) - boundary_rank)
    return tuple(ranks)


def smith_cohomology(complex_, filtration=True):
    """
    H^q = ker d^q / im d^{q−1}: rango libre dim − rank d^q − rank d^{q−1},
    torsión = factores invariantes de d^{q−1}.
    """
    top = complex_.top_degree
    ranks = [complex_.rank(q) for q in range(top + 1)]
    fiber_rank = complex_.metadata.get('fiber_rank')
    degrees = []
    for q in range(top + 1):
        free = complex_.dim(q) - ranks[q] - (ranks[q - 1] if q >= 1 else 0)
        torsion = ()
        if q >= 1 and complex_.dim(q - 1):
            torsion = tuple(integer_invariant_factors(complex_.matrix(q - 1), complex_.dim(q - 1)))
        steps = ()
        if filtration and fiber_rank is not None:
            steps = fiber_filtration_ranks(complex_, q, fiber_rank)
        degrees.append(DegreeCohomology(q, free, torsion, steps))
    rep = complex_.metadata.get('rep')
    table = IntegralCohomologyTable(tuple(degrees), rep.signature if rep is not None else None)
    logger.debug(f"Cohomología: libres {table.free_ranks}, torsión {table.torsion_orders}")
    return table


@dataclass(frozen=True)
class PlusMinusSplit:
    plus: tuple
    minus: tuple

    @property
    def plus_total(self):
        return sum(self.plus)

    @property
    def minus_total(self):
        return sum(self.minus)

    def to_json(self):
        return {
            'plus': list(self.plus),
            'minus': list(self.minus),
            'plus_total': self.plus_total,
            'minus_total': self.minus_total,
        }


def _with_filtration(table, complex_):
    fiber_rank = complex_.metadata.get('fiber_rank')
    if fiber_rank is None:
        raise UnsupportedSignature("El complejo no lleva el grado de fibra")
    rep = complex_.metadata.get('rep')
    signature = table.signature or (rep.signature if rep is not None else None)
    degrees = tuple(
        replace(entry, filtration=fiber_filtration_ranks(complex_, entry.degree, fiber_rank))
        for entry in table.degrees
    )
    return IntegralCohomologyTable(degrees, signature)


def pm_split_integral(table, complex_=None):
    """
    Reparte la parte libre según el grado de fibra: menos = F^{r1+r2},
    más = complemento de F^{r2+1}. Solo para r2 = 1 y r1 > 0.

    Con `complex_` la filtración se recalcula a partir del complejo total;
    sin él se usa la que ya lleva la tabla.
    """
    if complex_ is not None:
        table = _with_filtration(table, complex_)
    if table.signature is None:
        raise UnsupportedSignature("La tabla no lleva signatura")
    r1, r2 = table.signature
    if r2 != 1 or r1 <= 0:
        raise UnsupportedSignature(f"La descomposición ± requiere r2 = 1 y r1 > 0, no {table.signature}")
    if any(not entry.filtration for entry in table.degrees):
        raise UnsupportedSignature("La tabla no lleva la filtración por grado de fibra")
    minus = tuple(entry.filtration[r1 + r2] for entry in table.degrees)
    plus = tuple(entry.free - entry.filtration[r2 + 1] for entry in table.degrees)
    frees = table.free_ranks
    if any(p + m != f for p, m, f in zip(plus, minus, frees)):
        raise MismatchWithClosedForm(f"Rangos ± no aditivos: {plus} + {minus} ≠ {frees}")
    top = 2 * r1 + 3 * r2 - 1
    if len(table.degrees) == top + 1 and any(plus[q] != minus[top - q] for q in range(top + 1)):
        raise MismatchWithClosedForm(f"Rangos ± sin dualidad: {plus}, {minus}")
    return PlusMinusSplit(plus, minus)


def exterior_power(matrix, p):
    n = len(matrix)
    subsets = list(itertools.combinations(range(n), p))
    return [[int(exterior_minor(matrix, S, T)) for T in subsets] for S in subsets]


def wang_sequence_oracle(monodromy):
    """
    H^n(T^d ⋊_A Z; Z) = coker(Λ^{n−1}A − I) ⊕ ker(Λ^n A − I).
    Devuelve [(rango libre, factores invariantes)] para n = 0..d + 1.
    """
    d = len(monodromy)
    shifted = [mat_sub_identity(exterior_power(monodromy, p)) for p in range(d + 1)]
    groups = []
    for n in range(d + 2):
        free, torsion = 0, []
        if n >= 1:
            m = shifted[n - 1]
            free += len(m) - rank_qq(m, len(m))
            torsion = integer_invariant_factors(m, len(m))
        if n <= d:
            m = shifted[n]
            free += len(m) - rank_qq(m, len(m))
        groups.append((free, tuple(torsion)))
    return groups
