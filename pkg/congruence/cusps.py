"""
Cúspides de Γ(n), estabilizadores parabólicos y sumas de despreciabilidad.

Las cúspides de cada clase de ideales se identifican con las órbitas de
pares unimodulares de O_K/n bajo el escalado por H(n), la imagen de las
unidades globales.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from sympy import Integer, Rational, log as sym_log

from core.error_handling import MalformedDocument, MismatchWithClosedForm, NotNested, TooLarge
from core.linalg import column_hnf, transpose
from core.parallel import parallel_map

from numberfield.ideals import ideal_contains, ideal_product, ideal_sum
from numberfield.residues import reduction_ring, residue_ring, unit_image, unit_index_mod

from .levels import check_nested, exact_quotient, index, level_order, make_level

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CuspRep:
    """Cúspide η = [a : b] de Γ(n) con su columna residual módulo n"""
    eta: tuple
    ideal_class_index: int
    residue_column: tuple
    orbit_size: int
    stabilizer_order: int

    def to_json(self):
        return {
            'eta': [list(x) for x in self.eta],
            'ideal_class_index': self.ideal_class_index,
            'residue_column': [list(x) for x in self.residue_column],
            'orbit_size': self.orbit_size,
            'stabilizer_order': self.stabilizer_order,
        }


@dataclass(frozen=True)
class ParabolicStabilizerData:
    """Γ(n)_η: traslaciones por `lattice` y unidades λ ≡ 1 mod n"""
    lattice: object
    unit_level: object
    unit_generators: tuple
    unit_exponents: tuple
    # Γ(n)_η contiene unidades de torsión ≠ 1
    has_torsion: bool

    @property
    def lattice_rank(self):
        return self.lattice.degree

    @property
    def unit_rank(self):
        return len(self.unit_generators)

    def to_json(self):
        return {
            'lattice': self.lattice.to_json(),
            'lattice_norm': self.lattice.norm,
            'unit_condition': self.unit_level.to_json(),
            'unit_generators': [list(u) for u in self.unit_generators],
            'unit_exponents': [list(e) for e in self.unit_exponents],
            'has_torsion': self.has_torsion,
        }


def infinity_cusp(level):
    field = level.field
    ring = reduction_ring(field, level.ideal)
    return CuspRep(
        eta=(field.one, field.zero()),
        ideal_class_index=0,
        residue_column=(ring.one, ring.zero),
        orbit_size=len(unit_image(field, level.ideal)),
        stabilizer_order=level.norm * len(unit_image(field, level.ideal)),
    )


def _unimodular_pairs(ring):
    """Pares (a, c) que generan O_K/n, en orden lexicográfico de índices."""
    classes = ring.ideal_classes
    field = ring.field
    coprime = {}
    pairs = []
    for a in ring.elements:
        for c in ring.elements:
            key = (classes[a], classes[c])
            if key not in coprime:
                coprime[key] = ideal_sum(field, *key).is_unit_ideal()
            if coprime[key]:
                pairs.append((a, c))
    return pairs


def cusp_orbits(ring, units):
    """Órbitas de pares unimodulares bajo el escalado por `units`."""
    seen = set()
    orbits = []
    for a, c in _unimodular_pairs(ring):
        if (a, c) in seen:
            continue
        orbit = {(ring.mul(u, a), ring.mul(u, c)) for u in units}
        seen |= orbit
        orbits.append(((a, c), len(orbit)))
    return orbits


def cusp_set(level, bound=None):
    """
    Representantes de las cúspides de Γ(n), clase por clase.

    Cada cúspide lleva su tamaño de órbita |H(n)| y el orden del
    estabilizador de su columna en SL(2, O_K/n), N(n)·|H(n)|.
    """
    field = level.field
    ring = residue_ring(field, level.ideal, bound)
    units = sorted(unit_image(field, level.ideal))
    orbits = cusp_orbits(ring, units)
    cusps = []
    for k, representative in enumerate(field.class_group):
        for column, size in orbits:
            cusps.append(CuspRep(
                eta=representative.generators,
                ideal_class_index=k,
                residue_column=column,
                orbit_size=size,
                stabilizer_order=level.norm * size,
            ))
    logger.info(f"Γ(n) con N(n)={level.norm}: {len(cusps)} cúspides")
    return cusps


def cusp_count(level, bound=None):
    """Número de cúspides por la fórmula h·|SL2(O/n)| / (N(n)·|H(n)|)."""
    field = level.field
    order = level_order(level, bound)
    units = len(unit_image(field, level.ideal))
    return exact_quotient(field.class_number * order, level.norm * units, "#cúspides")


def _check_cusp(level, cusp):
    if not 0 <= cusp.ideal_class_index < level.field.class_number:
        raise MalformedDocument(f"Índice de clase {cusp.ideal_class_index} fuera de rango")


def parabolic_stabilizer(level, cusp):
    """
    Datos de Γ(n)_η: retículo de traslaciones n·𝔞^{-2} y generadores libres
    del grupo de unidades λ ≡ 1 mod n.

    El subgrupo de exponentes k ∈ Z^r con ∏ ε^k ∈ ⟨ζ⟩ mod n se obtiene por
    recorrido del grafo de Cayley de (O/n)^*/⟨ζ⟩; cada generador se
    corrige después por una raíz de la unidad.
    """
    _check_cusp(level, cusp)
    field = level.field
    representative = field.class_group[cusp.ideal_class_index]
    lattice = ideal_product(field, level.ideal, representative.translation_lattice)
    ring = reduction_ring(field, level.ideal)
    torsion = sorted(ring.subgroup_generated([field.torsion_generator]))

    def canonical(x):
        return min(ring.mul(x, t) for t in torsion)

    r = field.unit_rank
    generators_mod = [ring.reduce(u) for u in field.unit_generators]
    start = canonical(ring.one)
    exponents = {start: (0,) * r}
    frontier = [start]
    relations = []
    while frontier:
        nxt = []
        for x in frontier:
            for a, g in enumerate(generators_mod):
                y = canonical(ring.mul(x, g))
                step = tuple(e + (1 if b == a else 0) for b, e in enumerate(exponents[x]))
                if y in exponents:
                    relation = [s - t for s, t in zip(step, exponents[y])]
                    if any(relation):
                        relations.append(relation)
                else:
                    exponents[y] = step
                    nxt.append(y)
        frontier = nxt

    unit_generators, unit_exponents = [], []
    if r:
        basis = transpose(column_hnf(transpose(relations, r), len(relations)), r)
        zeta = field.torsion_generator
        w = field.torsion_unit_order
        for k in basis:
            unit = field.unit_product(k)
            image = ring.reduce(unit)
            shift = next(j for j in range(w) if ring.reduce(field.power(zeta, j)) == image)
            unit_generators.append(field.mul(unit, field.power(zeta, (w - shift) % w)))
            unit_exponents.append(tuple(k))
    has_torsion = any(
        ring.reduce(field.power(field.torsion_generator, j)) == ring.one
        for j in range(1, field.torsion_unit_order)
    )
    return ParabolicStabilizerData(
        lattice=lattice,
        unit_level=level.ideal,
        unit_generators=tuple(unit_generators),
        unit_exponents=tuple(unit_exponents),
        has_torsion=has_torsion,
    )


def parabolic_index(level1, level2, cusp, bound=None):
    """[Γ(n1)_η : Γ(n2)_η] = (N(n2)/N(n1)) · (índice de unidades)"""
    check_nested(level1, level2)
    _check_cusp(level1, cusp)
    if level1.ideal == level2.ideal:
        return 1
    lattice_index = exact_quotient(level2.norm, level1.norm, "índice de retículos")
    return lattice_index * unit_index_mod(level1.field, level1.ideal, level2.ideal, bound)


def cusp_fiber_count(level1, level2, cusp, bound=None):
    """Número de cúspides de Γ(n2) sobre una cúspide de Γ(n1)."""
    return exact_quotient(
        index(level1, level2, bound),
        parabolic_index(level1, level2, cusp, bound),
        "index / parabolic_index",
    )


def cusps_above(level1, level2, bound=None):
    """
    Recuento directo: para cada cúspide de Γ(n1), cuántas cúspides de Γ(n2)
    se reducen a ella.
    """
    check_nested(level1, level2)
    field = level1.field
    ring1 = residue_ring(field, level1.ideal, bound)
    units1 = sorted(unit_image(field, level1.ideal))
    lower = cusp_set(level1, bound)
    key_of = {}
    for orbit_rep, _ in cusp_orbits(ring1, units1):
        for u in units1:
            key_of[(ring1.mul(u, orbit_rep[0]), ring1.mul(u, orbit_rep[1]))] = orbit_rep
    counts = Counter()
    for cusp in cusp_set(level2, bound):
        a, c = cusp.residue_column
        counts[(cusp.ideal_class_index, key_of[(ring1.reduce(a), ring1.reduce(c))])] += 1
    return [(cusp, counts[(cusp.ideal_class_index, cusp.residue_column)]) for cusp in lower]


@dataclass(frozen=True)
class NegligibilityTerm:
    norm: int
    parabolic_indices: tuple
    cusp_sum: Fraction
    # Σ log(P)/P como expresión exacta de sympy
    log_sum: object

    def to_json(self, precision_digits=19):
        return {
            'norm': self.norm,
            'parabolic_indices': list(self.parabolic_indices),
            'cusp_sum': {
                'exact': f"{self.cusp_sum.numerator}/{self.cusp_sum.denominator}" if self.cusp_sum.denominator != 1
                else str(self.cusp_sum.numerator),
                'float': str(Rational(self.cusp_sum.numerator, self.cusp_sum.denominator).evalf(precision_digits)),
            },
            'log_sum': {
                'exact': str(self.log_sum),
                'float': str(self.log_sum.evalf(precision_digits)),
            },
        }


def _negligibility_term(task):
    level1, cusps, ideal, bound = task
    level = make_level(level1.field, ideal)
    cache = {}
    cusp_sum, log_sum = Fraction(0), Integer(0)
    indices = []
    for cusp in cusps:
        if cusp.ideal_class_index not in cache:
            cache[cusp.ideal_class_index] = parabolic_index(level1, level, cusp, bound)
        p = cache[cusp.ideal_class_index]
        indices.append(p)
        cusp_sum += Fraction(1, p)
        log_sum += sym_log(Integer(p)) / p
    return NegligibilityTerm(ideal.norm, tuple(sorted(set(indices))), cusp_sum, log_sum)


def negligibility_sums(level1, ideal_sequence, bound=None, threads=None):
    """
    Para cada n_i: Σ_η 1/P_η y Σ_η log(P_η)/P_η, con P_η el índice
    parabólico [Γ(n1)_η : Γ(n_i)_η].
    """
    previous = level1.ideal
    for ideal in ideal_sequence:
        if not ideal_contains(previous, ideal):
            raise NotNested("La sucesión de ideales no es decreciente")
        previous = ideal
    try:
        cusps = cusp_set(level1, bound)
    except TooLarge:
        # Mismo índice en todas las cúspides de una clase
        logger.warning("Γ(n1) fuera de la cota: una cúspide por clase con multiplicidad por fórmula")
        per_class = cusp_count(level1, bound) // level1.field.class_number
        cusps = [
            CuspRep(rep.generators, k, (), 0, 0)
            for k, rep in enumerate(level1.field.class_group)
            for _ in range(per_class)
        ]
    tasks = [(level1, cusps, ideal, bound) for ideal in ideal_sequence]
    return parallel_map(_negligibility_term, tasks, threads)


def check_fiber_identity(level1, level2, bound=None):
    """Comprueba fibra = índice / índice parabólico y la partición de cúspides."""
    direct = cusps_above(level1, level2, bound)
    mismatches = []
    for cusp, count in direct:
        predicted = cusp_fiber_count(level1, level2, cusp, bound)
        if predicted != count:
            mismatches.append({'cusp': cusp.to_json(), 'direct': count, 'predicted': predicted})
    total = sum(count for _, count in direct)
    expected_total = len(cusp_set(level2, bound))
    if total != expected_total:
        raise MismatchWithClosedForm(f"Partición de cúspides: {total} ≠ {expected_total}")
    return direct, mismatches
