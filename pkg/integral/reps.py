"""
Retículos Γ_η-estables: acción de las traslaciones (T_i) y de las
unidades (U_a, c^{(a)}) sobre un Z-módulo libre Λ.

Compatibilidad exigida: U_a T_i U_a^{-1} = ∏_j T_j^{c^{(a)}_{ij}}.
"""
import logging
from dataclasses import dataclass, field as dataclass_field
from math import comb

from django.conf import settings

from congruence.cusps import parabolic_stabilizer
from core.error_handling import (
    ConjugationMismatch,
    MalformedDocument,
    NonCommuting,
    NonUnimodular,
    RankOverflow,
    validate_data,
)
from core.linalg import determinant, identity, integer_inverse, mat_mul, mat_pow, solve_upper_triangular, zeros
from core.serialization import parse_exact_integer, parse_integer_matrix, require_list

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeRep:
    rank: int
    fiber_gens: tuple
    base_gens: tuple
    conj: tuple
    provenance: dict = dataclass_field(default_factory=dict, compare=False)

    @property
    def fiber_rank(self):
        return len(self.fiber_gens)

    @property
    def base_rank(self):
        return len(self.base_gens)

    @property
    def signature(self):
        """(r1, r2) deducida de d_K = r1 + 2r2 y r = r1 + r2 − 1."""
        d, r = self.fiber_rank, self.base_rank
        return (2 * r + 2 - d, d - r - 1)

    def with_base_order(self, order):
        return LatticeRep(
            rank=self.rank,
            fiber_gens=self.fiber_gens,
            base_gens=tuple(self.base_gens[a] for a in order),
            conj=tuple(self.conj[a] for a in order),
            provenance=self.provenance,
        )

    def to_json(self):
        return {
            'rank': self.rank,
            'fiber_gens': [_lists(m) for m in self.fiber_gens],
            'base_gens': [_lists(m) for m in self.base_gens],
            'conj': [_lists(m) for m in self.conj],
            'provenance': self.provenance,
        }


def _freeze(matrix):
    return tuple(tuple(row) for row in matrix)


def _lists(matrix):
    return [list(row) for row in matrix]


def translation_word(rep, exponents):
    """∏_j T_j^{e_j} (las T_j conmutan)."""
    result = identity(rep.rank)
    for generator, e in zip(rep.fiber_gens, exponents):
        if e:
            result = mat_mul(result, mat_pow(_lists(generator), e))
    return result


def _commute(a, b):
    return mat_mul(a, b) == mat_mul(b, a)


def check_rep(rep):
    """Comprueba conmutatividad, unimodularidad y compatibilidad."""
    fibers = [_lists(m) for m in rep.fiber_gens]
    bases = [_lists(m) for m in rep.base_gens]
    conj = [_lists(m) for m in rep.conj]
    for i, a in enumerate(fibers):
        for b in fibers[i + 1:]:
            if not _commute(a, b):
                raise NonCommuting("Las traslaciones T_i no conmutan")
    for i, a in enumerate(bases):
        for b in bases[i + 1:]:
            if not _commute(a, b):
                raise NonCommuting("Las acciones de las unidades U_a no conmutan")
    for name, matrices in (('T', fibers), ('U', bases), ('c', conj)):
        for k, m in enumerate(matrices):
            if determinant(m) not in (1, -1):
                raise NonUnimodular(f"{name}_{k + 1} tiene determinante {determinant(m)}")
    for a, (u, c) in enumerate(zip(bases, conj)):
        u_inv = integer_inverse(u)
        for i, t in enumerate(fibers):
            lhs = mat_mul(mat_mul(u, t), u_inv)
            if lhs != translation_word(rep, c[i]):
                raise ConjugationMismatch(f"U_{a + 1} T_{i + 1} U_{a + 1}^-1 no coincide con c^({a + 1}) fila {i + 1}")
    return rep


def build_rep_external(document):
    """
    Representación desde {"rank", "fiber_gens", "base_gens", "conj"}.
    """
    validate_data(document, required_fields=['rank', 'fiber_gens', 'base_gens', 'conj'])
    try:
        rank = parse_exact_integer(document['rank'])
        fibers = [parse_integer_matrix(m, rank, rank) for m in require_list(document['fiber_gens'], 'fiber_gens')]
        bases = [parse_integer_matrix(m, rank, rank) for m in require_list(document['base_gens'], 'base_gens')]
        d = len(fibers)
        conj = [parse_integer_matrix(m, d, d) for m in require_list(document['conj'], 'conj')]
    except ValueError as e:
        raise MalformedDocument(f"Representación mal formada: {e}", errors={'rep': str(e)}) from e
    if rank < 1:
        raise MalformedDocument("El rango debe ser positivo")
    if len(conj) != len(bases):
        raise MalformedDocument("Hace falta una matriz conj por cada generador de la base")
    cap = settings.CUSPTOR_LATTICE_RANK_CAP
    if rank > cap:
        raise RankOverflow(f"Rango {rank} por encima de {cap}")
    rep = LatticeRep(
        rank=rank,
        fiber_gens=tuple(_freeze(m) for m in fibers),
        base_gens=tuple(_freeze(m) for m in bases),
        conj=tuple(_freeze(m) for m in conj),
        provenance={'source': document.get('provenance', 'external')},
    )
    check_rep(rep)
    logger.info(f"Representación externa aceptada: rango {rank}, d_K = {d}, r = {len(bases)}")
    return rep


def _symmetric_translation(field, d, w):
    """T_w sobre Sym^d(O_K²): bloque (k + j, k) = C(d − k, j)·M(w^j)."""
    n = field.degree
    rank = n * (d + 1)
    matrix = zeros(rank, rank)
    for k in range(d + 1):
        for j in range(d - k + 1):
            block = field.mult_matrix(field.power(w, j))
            scale = comb(d - k, j)
            for r in range(n):
                for s in range(n):
                    matrix[(k + j) * n + r][k * n + s] = scale * block[r][s]
    return matrix


def _symmetric_unit(field, d, unit):
    """U_λ = diag(M(λ^{2k − d}))"""
    n = field.degree
    rank = n * (d + 1)
    matrix = zeros(rank, rank)
    for k in range(d + 1):
        block = field.mult_matrix(field.power(unit, 2 * k - d))
        for r in range(n):
            for s in range(n):
                matrix[k * n + r][k * n + s] = block[r][s]
    return matrix


def build_rep_symd(field, d, cusp, level, cap=None):
    """
    Λ = Sym^d(O_K²) con la acción del estabilizador parabólico de Γ(n)
    en la cúspide: rango d_K·(d + 1).
    """
    if d < 0:
        raise MalformedDocument("d debe ser no negativo")
    cap = cap or settings.CUSPTOR_LATTICE_RANK_CAP
    rank = field.degree * (d + 1)
    if rank > cap:
        raise RankOverflow(f"Rango {rank} por encima de {cap}")
    data = parabolic_stabilizer(level, cusp)
    lattice = data.lattice
    basis = [tuple(c) for c in lattice.columns()]
    fibers = [_symmetric_translation(field, d, w) for w in basis]
    bases, conj = [], []
    for unit in data.unit_generators:
        bases.append(_symmetric_unit(field, d, unit))
        square = field.mul(unit, unit)
        rows = []
        for w in basis:
            coords = solve_upper_triangular(lattice.matrix, list(field.mul(square, w)))
            if coords is None:
                raise ConjugationMismatch(f"λ² = {square} no preserva el retículo de traslaciones")
            rows.append(coords)
        conj.append(rows)
    if data.has_torsion:
        logger.warning(f"El estabilizador de nivel {level.ideal} contiene torsión; se ignora en el complejo")
    rep = LatticeRep(
        rank=rank,
        fiber_gens=tuple(_freeze(m) for m in fibers),
        base_gens=tuple(_freeze(m) for m in bases),
        conj=tuple(_freeze(m) for m in conj),
        provenance={
            'source': 'symd',
            'field': field.name,
            'd': d,
            'level': level.ideal.to_json(),
            'lattice': lattice.to_json(),
            'units': [list(u) for u in data.unit_generators],
        },
    )
    return check_rep(rep)
