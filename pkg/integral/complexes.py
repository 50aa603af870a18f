"""
Complejo total de Γ_η = Z^{d_K} ⋊ Z^r con coeficientes en Λ.

Se parte del complejo de Koszul de los operadores (T_i − I) y se toma un
cono de (ψ_a − 1) por cada generador de unidades. ψ_a es el levantamiento
de Fox de la conjugación: Λ^p(a) ⊗ U_a con a_ij ∈ Z[T].
"""
import itertools
import logging

from sympy.combinatorics import Permutation

from core.complexes import FiniteComplex, sparse_product
from core.error_handling import ConjugationMismatch, NonCommutingLift
from core.linalg import identity, integer_inverse, mat_add, mat_mul, mat_pow, mat_sub_identity, zeros

logger = logging.getLogger(__name__)


def koszul_complex(rep):
    """Complejo de Koszul: bloque [S ∪ {s}][S] = (−1)^k (T_s − I)."""
    d, rank = rep.fiber_rank, rep.rank
    subsets = [list(itertools.combinations(range(d), p)) for p in range(d + 1)]
    labels = tuple(
        tuple((S, (), i) for S in level for i in range(rank))
        for level in subsets
    )
    positions = [{label: n for n, label in enumerate(basis)} for basis in labels]
    shifted = [mat_sub_identity([list(row) for row in t]) for t in rep.fiber_gens]
    differentials = []
    for p in range(d):
        entries = {}
        for S in subsets[p]:
            for s in range(d):
                if s in S:
                    continue
                target = tuple(sorted(S + (s,)))
                sign = -1 if target.index(s) % 2 else 1
                block = shifted[s]
                for i in range(rank):
                    for j in range(rank):
                        if block[i][j]:
                            key = (positions[p + 1][(target, (), i)], positions[p][(S, (), j)])
                            entries[key] = entries.get(key, 0) + sign * block[i][j]
        differentials.append(entries)
    return FiniteComplex(labels, tuple(differentials), {'rep': rep, 'stage': 'koszul'})


def geometric_factor(t, e):
    """(T^e − I)/(T − I) como polinomio en T."""
    n = len(t)
    if e == 0:
        return zeros(n, n)
    total = zeros(n, n)
    if e > 0:
        power = identity(n)
        for _ in range(e):
            total = mat_add(total, power)
            power = mat_mul(power, t)
        return total
    inverse = mat_pow(t, -1)
    power = inverse
    for _ in range(-e):
        total = mat_add(total, power, scale=-1)
        power = mat_mul(power, inverse)
    return total


def fox_lift(rep, conj):
    """
    Matriz a con U^{-1} T_i U − I = Σ_j a_ij (T_j − I), donde la
    conjugación inversa viene dada por e = c^{-1}.
    """
    d = rep.fiber_rank
    e = integer_inverse([list(row) for row in conj])
    if e is None:
        raise ConjugationMismatch("c^(a) no es invertible sobre Z")
    gens = [[list(row) for row in t] for t in rep.fiber_gens]
    lift = []
    for i in range(d):
        prefix = identity(rep.rank)
        row = []
        for j in range(d):
            row.append(mat_mul(prefix, geometric_factor(gens[j], e[i][j])))
            if e[i][j]:
                prefix = mat_mul(prefix, mat_pow(gens[j], e[i][j]))
        lift.append(row)
    return lift


def _block_determinant(lift, rows, cols, rank):
    """Determinante de un menor con entradas matriciales que conmutan."""
    if not rows:
        return identity(rank)
    total = zeros(rank, rank)
    for perm in itertools.permutations(range(len(rows))):
        product = identity(rank)
        for t, sigma in enumerate(perm):
            product = mat_mul(product, lift[rows[t]][cols[sigma]])
        total = mat_add(total, product, scale=Permutation(list(perm)).signature())
    return total


def unit_chain_map(rep, koszul, a):
    """ψ_a sobre el complejo de Koszul, grado a grado: bloque [S][S'] = U·det(a[S, S'])."""
    rank = rep.rank
    unit = [list(row) for row in rep.base_gens[a]]
    lift = fox_lift(rep, rep.conj[a])
    maps = []
    for p, basis in enumerate(koszul.labels):
        positions = koszul.index_of(p)
        subsets = sorted({label[0] for label in basis})
        entries = {}
        for S in subsets:
            for S_prime in subsets:
                block = mat_mul(unit, _block_determinant(lift, S, S_prime, rank))
                for i in range(rank):
                    for j in range(rank):
                        if block[i][j]:
                            entries[(positions[(S, (), i)], positions[(S_prime, (), j)])] = block[i][j]
        maps.append(entries)
    for p in range(len(koszul.differentials)):
        if sparse_product(koszul.entries(p), maps[p]) != sparse_product(maps[p + 1], koszul.entries(p)):
            raise ConjugationMismatch(f"ψ_{a + 1} no es un morfismo de complejos en grado {p}")
    return maps


def _extend(map_, koszul, labels):
    """Extiende ψ (definido sobre Koszul) a las etiquetas (S, B, i) del complejo actual."""
    k_positions = [koszul.index_of(p) for p in range(len(koszul.labels))]
    by_column = []
    for entries in map_:
        columns = {}
        for (row, col), value in entries.items():
            columns.setdefault(col, []).append((row, value))
        by_column.append(columns)
    result = []
    for basis in labels:
        positions = {label: n for n, label in enumerate(basis)}
        entries = {}
        for col, (S, B, j) in enumerate(basis):
            p = len(S)
            for k_row, value in by_column[p].get(k_positions[p][(S, (), j)], ()):
                S_row, _, i = koszul.labels[p][k_row]
                entries[(positions[(S_row, B, i)], col)] = value
        result.append(entries)
    return result



def mapping_cone(complex_, chain_map, a):
    """
    Cono de (ψ − 1): C'^q = C^q ⊕ C^{q−1}, D' = [[D, 0], [ψ − 1, −D]].
    """
    labels = complex_.labels
    top = len(labels)
    new_labels = []
    for q in range(top + 1):
        current = labels[q] if q < top else ()
        previous = labels[q - 1] if q >= 1 else ()
        new_labels.append(tuple(current) + tuple((S, B + (a,), i) for S, B, i in previous))
    differentials = []
    for q in range(top):
        entries = {}
        offset_next = len(labels[q + 1]) if q + 1 < top else 0
        for (row, col), value in complex_.entries(q).items():
            entries[(row, col)] = value
        minus_one = dict(chain_map[q])
        for n in range(len(labels[q])):
            minus_one[(n, n)] = minus_one.get((n, n), 0) - 1
        for (row, col), value in minus_one.items():
            if value:
                entries[(offset_next + row, col)] = value
        if q >= 1:
            offset_here = len(labels[q])
            for (row, col), value in complex_.entries(q - 1).items():
                entries[(offset_next + row, offset_here + col)] = -value
        differentials.append(entries)
    return FiniteComplex(tuple(new_labels), tuple(differentials), dict(complex_.metadata))


def total_complex(rep):
    """
    Koszul de las traslaciones seguido de un cono por cada unidad.
    Rango del término q: Σ_{a+b=q} C(d_K, a)·C(r, b)·rank(Λ).
    """
    koszul = koszul_complex(rep)
    koszul.check_square_zero()
    maps = [unit_chain_map(rep, koszul, a) for a in range(rep.base_rank)]
    for a, b in itertools.combinations(range(rep.base_rank), 2):
        for p in range(len(koszul.labels)):
            if sparse_product(maps[a][p], maps[b][p]) != sparse_product(maps[b][p], maps[a][p]):
                raise NonCommutingLift(f"Los levantamientos de U_{a + 1} y U_{b + 1} no conmutan en grado {p}")
    complex_ = koszul
    for a, map_ in enumerate(maps):
        complex_ = mapping_cone(complex_, _extend(map_, koszul, complex_.labels), a)
    complex_.metadata.update({'rep': rep, 'stage': 'total', 'fiber_rank': rep.fiber_rank, 'base_rank': rep.base_rank})
    complex_.check_square_zero()
    logger.debug(f"Complejo total: dimensiones {complex_.dims}")
    return complex_


def fiber_degree(label):
    return len(label[0])
