"""
El complejo de Kostant C^* y su núcleo armónico.

d_C añade una forma de la fibra y sube el índice correspondiente:
d(ŵ ω_S) = Σ_f c_f (dθ_f ∧ ω_S) ŵ_{+f} con c_f = m_i − k_i, n_j − l_j o
n̄_j − l̄_j según el tipo de la forma.
"""
import itertools
import logging
from fractions import Fraction

from django.conf import settings

from core.complexes import FiniteComplex
from core.error_handling import DimensionOverflow, MismatchWithClosedForm
from core.linalg import nullspace_qq

from .weights import KostantMonomial, weight_op

logger = logging.getLogger(__name__)


def complex_dimension(signature, weight, with_normal_form=False):
    r1, r2 = signature
    total = 2 ** (r1 + 2 * r2) * (2 if with_normal_form else 1)
    for x in weight.m + weight.n + weight.nbar:
        total *= x + 1
    return total


def _sort_key(monomial):
    return (monomial.k, monomial.l, monomial.lbar, monomial.a, monomial.b, monomial.bbar, monomial.normal)


def _slot_coefficient(weight, monomial, slot):
    r1 = len(weight.m)
    if slot < r1:
        return weight.m[slot] - monomial.k[slot]
    j, conjugate = divmod(slot - r1, 2)
    if conjugate:
        return weight.nbar[j] - monomial.lbar[j]
    return weight.n[j] - monomial.l[j]


def build_dC(signature, weight, with_normal_form=False, cap=None):
    """
    Construye (C^*, d_C) con base graduada por el grado total de formas.

    Dimensión total ∏(m_i+1)·∏(n_j+1)(n̄_j+1)·2^{d_K}, duplicada si se
    incluye la forma normal dX. Comprueba d∘d = 0 exactamente.
    """
    weight.check_signature(signature)
    r1, r2 = signature
    cap = cap or settings.CUSPTOR_COMPLEX_DIMENSION_CAP
    dimension = complex_dimension(signature, weight, with_normal_form)
    if dimension > cap:
        raise DimensionOverflow(f"dim C = {dimension} supera el máximo {cap}")

    def flags(length):
        return list(itertools.product((0, 1), repeat=length))

    monomials = [
        KostantMonomial(k, l, lbar, a, b, bbar, normal)
        for k in itertools.product(*(range(x + 1) for x in weight.m))
        for l in itertools.product(*(range(x + 1) for x in weight.n))
        for lbar in itertools.product(*(range(x + 1) for x in weight.nbar))
        for a in flags(r1)
        for b in flags(r2)
        for bbar in flags(r2)
        for normal in ((False, True) if with_normal_form else (False,))
    ]
    top = r1 + 2 * r2 + int(with_normal_form)
    graded = [[] for _ in range(top + 1)]
    for monomial in monomials:
        graded[monomial.form_degree].append(monomial)
    labels = tuple(tuple(sorted(basis, key=_sort_key)) for basis in graded)
    positions = [{label: i for i, label in enumerate(basis)} for basis in labels]

    differentials = []
    for q in range(top):
        entries = {}
        for col, source in enumerate(labels[q]):
            slots = source.fiber_slots()
            for slot, present in enumerate(slots):
                if present:
                    continue
                coefficient = _slot_coefficient(weight, source, slot)
                if coefficient <= 0:
                    continue
                sign = -1 if sum(slots[:slot]) % 2 else 1
                target = source.with_slot(slot)
                entries[(positions[q + 1][target], col)] = sign * coefficient
        differentials.append(entries)

    complex_ = FiniteComplex(
        labels=labels,
        differentials=tuple(differentials),
        metadata={'signature': tuple(signature), 'weight': weight, 'with_normal_form': with_normal_form},
    )
    complex_.check_square_zero()
    logger.debug(f"C^* para {weight}: dimensión {dimension}")
    return complex_


def closed_form_kernel_dC(signature, weight, with_normal_form=False):
    """
    Monomios del núcleo de ð_C: en cada coordenada, o bien sin forma y con
    índice máximo, o bien con la forma y con índice 0.
    """
    r1, r2 = signature
    options = []
    for i in range(r1):
        options.append([(weight.m[i], 0), (0, 1)])
    for j in range(r2):
        options.append([(weight.n[j], 0), (0, 1)])
        options.append([(weight.nbar[j], 0), (0, 1)])
    result = set()
    for choice in itertools.product(*options):
        real = choice[:r1]
        holomorphic = choice[r1::2]
        antiholomorphic = choice[r1 + 1::2]
        for normal in ((False, True) if with_normal_form else (False,)):
            result.add(KostantMonomial(
                k=tuple(x for x, _ in real),
                l=tuple(x for x, _ in holomorphic),
                lbar=tuple(x for x, _ in antiholomorphic),
                a=tuple(f for _, f in real),
                b=tuple(f for _, f in holomorphic),
                bbar=tuple(f for _, f in antiholomorphic),
                normal=normal,
            ))
    return sorted(result, key=_sort_key)


def in_kernel_pattern(weight, monomial):
    """¿Tiene el monomio la forma de un elemento del núcleo de ð_C?"""
    pairs = list(zip(monomial.k, monomial.a, weight.m))
    pairs += list(zip(monomial.l, monomial.b, weight.n))
    pairs += list(zip(monomial.lbar, monomial.bbar, weight.nbar))
    return all((flag == 1 and index == 0) or (flag == 0 and index == top) for index, flag, top in pairs)


def _components(complex_):
    """Componentes conexas del grafo de d_C sobre la base global."""
    offsets = [0]
    for dim in complex_.dims:
        offsets.append(offsets[-1] + dim)
    parent = list(range(offsets[-1]))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for q, entries in enumerate(complex_.differentials):
        for (row, col), value in entries.items():
            source, target = offsets[q] + col, offsets[q + 1] + row
            edges.append((target, source, value))
            ra, rb = find(source), find(target)
            if ra != rb:
                parent[ra] = rb
    groups = {}
    for x in range(offsets[-1]):
        groups.setdefault(find(x), []).append(x)
    by_root = {}
    for target, source, value in edges:
        by_root.setdefault(find(source), []).append((target, source, value))
    return offsets, list(groups.values()), by_root, find


def hodge_kernel_dC(complex_):
    """
    Núcleo exacto de d d* + d* d, componente a componente.

    Debe coincidir como subespacio con la forma cerrada del núcleo; si no,
    lanza MismatchWithClosedForm. Devuelve una lista de vectores
    [(monomio, coeficiente), ...].
    """
    offsets, groups, edges_by_root, find = _components(complex_)
    flat = [label for basis in complex_.labels for label in basis]
    kernel = []
    for members in groups:
        edges = edges_by_root.get(find(members[0]), [])
        if not edges:
            kernel.append([(flat[members[0]], Fraction(1))])
            continue
        local = {x: i for i, x in enumerate(members)}
        size = len(members)
        d = [[0] * size for _ in range(size)]
        for target, source, value in edges:
            d[local[target]][local[source]] = value
        stacked = d + [[d[j][i] for j in range(size)] for i in range(size)]
        for vector in nullspace_qq(stacked, size):
            kernel.append([(flat[members[i]], c) for i, c in enumerate(vector) if c])

    metadata = complex_.metadata
    closed = set(closed_form_kernel_dC(metadata['signature'], metadata['weight'], metadata['with_normal_form']))
    support_ok = all(label in closed for vector in kernel for label, _ in vector)
    if len(kernel) != len(closed) or not support_ok:
        raise MismatchWithClosedForm(
            f"Núcleo de ð_C para {metadata['weight']}: dimensión {len(kernel)}, forma cerrada {len(closed)}"
        )
    return kernel


def weight_commutes(complex_):
    """d_C conserva el autovalor de W en todas sus entradas."""
    weight = complex_.metadata['weight']
    for q, entries in enumerate(complex_.differentials):
        sources, targets = complex_.labels[q], complex_.labels[q + 1]
        for row, col in entries:
            if weight_op(weight, targets[row]) != weight_op(weight, sources[col]):
                return False
    return True
