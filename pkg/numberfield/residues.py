"""
Anillos de restos O_K/n y grupos de unidades módulo n.
"""
import itertools
import logging
import random
from functools import cached_property, lru_cache

from django.conf import settings

from core.error_handling import NonDivisible, NotNested, TooLarge

from .ideals import check_ideal, ideal_contains, ideal_from_columns

logger = logging.getLogger(__name__)


class ResidueRing:
    """
    Anillo O_K/n con representantes canónicos 0 ≤ v_i < h_ii.

    Las tablas de suma y producto se construyen bajo demanda; los
    elementos se indexan en orden lexicográfico de sus representantes.
    """

    def __init__(self, field, level):
        self.field = field
        self.level = level
        self.moduli = level.diagonal
        self.cardinality = level.norm

    def __repr__(self):
        return f"ResidueRing(N={self.cardinality}, moduli={self.moduli})"

    def reduce(self, vector):
        """Representante canónico de la clase de un vector de O_K."""
        h = self.level.matrix
        v = list(vector)
        for i in range(self.level.degree - 1, -1, -1):
            q = v[i] // h[i][i]
            if q:
                for k in range(i + 1):
                    v[k] -= q * h[k][i]
        return tuple(v)

    @cached_property
    def elements(self):
        return [tuple(e) for e in itertools.product(*(range(m) for m in self.moduli))]

    @cached_property
    def index(self):
        return {e: i for i, e in enumerate(self.elements)}

    @property
    def zero(self):
        return self.reduce(self.field.zero())

    @property
    def one(self):
        return self.reduce(self.field.one)

    def add(self, a, b):
        return self.reduce(self.field.add(a, b))

    def sub(self, a, b):
        return self.reduce(self.field.sub(a, b))

    def neg(self, a):
        return self.reduce(self.field.neg(a))

    def mul(self, a, b):
        return self.reduce(self.field.mul(a, b))

    def power(self, a, exponent):
        if exponent < 0:
            return self.reduce(self.field.power(a, exponent))
        return self._power(a, exponent)

    def _power(self, a, exponent):
        result = self.one
        base = self.reduce(a)
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    @cached_property
    def addition_table(self):
        elements = self.elements
        return [[self.index[self.add(a, b)] for b in elements] for a in elements]

    @cached_property
    def multiplication_table(self):
        elements = self.elements
        return [[self.index[self.mul(a, b)] for b in elements] for a in elements]

    def ideal_with_level(self, a):
        """HNF del ideal (a) + n."""
        field = self.field
        columns = [field.mul(field.basis_vector(i), a) for i in range(field.degree)]
        columns = [c for c in columns if any(c)] + self.level.columns()
        return ideal_from_columns(field, columns)

    @cached_property
    def ideal_classes(self):
        """Para cada elemento, la clave del ideal (a) + n."""
        return {e: self.ideal_with_level(e) for e in self.elements}

    def is_unit(self, a):
        return self.ideal_with_level(self.reduce(a)).is_unit_ideal()

    @cached_property
    def units(self):
        return [e for e in self.elements if self.ideal_classes[e].is_unit_ideal()]

    def element_order(self, a):
        """Orden multiplicativo de una unidad de O_K/n."""
        a = self.reduce(a)
        one = self.one
        current = a
        order = 1
        while current != one:
            current = self.mul(current, a)
            order += 1
            if order > self.cardinality:
                raise ValueError(f"{a} no es una unidad módulo n")
        return order

    def subgroup_generated(self, generators):
        """Cierre multiplicativo (BFS) de una lista de unidades."""
        gens = [self.reduce(g) for g in generators]
        one = self.one
        seen = {one}
        frontier = [one]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def verify_ring_axioms(self, sample=None):
        """
        Comprueba asociatividad, conmutatividad y distributividad.

        Exhaustivo si N³ ≤ sample; en otro caso sobre una muestra
        determinista de ternas.
        """
        sample = sample or settings.CUSPTOR_AXIOM_SAMPLE
        n = self.cardinality
        add, mul = self.addition_table, self.multiplication_table
        if n ** 3 <= sample:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(n)
            triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(sample)]
        for a, b, c in triples:
            if add[add[a][b]][c] != add[a][add[b][c]]:
                return False
            if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                return False
            if add[a][b] != add[b][a] or mul[a][b] != mul[b][a]:
                return False
            if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                return False
        zero, one = self.index[self.zero], self.index[self.one]
        return all(add[zero][a] == a and mul[one][a] == a for a in range(n))


def _check_bound(ideal, bound):
    bound = bound or settings.CUSPTOR_ENUMERATION_BOUND
    if ideal.norm > bound:
        raise TooLarge(f"N(n) = {ideal.norm} supera la cota de enumeración {bound}")


@lru_cache(maxsize=128)
def _cached_ring(field, level):
    return ResidueRing(field, level)


def residue_ring(field, ideal, bound=None):
    """Anillo de restos enumerable; TooLarge si N(n) supera la cota."""
    check_ideal(field, ideal)
    _check_bound(ideal, bound)
    return _cached_ring(field, ideal)


def reduction_ring(field, ideal):
    """Aritmética módulo n sin límite de enumeración (no materializa tablas)."""
    check_ideal(field, ideal)
    return _cached_ring(field, ideal)


def unit_image(field, ideal):
    """H(n): imagen de O_K^* en (O_K/n)^*, generada por ζ y las ε_a."""
    ring = reduction_ring(field, ideal)
    return ring.subgroup_generated([field.torsion_generator, *field.unit_generators])


def unit_image_order(field, ideal, bound=None):
    bound = bound or settings.CUSPTOR_ENUMERATION_BOUND
    image = unit_image(field, ideal)
    if len(image) > bound:
        raise TooLarge(f"|H(n)| = {len(image)} supera la cota {bound}")
    return len(image)


def unit_index_mod(field, n1, n2, bound=None):
    """
    Índice de {u ≡ 1 mod n2} en {u ≡ 1 mod n1} dentro de O_K^*.

    Igual a |H(n2)| / |H(n1)|: la reducción H(n2) → H(n1) es suprayectiva
    con núcleo la imagen de las unidades ≡ 1 mod n1.
    """
    check_ideal(field, n1)
    check_ideal(field, n2)
    if not ideal_contains(n1, n2):
        raise NotNested(f"{n2} no está contenido en {n1}")
    if n1 == n2:
        return 1
    h1 = unit_image_order(field, n1, bound)
    h2 = unit_image_order(field, n2, bound)
    if h2 % h1:
        raise NonDivisible(f"|H(n2)| = {h2} no es múltiplo de |H(n1)| = {h1}")
    logger.debug(f"unit_index_mod: |H(n1)|={h1}, |H(n2)|={h2}")
    return h2 // h1


