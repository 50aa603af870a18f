"""
Pesos (m, n, n̄), monomios de Kostant y operador de peso W.

Un monomio ŵ_{k,l,l̄} ω lleva banderas a, b, b̄ para los factores dx_i,
dz_j y dz̄_j. Las formas de la fibra se ordenan dx_1, ..., dx_{r1},
dz_1, dz̄_1, ..., dz_{r2}, dz̄_{r2}.
"""
from dataclasses import dataclass, replace
from fractions import Fraction

from core.error_handling import MalformedDocument
from core.serialization import parse_exact_integer, require_list


@dataclass(frozen=True)
class Weight:
    m: tuple
    n: tuple
    nbar: tuple

    @property
    def signature(self):
        return (len(self.m), len(self.n))

    @property
    def size_m(self):
        return sum(self.m)

    @property
    def size_n(self):
        return sum(self.n) + sum(self.nbar)

    @property
    def is_trivial(self):
        return not any(self.m) and not any(self.n) and not any(self.nbar)

    @property
    def self_conjugate(self):
        return tuple(self.n) == tuple(self.nbar)

    def check_signature(self, signature):
        r1, r2 = signature
        if len(self.m) != r1 or len(self.n) != r2 or len(self.nbar) != r2:
            raise MalformedDocument(f"El peso {self} no corresponde a la signatura {signature}")
        if any(x < 0 for x in self.m + self.n + self.nbar):
            raise MalformedDocument(f"El peso {self} tiene entradas negativas")
        return self

    def to_json(self):
        return {'m': list(self.m), 'n': list(self.n), 'nbar': list(self.nbar)}

    def __str__(self):
        return f"m={list(self.m)}, n={list(self.n)}, n̄={list(self.nbar)}"


def make_weight(m=(), n=(), nbar=None):
    n = tuple(n)
    return Weight(tuple(m), n, tuple(nbar) if nbar is not None else (0,) * len(n))


def parse_weight(document):
    """Peso desde {"m": [...], "n": [...], "nbar": [...]}"""
    if not isinstance(document, dict):
        raise MalformedDocument("Se esperaba un objeto con m, n, nbar")
    try:
        m = tuple(parse_exact_integer(x) for x in require_list(document.get('m', []), 'm'))
        n = tuple(parse_exact_integer(x) for x in require_list(document.get('n', []), 'n'))
        nbar = tuple(parse_exact_integer(x) for x in require_list(document.get('nbar', [0] * len(n)), 'nbar'))
    except ValueError as e:
        raise MalformedDocument(f"Peso mal formado: {e}", errors={'weight': str(e)}) from e
    if len(n) != len(nbar):
        raise MalformedDocument("n y nbar deben tener la misma longitud")
    return Weight(m, n, nbar)


@dataclass(frozen=True)
class KostantMonomial:
    """
    Sección ŵ_{k,l,l̄} con factores de forma.

    normal: factor dX de la dirección normal. x_half_density marca el
    factor dX/⟨X⟩ de los núcleos L²_b; x_exponent es el exponente de ⟨X⟩.
    """
    k: tuple
    l: tuple
    lbar: tuple
    a: tuple
    b: tuple
    bbar: tuple
    normal: bool = False
    x_half_density: bool = False
    x_exponent: Fraction = None

    @property
    def form_degree(self):
        return sum(self.a) + sum(self.b) + sum(self.bbar) + int(self.normal)

    @property
    def fiber_degree(self):
        return sum(self.a) + sum(self.b) + sum(self.bbar)

    def fiber_slots(self):
        """Banderas de las formas de la fibra en el orden fijado."""
        slots = list(self.a)
        for b, bb in zip(self.b, self.bbar):
            slots.extend((b, bb))
        return slots

    def fiber_forms(self):
        return frozenset(i for i, flag in enumerate(self.fiber_slots()) if flag)

    def with_slot(self, slot):
        """Monomio con la forma `slot` añadida y el índice correspondiente + 1."""
        r1 = len(self.a)
        if slot < r1:
            k = list(self.k)
            a = list(self.a)
            k[slot] += 1
            a[slot] = 1
            return replace(self, k=tuple(k), a=tuple(a))
        j, conjugate = divmod(slot - r1, 2)
        if conjugate:
            lbar, bbar = list(self.lbar), list(self.bbar)
            lbar[j] += 1
            bbar[j] = 1
            return replace(self, lbar=tuple(lbar), bbar=tuple(bbar))
        l, b = list(self.l), list(self.b)
        l[j] += 1
        b[j] = 1
        return replace(self, l=tuple(l), b=tuple(b))

    def to_json(self):
        data = {
            'k': list(self.k), 'l': list(self.l), 'lbar': list(self.lbar),
            'dx': list(self.a), 'dz': list(self.b), 'dzbar': list(self.bbar),
        }
        if self.normal:
            data['normal'] = True
        if self.x_exponent is not None:
            data['x_half_density'] = self.x_half_density
            exponent = Fraction(self.x_exponent)
            data['x_exponent'] = str(exponent.numerator) if exponent.denominator == 1 else str(exponent)
        return data


def weight_op(weight, monomial):
    """
    W = (número de formas de la fibra) + (|m| + |n|)/2 − |k| − |l| − |l̄|.

    dX/⟨X⟩ y las formas de la base no contribuyen.
    """
    forms = sum(monomial.a) + sum(monomial.b) + sum(monomial.bbar)
    return (
        Fraction(forms)
        + Fraction(weight.size_m + weight.size_n, 2)
        - sum(monomial.k) - sum(monomial.l) - sum(monomial.lbar)
    )
