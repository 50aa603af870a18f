"""
Núcleo de ð_{S_η}, análisis de Fredholm del operador del borde y
cohomología del borde con su descomposición ±.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from core.error_handling import (
    MalformedDocument,
    MismatchWithClosedForm,
    MissingL2Dim,
    NotAKernelMonomial,
    NotFredholm,
    UnsupportedSignatureWeight,
)

from .complex import closed_form_kernel_dC, in_kernel_pattern
from .weights import KostantMonomial, weight_op

logger = logging.getLogger(__name__)

PLUS, MINUS, MIDDLE = '+', '-', '0'

L2_ACYCLIC_AND_BOUNDARY = 'L2_ACYCLIC_AND_BOUNDARY'
MIXED = 'MIXED'
UNSUPPORTED = 'UNSUPPORTED'


@dataclass(frozen=True)
class CharacterVector:
    """Coeficientes de d̃σ en las coordenadas reducidas"""
    coordinates: tuple
    coefficients: tuple

    @property
    def is_zero(self):
        return not any(self.coefficients)

    def to_json(self):
        return {name: str(value) for name, value in zip(self.coordinates, self.coefficients)}


def reduced_coordinates(signature):
    r1, r2 = signature
    if r1 > 0:
        return tuple(f"du_{i}" for i in range(2, r1 + 1)) + tuple(f"dv_{j}" for j in range(1, r2 + 1))
    return tuple(f"dv_{j}" for j in range(2, r2 + 1))


def line_bundle_chars(signature, weight, monomial):
    """
    Carácter de la línea plana generada por σ, tras eliminar dũ_1 (o dṽ_1)
    con la relación Σũ_i + 2Σṽ_j = 0.
    """
    weight.check_signature(signature)
    if not in_kernel_pattern(weight, monomial):
        raise NotAKernelMonomial(f"{monomial.to_json()} no pertenece al núcleo de ð_C")
    r1, r2 = signature
    c = [Fraction(2 * k - m, 2) - a for k, m, a in zip(monomial.k, weight.m, monomial.a)]
    e = [
        Fraction(2 * (l + lb) - n - nb, 2) - b - bb
        for l, lb, n, nb, b, bb in zip(monomial.l, monomial.lbar, weight.n, weight.nbar, monomial.b, monomial.bbar)
    ]
    if r1 > 0:
        values = [ci - c[0] for ci in c[1:]] + [ej - 2 * c[0] for ej in e]
    else:
        values = [ej - e[0] for ej in e[1:]]
    return CharacterVector(reduced_coordinates(signature), tuple(values))


def _section(weight, a, b, bbar):
    return KostantMonomial(
        k=tuple(0 if f else m for f, m in zip(a, weight.m)),
        l=tuple(0 if f else n for f, n in zip(b, weight.n)),
        lbar=tuple(0 if f else n for f, n in zip(bbar, weight.nbar)),
        a=tuple(a), b=tuple(b), bbar=tuple(bbar),
    )


def is_supported(signature, weight):
    r1, _ = signature
    return r1 > 0 or not any(weight.nbar)


def brute_force_kernel_S(signature, weight):
    """Monomios del núcleo de ð_C con carácter nulo (cualquier peso)."""
    return [
        sigma for sigma in closed_form_kernel_dC(signature, weight)
        if line_bundle_chars(signature, weight, sigma).is_zero
    ]


def closed_form_kernel_S(signature, weight):
    """
    Generadores del núcleo de ð_{S_η} con su signo ±.

    r1 ≥ 1: no trivial solo si todas las m_i son iguales a m y cada j
    cumple n_j + n̄_j = 2m, n̄_j − n_j = 2m + 2 o n_j − n̄_j = 2m + 2.
    r1 = 0, n̄ = 0: no trivial solo si n_j ∈ {N, N − 2} con N = max n.
    """
    weight.check_signature(signature)
    r1, r2 = signature
    if not is_supported(signature, weight):
        raise UnsupportedSignatureWeight(f"r1 = 0 con n̄ ≠ 0 no está soportado ({weight})")
    if r1 > 0:
        m = weight.m[0]
        if any(x != m for x in weight.m):
            return []
        plus, minus = [], []
        for n, nb in zip(weight.n, weight.nbar):
            if n + nb == 2 * m:
                plus.append((0, 0))
                minus.append((1, 1))
            elif nb - n == 2 * m + 2:
                plus.append((1, 0))
                minus.append((0, 1))
            elif n - nb == 2 * m + 2:
                plus.append((0, 1))
                minus.append((1, 0))
            else:
                return []
        return [
            (_section(weight, (0,) * r1, [p[0] for p in plus], [p[1] for p in plus]), PLUS),
            (_section(weight, (1,) * r1, [p[0] for p in minus], [p[1] for p in minus]), MINUS),
        ]


    zeros = (0,) * r2
    ones = (1,) * r2
    top = max(weight.n) if weight.n else 0
    if top == 0:
        result = [(_section(weight, (), zeros, zeros), PLUS), (_section(weight, (), ones, ones), MINUS)]
        for flags in _single_form_patterns(r2):
            result.append((_section(weight, (), flags, tuple(1 - f for f in flags)), MIDDLE))
        return result
    if any(x not in (top, top - 2) for x in weight.n):
        return []
    if any(x == top - 2 for x in weight.n):
        alpha = tuple(1 if x == top else 0 for x in weight.n)
        beta = tuple(0 if x == top else 1 for x in weight.n)
        return [(_section(weight, (), zeros, alpha), PLUS), (_section(weight, (), ones, beta), MINUS)]
    return [
        (_section(weight, (), zeros, zeros), PLUS),
        (_section(weight, (), zeros, ones), PLUS),
        (_section(weight, (), ones, zeros), MINUS),
        (_section(weight, (), ones, ones), MINUS),
    ]


def _single_form_patterns(r2):
    """Banderas b con b_j + b̄_j = 1 para cada j (b̄ = 1 − b)."""
    for mask in range(2 ** r2):
        yield tuple((mask >> j) & 1 for j in range(r2))


def base_rank(signature):
    r1, r2 = signature
    return r1 + r2 - 1


def boundary_dimension(signature):
    r1, r2 = signature
    return 2 * r1 + 3 * r2 - 1


def graded_dims(signature, sections):
    """Dimensiones de span(σ) ⊗ H^*(S_η) por grado total."""
    k = base_rank(signature)
    dims = [0] * (boundary_dimension(signature) + 1)
    for sigma in sections:
        for degree in range(k + 1):
            dims[sigma.fiber_degree + degree] += comb(k, degree)
    return dims


@dataclass(frozen=True)
class KernelSRecord:
    """Núcleo de ð_{S_η}: generadores con signo y dimensiones graduadas."""
    signature: tuple
    weight: object
    sections: tuple

    @property
    def nontrivial(self):
        return bool(self.sections)

    @property
    def base_generators(self):
        return base_rank(self.signature)

    @property
    def total_dimension(self):
        return len(self.sections) * 2 ** self.base_generators

    def part(self, label):
        return [sigma for sigma, sign in self.sections if sign == label]

    @property
    def dims(self):
        return graded_dims(self.signature, [sigma for sigma, _ in self.sections])

    def to_json(self):
        return {
            'signature': list(self.signature),
            'weight': self.weight.to_json(),
            'nontrivial': self.nontrivial,
            'generators': [{'section': s.to_json(), 'sign': sign} for s, sign in self.sections],
            'base_generators': self.base_generators,
            'total_dimension': self.total_dimension,
            'dims': self.dims,
        }


def nontriviality_condition(signature, weight):
    r1, _ = signature
    if r1 > 0:
        return "m_i = m para todo i y, para cada j, n_j + n̄_j = 2m o |n_j − n̄_j| = 2m + 2"
    if any(weight.n):
        return "n_j ∈ {N, N − 2} con N = max n"
    return "siempre no trivial (n = n̄ = 0)"


def ker_eth_S(signature, weight):
    """
    Núcleo de ð_{S_η} en forma cerrada, comparado con la enumeración de los
    monomios de ker ð_C de carácter nulo.
    """
    closed = closed_form_kernel_S(signature, weight)
    brute = set(brute_force_kernel_S(signature, weight))
    if {sigma for sigma, _ in closed} != brute or len(closed) != len(brute):
        raise MismatchWithClosedForm(
            f"ker ð_S para {weight}: forma cerrada {len(closed)}, enumeración {len(brute)}"
        )
    return KernelSRecord(tuple(signature), weight, tuple(closed))


def kernel_S_graded_dims(signature, weight):
    """Dimensiones graduadas por enumeración directa, para cualquier peso."""
    weight.check_signature(signature)
    return graded_dims(signature, brute_force_kernel_S(signature, weight))


def constituent_dims(signature, weights):
    """Suma de las dimensiones graduadas de varios constituyentes."""
    total = [0] * (boundary_dimension(signature) + 1)
    for weight in weights:
        for q, value in enumerate(kernel_S_graded_dims(signature, weight)):
            total[q] += value
    return total


@dataclass(frozen=True)
class L2bKernel:
    is_fredholm: bool
    elements: tuple
    base_generators: int

    @property
    def dimension(self):
        return len(self.elements) * 2 ** self.base_generators

    def to_json(self):
        return {
            'is_fredholm': self.is_fredholm,
            'elements': [e.to_json() for e in self.elements],
            'dimension': self.dimension,
        }


def fredholm_and_l2b_kernel(signature, weight):
    """
    Fredholm si W − d_K/2 no se anula en ker ð_{S_η}.

    El núcleo L²_b se obtiene de los signos ± y se recalcula con el
    exponente de ⟨X⟩ de cada candidato; ambos deben coincidir.
    """
    record = ker_eth_S(signature, weight)
    r1, r2 = signature
    half = Fraction(r1 + 2 * r2, 2)
    shifts = [(sigma, sign, weight_op(weight, sigma) - half) for sigma, sign in record.sections]
    if any(shift == 0 for _, _, shift in shifts):
        raise NotFredholm(f"W − d_K/2 se anula en ker ð_S para {weight}")

    closed, derived = set(), set()
    for sigma, sign, shift in shifts:
        if sign == PLUS:
            closed.add(_with_x_factor(sigma, True, shift))
        else:
            closed.add(_with_x_factor(sigma, False, -shift))
        for with_density, exponent in ((False, -shift), (True, shift)):
            if exponent < 0:
                derived.add(_with_x_factor(sigma, with_density, exponent))
    if closed != derived:
        raise MismatchWithClosedForm(f"Núcleo L²_b para {weight}: los exponentes no coinciden con los signos")
    elements = tuple(sorted(closed, key=lambda e: (e.fiber_degree, e.k, e.l, e.lbar, e.a, e.b, e.bbar)))
    logger.debug(f"Núcleo L²_b de {weight}: {len(elements)} secciones")
    return L2bKernel(True, elements, record.base_generators)


def _with_x_factor(sigma, with_density, exponent):
    return KostantMonomial(
        sigma.k, sigma.l, sigma.lbar, sigma.a, sigma.b, sigma.bbar,
        x_half_density=with_density, x_exponent=Fraction(exponent),
    )


@dataclass(frozen=True)
class BoundaryCohomology:
    signature: tuple
    weight: object
    dims: tuple
    plus_part: tuple
    minus_part: tuple
    middle_part: tuple
    generators: tuple
    condition: str

    @property
    def nontrivial(self):
        return any(self.dims)

    def to_json(self):
        data = {
            'signature': list(self.signature),
            'weight': self.weight.to_json(),
            'dims': list(self.dims),
            'plus_part': list(self.plus_part),
            'minus_part': list(self.minus_part),
            'generators': list(self.generators),
            'nontrivial': self.nontrivial,
            'condition': self.condition,
        }
        if any(self.middle_part):
            data['middle_part'] = list(self.middle_part)
        return data


def boundary_cohomology(signature, weight):
    """
    H^*(Y_η; E) ≅ ker ð_{S_η} con la descomposición ±.

    Comprueba b_q = b_{q,+} + b_{q,−} y la dualidad b_{q,+} = b_{D−q,−}.
    """
    record = ker_eth_S(signature, weight)
    plus = graded_dims(signature, record.part(PLUS))
    minus = graded_dims(signature, record.part(MINUS))
    middle = graded_dims(signature, record.part(MIDDLE))
    dims = record.dims
    top = boundary_dimension(signature)
    if any(dims[q] != plus[q] + minus[q] + middle[q] for q in range(top + 1)):
        raise MismatchWithClosedForm(f"H^*(Y_η) para {weight}: b ≠ b_+ + b_−")
    if any(plus[q] != minus[top - q] or middle[q] != middle[top - q] for q in range(top + 1)):
        raise MismatchWithClosedForm(f"H^*(Y_η) para {weight}: falla la dualidad de Poincaré")
    generators = tuple(
        {'section': sigma.to_json(), 'sign': sign, 'fiber_degree': sigma.fiber_degree}
        for sigma, sign in record.sections
    )
    return BoundaryCohomology(
        signature=tuple(signature),
        weight=weight,
        dims=tuple(dims),
        plus_part=tuple(plus),
        minus_part=tuple(minus),
        middle_part=tuple(middle),
        generators=generators,
        condition=nontriviality_condition(signature, weight),
    )


def l2_halfline_cohomology(signature, weight):
    """Cohomología L² de (T, ∞) × Y_η: la parte + del borde."""
    return list(boundary_cohomology(signature, weight).plus_part)


@dataclass(frozen=True)
class AcyclicityStatus:
    status: str
    reason: str

    def to_json(self):
        return {'status': self.status, 'reason': self.reason}


def acyclicity_status(signature, weight):
    weight.check_signature(signature)
    r1, _ = signature
    if r1 == 0 and (not any(weight.n) or any(weight.nbar)):
        return AcyclicityStatus(UNSUPPORTED, "r1 = 0 requiere n̄ = 0 y n ≠ 0")
    if not weight.self_conjugate:
        return AcyclicityStatus(
            L2_ACYCLIC_AND_BOUNDARY, "n_j ≠ n̄_j para algún j: H_(2) = 0 y H(X̄) ≅ H^−(∂X̄)",
        )
    return AcyclicityStatus(MIXED, "peso autoconjugado: H(X̄) ≅ H_(2) ⊕ H^−(∂X̄)")


def small_rank(signature, weight, l2_kernel_dim=None, cusp_count=1):
    """
    Rango del proyector de autovalores pequeños:
    2·dim ker_{L²} + (cúspides)·dim ker_{L²_b} D_{b,η}.
    """
    status = acyclicity_status(signature, weight).status
    if status == L2_ACYCLIC_AND_BOUNDARY:
        if l2_kernel_dim not in (None, 0):
            raise MalformedDocument(f"El peso {weight} es L²-acíclico: dim ker_L² = 0, no {l2_kernel_dim}")
        l2_kernel_dim = 0
    elif l2_kernel_dim is None:
        raise MissingL2Dim(f"Hace falta dim ker_L² para el peso {weight} ({status})")
    if l2_kernel_dim < 0 or cusp_count < 0:
        raise MalformedDocument("Las dimensiones deben ser no negativas")
    per_cusp = fredholm_and_l2b_kernel(signature, weight).dimension
    return 2 * l2_kernel_dim + cusp_count * per_cusp


def binomial_weighted_sum(p, k):
    """Σ_q (−1)^{p+q} (p + q) C(k, q); se anula para k ≥ 2."""
    if k < 0:
        raise ValueError("k debe ser no negativo")
    return sum((-1) ** (p + q) * (p + q) * comb(k, q) for q in range(k + 1))


def binomial_pairing(p, d_K):
    """Contribuciones de p y d_K + 1 − p con k = 1."""
    return binomial_weighted_sum(p, 1) + binomial_weighted_sum(d_K + 1 - p, 1)
