"""
Datos de cuerpos de números y aritmética exacta en O_K.

Los elementos de O_K son tuplas de enteros: coordenadas en la base entera
ingerida. La multiplicación usa las constantes de estructura enteras
calculadas una sola vez al cargar el documento.
"""
import logging
from dataclasses import dataclass, field as dataclass_field, replace
from fractions import Fraction

from sympy import Poly, QQ as SYMPY_QQ, Rational, discriminant, primefactors, sturm, symbols

from core.error_handling import (
    MalformedBasis,
    MalformedDocument,
    NonUnitGenerator,
    NotAnIdeal,
    SignatureMismatch,
    UnitRankMismatch,
    validate_data,
)
from core.linalg import determinant, integer_inverse, mat_vec, qq_det, rational_inverse
from core.serialization import parse_exact_integer, parse_exact_rational, parse_integer_matrix, require_list

from .ideals import IdealHNF, ideal_from_generators, ideal_from_matrix, unit_ideal

logger = logging.getLogger(__name__)

X = symbols('x')


@dataclass(frozen=True)
class ClassRepresentative:
    """Representante de una clase de ideales con los datos de su cúspide"""
    ideal: IdealHNF
    # η = [a : b] con (a, b) = ideal
    generators: tuple
    # Representante entero de la clase de 𝔞^{-2}: parte de traslación
    translation_lattice: IdealHNF


@dataclass(frozen=True)
class NumberFieldData:
    """
    Cuerpo de números ingerido y validado.

    defining_polynomial va del coeficiente principal al término
    independiente. integral_basis tiene por filas las potencias
    1, x, ..., x^{d-1} y por columnas los elementos de la base de O_K.
    """
    name: str
    defining_polynomial: tuple
    degree: int
    signature: tuple
    integral_basis: tuple
    unit_generators: tuple
    torsion_unit_order: int
    torsion_generator: tuple
    class_group: tuple
    discriminant: int = None
    provenance: str = ''
    # Constantes de estructura: mult_table[i][j] = coordenadas de ω_i·ω_j
    mult_table: tuple = dataclass_field(default=(), compare=False, repr=False)
    one: tuple = dataclass_field(default=(), compare=False, repr=False)

    @property
    def r1(self):
        return self.signature[0]

    @property
    def r2(self):
        return self.signature[1]

    @property
    def unit_rank(self):
        return self.r1 + self.r2 - 1

    @property
    def class_number(self):
        return len(self.class_group)

    @property
    def class_group_ideals(self):
        return [c.ideal for c in self.class_group]

    def zero(self):
        return (0,) * self.degree

    def basis_vector(self, i):
        return tuple(int(i == k) for k in range(self.degree))

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def scale(self, k, a):
        return tuple(k * x for x in a)

    def mul(self, a, b):
        d = self.degree
        out = [0] * d
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.mult_table[i]
            for j, bj in enumerate(b):
                if bj:
                    coeff = ai * bj
                    for k, c in enumerate(row[j]):
                        if c:
                            out[k] += coeff * c
        return tuple(out)

    def mult_matrix(self, a):
        """Matriz de la multiplicación por a (columnas = a·ω_j)."""
        columns = [self.mul(a, self.basis_vector(j)) for j in range(self.degree)]
        return [[columns[j][i] for j in range(self.degree)] for i in range(self.degree)]

    def norm(self, a):
        return determinant(self.mult_matrix(a))

    def inverse(self, a):
        """Inverso de una unidad de O_K; ValueError si a no es unidad."""
        inv = integer_inverse(self.mult_matrix(a))
        if inv is None:
            raise ValueError(f"{a} no es una unidad de O_K")
        return tuple(mat_vec(inv, self.one))

    def power(self, a, exponent):
        if exponent < 0:
            a, exponent = self.inverse(a), -exponent
        result = self.one
        base = tuple(a)
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    def unit_product(self, exponents):
        """∏ ε_a^{k_a} sobre los generadores de unidades."""
        result = self.one
        for unit, k in zip(self.unit_generators, exponents):
            if k:
                result = self.mul(result, self.power(unit, k))
        return result

    def to_json(self):
        return {
            'name': self.name,
            'poly': list(self.defining_polynomial),
            'signature': list(self.signature),
            'degree': self.degree,
            'units': [list(u) for u in self.unit_generators],
            'torsion_order': self.torsion_unit_order,
            'class_number': self.class_number,
            'disc': self.discriminant,
        }


def _poly_from_column(basis, j):
    """Elemento ω_j como polinomio racional en x (grado < d)."""
    d = len(basis)
    coeffs = [Rational(basis[i][j].numerator, basis[i][j].denominator) for i in range(d)]
    return Poly(list(reversed(coeffs)), X, domain=SYMPY_QQ)


def real_root_count(coefficients):
    """Número de raíces reales distintas por la sucesión de Sturm."""
    f = Poly(list(coefficients), X)
    chain = sturm(f)

    def variations(signs):
        signs = [s for s in signs if s != 0]
        return sum(1 for s, t in zip(signs, signs[1:]) if s * t < 0)

    at_plus = [1 if p.LC() > 0 else -1 for p in chain]
    at_minus = [(1 if p.LC() > 0 else -1) * (-1) ** p.degree() for p in chain]
    return variations(at_minus) - variations(at_plus)


def structure_constants(polynomial, basis):
    """
    Constantes de estructura de O_K en la base entera.

    Lanza MalformedBasis si la base no es invertible o si algún producto
    ω_i·ω_j no tiene coordenadas enteras.
    """
    d = len(basis)
    if qq_det(basis) == 0:
        raise MalformedBasis("La base entera es singular")
    inverse = rational_inverse(basis)
    f = Poly(list(polynomial), X, domain=SYMPY_QQ)
    omegas = [_poly_from_column(basis, j) for j in range(d)]

    def coordinates(p):
        coeffs = list(reversed(p.all_coeffs()))
        coeffs += [0] * (d - len(coeffs))
        power = [Fraction(int(c.p), int(c.q)) if hasattr(c, 'p') else Fraction(c) for c in coeffs[:d]]
        coords = mat_vec(inverse, power)
        if any(Fraction(c).denominator != 1 for c in coords):
            raise MalformedBasis(f"Coordenadas no enteras: {coords}")
        return tuple(int(c) for c in coords)

    table = []
    for i in range(d):
        row = []
        for j in range(d):
            row.append(coordinates((omegas[i] * omegas[j]).rem(f)))
        table.append(tuple(row))
    one = coordinates(Poly([1], X, domain=SYMPY_QQ))
    # Z[α] ⊆ O_K
    if d > 1:
        coordinates(Poly([1, 0], X, domain=SYMPY_QQ))
    return tuple(table), one


def _parse_element(value, d, name):
    if not isinstance(value, list) or len(value) != d:
        raise MalformedDocument(f"{name}: se esperaban {d} coordenadas", errors={name: "longitud incorrecta"})
    try:
        return tuple(parse_exact_integer(x) for x in value)
    except ValueError as e:
        raise MalformedDocument(f"{name}: {e}", errors={name: str(e)}) from e


def _element_order(field, element, bound):
    current = element
    for k in range(1, bound + 1):
        if current == field.one:
            return k
        current = field.mul(current, element)
    return None


def _parse_class_group(document, field):
    entries = document.get('class_ideals')
    if not entries:
        trivial = unit_ideal(field)
        return (ClassRepresentative(trivial, (field.one, field.zero()), trivial),)
    classes = []
    for k, entry in enumerate(require_list(entries, 'class_ideals')):
        if isinstance(entry, list):
            entry = {'hnf': entry}
        try:
            ideal = ideal_from_matrix(field, parse_integer_matrix(entry['hnf'], rows=field.degree))
        except (KeyError, ValueError) as e:
            raise MalformedDocument(f"class_ideals[{k}]: {e}", errors={'class_ideals': str(e)}) from e
        if 'generators' in entry:
            gens = require_list(entry['generators'], f'class_ideals[{k}].generators')
            if len(gens) != 2:
                raise MalformedDocument(f"class_ideals[{k}]: η necesita dos generadores")
            a = _parse_element(gens[0], field.degree, 'generators')
            b = _parse_element(gens[1], field.degree, 'generators')
            if ideal_from_generators(field, [a, b]) != ideal:
                raise MalformedDocument(f"class_ideals[{k}]: (a, b) no genera el ideal declarado")
        elif ideal.is_unit_ideal():
            a, b = field.one, field.zero()
        else:
            raise MalformedDocument(f"class_ideals[{k}]: faltan los generadores de η")
        if 'translation_lattice' in entry:
            lattice = ideal_from_matrix(field, parse_integer_matrix(entry['translation_lattice'], rows=field.degree))
        elif ideal.is_unit_ideal():
            lattice = unit_ideal(field)
        else:
            raise MalformedDocument(f"class_ideals[{k}]: falta translation_lattice")
        classes.append(ClassRepresentative(ideal, (a, b), lattice))
    return tuple(classes)


def load_field(document):
    """
    Construye y valida un NumberFieldData a partir del documento JSON.

    La validación es total: cualquier fallo lanza una excepción y no se
    devuelve ningún objeto parcial.
    """
    validate_data(
        document,
        required_fields=['poly', 'signature', 'integral_basis', 'torsion_order'],
        validators={
            'poly': lambda v: [parse_exact_integer(x) for x in require_list(v, 'poly')],
            'signature': lambda v: [parse_exact_integer(x) for x in require_list(v, 'signature')],
            'torsion_order': parse_exact_integer,
        },
    )
    polynomial = tuple(parse_exact_integer(x) for x in document['poly'])
    degree = len(polynomial) - 1
    if degree < 1 or polynomial[0] != 1:
        raise MalformedDocument("El polinomio debe ser mónico de grado ≥ 1", errors={'poly': 'no mónico'})
    if len(document['signature']) != 2:
        raise MalformedDocument("La signatura es un par (r1, r2)", errors={'signature': 'longitud'})
    r1, r2 = (parse_exact_integer(x) for x in document['signature'])
    if r1 < 0 or r2 < 0 or r1 + 2 * r2 != degree:
        raise SignatureMismatch(f"r1 + 2·r2 = {r1 + 2 * r2} ≠ grado {degree}")
    real_roots = real_root_count(polynomial)
    if real_roots != r1:
        raise SignatureMismatch(f"Signatura declarada ({r1}, {r2}) pero Sturm cuenta {real_roots} raíces reales")

    raw_basis = require_list(document['integral_basis'], 'integral_basis')
    try:
        basis = tuple(tuple(parse_exact_rational(x) for x in require_list(row, 'integral_basis')) for row in raw_basis)
    except ValueError as e:
        raise MalformedBasis(str(e)) from e
    if len(basis) != degree or any(len(row) != degree for row in basis):
        raise MalformedBasis(f"La base entera debe ser {degree}×{degree}")
    table, one = structure_constants(polynomial, basis)

    torsion_order = parse_exact_integer(document['torsion_order'])
    if torsion_order < 2 or torsion_order % 2:
        raise MalformedDocument("torsion_order debe ser par y ≥ 2", errors={'torsion_order': torsion_order})

    draft = NumberFieldData(
        name=str(document.get('name', '')),
        defining_polynomial=polynomial,
        degree=degree,
        signature=(r1, r2),
        integral_basis=basis,
        unit_generators=(),
        torsion_unit_order=torsion_order,
        torsion_generator=(),
        class_group=(),
        mult_table=table,
        one=one,
    )

    units = tuple(
        _parse_element(u, degree, f'units[{k}]')
        for k, u in enumerate(require_list(document.get('units', []), 'units'))
    )
    if len(units) != draft.unit_rank:
        raise UnitRankMismatch(f"Se declaran {len(units)} unidades; el rango de Dirichlet es {draft.unit_rank}")
    for k, u in enumerate(units):
        n = draft.norm(u)
        if abs(n) != 1:
            raise NonUnitGenerator(f"units[{k}] = {u} tiene norma {n}")

    if 'torsion_gen' in document:
        zeta = _parse_element(document['torsion_gen'], degree, 'torsion_gen')
    elif torsion_order == 2:
        zeta = draft.neg(one)
    else:
        raise MalformedDocument("torsion_gen es obligatorio si torsion_order > 2", errors={'torsion_gen': 'falta'})
    if _element_order(draft, zeta, torsion_order) != torsion_order:
        raise MalformedDocument(f"torsion_gen no tiene orden {torsion_order}", errors={'torsion_gen': 'orden'})
    for p in primefactors(torsion_order):
        if draft.power(zeta, torsion_order // p) == one:
            raise MalformedDocument(f"torsion_gen no es primitiva de orden {torsion_order}")

    disc = None
    if document.get('disc') is not None:
        disc = parse_exact_integer(document['disc'])
        expected = Fraction(int(discriminant(Poly(list(polynomial), X)))) * qq_det(basis) ** 2
        if expected != disc:
            raise MalformedBasis(f"disc(O_K) declarado {disc}; la base da {expected}")

    draft = replace(
        draft,
        unit_generators=units,
        torsion_generator=zeta,
        discriminant=disc,
        provenance=str(document.get('provenance', '')),
    )
    try:
        classes = _parse_class_group(document, draft)
    except NotAnIdeal as e:
        raise MalformedDocument(f"class_ideals: {e}", errors={'class_ideals': str(e)}) from e
    result = replace(draft, class_group=classes)
    logger.info(f"Cuerpo {result.name or polynomial} cargado: grado {degree}, signatura ({r1}, {r2})")
    return result


def parse_ideal(field, value):
    """Ideal desde una matriz entera o una lista de generadores {"generators": [...]}"""
    if isinstance(value, dict) and 'generators' in value:
        gens = [_parse_element(g, field.degree, 'generators') for g in require_list(value['generators'], 'generators')]
        return ideal_from_generators(field, gens)
    if isinstance(value, dict) and 'hnf' in value:
        value = value['hnf']
    try:
        rows = parse_integer_matrix(value, rows=field.degree)
    except ValueError as e:
        raise MalformedDocument(f"Ideal mal formado: {e}", errors={'ideal': str(e)}) from e
    return ideal_from_matrix(field, rows)
