"""
Ideales enteros de O_K representados por su forma de Hermite por columnas.

Las columnas de la matriz son coordenadas, en la base entera, de una base
Z del ideal. Todas las funciones reciben el cuerpo (NumberFieldData) para
poder multiplicar elementos.
"""
import itertools
import logging
from dataclasses import dataclass

from core.error_handling import NotAnIdeal
from core.linalg import canonical_upper_hnf, column_hnf, solve_upper_triangular, transpose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdealHNF:
    """Ideal entero en forma de Hermite (triangular superior, diagonal positiva)"""
    matrix: tuple

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def degree(self):
        return len(self.matrix)

    @property
    def norm(self):
        """Índice [O_K : I] = producto de la diagonal"""
        result = 1
        for i in range(self.degree):
            result *= self.matrix[i][i]
        return result

    @property
    def diagonal(self):
        return tuple(self.matrix[i][i] for i in range(self.degree))

    def columns(self):
        return [list(c) for c in transpose(self.matrix, self.degree)]

    def contains(self, vector):
        return solve_upper_triangular(self.matrix, vector) is not None

    def is_unit_ideal(self):
        return self.norm == 1

    def to_json(self):
        return [list(row) for row in self.matrix]

    def __str__(self):
        return f"Ideal(norma={self.norm}, hnf={self.to_json()})"


def unit_ideal(field):
    d = field.degree
    return IdealHNF.from_rows([[int(i == j) for j in range(d)] for i in range(d)])


def ideal_from_columns(field, columns):
    """HNF del Z-módulo generado por una lista de vectores columna."""
    d = field.degree
    if not columns:
        raise NotAnIdeal("El ideal nulo no es un nivel admisible")
    rows = transpose(columns, d)
    try:
        return IdealHNF.from_rows(column_hnf(rows, len(columns)))
    except ValueError as e:
        raise NotAnIdeal(f"Los generadores no dan un retículo de rango completo: {e}") from e


def check_ideal(field, ideal):
    """Comprueba que el retículo es cerrado por multiplicación por O_K."""
    d = field.degree
    if ideal.degree != d:
        raise NotAnIdeal(f"Matriz {ideal.degree}×{ideal.degree} para un cuerpo de grado {d}")
    try:
        canonical = canonical_upper_hnf(ideal.matrix)
    except ValueError as e:
        raise NotAnIdeal(str(e)) from e
    if tuple(tuple(r) for r in canonical) != ideal.matrix:
        raise NotAnIdeal("La matriz no está en forma de Hermite canónica")
    for column in ideal.columns():
        for i in range(d):
            product = field.mul(field.basis_vector(i), column)
            if not ideal.contains(product):
                raise NotAnIdeal(f"ω_{i} · {column} no pertenece al retículo")
    return ideal


def ideal_from_matrix(field, rows):
    """Ideal desde una matriz ingerida (cualquier base Z); valida el cierre."""
    d = field.degree
    if len(rows) != d or any(len(r) != len(rows[0]) for r in rows):
        raise NotAnIdeal(f"Se esperaba una matriz con {d} filas")
    ideal = ideal_from_columns(field, transpose(rows, len(rows[0])))
    return check_ideal(field, ideal)


def ideal_norm(field, ideal):
    """Norma de un ideal validado; NotAnIdeal si no es cerrado por O_K."""
    check_ideal(field, ideal)
    return ideal.norm


def ideal_from_generators(field, generators):
    """Ideal generado (como O_K-módulo) por una lista de elementos."""
    d = field.degree
    columns = []
    for g in generators:
        for i in range(d):
            columns.append(field.mul(field.basis_vector(i), g))
    if not any(any(c) for c in columns):
        raise NotAnIdeal("El ideal generado es nulo")
    return ideal_from_columns(field, [c for c in columns if any(c)])


def principal_ideal(field, element):
    return ideal_from_generators(field, [element])


def ideal_sum(field, first, second):
    return ideal_from_columns(field, first.columns() + second.columns())


def ideal_product(field, first, second):
    columns = [field.mul(a, b) for a in first.columns() for b in second.columns()]
    return ideal_from_columns(field, columns)


def ideal_contains(big, small):
    """¿small ⊆ big?"""
    return all(big.contains(c) for c in small.columns())


def _hnf_shapes(d, max_norm):
    """Matrices triangulares superiores con 0 ≤ h_ij < h_ii y det ≤ max_norm."""
    def diagonals(prefix, remaining):
        if len(prefix) == d:
            yield prefix
            return
        for h in range(1, remaining + 1):
            yield from diagonals(prefix + (h,), remaining // h)

    for diag in diagonals((), max_norm):
        slots = [(i, j) for j in range(d) for i in range(j)]
        ranges = [range(diag[i]) for i, _ in slots]
        for values in itertools.product(*ranges):
            m = [[0] * d for _ in range(d)]
            for k in range(d):
                m[k][k] = diag[k]
            for (i, j), v in zip(slots, values):
                m[i][j] = v
            yield m


def enumerate_ideals(field, max_norm):
    """Todos los ideales enteros de norma ≤ max_norm, ordenados por norma."""
    found = []
    for rows in _hnf_shapes(field.degree, max_norm):
        candidate = IdealHNF.from_rows(rows)
        try:
            check_ideal(field, candidate)
        except NotAnIdeal:
            continue
        found.append(candidate)
    found.sort(key=lambda ideal: (ideal.norm, ideal.matrix))
    logger.debug(f"{len(found)} ideales de norma ≤ {max_norm}")
    return found
