"""
Álgebra lineal exacta sobre Z y Q.

Las matrices circulan como listas de filas de enteros (o Fraction); las
operaciones pesadas delegan en DomainMatrix de sympy.
"""
from fractions import Fraction
from math import gcd

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, invariant_factors


def _shape(rows, ncols):
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return len(rows), ncols


def zz_matrix(rows, ncols=None):
    m, n = _shape(rows, ncols)
    if m == 0 or n == 0:
        return DomainMatrix.zeros((m, n), ZZ)
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (m, n), ZZ)


def qq_matrix(rows, ncols=None):
    m, n = _shape(rows, ncols)
    if m == 0 or n == 0:
        return DomainMatrix.zeros((m, n), QQ)
    data = []
    for row in rows:
        converted = []
        for x in row:
            f = Fraction(x)
            converted.append(QQ(f.numerator, f.denominator))
        data.append(converted)
    return DomainMatrix(data, (m, n), QQ)


def to_int_rows(dm):
    return [[int(x) for x in row] for row in dm.to_Matrix().tolist()]


def to_fraction_rows(dm):
    return [[Fraction(int(x.p), int(x.q)) for x in row] for row in dm.to_Matrix().tolist()]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def transpose(rows, ncols=None):
    m, n = _shape(rows, ncols)
    return [[rows[i][j] for i in range(m)] for j in range(n)]


def mat_mul(a, b):
    """Producto de matrices enteras o racionales dadas como listas."""
    if not a or not b:
        return zeros(len(a), len(b[0]) if b else 0)
    n = len(b[0])
    out = []
    for row in a:
        acc = [0] * n
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(n):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def mat_add(a, b, scale=1):
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub_identity(a):
    return [[x - (1 if i == j else 0) for j, x in enumerate(row)] for i, row in enumerate(a)]


def mat_pow(a, e):
    """Potencia entera (e puede ser negativo si a es unimodular)."""
    if e < 0:
        inv = integer_inverse(a)
        if inv is None:
            raise ValueError("La matriz no es invertible sobre Z")
        a, e = inv, -e
    result = identity(len(a))
    base = a
    while e:
        if e & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        e >>= 1
    return result


def is_zero(rows):
    return all(x == 0 for row in rows for x in row)


def determinant(rows):
    if not rows:
        return 1
    return int(zz_matrix(rows).det())


def integer_inverse(rows):
    """Inversa sobre Z, o None si la matriz no es unimodular."""
    n = len(rows)
    if n == 0:
        return []
    q = qq_matrix(rows)
    if q.rank() < n:
        return None
    inv = to_fraction_rows(q.inv())
    if any(x.denominator != 1 for row in inv for x in row):
        return None
    return [[int(x) for x in row] for row in inv]


def rational_inverse(rows):
    return to_fraction_rows(qq_matrix(rows).inv())


def rank_qq(rows, ncols=None):
    m, n = _shape(rows, ncols)
    if m == 0 or n == 0:
        return 0
    return qq_matrix(rows, n).rank()


def nullspace_qq(rows, ncols=None):
    """Base del núcleo derecho {v : A v = 0} sobre Q."""
    m, n = _shape(rows, ncols)
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    a = qq_matrix(rows, n)
    if a.rank() == n:
        return []
    null = a.nullspace()
    return [row for row in to_fraction_rows(null) if any(row)]


def column_hnf(rows, ncols=None):
    """
    Forma normal de Hermite por columnas de un retículo de rango completo.

    Devuelve la matriz d×d triangular superior con diagonal positiva y
    0 ≤ H[i][j] < H[i][i] para j > i. Lanza ValueError si las columnas no
    generan un retículo de rango completo.
    """
    m, n = _shape(rows, ncols)
    if m == 0:
        return []
    if rank_qq(rows, n) < m:
        raise ValueError("Las columnas no generan un retículo de rango completo")
    h = to_int_rows(hermite_normal_form(zz_matrix(rows, n)))
    # Columnas nulas fuera; el resultado es cuadrado para rango completo
    cols = [c for c in transpose(h) if any(c)]
    if len(cols) != m:
        raise ValueError("Forma de Hermite inesperada")
    h = transpose(cols, m)
    return canonical_upper_hnf(h)


def canonical_upper_hnf(h):
    """Normaliza signos y reduce las entradas sobre la diagonal."""
    d = len(h)
    h = [list(r) for r in h]
    for i in range(d):
        for k in range(i + 1, d):
            if h[k][i] != 0:
                raise ValueError("La matriz no es triangular superior")
    for j in range(d):
        if h[j][j] == 0:
            raise ValueError("Diagonal nula")
        if h[j][j] < 0:
            for i in range(d):
                h[i][j] = -h[i][j]
    for j in range(d):
        for i in range(j - 1, -1, -1):
            q = h[i][j] // h[i][i]
            if q:
                for k in range(i + 1):
                    h[k][j] -= q * h[k][i]
    return h


def solve_upper_triangular(h, v):
    """Resuelve H x = v con H triangular superior; None si x no es entero."""
    d = len(h)
    x = [0] * d
    rest = list(v)
    for i in range(d - 1, -1, -1):
        q, r = divmod(rest[i], h[i][i])
        if r:
            return None
        x[i] = q
        if q:
            for k in range(i + 1):
                rest[k] -= q * h[k][i]
    return x


def canonical_invariant_factors(values):
    """Factores invariantes canónicos (cadena de divisibilidad, > 1)."""
    a = sorted(abs(int(v)) for v in values if v)
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            g = gcd(a[i], a[j])
            a[i], a[j] = g, a[i] * a[j] // g
    return [x for x in a if x > 1]


def integer_invariant_factors(rows, ncols=None):
    """Factores invariantes (> 1) de una matriz entera."""
    m, n = _shape(rows, ncols)
    if m == 0 or n == 0 or is_zero(rows):
        return []
    return canonical_invariant_factors(invariant_factors(zz_matrix(rows, n)))


def exterior_minor(rows, row_subset, col_subset):
    """Menor de una matriz de Fraction/enteros."""
    if not row_subset:
        return 1
    sub = [[rows[i][j] for j in col_subset] for i in row_subset]
    return qq_det(sub)


def qq_det(rows):
    if not rows:
        return Fraction(1)
    d = qq_matrix(rows).det()
    return Fraction(int(d.numerator), int(d.denominator))
