"""
Complejos de cocadenas finitos con diferenciales dispersas exactas.
"""
from dataclasses import dataclass, field

from .error_handling import MismatchWithClosedForm
from .linalg import rank_qq


@dataclass(frozen=True, eq=False)
class FiniteComplex:
    """
    Complejo C^0 → C^1 → ... con base ortonormal declarada.

    differentials[q] es un diccionario {(fila, columna): valor} de la
    matriz C^q → C^{q+1}; fila indexa labels[q + 1] y columna labels[q].
    """
    labels: tuple
    differentials: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def top_degree(self):
        return len(self.labels) - 1

    @property
    def dims(self):
        return [len(basis) for basis in self.labels]

    @property
    def total_dimension(self):
        return sum(self.dims)

    def dim(self, q):
        return len(self.labels[q]) if 0 <= q < len(self.labels) else 0

    def matrix(self, q):
        """Matriz densa de d^q : C^q → C^{q+1} (lista de filas)."""
        rows, cols = self.dim(q + 1), self.dim(q)
        dense = [[0] * cols for _ in range(rows)]
        if 0 <= q < len(self.differentials):
            for (i, j), value in self.differentials[q].items():
                dense[i][j] = value
        return dense

    def rank(self, q):
        if self.dim(q) == 0 or self.dim(q + 1) == 0:
            return 0
        return rank_qq(self.matrix(q), self.dim(q))

    def entries(self, q):
        if 0 <= q < len(self.differentials):
            return self.differentials[q]
        return {}

    def compose(self, q):
        """d^{q+1} ∘ d^q como diccionario disperso."""
        return sparse_product(self.entries(q + 1), self.entries(q))

    def check_square_zero(self):
        for q in range(len(self.labels) - 2):
            residue = self.compose(q)
            if residue:
                raise MismatchWithClosedForm(f"d∘d ≠ 0 en grado {q}: {len(residue)} entradas")
        return True

    def index_of(self, q):
        return {label: i for i, label in enumerate(self.labels[q])}


def sparse_product(left, right):
    """Producto left·right de matrices dispersas {(fila, columna): valor}."""
    by_row = {}
    for (i, j), value in left.items():
        by_row.setdefault(j, []).append((i, value))
    result = {}
    for (k, j), value in right.items():
        for i, other in by_row.get(k, ()):
            result[(i, j)] = result.get((i, j), 0) + other * value
    return {key: v for key, v in result.items() if v}
