"""Subspace lattice operations over F_{q^m}: canonical echelon forms, sums,
intersections, annihilators, Grassmannian enumeration and the rank calculus
for maps between subquotients.

Subspaces are immutable and identified with their reduced row-echelon basis,
which is unique, so equality of subspaces is equality of bases.  All counting
is exact integer arithmetic.
"""

from __future__ import annotations

from itertools import combinations, product

from .errors import BudgetExceededError, DimensionMismatchError
from .gf import Field

DEFAULT_ENUM_BUDGET = 1 << 22


def rref(field: Field, rows, width: int):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    mat = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(width):
        piv = None
        for i in range(rank, len(mat)):
            if mat[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = field.inv(mat[rank][col])
        if inv != 1:
            mat[rank] = [field.mul(inv, x) for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                c = mat[i][col]
                row = mat[rank]
                mat[i] = [field.sub(mat[i][j], field.mul(c, row[j])) for j in range(width)]
        pivots.append(col)
        rank += 1
        if rank == len(mat):
            break
    return [tuple(r) for r in mat[:rank]], pivots


class Subspace:
    """A linear subspace of F_{q^m}^N in canonical reduced-echelon form."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots", "_rational")

    def __init__(self, field: Field, ambient_dim: int, basis, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = tuple(basis)
        self.pivots = tuple(pivots)
        self._rational = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(N={self.ambient_dim}, dim={self.dim}, basis={self.basis})"

    def reduce(self, vec):
        """Remainder of vec after clearing all pivot coordinates."""
        f = self.field
        v = list(vec)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c != 0:
                for j in range(self.ambient_dim):
                    v[j] = f.sub(v[j], f.mul(c, row[j]))
        return tuple(v)

    def contains_vector(self, vec) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("ambient dimensions differ")
        return all(self.contains_vector(r) for r in other.basis)

    def frobenius_image(self) -> "Subspace":
        # entrywise q-power of an echelon basis is again an echelon basis
        fr = self.field.frobenius
        rows = tuple(tuple(fr(x) for x in row) for row in self.basis)
        return Subspace(self.field, self.ambient_dim, rows, self.pivots)

    def is_rational(self) -> bool:
        """True iff the subspace is defined over F_q (basis fixed by Frobenius)."""
        if self._rational is None:
            fr = self.field.frobenius
            self._rational = all(fr(x) == x for row in self.basis for x in row)
        return self._rational

    def vectors(self):
        """All vectors of the subspace (use only at small dimensions)."""
        f = self.field
        for coeffs in product(f.elements(), repeat=self.dim):
            v = [0] * self.ambient_dim
            for c, row in zip(coeffs, self.basis):
                if c:
                    for j in range(self.ambient_dim):
                        v[j] = f.add(v[j], f.mul(c, row[j]))
            yield tuple(v)


def echelonize(field: Field, rows, ambient_dim: int) -> Subspace:
    """Canonical subspace spanned by the given vectors."""
    for r in rows:
        if len(r) != ambient_dim:
            raise DimensionMismatchError(f"vector of length {len(r)}, ambient {ambient_dim}")
    basis, pivots = rref(field, rows, ambient_dim)
    return Subspace(field, ambient_dim, basis, pivots)


def zero_subspace(field: Field, ambient_dim: int) -> Subspace:
    return Subspace(field, ambient_dim, (), ())


def full_space(field: Field, ambient_dim: int) -> Subspace:
    rows = tuple(
        tuple(1 if i == j else 0 for j in range(ambient_dim)) for i in range(ambient_dim)
    )
    return Subspace(field, ambient_dim, rows, tuple(range(ambient_dim)))


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    return echelonize(a.field, a.basis + b.basis, a.ambient_dim)


def perp(a: Subspace) -> Subspace:
    """Annihilator under the standard pairing (kernel of the basis matrix)."""
    f = a.field
    n = a.ambient_dim
    pivset = set(a.pivots)
    rows = []
    for free in range(n):
        if free in pivset:
            continue
        v = [0] * n
        v[free] = 1
        for row, p in zip(a.basis, a.pivots):
            v[p] = f.neg(row[free])
        rows.append(tuple(v))
    return echelonize(f, rows, n)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return perp(span_sum(perp(a), perp(b)))


def solve(field: Field, rows, target):
    """Coefficients c with sum(c_i * rows_i) = target, or None."""
    width = len(target)
    k = len(rows)
    aug = [list(r) + [0] * k for r in rows]
    for i in range(k):
        aug[i][width + i] = 1
    red, pivots = rref(field, aug, width + k)
    residual = list(target)
    coeffs = [0] * k
    for row, p in zip(red, pivots):
        if p >= width:
            continue
        c = residual[p]
        if c != 0:
            for j in range(width):
                residual[j] = field.sub(residual[j], field.mul(c, row[j]))
            for j in range(k):
                coeffs[j] = field.add(coeffs[j], field.mul(c, row[width + j]))
    if any(x != 0 for x in residual):
        return None
    return tuple(coeffs)


class LinearMap:
    """A matrix between coordinate spaces; rows index the domain basis."""

    __slots__ = ("field", "matrix", "domain_dim", "codomain_dim")

    def __init__(self, field: Field, matrix, domain_dim: int, codomain_dim: int):
        self.field = field
        self.matrix = tuple(tuple(r) for r in matrix)
        if len(self.matrix) != domain_dim or any(
            len(r) != codomain_dim for r in self.matrix
        ):
            raise DimensionMismatchError("matrix shape disagrees with declared dims")
        self.domain_dim = domain_dim
        self.codomain_dim = codomain_dim

    def rank(self) -> int:
        rows, _ = rref(self.field, self.matrix, self.codomain_dim)
        return len(rows)


def map_rank(f: LinearMap) -> int:
    return f.rank()


class QuotientMap:
    """Coordinates on V/W: reduce modulo W, read off the non-pivot columns."""

    __slots__ = ("space", "free_cols")

    def __init__(self, by: Subspace):
        self.space = by
        pivset = set(by.pivots)
        self.free_cols = tuple(j for j in range(by.ambient_dim) if j not in pivset)

    @property
    def dim(self) -> int:
        return len(self.free_cols)

    def apply(self, vec):
        r = self.space.reduce(vec)
        return tuple(r[j] for j in self.free_cols)

    def lift(self, qvec):
        """A preimage of a quotient coordinate vector."""
        v = [0] * self.space.ambient_dim
        for c, j in zip(qvec, self.free_cols):
            v[j] = c
        return tuple(v)

    def image_subspace(self, sub: Subspace) -> Subspace:
        rows = [self.apply(r) for r in sub.basis]
        return echelonize(sub.field, rows, self.dim)


def induced_map(L: Subspace, quotient_by: Subspace) -> LinearMap:
    """The composite L -> V -> V/W in basis/quotient coordinates."""
    if L.ambient_dim != quotient_by.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    qm = QuotientMap(quotient_by)
    rows = [qm.apply(r) for r in L.basis]
    return LinearMap(L.field, rows, L.dim, qm.dim)


def gauss_binomial(N: int, n: int, q: int) -> int:
    """Number of n-dimensional subspaces of an N-dimensional space over F_q."""
    if n < 0 or n > N:
        return 0
    num = 1
    den = 1
    for i in range(n):
        num *= q ** (N - i) - 1
        den *= q ** (n - i) - 1
    assert num % den == 0
    return num // den


def enumerate_grassmannian(
    field: Field,
    N: int,
    n: int,
    subfield_only: bool = False,
    budget: int = DEFAULT_ENUM_BUDGET,
):
    """Yield every n-dimensional subspace of F^N exactly once, in canonical
    pivot-set-major order.  With subfield_only, entries run over F_q, which
    enumerates exactly the Frobenius-fixed subspaces.
    """
    if n < 0 or n > N:
        raise DimensionMismatchError(f"need 0 <= n <= N, got n={n}, N={N}")
    base = field.q if subfield_only else field.order
    total = gauss_binomial(N, n, base)
    if total > budget:
        raise BudgetExceededError(f"{total} subspaces exceeds budget {budget}")
    elems = field.subfield_elements() if subfield_only else tuple(field.elements())
    for pivots in combinations(range(N), n):
        pivset = set(pivots)
        free_positions = [
            (i, j) for i in range(n) for j in range(pivots[i] + 1, N) if j not in pivset
        ]
        template = [[0] * N for i in range(n)]
        for i, p in enumerate(pivots):
            template[i][p] = 1
        if not free_positions:
            yield Subspace(field, N, tuple(tuple(r) for r in template), pivots)
            continue
        for values in product(elems, repeat=len(free_positions)):
            rows = [r[:] for r in template]
            for (i, j), v in zip(free_positions, values):
                rows[i][j] = v
            yield Subspace(field, N, tuple(tuple(r) for r in rows), pivots)


def rational_lines(field: Field, N: int):
    """The F_q-rational points of the projective space of lines."""
    return list(enumerate_grassmannian(field, N, 1, subfield_only=True))


def rational_hyperplanes(field: Field, N: int):
    """The F_q-rational hyperplanes of F^N."""
    return list(enumerate_grassmannian(field, N, N - 1, subfield_only=True))
