"""Affine charts of the Grassmannian, the Artin-Schreier presentation of the
toy-shtuka locus, determinantal transversality, and t-adic valuation probes.

A chart is a splitting V = W + W' with W rational of codimension n; the
graph construction identifies n-by-(N-n) matrices with the subspaces
transversal to W.  On a chart the toy locus is the preimage of the
rank-at-most-one matrices under A -> A - A^(q), which is additive in
characteristic p and etale, so curves downstairs lift uniquely once a fiber
point is chosen.  Divisor multiplicities are measured operationally as the
t-adic order of a local equation along such lifted curves.
"""

from __future__ import annotations

from itertools import combinations, product

from .errors import (
    FiberEmptyError,
    NotOnVarietyError,
    TruncationTooShortError,
)
from .gf import Field
from .linalg import (
    Subspace,
    echelonize,
    enumerate_grassmannian,
    intersect,
    perp,
    solve,
)
from .toysht import is_toy_shtuka

INFINITE = "INFINITE"


# ---------------------------------------------------------------------------
# truncated power series


class TruncSeries:
    """Power series in one parameter t over F_{q^m}, tracked through t^T."""

    __slots__ = ("field", "T", "coeffs")

    def __init__(self, field: Field, coeffs, T: int):
        self.field = field
        self.T = T
        c = list(coeffs)[: T + 1]
        c += [0] * (T + 1 - len(c))
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, field: Field, value: int, T: int) -> "TruncSeries":
        return cls(field, (value,), T)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        f = self.field
        return TruncSeries(
            f, (f.add(a, b) for a, b in zip(self.coeffs, other.coeffs)), self.T
        )

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        f = self.field
        return TruncSeries(
            f, (f.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)), self.T
        )

    def __neg__(self) -> "TruncSeries":
        f = self.field
        return TruncSeries(f, (f.neg(a) for a in self.coeffs), self.T)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        f = self.field
        out = [0] * (self.T + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > self.T:
                    break
                if b:
                    out[i + j] = f.add(out[i + j], f.mul(a, b))
        return TruncSeries(f, out, self.T)

    def scale(self, c: int) -> "TruncSeries":
        f = self.field
        return TruncSeries(f, (f.mul(c, a) for a in self.coeffs), self.T)

    def qth_power(self) -> "TruncSeries":
        # (sum c_k t^k)^q = sum c_k^q t^(kq) in characteristic p
        f = self.field
        out = [0] * (self.T + 1)
        for k, c in enumerate(self.coeffs):
            if c and k * f.q <= self.T:
                out[k * f.q] = f.frobenius(c)
        return TruncSeries(f, out, self.T)

    def at_zero(self) -> int:
        return self.coeffs[0]

    def order(self):
        """Index of the first nonzero coefficient, or None through t^T."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return None

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"TruncSeries({self.coeffs})"


def series_matrix_const(field: Field, B, T: int):
    return [[TruncSeries.const(field, x, T) for x in row] for row in B]


def series_matrix_as(M):
    """Entrywise Artin-Schreier map on a series matrix."""
    return [[x - x.qth_power() for x in row] for row in M]


def series_matrix_frobenius(M):
    return [[x.qth_power() for x in row] for row in M]


# ---------------------------------------------------------------------------
# charts and the Artin-Schreier presentation


class Chart:
    """A splitting V = W + W' with ordered rational bases of both parts.

    Matrices act by rows: the graph of A has one row w'_i + sum_j A[i][j] w_j
    per basis vector of W'.
    """

    __slots__ = ("field", "N", "w_basis", "wp_basis", "W", "Wp")

    def __init__(self, field: Field, N: int, w_basis, wp_basis):
        self.field = field
        self.N = N
        self.w_basis = tuple(tuple(r) for r in w_basis)
        self.wp_basis = tuple(tuple(r) for r in wp_basis)
        self.W = echelonize(field, self.w_basis, N)
        self.Wp = echelonize(field, self.wp_basis, N)
        if self.W.dim != len(self.w_basis) or self.Wp.dim != len(self.wp_basis):
            raise ValueError("chart bases must be independent")
        if intersect(self.W, self.Wp).dim != 0:
            raise ValueError("chart parts must meet trivially")
        if self.W.dim + self.Wp.dim != N:
            raise ValueError("chart parts must span the ambient space")

    @property
    def n(self) -> int:
        return len(self.wp_basis)

    def graph(self, A) -> Subspace:
        """The subspace with matrix A in this chart."""
        f = self.field
        rows = []
        for i, wp in enumerate(self.wp_basis):
            v = list(wp)
            for j, w in enumerate(self.w_basis):
                c = A[i][j]
                if c:
                    for k in range(self.N):
                        v[k] = f.add(v[k], f.mul(c, w[k]))
            rows.append(tuple(v))
        return echelonize(f, rows, self.N)

    def coordinates(self, L: Subspace):
        """Matrix of L in this chart, or None when L meets W."""
        if L.dim != self.n:
            return None
        f = self.field
        w_red = [L.reduce(w) for w in self.w_basis]
        rows = []
        for wp in self.wp_basis:
            target = tuple(f.neg(x) for x in L.reduce(wp))
            coeffs = solve(f, w_red, target)
            if coeffs is None:
                return None
            rows.append(coeffs)
        # the graph of the solved matrix must reproduce L exactly
        if self.graph(rows) != L:
            return None
        return tuple(rows)


def canonical_chart(field: Field, W: Subspace) -> Chart:
    """The chart centered at rational W, completed by standard basis vectors."""
    N = W.ambient_dim
    pivset = set(W.pivots)
    wp = [
        tuple(1 if k == j else 0 for k in range(N)) for j in range(N) if j not in pivset
    ]
    return Chart(field, N, W.basis, wp)


def artin_schreier(field: Field, A):
    """Entrywise A - A^(q) on a matrix over the field."""
    return tuple(
        tuple(field.sub(x, field.frobenius(x)) for x in row) for row in A
    )


def rank_le1(field: Field, A) -> bool:
    """True iff every 2x2 minor vanishes."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    for i1 in range(rows):
        for i2 in range(i1 + 1, rows):
            for j1 in range(cols):
                for j2 in range(j1 + 1, cols):
                    d = field.sub(
                        field.mul(A[i1][j1], A[i2][j2]),
                        field.mul(A[i1][j2], A[i2][j1]),
                    )
                    if d != 0:
                        return False
    return True


def chart_equivalence_check(field: Field, N: int, n: int, chart: Chart) -> dict:
    """Compare the intrinsic toy predicate on graphs with the chart-side
    rank condition on Artin-Schreier images, over every matrix."""
    width = N - n
    counter = {"checked": 0, "counterexamples": []}
    elems = tuple(field.elements())
    for flat in product(elems, repeat=n * width):
        A = tuple(tuple(flat[i * width : (i + 1) * width]) for i in range(n))
        lhs = is_toy_shtuka(chart.graph(A))
        rhs = rank_le1(field, artin_schreier(field, A))
        counter["checked"] += 1
        if lhs != rhs:
            counter["counterexamples"].append(A)
    return counter


def as_fiber(field: Field, B):
    """All rational preimages of the matrix B under the Artin-Schreier map."""
    entry_fibers = []
    for row in B:
        for y in row:
            fib = [x for x in field.elements() if field.sub(x, field.frobenius(x)) == y]
            if not fib:
                raise FiberEmptyError("an entry has no Artin-Schreier preimage")
            entry_fibers.append(fib)
    rows = len(B)
    cols = len(B[0]) if rows else 0
    for flat in product(*entry_fibers):
        yield tuple(tuple(flat[i * cols : (i + 1) * cols]) for i in range(rows))


# ---------------------------------------------------------------------------
# transversality of coordinate hyperplanes with the determinantal cone


def transversality_check(field: Field, s: int, t: int, a: int, b: int, A) -> bool:
    """Whether {X_ab = 0} meets the rank-at-most-one locus transversally at A.

    At a rank-one point the tangent space is the kernel of the Jacobian of
    the 2x2 minors; the test asks whether the coordinate X_ab is nonzero on
    it.  The zero matrix counts as non-transversal (the cone vertex).
    """
    if not rank_le1(field, A):
        raise NotOnVarietyError("matrix has rank above one")
    if A[a][b] != 0:
        raise ValueError("the (a,b) entry must vanish on the hyperplane")
    if all(x == 0 for row in A for x in row):
        return False
    jac_rows = []
    for i1, i2 in combinations(range(s), 2):
        for j1, j2 in combinations(range(t), 2):
            g = [0] * (s * t)
            g[i1 * t + j1] = A[i2][j2]
            g[i2 * t + j2] = A[i1][j1]
            g[i1 * t + j2] = field.neg(A[i2][j1])
            g[i2 * t + j1] = field.neg(A[i1][j2])
            jac_rows.append(tuple(g))
    tangent = perp(echelonize(field, jac_rows, s * t))
    col = a * t + b
    return any(v[col] != 0 for v in tangent.basis)


# ---------------------------------------------------------------------------
# valuation probes


def valuation_probe(divisor_eq, probe, defining_eqs=()):
    """The t-adic order of a local equation along a probe curve.

    divisor_eq maps the probe (a matrix of truncated series) to a series;
    each defining equation must vanish identically along the probe, which is
    how membership in the ambient variety is certified to truncation order.
    Returns the order, or INFINITE when every tracked coefficient vanishes.
    """
    for eq in defining_eqs:
        r = eq(probe)
        if not r.is_zero():
            raise NotOnVarietyError("probe leaves the variety at order %s" % r.order())
    s = divisor_eq(probe)
    k = s.order()
    if k is None:
        return INFINITE
    if k >= s.T:
        raise TruncationTooShortError(f"order reached truncation {s.T}")
    return k


def default_truncation(field: Field) -> int:
    return 2 * field.q + 2


def hensel_lift_probe(field: Field, A_series, B0):
    """The unique curve upstairs through B0 whose Artin-Schreier image is the
    given downstairs curve.  Requires AS(B0) to equal the curve at t=0.

    Additivity of x - x^q makes the correction a telescoping sum of iterated
    q-power images, which terminates within the truncation order.
    """
    T = A_series[0][0].T
    AS_B0 = artin_schreier(field, B0)
    rows = len(B0)
    cols = len(B0[0]) if rows else 0
    out = []
    for i in range(rows):
        orow = []
        for j in range(cols):
            R = A_series[i][j] - TruncSeries.const(field, AS_B0[i][j], T)
            if R.at_zero() != 0:
                raise FiberEmptyError("fiber point does not sit over the curve base")
            eps = TruncSeries.const(field, 0, T)
            term = R
            while not term.is_zero():
                eps = eps + term
                term = term.qth_power()
            orow.append(TruncSeries.const(field, B0[i][j], T) + eps)
        out.append(orow)
    return out


def random_series(field: Field, rng, T: int, const: int = 0, lead=None) -> TruncSeries:
    """Random series with prescribed constant term; lead pins coefficient 1."""
    coeffs = [const]
    first = rng.randrange(field.order) if lead is None else lead
    coeffs.append(first)
    for _ in range(2, T + 1):
        coeffs.append(rng.randrange(field.order))
    return TruncSeries(field, coeffs, T)


def _nonzero_random(field: Field, rng) -> int:
    return 1 + rng.randrange(field.order - 1)


def rank1_curve(field: Field, rng, A0, T: int):
    """A random curve of rank-at-most-one matrices through the nonzero A0,
    as an outer product of perturbed factor curves."""
    rows = len(A0)
    cols = len(A0[0])
    i0 = j0 = None
    for i in range(rows):
        for j in range(cols):
            if A0[i][j] != 0:
                i0, j0 = i, j
                break
        if i0 is not None:
            break
    if i0 is None:
        raise NotOnVarietyError("curve base must be a nonzero matrix")
    v0 = list(A0[i0])
    pivot_inv = field.inv(A0[i0][j0])
    u0 = [field.mul(A0[i][j0], pivot_inv) for i in range(rows)]
    u = [random_series(field, rng, T, const=u0[i]) for i in range(rows)]
    v = [random_series(field, rng, T, const=v0[j]) for j in range(cols)]
    return [[u[i] * v[j] for j in range(cols)] for i in range(rows)]


def minor_equations(field: Field, rows: int, cols: int):
    """Callables sending a series matrix to each of its 2x2 minors."""
    eqs = []
    for i1, i2 in combinations(range(rows), 2):
        for j1, j2 in combinations(range(cols), 2):
            def eq(M, i1=i1, i2=i2, j1=j1, j2=j2):
                return M[i1][j1] * M[i2][j2] - M[i1][j2] * M[i2][j1]
            eqs.append(eq)
    return eqs


# ---------------------------------------------------------------------------
# a Schubert-adapted chart and the multiplicity probe for Schubert divisors


def schubert_adapted_chart(
    field: Field, N: int, n: int, W: Subspace, L0: Subspace, avoid=None
):
    """A chart containing L0 in which the Schubert equation for W is the
    single graph coordinate (0, N-n-1).

    The center M is rational of codimension n with M cap W of codimension
    n+1; the complement starts with a vector of W, so the degeneracy locus
    det(L -> V/W) = 0 reduces to one matrix entry.  When avoid is a
    hyperplane, centers inside it are skipped (they cannot see transversal
    directions to its component).
    """
    for M in enumerate_grassmannian(field, N, N - n, subfield_only=True):
        MW = intersect(M, W)
        if MW.dim != N - n - 1:
            continue
        if intersect(M, L0).dim != 0:
            continue
        if avoid is not None and avoid.contains(M):
            continue
        w0 = None
        for v in M.vectors():
            if any(x != 0 for x in v) and not W.contains_vector(v):
                if all(field.in_subfield(x) for x in v):
                    w0 = v
                    break
        if w0 is None:
            continue
        u = None
        for v in W.vectors():
            if any(x != 0 for x in v) and not MW.contains_vector(v):
                if all(field.in_subfield(x) for x in v):
                    u = v
                    break
        if u is None:
            continue
        chosen = list(MW.basis) + [w0, u]
        span = echelonize(field, chosen, N)
        extra = []
        for j in range(N):
            if span.dim == N:
                break
            e = tuple(1 if k == j else 0 for k in range(N))
            if not span.contains_vector(e):
                extra.append(e)
                span = echelonize(field, list(span.basis) + [e], N)
        wp_basis = [u] + extra
        if len(wp_basis) != n:
            continue
        chart = Chart(field, N, list(MW.basis) + [w0], wp_basis)
        if intersect(chart.Wp, W).dim != 1:
            continue
        return chart, (0, N - n - 1)
    raise NotOnVarietyError("no adapted chart found for this Schubert center")


def _curve_first_order(field: Field, A_curve):
    """The t-coefficient matrix of a series matrix."""
    return [[s.coeffs[1] for s in row] for row in A_curve]


def schubert_multiplicity_probe(
    field: Field, N: int, n: int, W: Subspace, L0: Subspace, component, rng, T=None
):
    """Order of the Schubert equation along a random toy-locus curve through
    the nontrivial point L0 on the Schubert divisor of W.

    component is ("H", hyperplane) or ("J", line), naming the horospherical
    piece through L0; the curve direction is resampled until its first-order
    part crosses that component, an affine-linear certificate independent of
    the probed equation.
    """
    if T is None:
        T = default_truncation(field)
    kind, sub = component
    avoid = sub if kind == "H" else None
    chart, (ai, bj) = schubert_adapted_chart(field, N, n, W, L0, avoid=avoid)
    B0 = chart.coordinates(L0)
    assert B0 is not None and B0[ai][bj] == 0
    A0 = artin_schreier(field, B0)
    if all(x == 0 for row in A0 for x in row):
        raise NotOnVarietyError("probe base point must be nontrivial")
    width = N - n

    if kind == "H":
        phi = perp(sub).basis[0]
        pairing = [
            sum_pairing(field, phi, w) for w in chart.w_basis
        ]  # phi(w_j) for each center basis vector

        def crosses(Adot):
            # d/dt of phi(wp_i + B(wp_i)) is sum_j Adot[i][j] phi(w_j)
            for i in range(n):
                acc = 0
                for j in range(width):
                    acc = field.add(acc, field.mul(Adot[i][j], pairing[j]))
                if acc != 0:
                    return True
            return False

    else:
        gen = sub.basis[0]
        coeffs = solve(field, chart.wp_basis + chart.w_basis, gen)
        c = coeffs[:n]

        def crosses(Adot):
            # d/dt of B(w'_J) is sum_i c_i Adot[i]
            for j in range(width):
                acc = 0
                for i in range(n):
                    if c[i]:
                        acc = field.add(acc, field.mul(c[i], Adot[i][j]))
                if acc != 0:
                    return True
            return False

    cap = 64
    for _ in range(200):
        A_curve = rank1_curve(field, rng, A0, T)
        if not crosses(_curve_first_order(field, A_curve)):
            continue
        probe = hensel_lift_probe(field, A_curve, B0)

        def schubert_eq(M):
            return M[ai][bj]

        try:
            order = valuation_probe(
                schubert_eq,
                probe,
                defining_eqs=[
                    lambda M, e=e: e(series_matrix_as(M))
                    for e in minor_equations(field, n, width)
                ],
            )
        except TruncationTooShortError:
            if 2 * T > cap:
                raise
            T *= 2
            continue
        if order == INFINITE:
            continue
        return order
    raise NotOnVarietyError("no transversal probe direction found")


def sum_pairing(field: Field, a, b) -> int:
    """The standard bilinear pairing sum_i a_i b_i."""
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = field.add(acc, field.mul(x, y))
    return acc


# ---------------------------------------------------------------------------
# multiplicity probe for divisor pullbacks along partial Frobeniuses

def jtype_flag_pullback_probe(field: Field, N: int, n: int, J: Subspace, flag, rng, T=None):
    """Orders of the local equation of the J-type flag component, and of its
    Frobenius pullback, along a random curve on the chart model of flags.

    Works on the space of pairs (L, L') with sigma L inside L', presented
    over a chart as matrices B with the line H = L' cap W recording the
    image of B - B^(q).  The component is the locus where the rational line
    J sits inside the graph of B; the Frobenius factorization of the two
    partial Frobeniuses pulls its equation back to its entrywise q-power.
    The base flag must lie on the component.  Returns (order, pulled_order).
    """
    if T is None:
        T = default_truncation(field)
    width = N - n
    L0 = flag.small
    # chart avoiding both J and the base point
    chart = None
    for W in enumerate_grassmannian(field, N, width, subfield_only=True):
        if intersect(W, J).dim == 0 and intersect(W, L0).dim == 0:
            chart = canonical_chart(field, W)
            break
    if chart is None:
        raise NotOnVarietyError("no chart is transversal to both J and the point")
    B0 = chart.coordinates(L0)
    A0 = artin_schreier(field, B0)
    H0 = intersect(flag.big, chart.W)
    assert H0.dim == 1
    h0 = solve(field, chart.w_basis, H0.basis[0])
    jstar = next(j for j in range(width) if h0[j] != 0)
    # scalar heights of the Artin-Schreier rows over the line direction
    hinv = field.inv(h0[jstar])
    a0 = [field.mul(A0[i][jstar], hinv) for i in range(n)]
    for i in range(n):
        for j in range(width):
            assert A0[i][j] == field.mul(a0[i], h0[j]), "base point leaves the model"
    coeffs = solve(field, chart.wp_basis + chart.w_basis, J.basis[0])
    c, d = coeffs[:n], coeffs[n:]
    assert any(x != 0 for x in c), "J must be transversal to the chart center"
    base_gap = [
        field.sub(
            _dotcol(field, c, B0, j),
            d[j],
        )
        for j in range(width)
    ]
    assert all(x == 0 for x in base_gap), "base point is off the component"

    for _ in range(200):
        h_curve = [random_series(field, rng, T, const=h0[j]) for j in range(width)]
        a_curve = [random_series(field, rng, T, const=a0[i]) for i in range(n)]
        alpha1 = 0
        for i in range(n):
            if c[i]:
                alpha1 = field.add(alpha1, field.mul(c[i], a_curve[i].coeffs[1]))
        if alpha1 == 0:
            continue
        A_curve = [[a_curve[i] * h_curve[j] for j in range(width)] for i in range(n)]
        probe = hensel_lift_probe(field, A_curve, B0)

        def component_eq(M):
            out = None
            for i in range(n):
                if c[i]:
                    term = M[i][jstar].scale(c[i])
                    out = term if out is None else out + term
            return out - TruncSeries.const(field, d[jstar], out.T)

        def on_model(M):
            # rows of B - B^(q) must stay proportional to the moving line
            bad = TruncSeries.const(field, 0, T)
            AS_M = series_matrix_as(M)
            for i in range(n):
                for j in range(width):
                    if j == jstar:
                        continue
                    m = AS_M[i][j] * h_curve[jstar] - AS_M[i][jstar] * h_curve[j]
                    if not m.is_zero():
                        return m
            return bad

        try:
            order = valuation_probe(component_eq, probe, defining_eqs=[on_model])
            pulled = valuation_probe(lambda M: component_eq(M).qth_power(), probe)
        except TruncationTooShortError:
            if 2 * T > 64:
                raise
            T *= 2
            continue
        if order == INFINITE or pulled == INFINITE:
            continue
        return order, pulled
    raise NotOnVarietyError("no transversal probe direction found")


def _dotcol(field: Field, c, B, j: int) -> int:
    acc = 0
    for i, ci in enumerate(c):
        if ci:
            acc = field.add(acc, field.mul(ci, B[i][j]))
    return acc
