"""A finite truncation of Tate-space analysis: a finite F_q-space carrying a
dimension-theory offset, exact Z[1/p]-valued Fourier transform without any
complex arithmetic, extension maps from finite projective quotients, the
finite Radon transform in the lattice normalization, and the divisor-pair
calculus of the principal criterion, Schubert pairs and the canonical Picard
relations.

Everything identities with scalar-orbit sums: for a nontrivial additive
character psi of F_q the inner sum over c in F_q^x of psi(c t) is q-1 when
t = 0 and -1 otherwise, so transforms of scalar-invariant functions never
leave Z[1/p] and are independent of the character.
"""

from __future__ import annotations

from .errors import (
    LatticeNotNestedError,
    NotAdmissibleError,
    NotInvariantError,
    SumNotZeroError,
    WrongChainError,
    WrongIndexError,
)
from .divisors import PAdicRational
from .gf import Field
from .linalg import QuotientMap, Subspace, echelonize, perp, solve


class FiniteTateModel:
    """A finite F_q-space of dimension D whose subspaces play the role of
    lattices, with dimension theory n(Lambda) = dim Lambda + c.

    The dual model carries the offset -c-D, so perpendicularity negates the
    dimension theory and double duality restores it.
    """

    def __init__(self, field: Field, D: int, c: int):
        if field.m != 1:
            raise ValueError("the Tate model works over F_q itself (m = 1)")
        self.field = field
        self.q = field.q
        self.D = D
        self.c = c
        self.c_star = -c - D
        self._vectors = None
        self._lines = None
        self._pair_zero = None

    def n(self, lattice: Subspace) -> int:
        return lattice.dim + self.c

    def n_star(self, lattice: Subspace) -> int:
        return lattice.dim + self.c_star

    def offset(self, side: str) -> int:
        return self.c if side == "T" else self.c_star

    def measure(self, lattice: Subspace) -> PAdicRational:
        return PAdicRational.q_power(self.field.p, self.field.e, self.n(lattice))

    def vectors(self):
        """All vectors, listed so that position agrees with index()."""
        if self._vectors is None:
            from itertools import product

            elems = tuple(self.field.elements())
            self._vectors = [tuple(reversed(v)) for v in product(elems, repeat=self.D)]
        return self._vectors

    def index(self, v) -> int:
        q = self.q
        out = 0
        for x in reversed(v):
            out = out * q + x
        return out

    def lines(self):
        """Normalized representatives of the scalar orbits of nonzero vectors."""
        if self._lines is None:
            f = self.field
            reps = []
            seen = set()
            for v in self.vectors():
                if all(x == 0 for x in v):
                    continue
                i = next(k for k, x in enumerate(v) if x != 0)
                inv = f.inv(v[i])
                rep = tuple(f.mul(inv, x) for x in v)
                if rep not in seen:
                    seen.add(rep)
                    reps.append(rep)
            self._lines = reps
        return self._lines

    def pairing(self, a, b) -> int:
        f = self.field
        acc = 0
        for x, y in zip(a, b):
            if x and y:
                acc = f.add(acc, f.mul(x, y))
        return acc

    def pair_zero_table(self):
        """For each line representative, the 0/1 incidence with every vector
        of the dual coordinate space under the standard pairing."""
        if self._pair_zero is None:
            vecs = self.vectors()
            self._pair_zero = [
                bytes(1 if self.pairing(rep, w) == 0 else 0 for w in vecs)
                for rep in self.lines()
            ]
        return self._pair_zero

    def subspace(self, rows) -> Subspace:
        return echelonize(self.field, rows, self.D)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteTateModel)
            and self.field is other.field
            and self.D == other.D
            and self.c == other.c
        )

    def __hash__(self):
        return hash((id(self.field), self.D, self.c))


class TateFn:
    """A Z[1/p]-valued function on the model space or its dual, with the
    value at 0 carried explicitly."""

    __slots__ = ("model", "side", "values")

    def __init__(self, model: FiniteTateModel, side: str, values):
        if side not in ("T", "T*"):
            raise ValueError("side must be 'T' or 'T*'")
        self.model = model
        self.side = side
        self.values = list(values)
        assert len(self.values) == model.q**model.D

    @classmethod
    def zero(cls, model: FiniteTateModel, side: str) -> "TateFn":
        z = PAdicRational.integer(model.field.p, 0)
        return cls(model, side, [z] * (model.q**model.D))

    @classmethod
    def indicator(cls, model: FiniteTateModel, side: str, sub: Subspace) -> "TateFn":
        out = cls.zero(model, side)
        one = PAdicRational.integer(model.field.p, 1)
        for v in sub.vectors():
            out.values[model.index(v)] = one
        return out

    def value(self, v) -> PAdicRational:
        return self.values[self.model.index(v)]

    def at_zero(self) -> PAdicRational:
        return self.values[0]

    def punctured(self) -> "TateFn":
        """Copy with the value at 0 forced to zero."""
        out = TateFn(self.model, self.side, self.values)
        out.values[0] = PAdicRational.integer(self.model.field.p, 0)
        return out

    def is_fq_invariant(self) -> bool:
        f = self.model.field
        for rep in self.model.lines():
            base = self.values[self.model.index(rep)]
            for c in f.elements():
                if c in (0, 1):
                    continue
                w = tuple(f.mul(c, x) for x in rep)
                if self.values[self.model.index(w)] != base:
                    return False
        return True

    def reflect(self) -> "TateFn":
        """The function v -> f(-v)."""
        f = self.model.field
        out = TateFn.zero(self.model, self.side)
        for v in self.model.vectors():
            w = tuple(f.neg(x) for x in v)
            out.values[self.model.index(w)] = self.values[self.model.index(v)]
        return out

    def __add__(self, other: "TateFn") -> "TateFn":
        assert self.side == other.side
        return TateFn(
            self.model, self.side, [a + b for a, b in zip(self.values, other.values)]
        )

    def __sub__(self, other: "TateFn") -> "TateFn":
        assert self.side == other.side
        return TateFn(
            self.model, self.side, [a - b for a, b in zip(self.values, other.values)]
        )

    def __neg__(self) -> "TateFn":
        return TateFn(self.model, self.side, [-a for a in self.values])

    def scale(self, c: PAdicRational) -> "TateFn":
        return TateFn(self.model, self.side, [c * a for a in self.values])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TateFn)
            and self.side == other.side
            and self.values == other.values
        )

    def equal_punctured(self, other: "TateFn") -> bool:
        return self.values[1:] == other.values[1:]

    def __hash__(self):
        return hash((self.side, tuple(self.values)))


def integrate(f: TateFn) -> PAdicRational:
    """Total mass, with a point weighing q to the side's offset."""
    p, e = f.model.field.p, f.model.field.e
    total = PAdicRational.integer(p, 0)
    for v in f.values:
        total = total + v
    return total * PAdicRational.q_power(p, e, f.model.offset(f.side))


def fourier(f: TateFn) -> TateFn:
    """Exact orbit-sum Fourier transform of a scalar-invariant function.

    The output side is the opposite of the input side; no character enters
    the computation, only the collapsed orbit sums q-1 and -1.
    """
    if not f.is_fq_invariant():
        raise NotInvariantError("Fourier needs a scalar-invariant function")
    model = f.model
    p, e = model.field.p, model.field.e
    q = model.q
    size = q**model.D
    k = max([v.exp for v in f.values] + [0])
    nums = [v.scaled_numerator(k) for v in f.values]
    reps = model.lines()
    table = model.pair_zero_table()
    out = [nums[0]] * size
    for li, rep in enumerate(reps):
        c = nums[model.index(rep)]
        if c == 0:
            continue
        row = table[li]
        for w in range(size):
            out[w] += c * (q - 1) if row[w] else -c
    pm = PAdicRational.q_power(p, e, model.offset(f.side))
    other = "T*" if f.side == "T" else "T"
    return TateFn(model, other, [PAdicRational(p, x, k) * pm for x in out])


def fourier_inverse_check(f: TateFn) -> bool:
    """Double transform equals reflection (hence the identity on invariant
    functions)."""
    return fourier(fourier(f)) == f.reflect()


class SubquotientCoords:
    """Coordinates on the quotient of two nested subspaces, with lifts."""

    def __init__(self, model: FiniteTateModel, inner: Subspace, outer: Subspace):
        if not outer.contains(inner):
            raise LatticeNotNestedError("inner lattice must sit inside the outer one")
        self.model = model
        self.inner = inner
        self.outer = outer
        f = model.field
        inner_rows = [solve(f, outer.basis, b) for b in inner.basis]
        self._inner_in_outer = echelonize(f, inner_rows, outer.dim)
        self._qm = QuotientMap(self._inner_in_outer)
        self.dim = outer.dim - inner.dim

    def to_quotient(self, v):
        coords = solve(self.model.field, self.outer.basis, v)
        if coords is None:
            raise ValueError("vector is outside the outer lattice")
        return self._qm.apply(coords)

    def lift(self, qvec):
        f = self.model.field
        coords = self._qm.lift(qvec)
        out = [0] * self.model.D
        for c, row in zip(coords, self.outer.basis):
            if c:
                for j in range(self.model.D):
                    out[j] = f.add(out[j], f.mul(c, row[j]))
        return tuple(out)

    def line_rep(self, qvec):
        f = self.model.field
        i = next(k for k, x in enumerate(qvec) if x != 0)
        inv = f.inv(qvec[i])
        return tuple(f.mul(inv, x) for x in qvec)

    def quotient_lines(self):
        from itertools import product

        f = self.model.field
        seen = set()
        reps = []
        for v in product(f.elements(), repeat=self.dim):
            if all(x == 0 for x in v):
                continue
            rep = self.line_rep(v)
            if rep not in seen:
                seen.add(rep)
                reps.append(rep)
        return reps


def eps_extend(model: FiniteTateModel, g: dict, inner: Subspace, outer: Subspace) -> TateFn:
    """Pull a function on the projective quotient back to the shell between
    the lattices and extend by zero."""
    sq = SubquotientCoords(model, inner, outer)
    out = TateFn.zero(model, "T")
    for v in outer.vectors():
        if inner.contains_vector(v):
            continue
        rep = sq.line_rep(sq.to_quotient(v))
        out.values[model.index(v)] = g[rep]
    return out


def eps_extend_dual(model: FiniteTateModel, gstar: dict, inner: Subspace, outer: Subspace) -> TateFn:
    """Dual version, supported on the perp shell of the dual space; the
    hyperplane of the quotient seen by a functional is keyed by the
    normalized vector of its induced form."""
    sq = SubquotientCoords(model, inner, outer)
    f = model.field
    inner_perp = perp(inner)
    outer_perp = perp(outer)
    out = TateFn.zero(model, "T*")
    basis_lifts = [
        sq.lift(tuple(1 if k == i else 0 for k in range(sq.dim))) for i in range(sq.dim)
    ]
    for w in inner_perp.vectors():
        if outer_perp.contains_vector(w):
            continue
        induced = tuple(model.pairing(w, lift) for lift in basis_lifts)
        rep = sq.line_rep(induced)
        out.values[model.index(w)] = gstar[rep]
    return out


def is_admissible(model: FiniteTateModel, inner: Subspace, outer: Subspace) -> bool:
    return outer.contains(inner) and model.n(inner) <= -2 and model.n(outer) >= 2


def radon_finite(model: FiniteTateModel, g: dict, inner: Subspace, outer: Subspace) -> dict:
    """The Radon transform on the projective quotient, normalized by
    q^(n(inner)+1); takes zero-sum input on lines to zero-sum output on
    hyperplanes keyed by their normal lines."""
    if not is_admissible(model, inner, outer):
        raise NotAdmissibleError("lattice pair violates the admissibility bounds")
    p, e = model.field.p, model.field.e
    total = PAdicRational.integer(p, 0)
    for v in g.values():
        total = total + v
    if not total.is_zero():
        raise SumNotZeroError("input must sum to zero")
    sq = SubquotientCoords(model, inner, outer)
    reps = sq.quotient_lines()
    k = max([v.exp for v in g.values()] + [0])
    nums = {key: g[key].scaled_numerator(k) for key in g}
    factor = PAdicRational.q_power(p, e, model.n(inner) + 1)
    out = {}
    for hk in reps:
        s = 0
        for jk in reps:
            if model.pairing(hk, jk) == 0:
                s += nums[jk]
        out[hk] = PAdicRational(p, s, k) * factor
    return out


def radon_fourier_commutativity_check(
    model: FiniteTateModel, inner: Subspace, outer: Subspace, trials: int, rng
) -> dict:
    """Exact equality of transform-then-extend against extend-then-transform
    for random zero-sum inputs on the projective quotient."""
    if not is_admissible(model, inner, outer):
        raise NotAdmissibleError("lattice pair violates the admissibility bounds")
    p = model.field.p
    sq = SubquotientCoords(model, inner, outer)
    reps = sq.quotient_lines()
    failures = 0
    for _ in range(trials):
        vals = [rng.randrange(-9, 10) for _ in reps]
        vals[-1] -= sum(vals)
        denom = rng.randrange(3)
        g = {k: PAdicRational(p, v, denom) for k, v in zip(reps, vals)}
        lhs = fourier(eps_extend(model, g, inner, outer))
        rhs = eps_extend_dual(model, radon_finite(model, g, inner, outer), inner, outer)
        if lhs != rhs:
            failures += 1
    return {"trials": trials, "failures": failures}


class TatePair:
    """A divisor pair: a function on the dual space and one on the space."""

    __slots__ = ("f1", "f2")

    def __init__(self, f1: TateFn, f2: TateFn):
        assert f1.side == "T*" and f2.side == "T"
        self.f1 = f1
        self.f2 = f2

    def __add__(self, other: "TatePair") -> "TatePair":
        return TatePair(self.f1 + other.f1, self.f2 + other.f2)

    def __sub__(self, other: "TatePair") -> "TatePair":
        return TatePair(self.f1 - other.f1, self.f2 - other.f2)

    def __neg__(self) -> "TatePair":
        return TatePair(-self.f1, -self.f2)

    def scale(self, c: PAdicRational) -> "TatePair":
        return TatePair(self.f1.scale(c), self.f2.scale(c))

    def __eq__(self, other) -> bool:
        return isinstance(other, TatePair) and self.f1 == other.f1 and self.f2 == other.f2


def is_principal(pair: TatePair) -> bool:
    """The membership criterion for divisors of rational functions: the
    second slot integrates to zero once extended by zero through the origin,
    and the first slot is its Fourier transform away from the origin."""
    if not pair.f2.is_fq_invariant() or not pair.f1.is_fq_invariant():
        raise NotInvariantError("principal test needs scalar-invariant slots")
    f2z = pair.f2.punctured()
    if not integrate(f2z).is_zero():
        return False
    F = fourier(f2z)
    if not F.at_zero().is_zero():
        return False
    return F.equal_punctured(pair.f1)


def schubert_pair(model: FiniteTateModel, W: Subspace) -> TatePair:
    """The divisor pair of the degeneracy locus of a lattice at index zero."""
    if model.n(W) != 0:
        raise WrongIndexError("the lattice must sit at dimension-theory value 0")
    return TatePair(
        TateFn.indicator(model, "T*", perp(W)).punctured(),
        TateFn.indicator(model, "T", W).punctured(),
    )


def _check_chain(model: FiniteTateModel, chain) -> None:
    Wm1, W0, W1 = chain
    if not (W0.contains(Wm1) and W1.contains(W0)):
        raise WrongChainError("chain must be nested")
    if model.n(Wm1) != -1 or model.n(W0) != 0 or model.n(W1) != 1:
        raise WrongChainError("chain must sit at dimension-theory values -1, 0, 1")


def line_bundle_pairs(model: FiniteTateModel, chain):
    """Divisor pairs of the two tautological quotient bundles and of the
    relative determinant, for a chain at indices -1, 0, 1."""
    _check_chain(model, chain)
    Wm1, W0, W1 = chain
    p, e = model.field.p, model.field.e
    qv = PAdicRational.q_power(p, e, 1)
    ind = lambda side, S: TateFn.indicator(model, side, S)
    ell_a = TatePair(
        (ind("T*", perp(W1)).scale(qv) - ind("T*", perp(W0))).punctured(),
        (ind("T", W1) - ind("T", W0)).punctured(),
    )
    ell_b = TatePair(
        (-(ind("T*", perp(Wm1)) - ind("T*", perp(W0)))).punctured(),
        (ind("T", W0) - ind("T", Wm1).scale(qv)).punctured(),
    )
    ell_det = -schubert_pair(model, W0)
    return ell_a, ell_b, ell_det


def picard_relation_check(model: FiniteTateModel, chain) -> bool:
    """Whether the b-bundle differs from the a-bundle by q-1 copies of the
    determinant class, as divisor pairs modulo principal ones."""
    ell_a, ell_b, ell_det = line_bundle_pairs(model, chain)
    qm1 = PAdicRational.integer(model.field.p, model.q - 1)
    return is_principal(ell_b - ell_a - ell_det.scale(qm1))


def gamma_identity_check(model: FiniteTateModel, f: TateFn, chain) -> bool:
    """The two-generator expression of the divisor class of (Four f, f):
    q-1 copies of it match the mass of f against the a-bundle minus the
    value at the origin against the b-bundle, modulo principal pairs."""
    if not f.is_fq_invariant():
        raise NotInvariantError("needs a scalar-invariant function")
    ell_a, ell_b, _ = line_bundle_pairs(model, chain)
    a = integrate(f)
    b = f.at_zero()
    pair = TatePair(fourier(f).punctured(), f.punctured())
    qm1 = PAdicRational.integer(model.field.p, model.q - 1)
    combo = pair.scale(qm1) - ell_a.scale(a) + ell_b.scale(b)
    return is_principal(combo)


def partial_frobenius_pullback(pair: TatePair, direction: str) -> TatePair:
    """Divisor pullback along a partial Frobenius: minus scales the dual
    slot by q, plus scales the space slot by q."""
    qv = PAdicRational.q_power(pair.f2.model.field.p, pair.f2.model.field.e, 1)
    if direction == "minus":
        return TatePair(pair.f1.scale(qv), pair.f2)
    if direction == "plus":
        return TatePair(pair.f1, pair.f2.scale(qv))
    raise ValueError("direction must be 'minus' or 'plus'")


def canonical_generators(model: FiniteTateModel, chain):
    """The three full-function pairs spanning the preimage of the canonical
    Picard subgroup: value slots at the origin included."""
    _check_chain(model, chain)
    Wm1, W0, W1 = chain
    p, e = model.field.p, model.field.e
    qv = PAdicRational.q_power(p, e, 1)
    ind = lambda side, S: TateFn.indicator(model, side, S)
    g1 = (ind("T*", perp(W0)), ind("T", W0))
    g2 = (
        ind("T*", perp(W1)).scale(qv) - ind("T*", perp(W0)),
        ind("T", W1) - ind("T", W0),
    )
    g3 = (
        -(ind("T*", perp(Wm1)) - ind("T*", perp(W0))),
        ind("T", W0) - ind("T", Wm1).scale(qv),
    )
    return g1, g2, g3


def canonical_preimage_check(model: FiniteTateModel, chain) -> bool:
    """Each canonical generator satisfies the full-function membership
    condition: the dual slot is the Fourier transform of the space slot."""
    for f1, f2 in canonical_generators(model, chain):
        if fourier(f2) != f1:
            return False
    return True
