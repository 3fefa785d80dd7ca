"""Toy shtukas over F_{q^m}: the defining rank-at-most-one predicate, the
trivial/nontrivial dichotomy, left/right flags, partial Frobeniuses, and
membership in horospherical loci.

A point is a subspace L of F_{q^m}^N whose intersection with its coordinate
Frobenius twist sigma(L) has codimension at most one in L.  Nontrivial points
(sigma(L) != L) carry a canonical flag structure: L cap sigma(L) below and
L + sigma(L) above.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import InvalidFlagError, NotAToyShtukaError, TrivialPointError
from .gf import Field
from .linalg import (
    QuotientMap,
    Subspace,
    echelonize,
    enumerate_grassmannian,
    intersect,
    rational_hyperplanes,
    rational_lines,
    span_sum,
)


@dataclass(frozen=True)
class ToyPoint:
    """A toy shtuka point with its cached Frobenius twist."""

    L: Subspace
    sigma_L: Subspace = dc_field(compare=False, default=None)

    def __post_init__(self):
        if self.sigma_L is None:
            object.__setattr__(self, "sigma_L", self.L.frobenius_image())


def sigma(L: Subspace) -> Subspace:
    return L.frobenius_image()


def is_toy_shtuka(L: Subspace) -> bool:
    """True iff dim(L cap sigma L) >= dim L - 1."""
    if L.dim <= 1 or L.dim >= L.ambient_dim:
        return True
    sL = L.frobenius_image()
    return intersect(L, sL).dim >= L.dim - 1


def is_trivial(L: Subspace) -> bool:
    """True iff sigma L = L, i.e. L is defined over F_q."""
    return L.is_rational()


def enumerate_toysht(field: Field, N: int, n: int, nontrivial_only: bool = False, budget=None):
    """Stream the toy shtuka points of dimension n over F_{q^m}."""
    kwargs = {} if budget is None else {"budget": budget}
    for L in enumerate_grassmannian(field, N, n, **kwargs):
        if nontrivial_only and L.is_rational():
            continue
        if is_toy_shtuka(L):
            yield ToyPoint(L)


def split_nontrivial(point: ToyPoint):
    """The canonical flag (L cap sigma L, L + sigma L) of a nontrivial point."""
    L, sL = point.L, point.sigma_L
    if sL == L:
        raise TrivialPointError("point is Frobenius-fixed")
    if not is_toy_shtuka(L):
        raise NotAToyShtukaError("rank condition fails")
    inter = intersect(L, sL)
    total = span_sum(L, sL)
    return inter, total


@dataclass(frozen=True)
class FlagPoint:
    """A nested pair of subspaces with a one-step dimension gap.

    For kind "right" the pair is (L, L') with L, sigma(L) both inside L'.
    For kind "left" it is (L', L) with L' inside both L and sigma(L).
    """

    small: Subspace
    big: Subspace
    kind: str

    def validate(self) -> None:
        if self.kind not in ("left", "right"):
            raise InvalidFlagError(f"unknown kind {self.kind!r}")
        if self.big.dim != self.small.dim + 1:
            raise InvalidFlagError("dimension gap must be exactly one")
        if not self.big.contains(self.small):
            raise InvalidFlagError("small is not contained in big")
        if self.kind == "right":
            if not self.big.contains(self.small.frobenius_image()):
                raise InvalidFlagError("sigma(small) escapes big")
        else:
            if not self.big.frobenius_image().contains(self.small):
                raise InvalidFlagError("small escapes sigma(big)")

    def frobenius_image(self) -> "FlagPoint":
        return FlagPoint(
            self.small.frobenius_image(), self.big.frobenius_image(), self.kind
        )


def partial_frobenius_plus(f: FlagPoint) -> FlagPoint:
    """Right (L, L') to left (sigma L, L')."""
    if f.kind != "right":
        raise InvalidFlagError("expects a right flag")
    out = FlagPoint(f.small.frobenius_image(), f.big, "left")
    out.validate()
    return out


def partial_frobenius_minus(f: FlagPoint) -> FlagPoint:
    """Left (L', L) to right (L', sigma L)."""
    if f.kind != "left":
        raise InvalidFlagError("expects a left flag")
    out = FlagPoint(f.small, f.big.frobenius_image(), "right")
    out.validate()
    return out


def superspaces_one_more(L: Subspace):
    """All subspaces of dimension dim L + 1 containing L."""
    qm = QuotientMap(L)
    for line in enumerate_grassmannian(L.field, qm.dim, 1):
        gen = qm.lift(line.basis[0])
        yield span_sum(L, echelonize(L.field, [gen], L.ambient_dim))


def subspaces_one_less(L: Subspace):
    """All hyperplanes of L, via coordinates in a basis of L."""
    f = L.field
    k = L.dim
    for H in enumerate_grassmannian(f, k, k - 1):
        rows = []
        for coeffs in H.basis:
            v = [0] * L.ambient_dim
            for c, brow in zip(coeffs, L.basis):
                if c:
                    for j in range(L.ambient_dim):
                        v[j] = f.add(v[j], f.mul(c, brow[j]))
            rows.append(tuple(v))
        yield echelonize(f, rows, L.ambient_dim)


def enumerate_flags(field: Field, N: int, n: int, kind: str):
    """Stream all flags of the given kind at level n.

    Right flags at level n pair an n-dimensional toy point with an
    (n+1)-dimensional cover; left flags at level n pair an (n-1)-dimensional
    base with an n-dimensional toy point.  Over a nontrivial point the
    partner is forced; over a trivial one it ranges over a projective fiber.
    """
    if kind == "right":
        for pt in enumerate_toysht(field, N, n):
            if is_trivial(pt.L):
                for big in superspaces_one_more(pt.L):
                    yield FlagPoint(pt.L, big, "right")
            else:
                _, total = split_nontrivial(pt)
                yield FlagPoint(pt.L, total, "right")
    elif kind == "left":
        for pt in enumerate_toysht(field, N, n):
            if is_trivial(pt.L):
                for small in subspaces_one_less(pt.L):
                    yield FlagPoint(small, pt.L, "left")
            else:
                inter, _ = split_nontrivial(pt)
                yield FlagPoint(inter, pt.L, "left")
    else:
        raise InvalidFlagError(f"unknown kind {kind!r}")


def dichotomy_check(point: ToyPoint, W: Subspace):
    """For rational W, at least one of L cap W and im(L -> V/W) is
    Frobenius-fixed.  Returns both flags and asserts the disjunction."""
    L, sL = point.L, point.sigma_L
    if not is_toy_shtuka(L):
        raise NotAToyShtukaError("rank condition fails")
    if not W.is_rational():
        raise ValueError("W must be F_q-rational")
    Lp = intersect(L, W)
    sub_fixed = Lp.frobenius_image() == Lp
    qm = QuotientMap(W)
    Lpp = qm.image_subspace(L)
    quot_fixed = Lpp.frobenius_image() == Lpp
    assert sub_fixed or quot_fixed, "dichotomy violated"
    return {"sub_fixed": sub_fixed, "quot_fixed": quot_fixed}


def horospherical_membership(point: ToyPoint, hyperplanes=None, lines=None):
    """Rational hyperplanes containing L and rational lines contained in L."""
    L = point.L
    f, N = L.field, L.ambient_dim
    if hyperplanes is None:
        hyperplanes = rational_hyperplanes(f, N)
    if lines is None:
        lines = rational_lines(f, N)
    H_set = set(H for H in hyperplanes if H.contains(L))
    J_set = set(J for J in lines if L.contains(J))
    return H_set, J_set


def in_deep_interior(point: ToyPoint, hyperplanes=None, lines=None) -> bool:
    """True iff the point avoids every horospherical locus."""
    H_set, J_set = horospherical_membership(point, hyperplanes, lines)
    return not H_set and not J_set
