"""Horospherical divisor coefficient calculus on lines and hyperplanes, the
finite Radon transform with its q-power normalization, the principal-divisor
criterion, and the Schubert decomposition checks.

Coefficients live in Z[1/p], kept exact as integer numerator plus a power of
p in the denominator.  Hyperplanes are indexed by their perpendicular lines
so both sides of a divisor share one enumeration of rational lines.
"""

from __future__ import annotations

from .charts import jtype_flag_pullback_probe, schubert_multiplicity_probe
from .errors import DimensionMismatchError, SumNotZeroError
from .gf import Field
from .linalg import (
    Subspace,
    enumerate_grassmannian,
    gauss_binomial,
    induced_map,
    perp,
    rational_lines,
)
from .toysht import (
    FlagPoint,
    ToyPoint,
    enumerate_flags,
    enumerate_toysht,
    partial_frobenius_plus,
)


class PAdicRational:
    """An exact element of Z[1/p]: numerator / p^exponent, with p coprime to
    the numerator in canonical form."""

    __slots__ = ("p", "num", "exp")

    def __init__(self, p: int, num: int, exp: int = 0):
        self.p = p
        if num == 0:
            self.num, self.exp = 0, 0
            return
        while num % p == 0:
            num //= p
            exp -= 1
        self.num = num
        self.exp = exp

    @classmethod
    def integer(cls, p: int, value: int) -> "PAdicRational":
        return cls(p, value, 0)

    @classmethod
    def q_power(cls, p: int, e: int, k: int) -> "PAdicRational":
        """The value q^k for q = p^e."""
        return cls(p, 1, -e * k)

    def __add__(self, other: "PAdicRational") -> "PAdicRational":
        k = max(self.exp, other.exp)
        a = self.num * self.p ** (k - self.exp)
        b = other.num * self.p ** (k - other.exp)
        return PAdicRational(self.p, a + b, k)

    def __sub__(self, other: "PAdicRational") -> "PAdicRational":
        return self + (-other)

    def __neg__(self) -> "PAdicRational":
        return PAdicRational(self.p, -self.num, self.exp)

    def __mul__(self, other: "PAdicRational") -> "PAdicRational":
        return PAdicRational(self.p, self.num * other.num, self.exp + other.exp)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PAdicRational)
            and self.num == other.num
            and self.exp == other.exp
        )

    def __le__(self, other: "PAdicRational") -> bool:
        k = max(self.exp, other.exp)
        return self.num * self.p ** (k - self.exp) <= other.num * self.p ** (
            k - other.exp
        )

    def __lt__(self, other: "PAdicRational") -> bool:
        return self <= other and self != other

    def __hash__(self):
        return hash((self.num, self.exp))

    def is_zero(self) -> bool:
        return self.num == 0

    def scaled_numerator(self, exp: int) -> int:
        """Numerator after rescaling to the given denominator exponent."""
        if exp < self.exp:
            raise ValueError("cannot rescale to a smaller exponent")
        return self.num * self.p ** (exp - self.exp)

    def __repr__(self) -> str:
        if self.exp == 0:
            return f"{self.num}"
        return f"{self.num}/{self.p}^{self.exp}"


def _common_ints(values, p: int):
    """Rescale a list of coefficients to integers over a common p-power."""
    k = max((v.exp for v in values), default=0)
    k = max(k, 0)
    return [v.scaled_numerator(k) for v in values], k


class HoroDivisor:
    """Coefficient data of a horospherical divisor at level n: one Z[1/p]
    value per rational hyperplane (indexed by its perp line) and one per
    rational line."""

    __slots__ = ("field", "N", "n", "lam", "mu")

    def __init__(self, field: Field, N: int, n: int, lam: dict, mu: dict):
        self.field = field
        self.N = N
        self.n = n
        self.lam = dict(lam)
        self.mu = dict(mu)
        expected = gauss_binomial(N, 1, field.q)
        if len(self.lam) != expected or len(self.mu) != expected:
            raise DimensionMismatchError("divisor data must cover every line")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HoroDivisor)
            and self.n == other.n
            and self.lam == other.lam
            and self.mu == other.mu
        )

    def __add__(self, other: "HoroDivisor") -> "HoroDivisor":
        lam = {k: self.lam[k] + other.lam[k] for k in self.lam}
        mu = {k: self.mu[k] + other.mu[k] for k in self.mu}
        return HoroDivisor(self.field, self.N, self.n, lam, mu)

    def __neg__(self) -> "HoroDivisor":
        return HoroDivisor(
            self.field,
            self.N,
            self.n,
            {k: -v for k, v in self.lam.items()},
            {k: -v for k, v in self.mu.items()},
        )

    def le(self, other: "HoroDivisor") -> bool:
        """Pointwise partial order on coefficients."""
        return all(self.lam[k] <= other.lam[k] for k in self.lam) and all(
            self.mu[k] <= other.mu[k] for k in self.mu
        )


_incidence_cache: dict = {}


def line_keys(field: Field, N: int):
    """Canonical keys for the rational lines: their echelon generator rows."""
    keys, _ = _incidence(field, N)
    return list(keys)


def incidence_lists(field: Field, N: int):
    """For each hyperplane key (a perp line) the list of line keys inside it."""
    _, inc = _incidence(field, N)
    return inc


def _incidence(field: Field, N: int):
    tag = (id(field), N)
    if tag not in _incidence_cache:
        keys = [L.basis[0] for L in rational_lines(field, N)]
        inc = {hk: [] for hk in keys}
        through = {jk: [] for jk in keys}
        for hk in keys:
            for jk in keys:
                acc = 0
                for a, b in zip(hk, jk):
                    if a and b:
                        acc = field.add(acc, field.mul(a, b))
                if acc == 0:
                    inc[hk].append(jk)
                    through[jk].append(hk)
        _incidence_cache[tag] = (keys, inc, through)
    return _incidence_cache[tag][:2]


def hyperplanes_through(field: Field, N: int):
    """For each line key the list of hyperplane keys containing it."""
    _incidence(field, N)
    return _incidence_cache[(id(field), N)][2]


def zero_coeffs(field: Field, N: int) -> dict:
    zero = PAdicRational.integer(field.p, 0)
    return {k: zero for k in line_keys(field, N)}


def radon_forward(field: Field, mu: dict, n: int, N: int) -> dict:
    """lambda_H = q^(n-(N-1)) * sum of mu over lines inside H."""
    p, e = field.p, field.e
    total = PAdicRational.integer(p, 0)
    for v in mu.values():
        total = total + v
    if not total.is_zero():
        raise SumNotZeroError("mu must sum to zero")
    keys = list(mu.keys())
    vals, k = _common_ints([mu[j] for j in keys], p)
    byk = dict(zip(keys, vals))
    inc = incidence_lists(field, N)
    factor = PAdicRational.q_power(p, e, n - (N - 1))
    out = {}
    for hk in keys:
        s = sum(byk[jk] for jk in inc[hk])
        out[hk] = PAdicRational(p, s, k) * factor
    return out


def radon_backward(field: Field, lam: dict, n: int, N: int) -> dict:
    """mu_J = q^(1-n) * sum of lambda over hyperplanes through J."""
    p, e = field.p, field.e
    total = PAdicRational.integer(p, 0)
    for v in lam.values():
        total = total + v
    if not total.is_zero():
        raise SumNotZeroError("lambda must sum to zero")
    keys = list(lam.keys())
    vals, k = _common_ints([lam[h] for h in keys], p)
    byk = dict(zip(keys, vals))
    through = hyperplanes_through(field, N)
    factor = PAdicRational.q_power(p, e, 1 - n)
    out = {}
    for jk in keys:
        s = sum(byk[hk] for hk in through[jk])
        out[jk] = PAdicRational(p, s, k) * factor
    return out


def is_principal_pair(d: HoroDivisor) -> bool:
    """Membership test for divisors of rational functions: mu sums to zero
    and lambda is its Radon transform."""
    p = d.field.p
    total = PAdicRational.integer(p, 0)
    for v in d.mu.values():
        total = total + v
    if not total.is_zero():
        return False
    lam = radon_forward(d.field, d.mu, d.n, d.N)
    return lam == d.lam


def schubert_membership(point: ToyPoint, W: Subspace) -> bool:
    """True iff the map L -> V/W drops rank, i.e. L meets W."""
    L = point.L
    n = L.dim
    if W.dim != L.ambient_dim - n:
        raise DimensionMismatchError("W must have codimension dim L")
    return induced_map(L, W).rank() < n


def schubert_decomposition_check(
    field: Field, N: int, n: int, W: Subspace, rng=None, probe_repeats: int = 5
) -> dict:
    """Set-level equality of the Schubert locus with the union of
    horospherical pieces for W, the codimension-two bound on the deeper
    degeneracy locus, and sampled multiplicity-one probes.
    """
    hyperplanes = [
        H
        for H in enumerate_grassmannian(field, N, N - 1, subfield_only=True)
        if H.contains(W)
    ]
    lines = [
        J
        for J in enumerate_grassmannian(field, N, 1, subfield_only=True)
        if W.contains(J)
    ]
    planes2 = None
    hyper2 = None
    report = {
        "points": 0,
        "counterexamples": [],
        "codim2_failures": [],
        "probes": {},
        "vacuous": True,
    }
    for pt in enumerate_toysht(field, N, n, nontrivial_only=True):
        report["vacuous"] = False
        report["points"] += 1
        member = schubert_membership(pt, W)
        horo = any(H.contains(pt.L) for H in hyperplanes) or any(
            pt.L.contains(J) for J in lines
        )
        if member != horo:
            report["counterexamples"].append(pt.L.basis)
        deficit = n - induced_map(pt.L, W).rank()
        if deficit >= 2:
            if planes2 is None:
                planes2 = [
                    P
                    for P in enumerate_grassmannian(field, N, 2, subfield_only=True)
                    if W.contains(P)
                ]
                hyper2 = [
                    H
                    for H in enumerate_grassmannian(field, N, N - 2, subfield_only=True)
                    if H.contains(W)
                ]
            deep = any(pt.L.contains(P) for P in planes2) or any(
                H.contains(pt.L) for H in hyper2
            )
            if not deep:
                report["codim2_failures"].append(pt.L.basis)
    if rng is not None and not report["vacuous"]:
        report["probes"] = _sampled_multiplicity_probes(
            field, N, n, W, hyperplanes, lines, rng, probe_repeats
        )
    return report


def _component_points(field, N, n, component, others):
    """Nontrivial toy points on one horospherical component and off the rest."""
    kind, sub = component
    pts = []
    for pt in enumerate_toysht(field, N, n, nontrivial_only=True):
        if kind == "H" and not sub.contains(pt.L):
            continue
        if kind == "J" and not pt.L.contains(sub):
            continue
        clean = True
        for okind, osub in others:
            if (okind, osub) == (kind, sub):
                continue
            if okind == "H" and osub.contains(pt.L):
                clean = False
                break
            if okind == "J" and pt.L.contains(osub):
                clean = False
                break
        if clean:
            pts.append(pt.L)
    return pts


def _sampled_multiplicity_probes(field, N, n, W, hyperplanes, lines, rng, repeats):
    """Probe every component of the Schubert divisor that carries points
    clean of the other components."""
    components = [("H", H) for H in hyperplanes if n < N - 1]
    components += [("J", J) for J in lines if n > 1]
    out = {}
    for component in components:
        kind, sub = component
        pts = _component_points(field, N, n, component, components)
        if not pts:
            continue
        orders = []
        for _ in range(repeats):
            L0 = pts[rng.randrange(len(pts))]
            orders.append(
                schubert_multiplicity_probe(field, N, n, W, L0, component, rng)
            )
        out[(kind, sub.basis)] = orders
    return out


def partial_frobenius_divisor_pullback_check(
    field: Field, N: int, n: int, divisor_type: str, rng=None, probe_repeats: int = 5
) -> dict:
    """Set-level identification of the preimage of a horospherical component
    under the plus partial Frobenius, with sampled multiplicity probes
    through the Frobenius factorization.

    divisor_type "H" compares the preimage of the hyperplane component one
    level up with the same component on flags; "J" compares the line
    component against the shift by one.  The H case is probed on the dual
    model, where perpendicularity turns it into a J case.
    """
    report = {"flags": 0, "set_failures": [], "probes": {}, "mode": "exhaustive"}
    flags = list(enumerate_flags(field, N, n, "right"))
    if divisor_type == "H":
        markers = enumerate_grassmannian(field, N, N - 1, subfield_only=True)
    else:
        markers = enumerate_grassmannian(field, N, 1, subfield_only=True)
    markers = list(markers)
    for f in flags:
        report["flags"] += 1
        image = partial_frobenius_plus(f)
        for mk in markers:
            if divisor_type == "H":
                upstairs = mk.contains(image.big) and mk.contains(image.small)
                downstairs = mk.contains(f.big) and mk.contains(f.small)
            else:
                upstairs = image.small.contains(mk) and image.big.contains(mk)
                downstairs = f.small.contains(mk) and f.big.contains(mk)
            if upstairs != downstairs:
                report["set_failures"].append(
                    (f.small.basis, f.big.basis, mk.basis)
                )
    if rng is not None and 1 <= n <= N - 2:
        report["mode"] = "probabilistic"
        if divisor_type == "J":
            for mk in markers:
                comp = [f for f in flags if f.small.contains(mk) and f.big.contains(mk)]
                if not comp:
                    continue
                orders = []
                for _ in range(probe_repeats):
                    fl = comp[rng.randrange(len(comp))]
                    orders.append(jtype_flag_pullback_probe(field, N, n, mk, fl, rng))
                report["probes"][("J", mk.basis)] = orders
        else:
            # dual model: the hyperplane component of right flags becomes the
            # line component of right flags at the mirrored level
            for mk in markers:
                dual_line = perp(mk)
                comp = [
                    FlagPoint(perp(f.big), perp(f.small), "right")
                    for f in flags
                    if mk.contains(f.big)
                ]
                if not comp:
                    continue
                for f in comp:
                    f.validate()
                orders = []
                for _ in range(probe_repeats):
                    fl = comp[rng.randrange(len(comp))]
                    orders.append(
                        jtype_flag_pullback_probe(field, N, N - n - 1, dual_line, fl, rng)
                    )
                report["probes"][("H-dual", mk.basis)] = orders
    return report
