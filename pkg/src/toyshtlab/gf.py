"""Exact arithmetic in the tower F_p < F_q < F_{q^m}, with the q-power Frobenius.

A field element is an integer in ``range(p**(e*m))`` whose base-p digits are
the coefficients of a residue polynomial modulo a fixed monic irreducible
polynomial of degree e*m over F_p.  The modulus and a multiplicative
generator are found by a seeded deterministic search, so encodings are
reproducible run to run.  Multiplication, inversion and the relative
Frobenius x -> x^q go through precomputed exp/log tables.
"""

from __future__ import annotations

from .errors import BudgetExceededError, NonPrimeError, ReducibleModulusError

DEFAULT_BUDGET = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# Polynomials over F_p are coefficient tuples, index = degree, no trailing zeros.


def _ptrim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pmulmod(a, b, mod, p):
    deg = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce modulo the monic modulus
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(deg):
                out[i - deg + j] = (out[i - deg + j] - c * mod[j]) % p
    return _ptrim(out[:deg] if len(out) > deg else out)


def _ppowmod(a, k, mod, p):
    result = (1,)
    base = a
    while k:
        if k & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        k >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b != [] and b != [0]:
        # a mod b with b made monic on the fly
        blead = b[-1]
        binv = pow(blead, p - 2, p)
        bd = len(b) - 1
        r = a[:]
        while len(r) - 1 >= bd and r:
            c = (r[-1] * binv) % p
            shift = len(r) - 1 - bd
            for j in range(len(b)):
                r[shift + j] = (r[shift + j] - c * b[j]) % p
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    return _ptrim(a)


def _is_irreducible(f, p) -> bool:
    d = len(f) - 1
    if d < 1:
        return False
    x = _pmulmod((0, 1), (1,), f, p)  # X reduced mod f
    # x^(p^d) == x mod f, and x^(p^(d/l)) - x coprime to f for prime l | d
    xp = _ppowmod(x, p**d, f, p)
    if xp != x:
        return False
    for ell in _prime_factors(d):
        xe = _ppowmod(x, p ** (d // ell), f, p)
        diff = list(xe) + [0] * max(0, len(x) - len(xe))
        for i, xi in enumerate(x):
            if i < len(diff):
                diff[i] = (diff[i] - xi) % p
        g = _pgcd(f, _ptrim(diff), p)
        if len(g) - 1 >= 1:
            return False
    return True


class Field:
    """The field F_{q^m} with q = p^e, presented over its subfield F_q.

    Immutable after construction; safe to share between workers.
    """

    def __init__(self, p: int, e: int, m: int, seed: int = 0, budget: int = DEFAULT_BUDGET):
        if not is_prime(p):
            raise NonPrimeError(f"p={p} is not prime")
        if e < 1 or m < 1:
            raise ValueError("extension degrees must be >= 1")
        order = p ** (e * m)
        if order > budget:
            raise BudgetExceededError(f"field order {order} exceeds budget {budget}")
        self.p = p
        self.e = e
        self.m = m
        self.q = p**e
        self.order = order
        self.degree = e * m
        self.seed = seed
        self.modulus = self._find_modulus(seed)
        self._init_tables()
        self.subfield = tuple(x for x in range(order) if self._frob[x] == x)
        assert len(self.subfield) == self.q, "Frobenius fixed field has wrong size"

    def _find_modulus(self, seed: int) -> tuple[int, ...]:
        p, d = self.p, self.degree
        total = p**d
        for k in range(total):
            enc = (seed + k) % total
            coeffs = []
            t = enc
            for _ in range(d):
                coeffs.append(t % p)
                t //= p
            f = tuple(coeffs) + (1,)
            if _is_irreducible(f, p):
                return f
        raise ReducibleModulusError(f"no irreducible polynomial of degree {d} over F_{p}")

    def _init_tables(self) -> None:
        p, order = self.p, self.order
        mod = self.modulus

        def raw_mul(a: int, b: int) -> int:
            pa, pb = self._int_to_poly(a), self._int_to_poly(b)
            return self._poly_to_int(_pmulmod(pa, pb, mod, p))

        # find a multiplicative generator, seed-rotated deterministic order
        n1 = order - 1
        factors = _prime_factors(n1) if n1 > 1 else []
        gen = 1
        for k in range(1, order):
            g = 1 + (self.seed + k - 1) % n1 if n1 > 0 else 1
            ok = True
            for ell in factors:
                t = 1
                kk = n1 // ell
                base = g
                while kk:
                    if kk & 1:
                        t = raw_mul(t, base)
                    base = raw_mul(base, base)
                    kk >>= 1
                if t == 1:
                    ok = False
                    break
            if ok:
                gen = g
                break
        self.generator = gen

        exp = [1] * (2 * max(n1, 1))
        log = [0] * order
        v = 1
        for i in range(n1):
            exp[i] = v
            log[v] = i
            v = raw_mul(v, gen)
        for i in range(n1, len(exp)):
            exp[i] = exp[i - n1] if n1 else 1
        self._exp = exp
        self._log = log

        # q-power Frobenius on every element
        frob = [0] * order
        for x in range(1, order):
            frob[x] = exp[(log[x] * self.q) % n1] if n1 else x
        self._frob = frob

        self._addtab = None
        if p == 2:
            pass  # xor fast path, no table needed
        elif order <= 1024:
            self._addtab = [
                [self._digit_add(a, b) for b in range(order)] for a in range(order)
            ]

    def _int_to_poly(self, x: int) -> tuple[int, ...]:
        p = self.p
        c = []
        while x:
            c.append(x % p)
            x //= p
        return tuple(c)

    def _poly_to_int(self, c) -> int:
        p = self.p
        out = 0
        for d in reversed(c):
            out = out * p + d
        return out

    def coeffs(self, x: int) -> tuple[int, ...]:
        """Coefficient vector of x over F_p, padded to the full degree."""
        c = list(self._int_to_poly(x))
        return tuple(c + [0] * (self.degree - len(c)))

    def _digit_add(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    # arithmetic

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._addtab is not None:
            return self._addtab[a][b]
        return self._digit_add(a, b)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p = self.p
        out = 0
        mult = 1
        while a:
            out += ((p - a % p) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        n1 = self.order - 1
        return self._exp[(n1 - self._log[a]) % n1]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k > 0 else 1
        n1 = self.order - 1
        return self._exp[(self._log[a] * k) % n1]

    def frobenius(self, x: int) -> int:
        """The relative Frobenius x -> x^q."""
        return self._frob[x]

    def elements(self) -> range:
        return range(self.order)

    def subfield_elements(self) -> tuple[int, ...]:
        """Elements of F_q, i.e. the fixed points of the Frobenius."""
        return self.subfield

    def in_subfield(self, x: int) -> bool:
        return self._frob[x] == x

    def __repr__(self) -> str:
        return f"Field(p={self.p}, e={self.e}, m={self.m})"


def field_make(p: int, e: int, m: int, seed: int = 0, budget: int = DEFAULT_BUDGET) -> Field:
    """Construct F_{q^m} with q = p^e, rejecting orders beyond the budget."""
    return Field(p, e, m, seed=seed, budget=budget)
