import random

import pytest

from toyshtlab.divisors import PAdicRational, line_keys, radon_forward
from toyshtlab.errors import (
    LatticeNotNestedError,
    NotAdmissibleError,
    NotInvariantError,
    SumNotZeroError,
    WrongChainError,
    WrongIndexError,
)
from toyshtlab.gf import field_make
from toyshtlab.linalg import perp
from toyshtlab.tate import (
    FiniteTateModel,
    SubquotientCoords,
    TateFn,
    TatePair,
    canonical_generators,
    canonical_preimage_check,
    eps_extend,
    eps_extend_dual,
    fourier,
    fourier_inverse_check,
    gamma_identity_check,
    integrate,
    is_admissible,
    is_principal,
    line_bundle_pairs,
    partial_frobenius_pullback,
    picard_relation_check,
    radon_finite,
    radon_fourier_commutativity_check,
    schubert_pair,
)

F2 = field_make(2, 1, 1)
F3 = field_make(3, 1, 1)


def model_q2(D=4, c=-2):
    return FiniteTateModel(F2, D, c)


def standard(model, dim):
    rows = [tuple(1 if k == i else 0 for k in range(model.D)) for i in range(dim)]
    return model.subspace(rows)


def chain_for(model):
    return tuple(standard(model, i - model.c) for i in (-1, 0, 1))


def test_dimension_theory_and_duality_offsets():
    m = model_q2()
    rng = random.Random(2)
    for _ in range(1000):
        d1, d2 = rng.randrange(5), rng.randrange(5)
        L1, L2 = standard(m, d1), standard(m, d2)
        assert m.n(L2) - m.n(L1) == L2.dim - L1.dim
    for d in range(5):
        L = standard(m, d)
        assert m.n_star(perp(L)) == -m.n(L)


def test_measure_and_integrate():
    # D=2, c=-1: the punctured space has mass 3/2
    m = FiniteTateModel(F2, 2, -1)
    full = standard(m, 2)
    f = TateFn.indicator(m, "T", full).punctured()
    assert integrate(f) == PAdicRational(2, 3, 1)
    assert integrate(TateFn.indicator(m, "T", full)) == PAdicRational.q_power(2, 1, 1)
    L = standard(m, 1)
    assert integrate(TateFn.indicator(m, "T", L)) == PAdicRational.q_power(2, 1, 0)


def test_model_requires_base_field():
    with pytest.raises(ValueError):
        FiniteTateModel(field_make(2, 1, 2), 3, -1)


def test_fourier_indicator_displays():
    # the four displayed transform facts, q = 2 and q = 3
    for field in (F2, F3):
        m = FiniteTateModel(field, 4, -2)
        Wm1, W0, W1 = chain_for(m)
        p, e = field.p, field.e
        qv = PAdicRational.q_power(p, e, 1)
        ind = lambda side, S: TateFn.indicator(m, side, S)
        # transform of a lattice indicator scales by its measure
        assert fourier(ind("T", W0)) == ind("T*", perp(W0))
        assert fourier(ind("T", W1)) == ind("T*", perp(W1)).scale(qv)
        # shell between consecutive lattices
        assert fourier(ind("T", W1) - ind("T", W0)) == ind("T*", perp(W1)).scale(
            qv
        ) - ind("T*", perp(W0))
        # reversed shell with the q-weight inside
        lhs = fourier(ind("T", W0) - ind("T", Wm1).scale(qv))
        rhs = -(ind("T*", perp(Wm1)) - ind("T*", perp(W0)))
        assert lhs == rhs


def _character_sum_fourier(model, f, k):
    """Independent oracle: the literal character sum over Z[zeta_p], for a
    prime field F_p and the character x -> zeta^(k x).  Returns a list of
    (bucket sums) per dual vector; the zeta-parts must cancel for invariant
    input, leaving the rational value."""
    p = model.q
    assert model.field.e == 1
    exps = [v.exp for v in f.values]
    m_exp = max(exps + [0])
    nums = [v.scaled_numerator(m_exp) for v in f.values]
    out = []
    for w in model.vectors():
        buckets = [0] * p
        for v, nv in zip(model.vectors(), nums):
            if nv:
                buckets[model.field.mul(k, model.pairing(w, v))] += nv
        # sum_j buckets[j] zeta^j with 1 + zeta + ... + zeta^(p-1) = 0:
        # subtract the top bucket from every coefficient
        coeffs = [b - buckets[p - 1] for b in buckets[: p - 1]]
        assert all(c == 0 for c in coeffs[1:]), "zeta-part failed to cancel"
        out.append(PAdicRational(model.field.p, coeffs[0], m_exp))
    pm = PAdicRational.q_power(model.field.p, model.field.e, model.offset(f.side))
    return [pm * v for v in out]


@pytest.mark.parametrize("field,D", [(F2, 3), (F3, 3)])
def test_fourier_matches_character_sum_oracle(field, D):
    # the orbit-collapsed transform equals the direct character sum for
    # every nontrivial character, which also checks character independence
    model = FiniteTateModel(field, D, -1)
    rng = random.Random(field.p * 100 + D)
    for _ in range(10):
        f = TateFn.zero(model, "T")
        f.values[0] = PAdicRational(field.p, rng.randrange(-5, 6), 0)
        for rep in model.lines():
            v = PAdicRational(field.p, rng.randrange(-5, 6), rng.randrange(2))
            for c in field.elements():
                if c == 0:
                    continue
                w = tuple(field.mul(c, x) for x in rep)
                f.values[model.index(w)] = v
        got = fourier(f)
        for k in range(1, field.p):
            assert got.values == _character_sum_fourier(model, f, k)


def test_fourier_linearity():
    m = FiniteTateModel(F3, 3, -1)
    rng = random.Random(8)

    def rand_invariant():
        f = TateFn.zero(m, "T")
        f.values[0] = PAdicRational(3, rng.randrange(-5, 6), 0)
        for rep in m.lines():
            v = PAdicRational(3, rng.randrange(-5, 6), rng.randrange(2))
            for c in (1, 2):
                w = tuple(F3.mul(c, x) for x in rep)
                f.values[m.index(w)] = v
        return f

    for _ in range(20):
        f, g = rand_invariant(), rand_invariant()
        a = PAdicRational(3, rng.randrange(-4, 5), rng.randrange(2))
        assert fourier(f.scale(a) + g) == fourier(f).scale(a) + fourier(g)
        assert fourier_inverse_check(f)


def test_fourier_requires_invariance():
    m = FiniteTateModel(F3, 2, -1)
    f = TateFn.zero(m, "T")
    f.values[m.index((1, 0))] = PAdicRational.integer(3, 1)
    with pytest.raises(NotInvariantError):
        fourier(f)


def test_eps_extend_support_and_values():
    m = model_q2(5, -2)
    inner, outer = standard(m, 1), standard(m, 4)
    sq = SubquotientCoords(m, inner, outer)
    reps = sq.quotient_lines()
    one = PAdicRational.integer(2, 1)
    g = {rep: one for rep in reps}
    f = eps_extend(m, g, inner, outer)
    for v in m.vectors():
        val = f.value(v)
        in_shell = outer.contains_vector(v) and not inner.contains_vector(v)
        assert val == (one if in_shell else PAdicRational.integer(2, 0))
    zero_g = {rep: PAdicRational.integer(2, 0) for rep in reps}
    assert eps_extend(m, zero_g, inner, outer) == TateFn.zero(m, "T")
    with pytest.raises(LatticeNotNestedError):
        eps_extend(m, g, outer, inner)


def test_eps_extend_dual_support():
    m = model_q2(5, -2)
    inner, outer = standard(m, 1), standard(m, 4)
    sq = SubquotientCoords(m, inner, outer)
    one = PAdicRational.integer(2, 1)
    g = {rep: one for rep in sq.quotient_lines()}
    f = eps_extend_dual(m, g, inner, outer)
    ip, op = perp(inner), perp(outer)
    for w in m.vectors():
        in_shell = ip.contains_vector(w) and not op.contains_vector(w)
        assert (not f.value(w).is_zero()) == in_shell


def test_radon_finite_delta_difference():
    # q=2, n(inner) = -2: the normalization contributes a bare 1/2
    # (admissibility forces the quotient to have dimension at least four)
    m = model_q2(5, -2)
    inner, outer = standard(m, 0), standard(m, 4)
    assert is_admissible(m, inner, outer)
    sq = SubquotientCoords(m, inner, outer)
    reps = sq.quotient_lines()
    g = {rep: PAdicRational.integer(2, 0) for rep in reps}
    g[reps[0]] = PAdicRational.integer(2, 1)
    g[reps[1]] = PAdicRational.integer(2, -1)
    R = radon_finite(m, g, inner, outer)
    half = PAdicRational(2, 1, 1)
    seen = {(v.num, v.exp) for v in R.values()}
    assert seen == {(0, 0), (1, 1), (-1, 1)}
    assert any(v == half for v in R.values())


def test_radon_finite_matches_projective_radon():
    # with inner = 0 and outer = everything the quotient is the ambient
    # space and the lattice normalization reduces to the q-power one
    m = model_q2(4, -2)
    inner, outer = standard(m, 0), standard(m, 4)
    keys = line_keys(F2, 4)
    g = {k: PAdicRational.integer(2, 0) for k in keys}
    g[keys[0]] = PAdicRational.integer(2, 3)
    g[keys[2]] = PAdicRational.integer(2, -3)
    R1 = radon_finite(m, g, inner, outer)
    R2 = radon_forward(F2, g, m.n(outer), 4)
    assert R1 == R2


def test_radon_finite_guards():
    m = model_q2(4, -2)
    inner, outer = standard(m, 0), standard(m, 4)
    sq = SubquotientCoords(m, inner, outer)
    reps = sq.quotient_lines()
    bad = {rep: PAdicRational.integer(2, 1) for rep in reps}
    with pytest.raises(SumNotZeroError):
        radon_finite(m, bad, inner, outer)
    shallow = FiniteTateModel(F2, 4, 0)
    with pytest.raises(NotAdmissibleError):
        radon_finite(
            shallow,
            {rep: PAdicRational.integer(2, 0) for rep in reps},
            standard(shallow, 0),
            standard(shallow, 4),
        )


@pytest.mark.parametrize(
    "field,D,c,din,dout",
    [(F2, 5, -2, 0, 5), (F2, 6, -3, 1, 5), (F2, 6, -3, 1, 6), (F3, 4, -2, 0, 4)],
)
def test_radon_fourier_square(field, D, c, din, dout):
    m = FiniteTateModel(field, D, c)
    inner, outer = standard(m, din), standard(m, dout)
    rep = radon_fourier_commutativity_check(m, inner, outer, 30, random.Random(5))
    assert rep["failures"] == 0


def test_radon_fourier_square_needs_admissible_pair():
    m = model_q2(4, 0)
    with pytest.raises(NotAdmissibleError):
        radon_fourier_commutativity_check(m, standard(m, 0), standard(m, 4), 1, random.Random(0))


def test_is_principal_examples():
    m = model_q2()
    zero_pair = TatePair(TateFn.zero(m, "T*"), TateFn.zero(m, "T"))
    assert is_principal(zero_pair)
    _, W0, W1 = chain_for(m)
    # zero-integral invariant function: difference of two punctured lines
    J1 = m.subspace([(1, 0, 0, 0)])
    J2 = m.subspace([(0, 1, 0, 0)])
    f2 = (TateFn.indicator(m, "T", J1) - TateFn.indicator(m, "T", J2)).punctured()
    assert integrate(f2).is_zero()
    pair = TatePair(fourier(f2).punctured(), f2)
    assert is_principal(pair)
    sp = schubert_pair(m, W0)
    assert not is_principal(sp)


def test_schubert_pair_supports_and_index_guard():
    m = model_q2()
    _, W0, _ = chain_for(m)
    sp = schubert_pair(m, W0)
    assert sp.f1.at_zero().is_zero() and sp.f2.at_zero().is_zero()
    for v in m.vectors():
        if any(v):
            assert (not sp.f2.value(v).is_zero()) == W0.contains_vector(v)
    with pytest.raises(WrongIndexError):
        schubert_pair(m, standard(m, 1))


def test_schubert_pair_dual_symmetry():
    # in the dual model the degeneracy pair of the perp lattice is the
    # original pair with its two slots swapped
    m = model_q2()
    W0 = standard(m, 2)
    dual = FiniteTateModel(F2, m.D, m.c_star)
    assert dual.n(perp(W0)) == 0
    sp = schubert_pair(m, W0)
    sp_dual = schubert_pair(dual, perp(W0))
    assert sp_dual.f1.values == sp.f2.values
    assert sp_dual.f2.values == sp.f1.values


def test_schubert_pair_differences_principal():
    m = model_q2()
    W0a = standard(m, 2)
    W0b = m.subspace([(0, 1, 0, 0), (0, 0, 1, 0)])
    W0c = m.subspace([(1, 1, 0, 0), (0, 0, 1, 1)])
    pairs = [schubert_pair(m, W) for W in (W0a, W0b, W0c)]
    for i in range(3):
        for j in range(3):
            assert is_principal(pairs[i] - pairs[j])


def test_line_bundle_pair_masses():
    m = model_q2()
    chain = chain_for(m)
    ell_a, ell_b, ell_det = line_bundle_pairs(m, chain)
    q = m.q
    # total-mass and origin slots of the two shell functions
    full_a = TateFn.indicator(m, "T", chain[2]) - TateFn.indicator(m, "T", chain[1])
    assert integrate(full_a) == PAdicRational.integer(2, q - 1)
    assert full_a.at_zero().is_zero()
    assert ell_a.f2 == full_a.punctured()
    full_b = TateFn.indicator(m, "T", chain[1]) - TateFn.indicator(
        m, "T", chain[0]
    ).scale(PAdicRational.q_power(2, 1, 1))
    assert integrate(full_b).is_zero()
    assert full_b.at_zero() == PAdicRational.integer(2, -(q - 1))
    assert ell_b.f2 == full_b.punctured()
    assert ell_det.f2 == -schubert_pair(m, chain[1]).f2
    with pytest.raises(WrongChainError):
        line_bundle_pairs(m, (chain[1], chain[0], chain[2]))


@pytest.mark.parametrize("field,D", [(F2, 4), (F3, 4), (F2, 6)])
def test_picard_relation(field, D):
    m = FiniteTateModel(field, D, -2)
    assert picard_relation_check(m, chain_for(m))


def test_gamma_identity_pinned_and_random():
    for field in (F2, F3):
        m = FiniteTateModel(field, 4, -2)
        chain = chain_for(m)
        Wm1, W0, W1 = chain
        shell = TateFn.indicator(m, "T", W1) - TateFn.indicator(m, "T", W0)
        assert gamma_identity_check(m, shell, chain)
        assert gamma_identity_check(m, TateFn.indicator(m, "T", W0), chain)
        rng = random.Random(77)
        for _ in range(10):
            f = TateFn.zero(m, "T")
            f.values[0] = PAdicRational(field.p, rng.randrange(-5, 6), 0)
            for rep in m.lines():
                v = PAdicRational(field.p, rng.randrange(-5, 6), rng.randrange(2))
                for c in field.elements():
                    if c == 0:
                        continue
                    w = tuple(field.mul(c, x) for x in rep)
                    f.values[m.index(w)] = v
            assert gamma_identity_check(m, f, chain)


def test_gamma_identity_requires_invariance():
    m = model_q2()
    f = TateFn.zero(m, "T")
    f.values[m.index((1, 0, 0, 0))] = PAdicRational.integer(2, 1)
    f.values[m.index((0, 1, 0, 0))] = PAdicRational.integer(2, -1)
    fr = FiniteTateModel(F3, 2, -1)
    g = TateFn.zero(fr, "T")
    g.values[fr.index((1, 0))] = PAdicRational.integer(3, 1)
    with pytest.raises(NotInvariantError):
        gamma_identity_check(fr, g, None)


def test_partial_frobenius_pullback_composition():
    m = model_q2()
    sp = schubert_pair(m, standard(m, 2))
    qv = PAdicRational.q_power(2, 1, 1)
    both = partial_frobenius_pullback(partial_frobenius_pullback(sp, "minus"), "plus")
    assert both == sp.scale(qv)
    assert partial_frobenius_pullback(sp, "minus").f1 == sp.f1.scale(qv)
    assert partial_frobenius_pullback(sp, "plus").f2 == sp.f2.scale(qv)
    zero_pair = TatePair(TateFn.zero(m, "T*"), TateFn.zero(m, "T"))
    assert partial_frobenius_pullback(zero_pair, "plus") == zero_pair


def test_principal_pairs_form_a_submodule():
    m = model_q2()
    J1 = m.subspace([(1, 0, 0, 0)])
    J2 = m.subspace([(0, 1, 0, 0)])
    J3 = m.subspace([(0, 0, 1, 0)])

    def principal_from(f2):
        return TatePair(fourier(f2).punctured(), f2)

    a = principal_from(
        (TateFn.indicator(m, "T", J1) - TateFn.indicator(m, "T", J2)).punctured()
    )
    b = principal_from(
        (TateFn.indicator(m, "T", J2) - TateFn.indicator(m, "T", J3)).punctured()
    )
    assert is_principal(a) and is_principal(b)
    assert is_principal(a + b)
    assert is_principal(-a)
    assert is_principal(a.scale(PAdicRational(2, 3, 2)))
    assert is_principal(a.scale(PAdicRational(2, -5, 0)) + b)


def test_plus_pullback_couples_with_level_shift():
    # the plus pullback (f1, f2) -> (f1, q f2) carries principal pairs at
    # offset c+1 to principal pairs at offset c: the measure normalization
    # shifts with the level, absorbing the factor q
    D = 4
    upper = FiniteTateModel(F2, D, -1)
    lower = FiniteTateModel(F2, D, -2)
    J1 = upper.subspace([(1, 0, 0, 0)])
    J2 = upper.subspace([(0, 1, 0, 0)])
    f2 = (TateFn.indicator(upper, "T", J1) - TateFn.indicator(upper, "T", J2)).punctured()
    pair_up = TatePair(fourier(f2).punctured(), f2)
    assert is_principal(pair_up)
    pulled = partial_frobenius_pullback(pair_up, "plus")
    relabeled = TatePair(
        TateFn(lower, "T*", pulled.f1.values), TateFn(lower, "T", pulled.f2.values)
    )
    assert is_principal(relabeled)
    # without the level shift the same pair fails the criterion
    assert not is_principal(pulled)


def test_canonical_preimage():
    for field in (F2, F3):
        m = FiniteTateModel(field, 4, -2)
        chain = chain_for(m)
        assert canonical_preimage_check(m, chain)
        g1, g2, g3 = canonical_generators(m, chain)
        # linear combinations stay in the membership set
        a = PAdicRational(field.p, 3, 1)
        f2 = g1[1].scale(a) + g2[1] - g3[1]
        f1 = g1[0].scale(a) + g2[0] - g3[0]
        assert fourier(f2) == f1
        # a perturbed first slot leaves it
        bad = TateFn.zero(m, "T*")
        bad.values[m.index(m.lines()[0])] = PAdicRational.integer(field.p, 1)
        assert fourier(f2) != f1 + bad
