import random
from fractions import Fraction

import pytest

from fglab.padic import INF, RingDescriptor, teichmuller_lift
from fglab.series import TruncSeries1, substitute2
from fglab.groups import (
    FrobeniusSeries,
    ObstructionError,
    check_group_axioms,
    height_from_pi_series,
    honda_group,
    lubin_tate_group,
    measured_height,
    multiplicative_group,
)


def gm(p=3, N=10):
    return multiplicative_group(RingDescriptor(p, 1, N))


def lt_h1(p=3, N=12):
    d = RingDescriptor(p, 1, N)
    return lubin_tate_group(d, [0, p] + [0] * (p - 2) + [1])


def lt_h2(N=14):
    # f = 3X + X^9 over W(F_9)
    d = RingDescriptor(3, 2, N)
    coeffs = [0, 3, 0, 0, 0, 0, 0, 0, 0, 1]
    return lubin_tate_group(d, coeffs)


def honda_h2(N=14):
    return honda_group(RingDescriptor(3, 1, N), (0, 1))


# ------------------------------------------------------------ construction

def test_frobenius_validation():
    d = RingDescriptor(3, 1, 6)
    FrobeniusSeries(d, [0, 3, 0, 1])  # 3X + X^3
    with pytest.raises(ValueError):
        FrobeniusSeries(d, [0, 1, 0, 1])  # linear term not p
    with pytest.raises(ValueError):
        FrobeniusSeries(d, [0, 3, 1, 1])  # unit at non-power index 2... two units
    with pytest.raises(ValueError):
        FrobeniusSeries(d, [0, 3, 0, 2])  # residue 2X^3, not X^3
    with pytest.raises(ValueError):
        FrobeniusSeries(d, [1, 3, 0, 1])  # constant term


def test_lubin_tate_first_coefficients():
    # degree-2 part vanishes, degree-3 part is 8(X^2 Y + X Y^2) mod 9
    g = lt_h1(3, N=10)
    F = g.group_law2(4, N=2)
    assert F.coefficient(1, 1).coeffs[0] == 0
    assert F.coefficient(2, 0).coeffs[0] == 0
    assert F.coefficient(2, 1).coeffs[0] == 8
    assert F.coefficient(1, 2).coeffs[0] == 8
    assert F.coefficient(3, 0).coeffs[0] == 0


def test_multiplicative_group_closed_form():
    g = gm()
    F = g.group_law2(6, N=8)
    assert sorted(F.coeff_triples()) == [(0, 1, (1,)), (1, 0, (1,)), (1, 1, (1,))]
    pi = g.pi_series(6, 8)
    assert [int(v[0]) for v in pi.coeff_list()] == [0, 3, 3, 1, 0, 0]


def test_heights():
    assert gm().height == 1
    assert lt_h1(3).height == 1
    assert lt_h1(5).height == 1
    assert lt_h2().height == 2
    assert honda_h2().height == 2
    assert measured_height(gm()) == 1
    assert measured_height(lt_h2(), h_max=3) == 2
    assert measured_height(honda_h2(), h_max=3) == 2


def test_height_probe_infinite_and_invalid():
    d = RingDescriptor(3, 1, 6)
    s = TruncSeries1.from_coeffs(d, [0, 3, 3] + [0] * 27, D=30)
    assert height_from_pi_series(s) == INF
    bad = TruncSeries1.from_coeffs(d, [0, 3, 0, 0, 0, 1], D=6)
    with pytest.raises(ValueError):
        height_from_pi_series(bad)


def test_additive_honda_group():
    g = honda_group(RingDescriptor(3, 1, 8), ())
    assert g.height == INF
    F = g.group_law2(6, N=6)
    assert sorted(F.coeff_triples()) == [(0, 1, (1,)), (1, 0, (1,))]
    assert g.multiplication_by(5, 6, 4).nonzero_degrees() == [1]


def test_honda_logarithm_and_pi():
    g = honda_h2()
    lam = g.logarithm(85)
    for k in range(85):
        expect = Fraction(0)
        if k == 1:
            expect = Fraction(1)
        elif k == 9:
            expect = Fraction(1, 3)
        elif k == 81:
            expect = Fraction(1, 9)
        assert lam.coeff_vec(k)[0] == expect
    pi = g.pi_series(20)
    # lam([3](X)) = 3 lam(X): check through the exact logarithm
    got = lam.truncate(20).compose(pi.to_scaled())
    for k in range(20):
        diff = got.coeff_vec(k)[0] - 3 * lam.coeff_vec(k)[0]
        if diff:
            num = diff.numerator
            v = 0
            while num % 3 == 0:
                num //= 3
                v += 1
            assert v - _vp_den(diff, 3) >= 8
    assert pi.first_unit_index() == 9


def _vp_den(x: Fraction, p: int) -> int:
    den = x.denominator
    v = 0
    while den % p == 0:
        den //= p
        v += 1
    return v


def test_honda_u1_integral_height_one():
    g = honda_group(RingDescriptor(3, 1, 10), (1,))
    lam = g.logarithm(30)
    assert lam.coeff_vec(3)[0] == Fraction(1, 3)
    assert lam.coeff_vec(9)[0] == Fraction(1, 9)
    assert g.height == 1
    pi = g.pi_series(12, 6)
    assert pi.first_unit_index() == 3
    # group law integral (construction would raise otherwise)
    F = g.group_law2(10, N=6)
    assert F.coefficient(1, 1).coeffs[0] != 0 or F.coefficient(2, 1).coeffs[0] != 0


def test_axioms_all_groups():
    check_group_axioms(gm())
    check_group_axioms(lt_h1(3))
    check_group_axioms(lt_h1(5, N=10))
    check_group_axioms(honda_group(RingDescriptor(3, 1, 10), (1,)))


@pytest.mark.slow
def test_axioms_height_two():
    check_group_axioms(lt_h2())
    check_group_axioms(honda_h2())


# --------------------------------------------------------- module structure

def test_gm_module_matches_binomial():
    g = gm(3, 10)
    for a in (2, 3, 5, -1):
        ser = g.multiplication_by(a, 10, 6)
        # (1+X)^a - 1 mod X^10
        m = 3**6
        acc = [0] * 10
        c = 1
        for k in range(1, 10):
            c = c * (a - k + 1) // k
            acc[k] = c % m
        assert [int(v[0]) for v in ser.coeff_list()] == acc


def test_gm_hand_recursion_value():
    # [2] for the multiplicative group: degree-2 defect (12-6)/(9-3) = 1
    g = gm(3, 10)
    ser = g.multiplication_by(2, 4, 6)
    assert [int(v[0]) for v in ser.coeff_list()] == [0, 2, 1, 0]


def test_module_p_recovers_pi():
    for g, D in [(gm(3, 10), 8), (lt_h1(3), 12), (lt_h2(), 14), (honda_h2(), 14)]:
        ser = g.multiplication_by(g.desc.p, D, 6)
        assert ser == g.pi_series(D, 6)


def test_module_composition_law():
    g = lt_h1(3)
    D, N = 12, 6
    m = g.module(D, N)
    a, b = 2, 5
    sa = m.multiplication_by(a)
    sb = m.multiplication_by(b)
    sab = m.multiplication_by(a * b)
    assert sa.compose(sb) == sab
    assert sb.compose(sa) == sab


def test_module_addition_law():
    g = lt_h1(3, N=14)
    D, N = 10, 6
    m = g.module(D, N)
    sa = m.multiplication_by(2)
    sb = m.multiplication_by(3)
    ssum = m.multiplication_by(5)
    F = g.group_law2(D, N)
    assert substitute2(F, sa, sb) == ssum


def test_module_linearity_random(subtests=None):
    rng = random.Random(7)
    g = lt_h2()
    D, N = 12, 5
    m = g.module(D, N)
    for _ in range(3):
        a = rng.randrange(3**5)
        b = rng.randrange(3**5)
        sa = m.multiplication_by(a)
        sb = m.multiplication_by(b)
        F = g.group_law2(D, N)
        assert substitute2(F, sa, sb) == m.multiplication_by(a + b)


def test_teichmuller_scalar_exact_linear_honda():
    # [z] = zX exactly for z in the Teichmuller lift of the residue field
    # of the height-two honda group base-changed to W(F_9)
    g = honda_h2().base_change(2)
    d = g.desc
    m = g.module(20, 8)
    z = teichmuller_lift(m.desc_w, (2, 2))
    ser = m.multiplication_by(z)
    assert ser.nonzero_degrees() == [1]
    assert tuple(int(v) for v in ser.data[1]) == tuple(v % 3**8 for v in z.reduce_to(d.at_precision(8)).coeffs)


def test_negation_series():
    g = gm(3, 10)
    neg = g.negation_series(8, 6)
    m = 3**6
    assert [int(v[0]) for v in neg.coeff_list()] == [0] + [(-1) ** k % m for k in range(1, 8)]
    gh = honda_h2()
    neg = gh.negation_series(12, 6)
    assert neg.nonzero_degrees() == [1]
    assert int(neg.data[1, 0]) == 3**6 - 1
    # F(X, neg(X)) = 0
    g2 = lt_h1(3)
    D, N = 12, 6
    neg = g2.negation_series(D, N)
    x = TruncSeries1.x(neg.desc, D)
    assert substitute2(g2.group_law2(D, N), x, neg).is_zero()


def test_obstruction_detection():
    # over Z_3 the height-one Lubin-Tate group has endomorphisms only for
    # scalars in Z_3; a Teichmuller vector from a larger field cannot occur,
    # but a non-scalar "a" makes no sense over f=1.  Instead check that the
    # h=2 group over W(F_9) rejects a generic non-commuting linear term is
    # impossible there (full ring acts), so use the multiplicative group
    # base-changed to W(F_9): only Z_3 acts, so sqrt(-1) must obstruct.
    g = multiplicative_group(RingDescriptor(3, 2, 12))
    m = g.module(12, 5)
    z = teichmuller_lift(m.desc_w, (0, 1))  # order-4 root of unity
    ser, obs = m.try_multiplication(z)
    assert ser is None and obs is not None
    with pytest.raises(ObstructionError):
        m.multiplication_by(z)


def test_logarithm_additivity_and_exp():
    for g in (gm(3, 10), lt_h1(3), honda_h2()):
        D = 10
        lam = g.logarithm(D)
        exp = g.exponential(D)
        x = TruncSeries1.x(lam.desc, D, "scaled")
        assert lam.compose(exp) == x
        F = g.group_law2(D)
        Fs = _to_scaled2(F)
        # lam(F(X, Y)) = lam(X) + lam(Y): check on the curve Y = X^2
        # (substitute Y -> X^2 to stay in one variable)
        dsc = Fs.desc
        lam_f = _rescale(lam, dsc)
        xf = TruncSeries1.x(dsc, D, "scaled")
        y = TruncSeries1.from_coeffs(dsc, [0, 0, 1], D=D, domain="scaled")
        lhs = lam_f.compose(substitute2(Fs, xf, y))
        rhs = lam_f + lam_f.compose(y)
        for k in range(D):
            diff = lhs.coeff_vec(k)[0] - rhs.coeff_vec(k)[0]
            assert _vp(diff, g.desc.p) >= 5


def _to_scaled2(F):
    from fglab.series import TruncSeries2
    import numpy as np

    out = TruncSeries2.zero(F.desc, F.D, "scaled")
    for i in range(F.D):
        for j in range(F.D - i):
            for c in range(F.desc.f):
                out.data[i, j, c] = Fraction(int(F.data[i, j, c]))
    return out


def _rescale(s, desc):
    out = TruncSeries1.zero(desc, s.D, "scaled")
    out.data[:, : s.desc.f] = s.data
    return out


def _vp(x, p):
    if x == 0:
        return 10**9
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def test_base_change_preserves_data():
    g = lt_h1(3)
    g2 = g.base_change(2)
    assert g2.desc.f == 2 and g2.height == 1
    pi, pi2 = g.pi_series(8, 6), g2.pi_series(8, 6)
    for k in range(8):
        assert int(pi2.data[k, 0]) == int(pi.data[k, 0])
        assert int(pi2.data[k, 1]) == 0
    gh = honda_h2()
    gh2 = gh.base_change(2)
    assert gh2.height == 2
    pi, pi2 = gh.pi_series(12, 6), gh2.pi_series(12, 6)
    for k in range(12):
        assert int(pi2.data[k, 0]) == int(pi.data[k, 0]) and int(pi2.data[k, 1]) == 0
    with pytest.raises(ValueError):
        lt_h2().base_change(3)


def test_gm_base_change_identical():
    g = multiplicative_group(RingDescriptor(5, 1, 8)).base_change(2)
    F = g.group_law2(5, 6)
    assert sorted(F.coeff_triples()) == [
        (0, 1, (1, 0)), (1, 0, (1, 0)), (1, 1, (1, 0))]
