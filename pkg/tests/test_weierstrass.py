import random

import numpy as np
import pytest

from fglab import (
    RingDescriptor,
    TruncSeries1,
    lubin_tate_group,
    honda_group,
    multiplicative_group,
)
from fglab.weier import (
    digit_split_step,
    division_polynomial,
    phi_basis_decompose,
    phi_reconstruct,
    weierstrass_divide,
    weierstrass_prep,
)


def ser(desc, coeffs, D):
    return TruncSeries1.from_coeffs(desc, coeffs, D)


def flat(s):
    return [int(v[0]) for v in s.coeff_list()]


def lt_pi(p, N, D):
    g = lubin_tate_group(RingDescriptor(p, 1, N), [0, p] + [0] * (p - 2) + [1])
    return g, g.pi_series(D, N)


class TestPrep:
    def test_lubin_tate_series_is_its_own_distinguished_part(self):
        desc = RingDescriptor(3, 1, 8)
        f = ser(desc, [0, 3, 0, 1], 20)
        w = weierstrass_prep(f)
        assert w.d == 3
        assert flat(w.P) == [0, 3, 0, 1]
        assert w.U == ser(desc, [1], 20)

    def test_split_eisenstein_times_unit(self):
        desc = RingDescriptor(5, 1, 9)
        f = ser(desc, [5, 0, 1], 24) * ser(desc, [1, 1], 24)
        w = weierstrass_prep(f)
        assert w.d == 2
        assert flat(w.P) == [5, 0, 1]
        assert w.U == ser(desc, [1, 1], 24)

    def test_unit_input_gives_trivial_factor(self):
        desc = RingDescriptor(3, 1, 6)
        f = ser(desc, [1, 7, 4], 12)
        w = weierstrass_prep(f)
        assert w.d == 0
        assert w.U == f

    def test_no_unit_coefficient_raises(self):
        desc = RingDescriptor(3, 1, 6)
        f = ser(desc, [0, 3, 3], 30)
        with pytest.raises(ValueError, match="Weierstrass degree exceeds truncation"):
            weierstrass_prep(f)

    def test_uniqueness_under_perturbed_start(self):
        desc = RingDescriptor(3, 1, 7)
        rng = random.Random(11)
        D = 18
        for _ in range(5):
            coeffs = [0, 3 * rng.randrange(1, 3)]
            coeffs += [rng.randrange(desc.pN) * 3 for _ in range(3)]
            coeffs += [1 + 3 * rng.randrange(3)]
            coeffs += [rng.randrange(desc.pN) for _ in range(4)]
            f = ser(desc, coeffs, D)
            w1 = weierstrass_prep(f)
            pert = ser(desc, [rng.randrange(desc.pN) for _ in range(D)], D)
            w2 = weierstrass_prep(f, perturb=pert)
            # window D pins the distinguished factor down to stable_digits
            guard = 3**w1.stable_digits
            assert w1.stable_digits >= 2
            assert ((w1.P.data - w2.P.data) % guard == 0).all()

    def test_full_precision_agreement_at_wide_window(self):
        desc = RingDescriptor(3, 1, 5)
        rng = random.Random(13)
        D = 40  # >= N*d for d=5, so every digit of P is stable
        for _ in range(3):
            coeffs = [0, 3, 9, 6, 3, 1 + 3 * rng.randrange(3)]
            coeffs += [rng.randrange(desc.pN) for _ in range(D - 6)]
            f = ser(desc, coeffs, D)
            w1 = weierstrass_prep(f)
            pert = ser(desc, [rng.randrange(desc.pN) for _ in range(D)], D)
            w2 = weierstrass_prep(f, perturb=pert)
            assert w1.stable_digits == desc.N
            assert w1.P == w2.P

    def test_recovers_random_factorization(self):
        desc = RingDescriptor(3, 2, 6)
        rng = random.Random(5)
        D = 28  # >= N*d keeps the planted factor fully stable
        d = 4
        Pc = [[3 * rng.randrange(3), 3 * rng.randrange(3)] for _ in range(d)] + [[1, 0]]
        P = ser(desc, Pc, D)
        Uc = [[1 + 3 * rng.randrange(3), rng.randrange(9)]]
        Uc += [[rng.randrange(desc.pN), rng.randrange(desc.pN)] for _ in range(D - 1)]
        U = ser(desc, Uc, D)
        w = weierstrass_prep(P * U)
        assert w.d == d
        assert [list(r) for r in w.P.data] == Pc
        for j in range(D - d):
            guard = 3 ** min(desc.N, -(-(D - d - j) // d))
            assert ((w.U.data[j] - U.data[j]) % guard == 0).all()

    def test_divide_identity(self):
        desc = RingDescriptor(3, 1, 6)
        rng = random.Random(3)
        D = 20
        f = ser(desc, [rng.randrange(desc.pN) for _ in range(D)], D)
        pi = ser(desc, [0, 3, 0, 1], D)
        w = weierstrass_prep(pi)
        Q, R = weierstrass_divide(f, w)
        assert R.D == w.d
        assert Q * w.P_window(D) + R.lift(D) == f


class TestDigitSplit:
    def test_x_to_the_q(self):
        g, pi = lt_pi(3, 6, 20)
        f = ser(pi.desc, [0, 0, 0, 1], 20)
        st = digit_split_step(f, pi)
        assert all(a.is_zero() for a in st.a)
        assert st.g == ser(pi.desc, [1], 20)
        # f1 = -X, represented mod p^(N-1) after the division by p
        assert flat(st.f1) == [0, 3 ** (pi.desc.N - 1) - 1, 0]

    def test_pi_series_itself(self):
        g, pi = lt_pi(3, 6, 20)
        st = digit_split_step(pi, pi)
        assert all(a.is_zero() for a in st.a)
        assert st.g == ser(pi.desc, [1], 20)
        assert st.f1.is_zero()

    def test_low_degree_passthrough(self):
        g, pi = lt_pi(3, 6, 20)
        f = ser(pi.desc, [0, 0, 1], 20)
        st = digit_split_step(f, pi)
        assert [a.coeffs[0] for a in st.a] == [0, 0, 1]
        assert st.g.is_zero()
        assert st.f1.is_zero()

    def test_random_identity_and_teichmuller_digits(self):
        g, pi = lt_pi(3, 7, 24)
        desc = pi.desc
        rng = random.Random(19)
        for _ in range(6):
            f = ser(desc, [rng.randrange(desc.pN) for _ in range(24)], 24)
            st = digit_split_step(f, pi)
            back = pi * st.g + st.f1.lift(24).scalar_mul(3)
            for i, ai in enumerate(st.a):
                back.data[i] = (back.data[i] + np.array(ai.coeffs, dtype=back.data.dtype)) % desc.pN
            assert back == f
            for ai in st.a:
                aq = ai
                for _ in range(desc.f):
                    aq = aq * aq * aq  # a^(p^f)
                assert aq == ai  # digits lie in mu_{q-1} or are 0


class TestPhiBasis:
    def test_pi_series_has_component_x(self):
        g, pi = lt_pi(3, 6, 27)
        dec = phi_basis_decompose(pi, pi)
        assert flat(dec.components[0])[:2] == [0, 1]
        assert all(c.is_zero() for c in dec.components[1:])
        assert dec.components[0].nonzero_degrees() == [1]

    def test_monomial_component(self):
        g, pi = lt_pi(3, 6, 27)
        f = ser(pi.desc, [0, 0, 1], 27)
        dec = phi_basis_decompose(f, pi)
        assert dec.components[2].nonzero_degrees() == [0]
        assert int(dec.components[2].data[0, 0]) == 1
        assert dec.components[0].is_zero() and dec.components[1].is_zero()

    def test_zero_decomposes_to_zero(self):
        g, pi = lt_pi(3, 4, 27)
        dec = phi_basis_decompose(TruncSeries1.zero(pi.desc, 27), pi)
        assert all(c.is_zero() for c in dec.components)
        assert dec.remainder.is_zero()

    def test_random_reconstruction_with_remainder_is_exact(self):
        g, pi = lt_pi(3, 4, 27)
        desc = pi.desc
        rng = random.Random(101)
        for _ in range(8):
            f = ser(desc, [rng.randrange(desc.pN) for _ in range(27)], 27)
            dec = phi_basis_decompose(f, pi)
            recon = phi_reconstruct(dec, pi)
            assert recon == f

    def test_graded_window_without_remainder(self):
        g, pi = lt_pi(3, 4, 27)
        desc = pi.desc
        rng = random.Random(55)
        for _ in range(4):
            f = ser(desc, [rng.randrange(desc.pN) for _ in range(27)], 27)
            dec = phi_basis_decompose(f, pi)
            recon = phi_reconstruct(dec, pi, include_remainder=False)
            diff = (recon - f).data
            for t in range(27):
                guard = 3 ** min(4, -(-(27 - t) // 2))
                assert (diff[t] % guard == 0).all()

    def test_round_trip_on_sparse_components(self):
        g, pi = lt_pi(3, 5, 36)
        desc = pi.desc
        rng = random.Random(77)
        comps = []
        f = TruncSeries1.zero(desc, 36)
        for i in range(3):
            c = [rng.randrange(desc.pN) for _ in range(3)]
            comps.append(c)
            f = f + ser(desc, c, 36).compose(pi).shift(i)
        dec = phi_basis_decompose(f, pi)
        for i in range(3):
            assert flat(dec.components[i])[:3] == [v % desc.pN for v in comps[i]]

    def test_height_two_coefficient_ring(self):
        g = lubin_tate_group(RingDescriptor(3, 2, 5), [0, 3, 0, 0, 0, 0, 0, 0, 0, 1])
        pi = g.pi_series(81, 5)
        desc = pi.desc
        rng = random.Random(9)
        f = ser(desc, [[rng.randrange(desc.pN), rng.randrange(desc.pN)] for _ in range(81)], 81)
        dec = phi_basis_decompose(f, pi)
        assert dec.D_prime == 9
        assert phi_reconstruct(dec, pi) == f


class TestDivisionPolynomial:
    def test_lubin_tate_level_one(self):
        g, _ = lt_pi(3, 8, 12)
        dp = division_polynomial(g, 1)
        assert dp.e == 2
        assert flat(dp.P) == [3, 0, 1]
        assert dp.wdeg_total == 3

    def test_lubin_tate_level_two_relative_series(self):
        g, pi = lt_pi(3, 8, 92)
        dp = division_polynomial(g, 2)
        assert dp.e == 6
        assert dp.P.data.shape[0] == 7
        # relative series for pX + X^p: p + ([p](X))^(p-1)
        expect = pi.truncate(dp.phi.D) * pi.truncate(dp.phi.D)
        expect.data[0] = (expect.data[0] + 3) % pi.desc.pN
        assert dp.phi == expect

    def test_multiplicative_level_one(self):
        g = multiplicative_group(RingDescriptor(3, 1, 8))
        dp = division_polynomial(g, 1)
        assert flat(dp.P) == [3, 3, 1]

    def test_telescoping_degrees(self):
        g, _ = lt_pi(3, 8, 12)
        degs = [division_polynomial(g, n).e for n in (1, 2)]
        assert 1 + sum(degs) == 9
        assert division_polynomial(g, 2).wdeg_total == 9

    def test_height_two_level_one(self):
        g = lubin_tate_group(RingDescriptor(3, 2, 8), [0, 3, 0, 0, 0, 0, 0, 0, 0, 1])
        dp = division_polynomial(g, 1)
        assert dp.e == 8
        c0 = dp.P.coefficient(0)
        assert c0.valuation() == 1

    def test_honda_level_one(self):
        g = honda_group(RingDescriptor(3, 1, 6), (0, 1))
        dp = division_polynomial(g, 1)
        assert dp.e == 8
        assert dp.wdeg_total == 9
