"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -s` to see the verdict lines.
Every check is an exact congruence at the stated window and precision;
the stated runtime budgets are asserted where the criterion names one.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from fglab.corpus import corpus, make_group
from fglab.endo import compute_endo_subfield, tau_infinity_check
from fglab.matrices import build_phi_zeta, check_relations, commutant_dimension, unit_quotient_order
from fglab.padic import INF, RingDescriptor
from fglab.series import TruncSeries1
from fglab.torsion import (
    assumption_check,
    certify_torsion_degree,
    mu_p_membership,
    ramification_breaks,
    torsion_count,
)
from fglab.weier import phi_basis_decompose, phi_reconstruct

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def groups():
    return dict(corpus(N=8, nmax=2))


_subfield_cache = {}


def subfield(g):
    key = (g.label, g.desc.f, g.desc.N)
    if key not in _subfield_cache:
        _subfield_cache[key] = compute_endo_subfield(g)
    return _subfield_cache[key]


def _capable(g):
    return g.height is not INF and g.desc.f % g.height == 0


def verdict(num, desc, ok, started=None, budget=None):
    note = ""
    if started is not None:
        elapsed = time.perf_counter() - started
        note = f"  [{elapsed:.1f}s"
        if budget is not None:
            note += f" of {budget}s"
            ok = ok and elapsed <= budget
        note += "]"
    print(f"\ncriterion {num:>2}: {'PASS' if ok else 'FAIL'}  {desc}{note}")
    assert ok, f"criterion {num} failed: {desc}"


def test_criterion_1_degree_law(groups):
    t0 = time.perf_counter()
    ok = True
    for name, g in groups.items():
        q = g.q
        for n in (1, 2):
            e_n = (q - 1) * q ** (n - 1)
            cert = certify_torsion_degree(g, n, N=4)
            ok = ok and cert["pure"] and cert["certified_degree"] == e_n
            ok = ok and cert["root_valuation"] == str(Fraction(1, e_n))
    verdict(1, "division polynomials pure of slope 1/e and degree e = q^(n-1)(q-1)",
            ok, t0, budget=120)


def test_criterion_2_torsion_cardinality(groups):
    ok = True
    for name, g in groups.items():
        for n in (1, 2):
            ok = ok and torsion_count(g, n)["match"]
    verdict(2, "Weierstrass degree of [p^n] equals p^(nh) across the corpus", ok)


def test_criterion_3_division_algorithm(groups):
    rng = random.Random(20260815)
    ok = True
    for q, g in ((3, groups["lt-p3"]), (9, groups["lt-h2-p3"])):
        D = 9 * q
        desc = g.desc.at_precision(4)
        pi = g.pi_series(D, 4)
        zero = TruncSeries1.zero(desc, D)
        dec0 = phi_basis_decompose(zero, pi)
        ok = ok and all(a.is_zero() for a in dec0.components) and dec0.remainder.is_zero()
        for _ in range(25):
            f = TruncSeries1.zero(desc, D)
            for k in range(D):
                for j in range(desc.f):
                    f.data[k, j] = rng.randrange(desc.pN)
            dec = phi_basis_decompose(f, pi)
            ok = ok and phi_reconstruct(dec, pi) == f
    verdict(3, "phi-basis decomposition reconstructs 25 seeded series exactly, 0 -> 0", ok)


def test_criterion_4_ramification_filtration():
    t0 = time.perf_counter()
    g = make_group(3, 2, 11, "lubin-tate", d=2, nmax=2, label="lt-h2-p3")
    rec = ramification_breaks(g, 2, N=11, cross_check=False)
    ok = rec["all_match"] and rec["identity_break"] == "inf"
    seen = {(r["k"], r["i_sigma"]) for r in rec["breaks"]}
    ok = ok and seen == {(0, "1"), (1, "9")}
    verdict(4, "breaks i(sigma_u) = q^k for k in {0,1} in the degree-72 ring at N=11",
            ok, t0, budget=600)


def test_criterion_5_predicate_agreement(groups):
    ok = True
    detail = []
    for name, g in groups.items():
        scalars = all(assumption_check(g, n, N=4)["holds"] for n in (1, 2))
        rep = subfield(g)
        full = rep["full_height"]
        if full:
            tau = tau_infinity_check(g, report=rep)
            tau_ok = tau["is_identity"]
        else:
            try:
                tau_infinity_check(g, report=rep)
                tau_ok = True
            except ValueError:
                tau_ok = False
        agree = scalars == full == tau_ok
        ok = ok and agree
        detail.append(f"{name}:{'T' if full else 'F'}")
    verdict(5, "scalar bijection = full height = tau identity on every group "
               f"({' '.join(detail)})", ok)


def test_criterion_6_unit_quotient_consistency(groups):
    ok = True
    for name, g in groups.items():
        if not _capable(g):
            continue
        p, h, q = g.desc.p, g.height, g.q
        for n in (1, 2):
            expected = (p**h - 1) * p ** (h * (n - 1))
            cert = certify_torsion_degree(g, n, N=4)
            ok = ok and cert["certified_degree"] == expected
            ok = ok and unit_quotient_order(q, n) == expected
    verdict(6, "(p^h - 1) p^(h(n-1)) equals certified degree and unit-quotient order", ok)


def test_criterion_7_commutant_dimensions():
    ok = True
    for m in range(1, 5):
        for n in range(1, 5):
            ok = ok and commutant_dimension(build_phi_zeta(m, n)) == n * n * m
    import itertools
    for m in (1, 2, 3):
        A = build_phi_zeta(m, 1).block
        for entries in itertools.product(range(3), repeat=m * m):
            Y = [list(entries[r * m:(r + 1) * m]) for r in range(m)]
            brute = all(
                sum(A[i][k] * Y[k][j] for k in range(m)) % 3
                == sum(Y[i][k] * A[k][j] for k in range(m)) % 3
                for i in range(m) for j in range(m))
            ok = ok and check_relations(Y) == brute
    verdict(7, "commutant dimension n^2 m for m,n <= 4; circulant = commuting for m <= 3", ok)


def test_criterion_8_mu_p(groups):
    ok = True
    for name in ("mult-p3", "mult-p5"):
        rec = mu_p_membership(groups[name], N=6)
        ok = ok and rec["found"] and rec["d"] == 1
        ok = ok and rec["attempts"][0]["holds"]
    rec = mu_p_membership(groups["lt-h2-p3"], d_max=2, N=6)
    ok = ok and rec["found"] and rec["d"] <= 2
    verdict(8, "p-th roots of unity reached at d=1 for the multiplicative pair, d<=2 at h=2", ok)


def test_criterion_9_base_change_invariance(groups):
    ok = True
    for name in ("mult-p3", "mult-p5", "lt-p3", "lt-p5", "honda-h2-p3"):
        g = groups[name]
        g2 = g.base_change(2)
        for n in (1, 2):
            c1 = certify_torsion_degree(g, n, N=4)
            c2 = certify_torsion_degree(g2, n, N=4)
            ok = ok and c1["certified_degree"] == c2["certified_degree"]
            ok = ok and c1["polygon"] == c2["polygon"]
            ok = ok and torsion_count(g, n)["weierstrass_degree"] \
                == torsion_count(g2, n)["weierstrass_degree"]
        if g.height == 1:
            ok = ok and subfield(g)["f_F"] == subfield(g2)["f_F"] == 1
        else:
            # enlarging the base to f = h turns the full scalar ring on: the
            # multiplier subfield grows with the base until it fills the height
            ok = ok and subfield(g)["f_F"] == 1 and subfield(g2)["f_F"] == 2
    verdict(9, "polygons, degrees, torsion counts invariant under base change f: 1 -> 2; "
               "f_F stable at height 1", ok)


def test_criterion_10_kernel_roundtrips(groups):
    t0 = time.perf_counter()
    desc = RingDescriptor(3, 1, 6)
    D = 12
    x = TruncSeries1.x(desc, D)
    rng = random.Random(1009)
    ok = True

    def rand(unit_linear=False, zero_const=True):
        s = TruncSeries1.zero(desc, D)
        for k in range(D):
            s.data[k, 0] = rng.randrange(desc.pN)
        if zero_const:
            s.data[0, 0] = 0
        if unit_linear:
            s.data[1, 0] = 1 + desc.p * rng.randrange(desc.p ** (desc.N - 1))
        return s

    for _ in range(100):
        s = rand(unit_linear=True)
        r = s.reversion()
        ok = ok and s.compose(r) == x and r.compose(s) == x
    xs = TruncSeries1.x(desc, D, domain="scaled")
    for _ in range(100):
        L = rand(unit_linear=True).to_scaled()
        E = L.reversion()
        ok = ok and E.compose(L) == xs and L.compose(E) == xs
    for name in ("mult-p3", "lt-p3", "honda-h2-p3"):
        g = groups[name]
        gx = TruncSeries1.x(g.desc, D, domain="scaled")
        ok = ok and g.exponential(D).compose(g.logarithm(D)) == gx
    for _ in range(100):
        a, b, c = rand(), rand(), rand()
        ok = ok and a.compose(b).compose(c) == a.compose(b.compose(c))
    verdict(10, "reversion, log/exp inverses, compose-associativity (100 seeded cases each)",
            ok, t0, budget=30)
