"""Endomorphism detection and the endomorphism subfield.

A multiplier candidate a gives g = exp_F(a log_F(X)), computed in exact
rational arithmetic; a is a multiplier of the group exactly when every
coefficient of g is p-integral, and the first non-integral degree is the
obstruction.  A success is a certificate at the stated window (D, N_eff),
not a proof to all orders; the commutation identity
g(F(X,Y)) = F(g(X), g(Y)) is re-verified on the integral side.

The succeeding multipliers form a closed subring of O_K whose residue
degree f_F is found by testing Teichmuller generators of each candidate
subfield, largest first.  f_F = h is the full-height case: the torsion
tower acquires the full scalar action and [zeta] has composition order
q - 1.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .padic import INF, UnramifiedRingElem, teichmuller_digits
from .series import TruncSeries1, TruncSeries2, substitute2_into2


def _floor_log(n: int, base: int) -> int:
    k, t = 0, n
    while t >= base:
        t //= base
        k += 1
    return k


def c_map(g: TruncSeries1) -> UnramifiedRingElem:
    """Linear coefficient of a pointed series."""
    if any(v != 0 for v in g.data[0]):
        raise ValueError("series has a constant term")
    return g.coefficient(1)


def _coerce_multiplier(desc, a):
    """Returns (scalar for exact series arithmetic, ring element echo).

    Plain integers stay exact rationals: reducing them mod p^N first would
    poison every digit past N - v_p(k!) once the exponential's denominators
    touch them.  Ring elements are taken at face value: their integer
    coefficient vectors are exact elements of O_K."""
    if isinstance(a, UnramifiedRingElem):
        if not a.desc.same_field(desc):
            raise ValueError("multiplier from a different ring")
        return a, a
    return Fraction(int(a)), desc.from_int(int(a))


def _embed_x(g: TruncSeries1, D: int) -> TruncSeries2:
    s = TruncSeries2.zero(g.desc, D, g.domain)
    for i in range(min(g.D, D)):
        s.data[i, 0] = g.data[i]
    return s


def _embed_y(g: TruncSeries1, D: int) -> TruncSeries2:
    s = TruncSeries2.zero(g.desc, D, g.domain)
    for j in range(min(g.D, D)):
        s.data[0, j] = g.data[j]
    return s


def try_endomorphism(group, a, D: int | None = None) -> dict:
    """Test one multiplier; returns a certificate record.

    Success means integral coefficients through degree D and the commutation
    identity holding mod (p^N_eff, degree D).  Failure records the first
    non-integral degree.
    """
    desc = group.desc
    p = desc.p
    if D is None:
        q = group.q
        D = max(4 * q, 24) if q is not None else 24
    scalar, a_elem = _coerce_multiplier(desc, a)
    # Integer multipliers with an exact logarithm make the whole pipeline
    # exact.  A ring-element multiplier is a mod-p^N lift, and its error is
    # amplified by the derivative of the integral polynomial family
    # a -> [a]_k, worth floor(log_p D) digits each for the verdict transfer
    # and for downstream composites; an inexact logarithm costs the same.
    loss = 0 if (group.exact_log and isinstance(scalar, Fraction)) else 2 * _floor_log(D, p)
    N_eff = min(desc.N - loss, group.max_law_precision(D))
    if min(N_eff, desc.N - _floor_log(D, p)) < 3:
        raise ValueError("construct the group at higher precision first")
    log = group.logarithm(D)
    g = log.reversion().compose(log.scalar_mul(scalar))
    first_bad = None
    for k in range(1, D):
        if any(v.denominator % p == 0 for v in g.data[k]):
            first_bad = k
            break
    record = {
        "multiplier": tuple(int(v) for v in a_elem.coeffs),
        "window": D,
        "precision": N_eff,
        "success": first_bad is None,
        "first_nonintegral_degree": first_bad,
        "series": None,
        "commutes": None,
        "linear_coefficient_matches": None,
    }
    if first_bad is not None:
        return record
    desc_eff = desc.at_precision(N_eff)
    g_int = g.to_integral(desc_eff)
    record["series"] = g_int
    record["linear_coefficient_matches"] = (c_map(g_int) - a_elem.reduce_to(desc_eff)).is_zero()
    F2 = group.group_law2(D, N_eff)
    lhs = substitute2_into2(_embed_x(g_int, D), F2,
                            TruncSeries2.zero(desc_eff, D))
    rhs = substitute2_into2(F2, _embed_x(g_int, D), _embed_y(g_int, D))
    record["commutes"] = lhs == rhs
    record["success"] = bool(record["commutes"] and record["linear_coefficient_matches"])
    return record


def _divisors_desc(n: int):
    return sorted((d for d in range(1, n + 1) if n % d == 0), reverse=True)


def compute_endo_subfield(group, D: int | None = None) -> dict:
    """Residue degree f_F of the multiplier subring.

    Tests p, -1, and one Teichmuller generator per divisor d of gcd(f, h),
    largest first; testing a single generator per subfield suffices because
    the succeeding multipliers form a ring closed under the Teichmuller
    section.
    """
    h = group.height
    if h is INF:
        raise ValueError("no finite height: the multiplier ring is not an order")
    desc = group.desc
    baseline = []
    for label, a in (("p", desc.p), ("-1", -1)):
        rec = try_endomorphism(group, a, D)
        rec["candidate"] = label
        baseline.append(rec)
    candidates = []
    f_F = 1
    for d in _divisors_desc(math.gcd(desc.f, h)):
        digits = teichmuller_digits(desc, d)
        # digits run 0, 1, zeta, zeta^2, ...; index 2 is the generator
        gen = digits[2] if len(digits) > 2 else digits[1]
        rec = try_endomorphism(group, gen, D)
        rec["candidate"] = f"mu_{desc.p**d - 1}_generator"
        rec["subfield_degree"] = d
        candidates.append(rec)
        if rec["success"]:
            f_F = max(f_F, d)
    return {
        "p": desc.p,
        "f": desc.f,
        "height": h,
        "baseline": baseline,
        "candidates": candidates,
        "f_F": f_F,
        "full_height": f_F == h,
        "window": candidates[0]["window"],
        "precision": candidates[0]["precision"],
    }


def tau_infinity_check(group, D: int | None = None, report: dict | None = None) -> dict:
    """The distinguished order-(q-1) endomorphism of a full-height group:
    g = [zeta] with zeta generating mu_{q-1}, and g composed with itself
    q-1 times is the identity."""
    if report is None:
        report = compute_endo_subfield(group, D)
    if not report["full_height"]:
        raise ValueError("full-height multiplier ring required")
    desc = group.desc
    h = group.height
    q = group.q
    digits = teichmuller_digits(desc, h)
    zeta = digits[2] if len(digits) > 2 else digits[1]
    rec = try_endomorphism(group, zeta, D)
    if not rec["success"]:
        raise ValueError("generator multiplier failed despite full height")
    g = rec["series"]
    cur = g
    for _ in range(q - 2):
        cur = g.compose(cur)
    ident = TruncSeries1.zero(g.desc, g.D)
    ident.data[1, 0] = 1
    return {
        "zeta": tuple(int(v) for v in zeta.reduce_to(g.desc).coeffs),
        "order": q - 1,
        "linear_coefficient": tuple(int(v) for v in c_map(g).coeffs),
        "is_identity": cur == ident,
        "window": rec["window"],
        "precision": rec["precision"],
    }


def multiplier_closure_sample(group, pairs, D: int | None = None) -> dict:
    """Spot-check that sums and products of succeeding multipliers succeed."""
    results = []
    all_ok = True
    for a, b in pairs:
        ra = try_endomorphism(group, a, D)
        rb = try_endomorphism(group, b, D)
        if not (ra["success"] and rb["success"]):
            all_ok = False
            results.append({"pair": "input-failed", "ok": False})
            continue
        a_e = _coerce_multiplier(group.desc, a)[1]
        b_e = _coerce_multiplier(group.desc, b)[1]
        rs = try_endomorphism(group, a_e + b_e, D)
        rp = try_endomorphism(group, a_e * b_e, D)
        ok = rs["success"] and rp["success"]
        all_ok = all_ok and ok
        results.append({
            "sum_success": rs["success"],
            "product_success": rp["success"],
            "ok": ok,
        })
    return {"pairs": len(results), "all_ok": all_ok, "results": results}
