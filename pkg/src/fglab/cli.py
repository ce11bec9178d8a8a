"""Command-line driver: configure one group, run verification suites, emit
a machine-readable report.

Subcommands select the suite: construct echoes the group law, torsion runs
the division-polynomial and torsion-field checks, endo the multiplier-ring
checks, matrices the block-model linear algebra, verify everything plus the
seeded series round-trip properties.  Configuration comes from defaults, an
optional flat key=value file, and flags, in that order of precedence; every
file key has a flag of the same name.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 the
configuration was invalid or a requested window is infeasible.  A failing
check never aborts the run.
"""

import argparse
import json
import math
import random
import sys
import time
from fractions import Fraction

from .corpus import make_group, source_height
from .endo import compute_endo_subfield, multiplier_closure_sample, tau_infinity_check, try_endomorphism
from .matrices import build_phi_zeta, check_relations, commutant_dimension, unit_quotient_order
from .padic import INF, RingDescriptor, is_prime
from .reports import Check, build_report, exit_code, render_summary, run_checks
from .series import TruncSeries1
from .torsion import (
    TorsionFieldModel,
    assumption_check,
    certify_torsion_degree,
    mu_p_membership,
    ramification_breaks,
    torsion_count,
)

DEFAULTS = {
    "p": 3,
    "f": 1,
    "N": 6,
    "group": "lubin-tate",
    "d": 1,
    "u": "",
    "group_file": "",
    "nmax": 2,
    "dcap": 800,
    "jobs": 1,
    "seed": 0,
    "out": "",
}

GROUP_SOURCES = ("multiplicative", "lubin-tate", "honda")


def parse_u(text):
    if not text:
        return ()
    return tuple(int(t) for t in str(text).replace(" ", "").split(",") if t != "")


def load_config_file(path: str) -> dict:
    """Flat key = value lines; # starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in DEFAULTS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val
    return out


class RunConfig:
    """Validated run parameters; construction happens only after validate."""

    INT_KEYS = ("p", "f", "N", "d", "nmax", "dcap", "jobs", "seed")

    def __init__(self, values: dict):
        merged = dict(DEFAULTS)
        merged.update({k: v for k, v in values.items() if v is not None})
        for key in self.INT_KEYS:
            merged[key] = int(merged[key])
        merged["u"] = parse_u(merged["u"])
        self.values = merged

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name)

    def to_dict(self) -> dict:
        out = dict(self.values)
        out["u"] = list(out["u"])
        return out

    def load_coeffs(self):
        """Integer coefficients from the group file, low degree first."""
        with open(self.group_file) as fh:
            toks = fh.read().split()
        return [int(t) for t in toks]

    def validate(self, need_suites: bool) -> list:
        """Returns a list of problems; empty means the config is runnable."""
        problems = []
        v = self.values
        if v["p"] < 3 or not is_prime(v["p"]):
            problems.append("p must be an odd prime")
        if v["f"] < 1:
            problems.append("f must be >= 1")
        if v["N"] < 4:
            problems.append("N must be >= 4")
        if v["d"] < 1:
            problems.append("d must be >= 1")
        if v["nmax"] < 1:
            problems.append("nmax must be >= 1")
        if v["dcap"] < 1:
            problems.append("dcap must be >= 1")
        if v["jobs"] < 1:
            problems.append("jobs must be >= 1")
        if v["group"] not in GROUP_SOURCES:
            problems.append(f"group must be one of {', '.join(GROUP_SOURCES)}")
        if v["group"] == "honda" and not v["u"]:
            problems.append("honda source needs a nonempty u list, e.g. --u 0,1")
        coeffs = None
        if v["group_file"]:
            if v["group"] != "lubin-tate":
                problems.append("group_file applies to the lubin-tate source")
            else:
                try:
                    coeffs = self.load_coeffs()
                except (OSError, ValueError) as exc:
                    problems.append(f"group_file: {exc}")
        if problems or not need_suites:
            return problems
        # feasibility: the torsion model at level n works in a window of
        # N*e(n) ring elements; refuse windows past the cap
        h = source_height(v["p"], v["group"], v["d"], v["u"], coeffs)
        if h == math.inf:
            problems.append("group has no finite height; the suites need finite torsion")
            return problems
        q = v["p"] ** h
        for n in range(1, v["nmax"] + 1):
            e_n = (q - 1) * q ** (n - 1)
            window = v["N"] * e_n
            if window > v["dcap"]:
                problems.append(
                    f"level {n}: window N*e = {v['N']}*{e_n} = {window} exceeds the cap "
                    f"{v['dcap']}; lower N or nmax, or raise dcap"
                )
        return problems


def build_group(cfg: RunConfig):
    coeffs = cfg.load_coeffs() if cfg.group_file else None
    return make_group(cfg.p, cfg.f, cfg.N, cfg.group, d=cfg.d, u=cfg.u,
                      coeffs=coeffs, nmax=cfg.nmax)


# ------------------------------------------------------------- suites

def _capable(group) -> bool:
    """Does the base ring carry the full scalar action (h divides f)?"""
    return group.height is not INF and group.desc.f % group.height == 0


def torsion_checks(group, cfg: RunConfig):
    q = group.q
    checks = []
    for n in range(1, cfg.nmax + 1):
        e_n = (q - 1) * q ** (n - 1)

        def degree_thunk(n=n, e_n=e_n):
            cert = certify_torsion_degree(group, n, N=4)
            ok = (cert["pure"] and cert["certified_degree"] == e_n
                  and cert["root_valuation"] == str(Fraction(1, e_n)))
            return ok, {"degree": cert["degree"], "pure": cert["pure"],
                        "root_valuation": cert["root_valuation"],
                        "polygon": cert["polygon"]}

        checks.append(Check(
            f"torsion.division-degree.n{n}",
            {"group": group.label, "level": n},
            f"relative division polynomial is pure of slope 1/{e_n} and degree {e_n}",
            degree_thunk, {"D": q**n + q, "N": 4}))

        def count_thunk(n=n):
            rec = torsion_count(group, n)
            return rec["match"], {"weierstrass_degree": rec["weierstrass_degree"],
                                  "expected": rec["expected"]}

        checks.append(Check(
            f"torsion.count.n{n}",
            {"group": group.label, "level": n},
            f"[p^{n}] has Weierstrass degree q^{n} = {q**n}",
            count_thunk, {"D": q**n + q, "N": 3}))

        def annihilation_thunk(n=n):
            model = TorsionFieldModel(group, n, cfg.N)
            t = model.apply_pi(model.z(), times=n)
            val = model.valuation(t)
            return val is INF, {"valuation": str(val)}

        checks.append(Check(
            f"torsion.annihilation.n{n}",
            {"group": group.label, "level": n},
            f"[p^{n}](z) = 0 in the level-{n} field model",
            annihilation_thunk, {"D": cfg.N * e_n, "N": cfg.N}))

        def scalars_thunk(n=n):
            rec = assumption_check(group, n, N=4)
            if _capable(group):
                ok = rec["holds"] and rec["count"] == rec["expected"]
            else:
                ok = (not rec["holds"]) and rec["mode"] == "no-module-structure"
            obs = {k: rec.get(k) for k in ("holds", "mode", "count", "expected")}
            if "valuations" in rec:
                obs["valuations"] = rec["valuations"]
            return ok, obs

        checks.append(Check(
            f"torsion.scalar-action.n{n}",
            {"group": group.label, "level": n, "full_scalars": _capable(group)},
            "digit sums hit the torsion bijectively, or the obstruction is reported",
            scalars_thunk, {"D": 4 * e_n, "N": 4}))

    if _capable(group):
        for n in range(1, min(cfg.nmax, 2) + 1):
            N_r = min(cfg.N, 5)

            def breaks_thunk(n=n, N_r=N_r):
                rec = ramification_breaks(group, n, N=N_r, cross_check=(n == 1))
                ok = rec["all_match"] and rec["identity_break"] == "inf"
                if n == 1:
                    ok = ok and all(r["match"] for r in rec["direct_level_one"])
                return ok, {"breaks": [(r["k"], r["i_sigma"]) for r in rec["breaks"]],
                            "identity_break": rec["identity_break"]}

            checks.append(Check(
                f"torsion.ramification.n{n}",
                {"group": group.label, "level": n},
                "unit scalars break at i(sigma) = q^k exactly",
                breaks_thunk, {"D": N_r * (q - 1) * q ** (n - 1), "N": N_r}))

    def mu_thunk():
        rec = mu_p_membership(group, N=min(cfg.N, 6))
        return rec["found"], {"d": rec["d"], "attempts": rec["attempts"]}

    checks.append(Check(
        "torsion.mu-p",
        {"group": group.label, "d_max": group.height},
        "the level-1 field reaches the p-th roots of unity within degree h",
        mu_thunk, {"N": min(cfg.N, 6)}))
    return checks


def endo_checks(group, cfg: RunConfig):
    p = group.desc.p
    checks = []
    rep_cache = {}

    def subfield_report():
        # shared by three checks; recomputation is deterministic, so a
        # benign race under jobs > 1 costs time only
        if "rep" not in rep_cache:
            rep_cache["rep"] = compute_endo_subfield(group)
        return rep_cache["rep"]

    def negation_thunk():
        rec = try_endomorphism(group, -1)
        M = min(4, rec["precision"])
        same = (rec["series"].reduce_precision(M)
                == group.negation_series(rec["window"], M)) if rec["success"] else False
        return rec["success"] and same, {
            "success": rec["success"],
            "matches_group_inverse": same,
            "first_coeffs": [list(map(int, rec["series"].coeff_vec(k))) for k in range(4)]
            if rec["success"] else None,
        }

    checks.append(Check(
        "endo.negation", {"group": group.label, "multiplier": -1},
        "[-1] is an endomorphism and equals the group inverse",
        negation_thunk))

    def mult_p_thunk():
        rec = try_endomorphism(group, p)
        M = min(4, rec["precision"])
        same = (rec["series"].reduce_precision(M)
                == group.pi_series(rec["window"], M)) if rec["success"] else False
        return rec["success"] and same, {"success": rec["success"], "matches_pi": same}

    checks.append(Check(
        "endo.multiplication-by-p", {"group": group.label, "multiplier": p},
        "[p] recovered from the logarithm equals the construction series",
        mult_p_thunk))

    def subfield_thunk():
        rep = subfield_report()
        consistent = rep["full_height"] == (rep["f_F"] == group.height)
        divides = math.gcd(group.desc.f, group.height) % rep["f_F"] == 0
        return consistent and divides, {
            "f_F": rep["f_F"], "full_height": rep["full_height"],
            "candidates": [(c["candidate"], c["success"]) for c in rep["candidates"]],
        }

    checks.append(Check(
        "endo.subfield", {"group": group.label, "f": group.desc.f, "h": group.height},
        "multiplier subfield degree divides gcd(f, h) and fullness is consistent",
        subfield_thunk))

    def tau_thunk():
        rep = subfield_report()
        if rep["full_height"]:
            rec = tau_infinity_check(group, report=rep)
            return rec["is_identity"], {
                "order": rec["order"], "is_identity": rec["is_identity"],
                "precision": rec["precision"],
            }
        try:
            tau_infinity_check(group, report=rep)
        except ValueError as exc:
            return True, {"refused": str(exc)}
        return False, {"refused": None}

    checks.append(Check(
        "endo.tau-power", {"group": group.label, "order": (group.q or 2) - 1},
        "the Teichmuller scalar composes to the identity, or the check refuses",
        tau_thunk))

    def closure_thunk():
        rec = multiplier_closure_sample(group, [(p, -1)])
        return rec["all_ok"], {"results": rec["results"]}

    checks.append(Check(
        "endo.closure", {"group": group.label, "pairs": [[p, -1]]},
        "sums and products of multipliers stay multipliers",
        closure_thunk))

    def agreement_thunk():
        a1 = assumption_check(group, 1, N=4)["holds"]
        rep = subfield_report()
        full = rep["full_height"]
        if full:
            tau_ok = tau_infinity_check(group, report=rep)["is_identity"]
        else:
            tau_ok = False
        return (a1 == full == tau_ok), {
            "scalar_bijection": a1, "full_height": full, "tau_identity": tau_ok,
        }

    checks.append(Check(
        "endo.predicate-agreement", {"group": group.label, "level": 1},
        "scalar bijection, full height, and tau identity agree",
        agreement_thunk))
    return checks


def matrix_checks(group, cfg: RunConfig):
    p = group.desc.p
    q = group.q
    checks = []

    def grid_thunk():
        dims = {}
        ok = True
        for m in range(1, 4):
            for n in range(1, 4):
                dim = commutant_dimension(build_phi_zeta(m, n), p=p)
                dims[f"{m}x{n}"] = dim
                ok = ok and dim == n * n * m
        return ok, {"dimensions": dims}

    checks.append(Check(
        "matrices.commutant-grid", {"p": p, "range": "m,n <= 3"},
        "commutant of the block-cyclic matrix has dimension n^2 m",
        grid_thunk))

    def circulant_thunk():
        import itertools as it
        tested = 0
        for m in (1, 2, 3):
            A = build_phi_zeta(m, 1).block
            for entries in it.product(range(3), repeat=m * m):
                Y = [list(entries[r * m:(r + 1) * m]) for r in range(m)]
                brute = all(
                    sum(A[i][k] * Y[k][j] for k in range(m)) % 3
                    == sum(Y[i][k] * A[k][j] for k in range(m)) % 3
                    for i in range(m) for j in range(m)
                )
                if check_relations(Y) != brute:
                    return False, {"counterexample": Y}
                tested += 1
        return True, {"matrices_tested": tested}

    checks.append(Check(
        "matrices.circulant-agreement", {"field": "F_3", "range": "m <= 3"},
        "circulant pattern is equivalent to commutation, exhaustively",
        circulant_thunk))

    for n in range(1, min(cfg.nmax, 2) + 1):
        def order_thunk(n=n):
            cert = certify_torsion_degree(group, n, N=4)
            order = unit_quotient_order(q, n)
            return cert["certified_degree"] == order, {
                "unit_quotient_order": order,
                "certified_degree": cert["certified_degree"],
            }

        checks.append(Check(
            f"matrices.unit-quotient-degree.n{n}",
            {"group": group.label, "level": n},
            "unit-filtration quotient order equals the torsion-field degree",
            order_thunk))

    def shape_thunk():
        rep = compute_endo_subfield(group)
        m = rep["f_F"]
        n = group.height // m
        dim = commutant_dimension(build_phi_zeta(m, n), p=p)
        return dim == n * n * m, {"m": m, "n": n, "commutant_dimension": dim}

    checks.append(Check(
        "matrices.block-shape", {"group": group.label},
        "the group's own (m, n) block model has commutant dimension n^2 m",
        shape_thunk))
    return checks


# ------------------------------------------------- seeded series properties

def _random_series(desc, D, rng, unit_linear=False, zero_const=True):
    s = TruncSeries1.zero(desc, D)
    for k in range(D):
        for j in range(desc.f):
            s.data[k, j] = rng.randrange(desc.pN)
    if zero_const:
        s.data[0, :] = 0
    if unit_linear:
        s.data[1, 0] = 1 + desc.p * rng.randrange(desc.p ** (desc.N - 1))
        for j in range(1, desc.f):
            s.data[1, j] = 0
    return s


def roundtrip_checks(group, seed: int, cases: int = 10, D: int = 12, N: int = 6):
    """Seeded property suites: reversion round-trip, functional inverses of
    the logarithm pair, and composition associativity."""
    desc = RingDescriptor(group.desc.p, group.desc.f, N)
    x = TruncSeries1.x(desc, D)
    checks = []

    def reversion_thunk():
        rng = random.Random(seed)
        for i in range(cases):
            s = _random_series(desc, D, rng, unit_linear=True)
            r = s.reversion()
            if s.compose(r) != x or r.compose(s) != x:
                return False, {"case": i}
        return True, {"cases": cases}

    checks.append(Check(
        "series.reversion-roundtrip", {"seed": seed, "cases": cases},
        "compositional inverse inverts on both sides",
        reversion_thunk, {"D": D, "N": N}))

    def logexp_thunk():
        log = group.logarithm(D)
        exp = group.exponential(D)
        xs = TruncSeries1.x(group.desc, D, domain="scaled")
        group_ok = exp.compose(log) == xs and log.compose(exp) == xs
        rng = random.Random(seed + 1)
        for i in range(cases):
            s = _random_series(desc, D, rng, unit_linear=True).to_scaled()
            r = s.reversion()
            if s.compose(r) != r.compose(s):
                return False, {"case": i}
        return group_ok, {"group_pair_exact": group_ok, "cases": cases}

    checks.append(Check(
        "series.log-exp-roundtrip", {"group": group.label, "seed": seed + 1, "cases": cases},
        "exponential and logarithm are exact functional inverses",
        logexp_thunk, {"D": D, "N": N}))

    def assoc_thunk():
        rng = random.Random(seed + 2)
        for i in range(cases):
            a = _random_series(desc, D, rng)
            b = _random_series(desc, D, rng)
            c = _random_series(desc, D, rng)
            if a.compose(b).compose(c) != a.compose(b.compose(c)):
                return False, {"case": i}
        return True, {"cases": cases}

    checks.append(Check(
        "series.compose-associativity", {"seed": seed + 2, "cases": cases},
        "composition of truncated series is associative",
        assoc_thunk, {"D": D, "N": N}))
    return checks


# ------------------------------------------------------------- commands

def serialize_group(group, cfg: RunConfig) -> dict:
    D_law = 4
    N_echo = min(cfg.N, group.max_law_precision(D_law))
    F2 = group.group_law2(D_law, N_echo)
    law = {}
    for i in range(D_law):
        for j in range(D_law):
            vec = [int(v) for v in F2.data[i, j]]
            if any(vec):
                law[f"{i},{j}"] = vec
    q = group.q
    D_pi = (q + 2) if q is not None else 6
    pi = group.pi_series(D_pi, N_echo) if q is not None else None
    return {
        "label": group.label,
        "kind": group.kind,
        "p": group.desc.p,
        "f": group.desc.f,
        "working_precision": cfg.N,
        "construction_precision": group.desc.N,
        "height": "inf" if group.height is INF else group.height,
        "q": q,
        "group_law": law,
        "pi_series": [[int(v) for v in pi.data[k]] for k in range(D_pi)] if pi else None,
    }


def collect_checks(command: str, group, cfg: RunConfig):
    checks = []
    if command in ("torsion", "verify"):
        checks += torsion_checks(group, cfg)
    if command in ("endo", "verify"):
        checks += endo_checks(group, cfg)
    if command in ("matrices", "verify"):
        checks += matrix_checks(group, cfg)
    if command == "verify":
        checks += roundtrip_checks(group, cfg.seed)
    return checks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fglab",
        description="exact-arithmetic laboratory for one-dimensional formal groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("construct", "build the configured group and echo its law"),
        ("torsion", "division polynomials, torsion fields, ramification"),
        ("endo", "multiplier-ring certificates"),
        ("matrices", "block-model linear algebra"),
        ("verify", "every suite plus seeded series properties"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--p", type=int, help="residue characteristic (odd prime)")
        sp.add_argument("--f", type=int, help="residue degree of the base ring")
        sp.add_argument("--N", type=int, help="working precision (digits of p)")
        sp.add_argument("--group", choices=GROUP_SOURCES, help="group source")
        sp.add_argument("--d", type=int, help="height of the lubin-tate source")
        sp.add_argument("--u", help="comma-separated u list for the honda source")
        sp.add_argument("--group-file", dest="group_file",
                        help="file of integer series coefficients for a custom lubin-tate source")
        sp.add_argument("--nmax", type=int, help="largest torsion level")
        sp.add_argument("--dcap", type=int, help="hard cap on evaluation windows")
        sp.add_argument("--jobs", type=int, help="worker pool width")
        sp.add_argument("--seed", type=int, help="seed for the property suites")
        sp.add_argument("--out", help="write the JSON report here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            values.update(load_config_file(args.config))
        except (OSError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        cfg = RunConfig(values)
    except (TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    problems = cfg.validate(need_suites=args.command != "construct")
    if problems:
        for problem in problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    try:
        group = build_group(cfg)
    except (ValueError, ArithmeticError) as exc:
        print(f"config error: the group could not be constructed: {exc}", file=sys.stderr)
        return 2

    if args.command == "construct":
        doc = {"schema_version": 1, "config": cfg.to_dict(), "group": serialize_group(group, cfg)}
        text = json.dumps(doc, indent=2, sort_keys=True)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text + "\n")
            print(f"group written to {cfg.out}")
        else:
            print(text)
        return 0

    t0 = time.perf_counter()
    checks = collect_checks(args.command, group, cfg)
    records = run_checks(checks, jobs=cfg.jobs)
    report = build_report(dict(cfg.to_dict(), command=args.command), records,
                          time.perf_counter() - t0)
    print(render_summary(report))
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
        print(f"report written to {cfg.out}")
    else:
        print(text)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
