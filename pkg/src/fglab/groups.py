"""Formal group laws over unramified p-adic coefficient rings.

Three construction routes:

* multiplicative_group: F = X + Y + XY with everything in closed form;
* lubin_tate_group: F solved degree by degree from the equivariance
  F(f(X), f(Y)) = f(F(X, Y)) for a distinguished polynomial f = pX + ...
  congruent to X^q mod p;
* honda_group: logarithm built from the functional equation
  lam(X) = X + sum_i u_i lam(X^{p^i}) / p over Z_p, with the
  multiplication-by-p series recovered from lam([p]) = p lam by a Newton
  iteration carried out mod a high power of p.

Module structure ([a]-series for ring scalars a) is computed by the
commutation recursion: g with linear term a and g(f(X)) = f(g(X)) is solved
one coefficient at a time, the degree-k defect divided by p^k - p.  A defect
that is not divisible by p certifies that no such series exists; the degree
where that happens is reported as the obstruction.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .padic import (
    INF,
    Embedding,
    RingDescriptor,
    UnramifiedRingElem,
    _vec_mulmod,
)
from .series import (
    TruncSeries1,
    TruncSeries2,
    _mul_data,
    _scalar_mul_data,
    embed_series,
    embed_series2,
    inject_x,
    inject_y,
)


class ObstructionError(ValueError):
    """Raised when a commutation solve hits a non-divisible defect."""

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"no commuting series; obstruction at degree {degree}")


def _precision_cushion(D: int, q: int) -> int:
    """Digits lost by the cascade of divisions by p^k - p up to degree D."""
    return 2 + int(math.log(max(D, 2)) / math.log(q))


class FrobeniusSeries:
    """Distinguished polynomial f = pX + ... with f = X^q mod p, q = p^h."""

    def __init__(self, desc: RingDescriptor, coeffs):
        self.desc = desc
        poly = TruncSeries1.from_coeffs(desc, coeffs, D=len(coeffs))
        p = desc.p
        if any(v != 0 for v in poly.data[0]):
            raise ValueError("constant term must vanish")
        if tuple(poly.data[1]) != (p,) + (0,) * (desc.f - 1):
            raise ValueError("linear coefficient must be exactly p")
        units = [k for k in poly.nonzero_degrees() if any(int(v) % p for v in poly.data[k])]
        if len(units) != 1:
            raise ValueError("reduction mod p must be a single power of X")
        q = units[0]
        h = round(math.log(q) / math.log(p))
        if p**h != q:
            raise ValueError("unit term degree must be a power of p")
        res = [int(v) % p for v in poly.data[q]]
        if res != [1] + [0] * (desc.f - 1):
            raise ValueError("reduction mod p must equal X^q")
        self.coeff_rows = [tuple(int(v) for v in poly.data[k]) for k in range(len(coeffs))]
        self.degree = len(coeffs) - 1
        self.q = q
        self.h = h

    def at(self, D: int, N: int | None = None) -> TruncSeries1:
        desc = self.desc if N is None else self.desc.at_precision(N)
        if D <= self.degree:
            raise ValueError("window too small for the polynomial")
        s = TruncSeries1.zero(desc, D)
        for k, row in enumerate(self.coeff_rows):
            for j, v in enumerate(row):
                s.data[k, j] = v % desc.pN
        return s


def _line_outer(xs: TruncSeries1, ys: TruncSeries1) -> TruncSeries2:
    """Product of a series in X alone and a series in Y alone."""
    desc, D, domain = xs.desc, xs.D, xs.domain
    f = desc.f
    m = desc.pN if domain == "integral" else None
    dtype = xs.data.dtype
    cross = [np.zeros((D, D), dtype=dtype) for _ in range(2 * f - 1)]
    for c1 in range(f):
        xv = xs.data[:, c1]
        if not xv.any():
            continue
        for c2 in range(f):
            yv = ys.data[:, c2]
            if not yv.any():
                continue
            cross[c1 + c2] += np.outer(xv, yv)
            if m is not None:
                np.mod(cross[c1 + c2], m, out=cross[c1 + c2])
    rows = desc.reduction_rows()
    out = np.zeros((D, D, f), dtype=dtype)
    for j in range(f):
        out[:, :, j] = cross[j]
    for t in range(f - 1):
        c = cross[f + t]
        if not c.any():
            continue
        for j in range(f):
            r = rows[t][j] % m if m is not None else rows[t][j]
            if r:
                out[:, :, j] += c * r
    if m is not None:
        out = out % m
    mask = np.add.outer(np.arange(D), np.arange(D)) >= D
    out[mask] = 0
    return TruncSeries2(desc, D, domain, out)


def solve_equivariant_group_law(f_ser: TruncSeries1, D2: int) -> TruncSeries2:
    """The unique F = X + Y + ... with F(f(X), f(Y)) = f(F(X, Y)).

    Works mod the precision of f_ser; the caller keeps a cushion of
    _precision_cushion(D2, q) digits for the divisions by p^k - p.
    """
    desc = f_ser.desc
    p, m = desc.p, desc.pN
    f2 = f_ser.lift(D2) if f_ser.D < D2 else f_ser.truncate(D2)
    fpow = [TruncSeries1.zero(desc, D2), f2]
    fpow[0].data[0, 0] = 1
    for i in range(2, D2):
        fpow.append(fpow[-1] * f2)
    nz = f2.nonzero_degrees()
    F = TruncSeries2.from_triples(desc, [(1, 0, 1), (0, 1, 1)], D2)
    A = inject_x(f2) + inject_y(f2)

    def f_of(F_):
        out = None
        for i in nz:
            term = F_.scalar_mul(tuple(f2.data[i])) if i == 1 else \
                _pow2(F_, i).scalar_mul(tuple(f2.data[i]))
            out = term if out is None else out + term
        return out

    B = f_of(F)
    dirty = False
    for k in range(2, D2):
        if dirty:
            B = f_of(F)
            dirty = False
        w1 = pow(p, k - 1, m)
        inv = pow((w1 - 1) % m, -1, m)
        changed = []
        for i in range(k + 1):
            j = k - i
            d = (B.data[i, j] - A.data[i, j]) % m
            if not d.any():
                continue
            if any(int(v) % p for v in d):
                raise ObstructionError(k, f"group law solve obstructed at degree {k}")
            h = tuple(int(v) // p * inv % m for v in d)
            F.data[i, j] = h
            changed.append((i, j, h))
        for i, j, h in changed:
            A = A + _line_outer(fpow[i].scalar_mul(h), fpow[j])
            dirty = True
    B = f_of(F)
    keep = max(1, desc.N - _precision_cushion(D2, p ** _q_of_f(f2)))
    guard = p**keep
    assert ((A.data - B.data) % guard == 0).all(), "equivariance failed"
    return F


def _q_of_f(f2: TruncSeries1) -> int:
    p = f2.desc.p
    for k in f2.nonzero_degrees():
        if k > 1 and any(int(v) % p for v in f2.data[k]):
            return round(math.log(k) / math.log(p))
    return 1


def _pow2(F: TruncSeries2, e: int) -> TruncSeries2:
    out = TruncSeries2.zero(F.desc, F.D, F.domain)
    out.data[0, 0, 0] = 1 if F.domain == "integral" else Fraction(1)
    base = F
    while e:
        if e & 1:
            out = out * base
        e >>= 1
        if e:
            base = base * base
    return out


# ----------------------------------------------------------------- honda

def honda_log_coeffs(p: int, u, D: int):
    """Exact logarithm coefficients from lam = X + sum u_i lam(X^{p^i})/p."""
    lam = [Fraction(0)] * D
    if D > 1:
        lam[1] = Fraction(1)
    for k in range(2, D):
        acc = Fraction(0)
        for i, ui in enumerate(u, start=1):
            step = p**i
            if ui and k % step == 0:
                acc += ui * lam[k // step]
        if acc:
            lam[k] = acc / p
    return lam


def _frac_p_val(x: Fraction, p: int) -> int:
    if x == 0:
        return 10**9
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _data_exact_div_p(data, p: int, k: int):
    m = p**k
    assert (data % m == 0).all(), "expected divisibility failed"
    return data // m


def _honda_pi_series(p: int, u, D: int, N_out: int) -> TruncSeries1:
    """[p]-series of the honda group: Newton solve of lam(g) = p lam."""
    lam = honda_log_coeffs(p, u, D)
    jmax = max((-_frac_p_val(c, p) for c in lam if c), default=0)
    scale = p**jmax
    levels = max(1, math.ceil(math.log2(max(D, 2))))
    K = N_out + 2 * jmax * levels + jmax + 2
    desc = RingDescriptor(p, 1, K)
    m = desc.pN
    L = TruncSeries1.zero(desc, D)
    for k, c in enumerate(lam):
        if c:
            val = c * scale
            assert val.denominator == 1
            L.data[k, 0] = int(val) % m
    target = L.scalar_mul(p)
    Lp = L.derivative()
    g = TruncSeries1.zero(desc, D)
    g.data[1, 0] = p
    d = 1
    while d < D:
        d = min(2 * d, D)
        gt = g.truncate(d)
        err = L.truncate(d).compose(gt) - target.truncate(d)
        if not err.is_zero():
            Up = Lp.truncate(d).compose(gt)
            U = TruncSeries1(desc, d, "integral", _data_exact_div_p(Up.data, p, jmax))
            corr = err * U.invert_unit()
            corr.data = _data_exact_div_p(corr.data, p, jmax)
            gt = gt - corr
        g = gt.lift(D)
    out_desc = RingDescriptor(p, 1, N_out)
    out = TruncSeries1.zero(out_desc, D)
    out.data[:, 0] = g.data[:, 0] % out_desc.pN
    return out


def _frobenius_log(fs: FrobeniusSeries, desc: RingDescriptor, D: int) -> TruncSeries1:
    """Logarithm of a Lubin-Tate group, exact.

    The stored integer coefficient rows define the group exactly, so
    log(f(X)) = p log(X) determines the coefficients by an exact rational
    recursion: b_n = [X^n](sum_{k<n} b_k f^k) / (p - p^n)."""
    p = desc.p
    fx = TruncSeries1.zero(desc, D, "scaled")
    for k, row in enumerate(fs.coeff_rows):
        if k < D:
            for j, v in enumerate(row):
                fx.data[k, j] = Fraction(v)
    out = TruncSeries1.zero(desc, D, "scaled")
    out.data[1, 0] = Fraction(1)
    comp = fx  # running sum_{k<n} b_k f^k, here b_1 f
    fpow = fx
    for n in range(2, D):
        div = p - p**n
        out.data[n] = np.array([c / div for c in comp.data[n]], dtype=object)
        if n < D - 1:
            fpow = fpow * fx
            if any(v != 0 for v in out.data[n]):
                comp = comp + fpow.scalar_mul(tuple(out.data[n]))
    return out


def _exp_log_group_law(log_ser: TruncSeries1, D2: int) -> TruncSeries2:
    """F = exp(log X + log Y) from an exact scaled logarithm."""
    lam = log_ser.truncate(D2) if log_ser.D >= D2 else log_ser.lift(D2)
    exp = lam.reversion()
    L = inject_x(lam) + inject_y(lam)
    acc = TruncSeries2.zero(lam.desc, D2, "scaled")
    for k in range(D2 - 1, 0, -1):
        acc = acc * L
        acc.data[0, 0] = acc.data[0, 0] + exp.data[k]
    acc = acc * L
    return acc


# --------------------------------------------------------------- the group

class FormalGroupLaw:
    """A one-dimensional formal group law with its coefficient-ring action.

    kind is one of "gm", "lubin_tate", "honda", "honda_ext" (an unramified
    base change of a honda group).  Heavy artifacts (the [p]-series at a
    degree window, the two-variable law, module structures) are built on
    demand and cached per window/precision.
    """

    def __init__(self, desc, kind, label, frobenius=None, u=None, base=None, embedding=None):
        self.desc = desc
        self.kind = kind
        self.label = label
        self.frobenius = frobenius
        self.u = u
        self.base = base
        self.embedding = embedding
        self._height = frobenius.h if frobenius is not None else None
        if kind in ("honda", "honda_ext"):
            uu = u if u is not None else base.u
            self._height = next((i for i, ui in enumerate(uu, start=1) if ui % desc.p), INF)
            self.u = uu
        if kind == "gm":
            self._height = 1
        self._pi_cache = {}
        self._f2_cache = {}
        self._log_cache = {}
        self._module_cache = {}

    # ------------------------------------------------------------- basics
    @property
    def height(self):
        return self._height

    @property
    def q(self):
        """p^height, or None for infinite height."""
        if self._height == INF:
            return None
        return self.desc.p**self._height

    @property
    def q_eff(self) -> int:
        return self.q if self.q else self.desc.p

    def __repr__(self):
        return f"FormalGroupLaw({self.label}, p={self.desc.p}, f={self.desc.f}, h={self.height})"

    # ---------------------------------------------------------- [p]-series
    def pi_series(self, D: int, N: int | None = None) -> TruncSeries1:
        N = self.desc.N if N is None else N
        if N > self.desc.N:
            raise ValueError("requested precision above construction precision")
        if self.q is not None and D <= self.q:
            raise ValueError("window must exceed the height index")
        key = (D, N)
        if key in self._pi_cache:
            return self._pi_cache[key]
        for (D0, N0), s in self._pi_cache.items():
            if D0 == D and N0 >= N:
                out = s.reduce_precision(N)
                self._pi_cache[key] = out
                return out
        p = self.desc.p
        if self.kind == "gm":
            desc = self.desc.at_precision(N)
            s = TruncSeries1.zero(desc, D)
            for k in range(1, min(p, D - 1) + 1):
                s.data[k, 0] = math.comb(p, k) % desc.pN
            out = s
        elif self.kind == "lubin_tate":
            out = self.frobenius.at(D, N)
        elif self.kind == "honda":
            out = _honda_pi_series(p, self.u, D, N)
        else:
            base_pi = self.base.pi_series(D, N)
            out = embed_series(base_pi, self.embedding, self.desc.at_precision(N))
        if out.first_unit_index() != (self.q if self.q else None):
            raise AssertionError("multiplication-by-p series has wrong unit index")
        self._pi_cache[key] = out
        return out

    def max_law_precision(self, D2: int) -> int:
        """Highest N at which group_law2(D2, N) is computable."""
        if self.kind == "lubin_tate":
            return self.desc.N - _precision_cushion(D2, self.q_eff)
        return self.desc.N

    # ----------------------------------------------------- two-variable law
    def group_law2(self, D2: int, N: int | None = None) -> TruncSeries2:
        N = N if N is not None else max(1, self.desc.N - _precision_cushion(D2, self.q_eff))
        key = (D2, N)
        if key in self._f2_cache:
            return self._f2_cache[key]
        if self.kind == "gm":
            desc = self.desc.at_precision(N)
            out = TruncSeries2.from_triples(desc, [(1, 0, 1), (0, 1, 1), (1, 1, 1)], D2)
        elif self.kind == "lubin_tate":
            cushion = _precision_cushion(D2, self.q_eff)
            if N + cushion > self.desc.N:
                raise ValueError("construct the group at higher precision first")
            f_work = self.pi_series(D2, N + cushion)
            F = solve_equivariant_group_law(f_work, D2)
            desc_out = self.desc.at_precision(N)
            out = TruncSeries2.zero(desc_out, D2)
            out.data[...] = F.data % desc_out.pN
        elif self.kind == "honda":
            lam = self.logarithm(D2)
            exact = _exp_log_group_law(lam, D2)
            out = _scaled2_to_integral(exact, self.desc.at_precision(N))
        else:
            base_F = self.base.group_law2(D2, N)
            out = embed_series2(base_F, self.embedding, self.desc.at_precision(N))
        self._f2_cache[key] = out
        return out

    # ------------------------------------------------------------ logarithm
    def logarithm(self, D: int) -> TruncSeries1:
        if D in self._log_cache:
            return self._log_cache[D]
        if self.kind == "gm":
            desc = self.desc
            s = TruncSeries1.zero(desc, D, "scaled")
            for k in range(1, D):
                s.data[k, 0] = Fraction((-1) ** (k + 1), k)
            out = s
        elif self.kind == "lubin_tate":
            out = _frobenius_log(self.frobenius, self.desc, D)
        elif self.kind == "honda":
            lam = honda_log_coeffs(self.desc.p, self.u, D)
            s = TruncSeries1.zero(self.desc, D, "scaled")
            for k, c in enumerate(lam):
                s.data[k, 0] = c
            out = s
        elif self.kind == "honda_ext":
            base_log = self.base.logarithm(D)
            out = embed_series(base_log, None, self.desc)
        else:
            F = self.group_law2(D)
            dy = F.partial_y_at_zero().to_scaled()
            out = dy.invert_unit().integrate().truncate(D)
        self._log_cache[D] = out
        return out

    def exponential(self, D: int) -> TruncSeries1:
        return self.logarithm(D).reversion()

    @property
    def exact_log(self) -> bool:
        """True when the logarithm is exact rational data (no mod-p^N loss)."""
        return self.kind in ("gm", "lubin_tate", "honda", "honda_ext")

    # --------------------------------------------------------------- module
    def module(self, D: int, N_out: int) -> "ModuleStructure":
        key = (D, N_out)
        if key not in self._module_cache:
            self._module_cache[key] = ModuleStructure(self, D, N_out)
        return self._module_cache[key]

    def multiplication_by(self, a, D: int, N: int | None = None) -> TruncSeries1:
        N = N if N is not None else max(1, self.desc.N - _precision_cushion(D, self.q_eff))
        return self.module(D, N).multiplication_by(a)

    def negation_series(self, D: int, N: int | None = None) -> TruncSeries1:
        return self.multiplication_by(-1, D, N)

    def formal_sum(self, xs: TruncSeries1, ys: TruncSeries1, N: int | None = None) -> TruncSeries1:
        from .series import substitute2

        F = self.group_law2(xs.D, N)
        return substitute2(F, xs, ys)

    # --------------------------------------------------------- base change
    def base_change(self, f_new: int) -> "FormalGroupLaw":
        """Coefficientwise image over the unramified extension with residue
        degree f_new (a multiple of the current one)."""
        if f_new % self.desc.f:
            raise ValueError("target residue degree must be a multiple of the current one")
        if f_new == self.desc.f:
            return self
        dst = RingDescriptor(self.desc.p, f_new, self.desc.N)
        label = f"{self.label}@f={f_new}"
        if self.kind == "gm":
            return multiplicative_group(dst, label=label)
        if self.kind == "lubin_tate":
            emb = Embedding(self.desc, dst)
            coeffs = [emb(UnramifiedRingElem(self.desc, list(row))).coeffs
                      for row in self.frobenius.coeff_rows]
            return lubin_tate_group(dst, coeffs, label=label)
        base = self.base if self.kind == "honda_ext" else self
        emb = Embedding(base.desc, dst)
        return FormalGroupLaw(dst, "honda_ext", label, base=base, embedding=emb)


def _scaled2_to_integral(F: TruncSeries2, desc: RingDescriptor) -> TruncSeries2:
    out = TruncSeries2.zero(desc, F.D, "integral")
    for i in range(F.D):
        for j in range(F.D - i):
            if any(v != 0 for v in F.data[i, j]):
                e = desc.element_from_rationals(list(F.data[i, j]))
                out.data[i, j] = np.array(e.coeffs, dtype=out.data.dtype)
    return out


def multiplicative_group(desc: RingDescriptor, label: str | None = None) -> FormalGroupLaw:
    return FormalGroupLaw(desc, "gm", label or f"gm(p={desc.p},f={desc.f})")


def lubin_tate_group(desc: RingDescriptor, coeffs, label: str | None = None) -> FormalGroupLaw:
    frob = FrobeniusSeries(desc, coeffs)
    return FormalGroupLaw(desc, "lubin_tate",
                          label or f"lt(p={desc.p},f={desc.f},q={frob.q})",
                          frobenius=frob)


def honda_group(desc: RingDescriptor, u, label: str | None = None) -> FormalGroupLaw:
    if desc.f != 1:
        raise ValueError("honda construction given over Z_p; base change afterwards")
    u = tuple(int(x) for x in u)
    return FormalGroupLaw(desc, "honda", label or f"honda(p={desc.p},u={u})", u=u)


def height_from_pi_series(s: TruncSeries1):
    """Height read off the first unit coefficient index of a [p]-series;
    INF when no unit coefficient is visible in the window."""
    k = s.first_unit_index()
    if k is None:
        return INF
    p = s.desc.p
    h = round(math.log(k) / math.log(p))
    if p**h != k:
        raise ValueError(f"first unit index {k} is not a power of p")
    return h


def measured_height(group: FormalGroupLaw, h_max: int = 4):
    """Probe the height from the [p]-series up to index p^h_max."""
    D = group.desc.p**h_max + 2
    return height_from_pi_series(group.pi_series(D, min(group.desc.N, 4)))


# -------------------------------------------------------- module structure

class ModuleStructure:
    """[a]-series solver for one group at a fixed degree window and output
    precision.  Internally works with a digit cushion over N_out and keeps
    the powers f^j cached for the whole window."""

    def __init__(self, group: FormalGroupLaw, D: int, N_out: int):
        self.group = group
        self.D = D
        self.N_out = N_out
        self.cushion = _precision_cushion(D, group.q_eff)
        N_work = N_out + self.cushion
        if N_work > group.desc.N:
            raise ValueError("construct the group at higher precision first")
        self.desc_w = group.desc.at_precision(N_work)
        self.m = self.desc_w.pN
        fs = group.pi_series(D, N_work)
        self.f_data = fs.data
        self.f_nz = fs.nonzero_degrees()
        self.mdeg = self.f_nz[-1]
        self._fpow = None
        self._cache = {}

    def _fpow_list(self):
        if self._fpow is not None:
            return self._fpow
        D, m = self.D, self.m
        terms = [(k, tuple(self.f_data[k])) for k in self.f_nz]
        sparse = len(terms) <= 6
        fpow = [None, self.f_data]
        cur = self.f_data
        for _ in range(2, D):
            if sparse:
                nxt = np.zeros_like(cur)
                for d, vec in terms:
                    if d < D:
                        seg = _scalar_mul_data(cur[: D - d], vec, self.desc_w, m)
                        nxt[d:] = (nxt[d:] + seg) % m
            else:
                nxt = _mul_data(cur, self.f_data, self.desc_w, D, m)
            fpow.append(nxt)
            cur = nxt
        self._fpow = fpow
        return fpow

    def _coerce_scalar(self, a):
        f = self.desc_w.f
        if isinstance(a, UnramifiedRingElem):
            if not a.desc.same_field(self.desc_w):
                raise ValueError("scalar from a different ring")
            if a.desc.N < self.desc_w.N:
                raise ValueError("scalar needs at least the working precision")
            return tuple(int(v) % self.m for v in a.coeffs)
        if isinstance(a, int):
            return (a % self.m,) + (0,) * (f - 1)
        if isinstance(a, (tuple, list)):
            return tuple(int(v) % self.m for v in a)
        raise TypeError("unsupported scalar")

    def try_multiplication(self, a):
        """Returns (series, None) or (None, obstruction_degree)."""
        a_vec = self._coerce_scalar(a)
        if a_vec in self._cache:
            return self._cache[a_vec]
        res = self._solve(a_vec)
        self._cache[a_vec] = res
        return res

    def multiplication_by(self, a) -> TruncSeries1:
        ser, obs = self.try_multiplication(a)
        if obs is not None:
            raise ObstructionError(obs)
        return ser

    def first_obstruction(self, a):
        return self.try_multiplication(a)[1]

    def _solve(self, a_vec):
        D, m, p = self.D, self.m, self.desc_w.p
        fdim = self.desc_w.f
        desc_w = self.desc_w
        fpow = self._fpow_list()
        dtype = self.f_data.dtype
        g = np.zeros((D, fdim), dtype=dtype)
        g[1] = a_vec
        one = (1,) + (0,) * (fdim - 1)
        # powers of g, index 0..mdeg; g starts as a*X
        Gpow = [np.zeros((D, fdim), dtype=dtype) for _ in range(self.mdeg + 1)]
        Gpow[0][0] = one
        acc = one
        for i in range(1, self.mdeg + 1):
            acc = _vec_mulmod(acc, a_vec, desc_w, m)
            if i < D:
                Gpow[i][i] = acc
        GF = _scalar_mul_data(self.f_data, a_vec, desc_w, m)
        f_terms = [(i, tuple(self.f_data[i])) for i in self.f_nz]

        def rebuild_FG():
            out = np.zeros((D, fdim), dtype=dtype)
            for i, c in f_terms:
                out = (out + _scalar_mul_data(Gpow[i], c, desc_w, m)) % m
            return out

        FG = rebuild_FG()
        for k in range(2, D):
            defect = (FG[k] - GF[k]) % m
            if not defect.any():
                continue
            if any(int(v) % p for v in defect):
                return (None, k)
            w = pow(p, k - 1, m)
            inv = pow((w - 1) % m, -1, m)
            gk = tuple((int(v) // p * inv) % m for v in defect)
            g[k] = gk
            GF = (GF + _scalar_mul_data(fpow[k], gk, desc_w, m)) % m
            self._update_powers(Gpow, k, gk)
            FG = rebuild_FG()
        ser = TruncSeries1(desc_w, D, "integral", g)
        return (ser.reduce_precision(self.N_out), None)

    def _update_powers(self, Gpow, k, gk):
        D, m = self.D, self.m
        desc_w = self.desc_w
        smax_global = (D - 1) // k
        tpow = [(1,) + (0,) * (desc_w.f - 1), gk]
        for i in range(self.mdeg, 0, -1):
            smax = min(i, smax_global)
            acc = Gpow[i].copy()
            for s in range(1, smax + 1):
                while len(tpow) <= s:
                    tpow.append(_vec_mulmod(tpow[-1], gk, desc_w, m))
                shift = k * s
                if shift >= D:
                    break
                comb = math.comb(i, s) % m
                cvec = tuple(v * comb % m for v in tpow[s])
                seg = _scalar_mul_data(Gpow[i - s][: D - shift], cvec, desc_w, m)
                acc[shift:] = (acc[shift:] + seg) % m
            Gpow[i] = acc


# -------------------------------------------------- axiom and sanity checks

def _poly3_mul(A: dict, B: dict, desc, m, D3):
    out = {}
    for (i1, j1, k1), v1 in A.items():
        for (i2, j2, k2), v2 in B.items():
            i, j, k = i1 + i2, j1 + j2, k1 + k2
            if i + j + k >= D3:
                continue
            w = _vec_mulmod(v1, v2, desc, m)
            key = (i, j, k)
            if key in out:
                out[key] = tuple((x + y) % m for x, y in zip(out[key], w))
            else:
                out[key] = tuple(x % m for x in w)
    return {kk: v for kk, v in out.items() if any(v)}


def _compose2_into3(F: TruncSeries2, G: dict, H: dict, D3: int):
    desc = F.desc
    m = desc.pN
    one = {(0, 0, 0): (1,) + (0,) * (desc.f - 1)}
    Gp = [one]
    Hp = [one]
    for _ in range(1, D3):
        Gp.append(_poly3_mul(Gp[-1], G, desc, m, D3))
        Hp.append(_poly3_mul(Hp[-1], H, desc, m, D3))
    out: dict = {}
    for i in range(min(F.D, D3)):
        for j in range(min(F.D - i, D3)):
            vec = tuple(int(v) % m for v in F.data[i, j])
            if not any(vec):
                continue
            term = _poly3_mul(Gp[i], Hp[j], desc, m, D3)
            for key, v in term.items():
                w = _vec_mulmod(v, vec, desc, m)
                if key in out:
                    out[key] = tuple((x + y) % m for x, y in zip(out[key], w))
                else:
                    out[key] = w
    return {kk: v for kk, v in out.items() if any(v)}


def check_group_axioms(group: FormalGroupLaw, D2: int | None = None, D3: int | None = None,
                       N: int | None = None):
    """Identity, commutativity, associativity on explicit windows; raises on
    failure."""
    q = group.q_eff
    D2 = D2 if D2 is not None else max(q + 4, 12)
    D3 = D3 if D3 is not None else max(q + 3, 6)
    F = group.group_law2(D2, N)
    x = TruncSeries1.x(F.desc, D2)
    if not F.x_part() == x:
        raise AssertionError("F(X, 0) != X")
    if not F.y_part() == x:
        raise AssertionError("F(0, Y) != Y")
    if not F.swap() == F:
        raise AssertionError("F not commutative")
    desc = F.desc
    m = desc.pN
    one = (1,) + (0,) * (desc.f - 1)
    X3 = {(1, 0, 0): one}
    Y3 = {(0, 1, 0): one}
    Z3 = {(0, 0, 1): one}
    Fxy = _compose2_into3(F, X3, Y3, D3)
    Fyz = _compose2_into3(F, Y3, Z3, D3)
    left = _compose2_into3(F, Fxy, Z3, D3)
    right = _compose2_into3(F, X3, Fyz, D3)
    if left != right:
        raise AssertionError("F not associative")
    return True
