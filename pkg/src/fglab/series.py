"""Truncated power series over unramified p-adic coefficient rings.

A series is a coefficient array of shape (D, f): D tracked degrees, f ring
components per coefficient.  Two domains are supported:

* "integral": entries are ints reduced mod p^N (int64 arrays when the
  convolution bound D * p^{2N} fits in a machine word, object arrays
  otherwise);
* "scaled": entries are exact Fractions, no modular reduction.  This is the
  domain for logarithms and anything with p in denominators; coefficients
  are viewed as ScaledFieldElem on request.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .padic import (
    INF,
    RingDescriptor,
    ScaledFieldElem,
    UnramifiedRingElem,
    rational_vec_valuation,
)

_INT64_BUDGET = 2**62


def fits_int64(desc: RingDescriptor, D: int) -> bool:
    return D * (desc.pN - 1) ** 2 < _INT64_BUDGET


def _dtype_for(desc: RingDescriptor, D: int, domain: str):
    if domain == "scaled":
        return object
    return np.int64 if fits_int64(desc, D) else object


def _zeros(desc, D, domain):
    return np.zeros((D, desc.f), dtype=_dtype_for(desc, D, domain))


def _conv(a, b, cap: int):
    c = np.convolve(a, b)
    return c[:cap]


def _mul_data(A, B, desc: RingDescriptor, D: int, modulo):
    """Coefficientwise product of series data with modulus reduction."""
    f = desc.f
    dtype = A.dtype
    if f == 1:
        c = _conv(A[:, 0], B[:, 0], D)
        if modulo is not None:
            c = c % modulo
        out = np.zeros((D, 1), dtype=dtype)
        out[: len(c), 0] = c
        return out
    cross = [np.zeros(D, dtype=dtype) for _ in range(2 * f - 1)]
    for i in range(f):
        if not A[:, i].any():
            continue
        for j in range(f):
            if not B[:, j].any():
                continue
            c = _conv(A[:, i], B[:, j], D)
            tgt = cross[i + j]
            tgt[: len(c)] += c
            if modulo is not None:
                np.mod(tgt, modulo, out=tgt)
    rows = desc.reduction_rows()
    out = np.zeros((D, f), dtype=dtype)
    for j in range(f):
        out[:, j] = cross[j]
    for t in range(f - 1):
        c = cross[f + t]
        if not c.any():
            continue
        row = rows[t]
        for j in range(f):
            r = row[j] % modulo if modulo is not None else row[j]
            if r:
                out[:, j] += c * r
                if modulo is not None:
                    np.mod(out[:, j], modulo, out=out[:, j])
    if modulo is not None:
        out = out % modulo
    return out


def _scalar_mul_data(A, vec, desc: RingDescriptor, modulo):
    """Multiply series data by one ring element (vector of length f)."""
    f = desc.f
    dtype = A.dtype
    D = A.shape[0]
    if f == 1:
        out = A[:, 0] * vec[0]
        if modulo is not None:
            out = out % modulo
        return out.reshape(D, 1)
    cross = [np.zeros(D, dtype=dtype) for _ in range(2 * f - 1)]
    for i in range(f):
        if not A[:, i].any():
            continue
        for j in range(f):
            if vec[j]:
                cross[i + j] += A[:, i] * vec[j]
                if modulo is not None:
                    np.mod(cross[i + j], modulo, out=cross[i + j])
    rows = desc.reduction_rows()
    out = np.zeros((D, f), dtype=dtype)
    for j in range(f):
        out[:, j] = cross[j]
    for t in range(f - 1):
        c = cross[f + t]
        if not c.any():
            continue
        row = rows[t]
        for j in range(f):
            r = row[j] % modulo if modulo is not None else row[j]
            if r:
                out[:, j] += c * r
    if modulo is not None:
        out = out % modulo
    return out


class TruncSeries1:
    """One-variable truncated series: coefficients of X^0 .. X^{D-1}."""

    __slots__ = ("desc", "D", "domain", "data")

    def __init__(self, desc: RingDescriptor, D: int, domain: str, data):
        if domain not in ("integral", "scaled"):
            raise ValueError("unknown domain")
        self.desc = desc
        self.D = D
        self.domain = domain
        self.data = data

    # ------------------------------------------------------------- builders
    @classmethod
    def zero(cls, desc, D, domain="integral"):
        return cls(desc, D, domain, _zeros(desc, D, domain))

    @classmethod
    def x(cls, desc, D, domain="integral"):
        s = cls.zero(desc, D, domain)
        s.data[1, 0] = 1
        return s

    @classmethod
    def from_coeffs(cls, desc, coeffs, D=None, domain="integral"):
        """coeffs: list whose entries are ints, Fractions, coefficient vectors
        or UnramifiedRingElem, ascending degree."""
        if D is None:
            D = len(coeffs)
        s = cls.zero(desc, D, domain)
        for k, c in enumerate(coeffs[:D]):
            if isinstance(c, UnramifiedRingElem):
                vec = c.coeffs
            elif isinstance(c, (list, tuple)):
                vec = c
            else:
                vec = (c,) + (0,) * (desc.f - 1)
            for j, v in enumerate(vec):
                if domain == "integral":
                    s.data[k, j] = int(v) % desc.pN
                else:
                    s.data[k, j] = Fraction(v)
        return s

    # ------------------------------------------------------------ accessors
    def coefficient(self, k: int):
        if k >= self.D:
            raise IndexError("degree outside truncation window")
        if self.domain == "integral":
            return UnramifiedRingElem(self.desc, [int(v) for v in self.data[k]])
        return ScaledFieldElem.from_rational_vec(self.desc, list(self.data[k]))

    def coeff_vec(self, k: int):
        return tuple(self.data[k])

    def coeff_list(self):
        return [self.coeff_vec(k) for k in range(self.D)]

    def is_zero(self) -> bool:
        return not self.data.any()

    def first_unit_index(self):
        """Smallest k with a unit coefficient, or None."""
        for k in range(self.D):
            if self.domain == "integral":
                if any(int(v) % self.desc.p for v in self.data[k]):
                    return k
            else:
                if rational_vec_valuation(list(self.data[k]), self.desc.p) == 0:
                    return k
        return None

    def nonzero_degrees(self):
        return [k for k in range(self.D) if any(v != 0 for v in self.data[k])]

    # ------------------------------------------------------------ arithmetic
    def _modulo(self):
        return self.desc.pN if self.domain == "integral" else None

    def _compat(self, other):
        if self.desc != other.desc or self.domain != other.domain:
            raise ValueError("series rings differ")
        if self.D != other.D:
            raise ValueError("truncation degrees differ; truncate or lift first")

    def __add__(self, other):
        self._compat(other)
        data = self.data + other.data
        m = self._modulo()
        if m is not None:
            data = data % m
        return TruncSeries1(self.desc, self.D, self.domain, data)

    def __sub__(self, other):
        self._compat(other)
        data = self.data - other.data
        m = self._modulo()
        if m is not None:
            data = data % m
        return TruncSeries1(self.desc, self.D, self.domain, data)

    def __neg__(self):
        m = self._modulo()
        data = -self.data
        if m is not None:
            data = data % m
        return TruncSeries1(self.desc, self.D, self.domain, data)

    def __mul__(self, other):
        self._compat(other)
        data = _mul_data(self.data, other.data, self.desc, self.D, self._modulo())
        return TruncSeries1(self.desc, self.D, self.domain, data)

    def scalar_mul(self, c):
        """Multiply by a ring scalar (elem, int, Fraction, or vector)."""
        if isinstance(c, UnramifiedRingElem):
            vec = c.coeffs
        elif isinstance(c, (list, tuple)):
            vec = c
        elif isinstance(c, (int, Fraction)):
            vec = (c,) + (0,) * (self.desc.f - 1)
        else:
            raise TypeError("unsupported scalar")
        if self.domain == "scaled":
            vec = tuple(Fraction(v) for v in vec)
        data = _scalar_mul_data(self.data, vec, self.desc, self._modulo())
        return TruncSeries1(self.desc, self.D, self.domain, data)

    def shift(self, k: int):
        """Multiply by X^k."""
        s = TruncSeries1.zero(self.desc, self.D, self.domain)
        if k < self.D:
            s.data[k:] = self.data[: self.D - k]
        return s

    def truncate(self, Dnew: int):
        if Dnew > self.D:
            raise ValueError("use lift to extend")
        return TruncSeries1(self.desc, Dnew, self.domain, self.data[:Dnew].copy())

    def lift(self, Dnew: int):
        """Extend the window, declaring the new coefficients zero."""
        if Dnew < self.D:
            return self.truncate(Dnew)
        s = TruncSeries1.zero(self.desc, Dnew, self.domain)
        s.data[: self.D] = self.data
        return s

    def pow_trunc(self, e: int):
        result = TruncSeries1.zero(self.desc, self.D, self.domain)
        result.data[0, 0] = 1 if self.domain == "integral" else Fraction(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def compose(self, g: "TruncSeries1") -> "TruncSeries1":
        """self(g(X)); requires g(0) = 0."""
        self._compat(g)
        if any(v != 0 for v in g.data[0]):
            raise ValueError("inner series must have zero constant term")
        nz = self.nonzero_degrees()
        if len(nz) <= 10:
            # sparse outer series: sum of scaled powers
            out = TruncSeries1.zero(self.desc, self.D, self.domain)
            powers: dict[int, TruncSeries1] = {}

            def gpow(e):
                if e in powers:
                    return powers[e]
                if e == 0:
                    r = TruncSeries1.zero(self.desc, self.D, self.domain)
                    r.data[0, 0] = 1 if self.domain == "integral" else Fraction(1)
                elif e == 1:
                    r = g
                elif e % 2 == 0:
                    h = gpow(e // 2)
                    r = h * h
                else:
                    r = gpow(e - 1) * g
                powers[e] = r
                return r

            for k in nz:
                out = out + gpow(k).scalar_mul(self.coeff_vec(k))
            return out
        acc = TruncSeries1.zero(self.desc, self.D, self.domain)
        for k in range(self.D - 1, -1, -1):
            acc = acc * g
            acc.data[0] = acc.data[0] + self.data[k]
            m = self._modulo()
            if m is not None:
                acc.data[0] = acc.data[0] % m
        return acc

    def derivative(self):
        s = TruncSeries1.zero(self.desc, self.D, self.domain)
        for k in range(1, self.D):
            s.data[k - 1] = self.data[k] * k
        m = self._modulo()
        if m is not None:
            s.data = s.data % m
        return s

    def integrate(self):
        """Antiderivative with zero constant term, exact scaled output."""
        s = TruncSeries1.zero(self.desc, self.D, "scaled")
        for k in range(self.D - 1):
            s.data[k + 1] = np.array(
                [Fraction(int(v) if self.domain == "integral" else v, k + 1) for v in self.data[k]],
                dtype=object,
            )
        return s

    def invert_unit(self):
        """Multiplicative inverse; constant coefficient must be a unit."""
        c0 = self.coefficient(0)
        if self.domain == "integral":
            inv0 = c0.invert()
            seed = inv0.coeffs
        else:
            vec = list(self.data[0])
            if rational_vec_valuation(vec, self.desc.p) != 0:
                raise ZeroDivisionError("constant term is not a unit")
            seed = _exact_vec_invert(vec, self.desc)
        x = TruncSeries1.zero(self.desc, self.D, self.domain)
        x.data[0] = np.array(seed, dtype=x.data.dtype)
        two = TruncSeries1.zero(self.desc, self.D, self.domain)
        two.data[0, 0] = 2 if self.domain == "integral" else Fraction(2)
        d = 1
        while d < self.D:
            d = min(2 * d, self.D)
            xt = x.truncate(d)
            st = self.truncate(d)
            twot = two.truncate(d)
            xt = xt * (twot - st * xt)
            x = xt.lift(self.D)
        return x

    def reversion(self):
        """Compositional inverse; needs zero constant term and unit linear
        coefficient.  Newton iteration with degree doubling."""
        if any(v != 0 for v in self.data[0]):
            raise ValueError("series must have zero constant term")
        c1 = self.coefficient(1)
        r = TruncSeries1.zero(self.desc, self.D, self.domain)
        if self.domain == "integral":
            r.data[1] = np.array(c1.invert().coeffs, dtype=r.data.dtype)
        else:
            r.data[1] = np.array(_exact_vec_invert(list(self.data[1]), self.desc), dtype=object)
        d = 2
        while d < self.D:
            d = min(2 * d, self.D)
            rt = r.truncate(d)
            ft = self.truncate(d)
            err = ft.compose(rt)
            err.data[1, 0] -= 1
            m = self._modulo()
            if m is not None:
                err.data[1, 0] %= m
            if err.is_zero():
                r = rt.lift(self.D)
                continue
            der = ft.derivative().compose(rt)
            rt = rt - err * der.invert_unit()
            r = rt.lift(self.D)
        return r

    # --------------------------------------------------------- conversions
    def to_scaled(self) -> "TruncSeries1":
        if self.domain == "scaled":
            return self
        data = np.empty((self.D, self.desc.f), dtype=object)
        for k in range(self.D):
            for j in range(self.desc.f):
                data[k, j] = Fraction(int(self.data[k, j]))
        return TruncSeries1(self.desc, self.D, "scaled", data)

    def to_integral(self, desc: RingDescriptor | None = None) -> "TruncSeries1":
        """Reduce exact coefficients mod p^N; fails on p in a denominator."""
        desc = desc or self.desc
        if not desc.same_field(self.desc):
            raise ValueError("descriptor mismatch")
        if self.domain == "integral":
            if desc.N == self.desc.N:
                return self
            out = TruncSeries1.zero(desc, self.D, "integral")
            out.data = (self.data % desc.pN).astype(out.data.dtype)
            return out
        out = TruncSeries1.zero(desc, self.D, "integral")
        for k in range(self.D):
            e = desc.element_from_rationals(list(self.data[k]))
            out.data[k] = np.array(e.coeffs, dtype=out.data.dtype)
        return out

    def reduce_precision(self, M: int) -> "TruncSeries1":
        return self.to_integral(self.desc.at_precision(M))

    # --------------------------------------------------------------- misc
    def equal_mod(self, other, M: int | None = None) -> bool:
        """Equality of integral series mod p^M (default: full precision)."""
        self._compat(other)
        if self.domain == "scaled":
            return bool(np.array_equal(self.data, other.data))
        m = self.desc.p ** (M if M is not None else self.desc.N)
        return bool(((self.data - other.data) % m == 0).all())

    def min_valuation(self):
        """min over coefficients of the p-adic valuation."""
        v = INF
        for k in range(self.D):
            if self.domain == "integral":
                e = self.coefficient(k)
                v = min(v, e.valuation())
            else:
                v = min(v, rational_vec_valuation(list(self.data[k]), self.desc.p))
            if v == 0:
                break
        return v

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries1)
            and self.desc == other.desc
            and self.domain == other.domain
            and self.D == other.D
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self):
        terms = []
        shown = 0
        for k in range(self.D):
            if any(v != 0 for v in self.data[k]):
                vec = list(self.data[k])
                c = vec[0] if self.desc.f == 1 else vec
                terms.append(f"{c}*X^{k}")
                shown += 1
                if shown >= 6:
                    terms.append("...")
                    break
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries1({body}; D={self.D}, {self.domain})"


def _exact_vec_invert(vec, desc: RingDescriptor):
    """Inverse of a coefficient vector with unit residue, exactly over Q."""
    # Solve v * w = 1 via linear algebra over Q in the modulus basis.
    f = desc.f
    vec = [Fraction(v) for v in vec]
    if f == 1:
        return [1 / vec[0]]
    # matrix of multiplication by vec
    cols = []
    rows = desc.reduction_rows()
    for j in range(f):
        basis = [Fraction(0)] * f
        basis[j] = Fraction(1)
        prod = [Fraction(0)] * (2 * f - 1)
        for a in range(f):
            if vec[a]:
                for b in range(f):
                    if basis[b]:
                        prod[a + b] += vec[a] * basis[b]
        red = prod[:f]
        for t in range(f - 1):
            c = prod[f + t]
            if c:
                for jj in range(f):
                    red[jj] += c * rows[t][jj]
        cols.append(red)
    # Gaussian elimination solving M w = e_0
    M = [[cols[j][i] for j in range(f)] for i in range(f)]
    rhs = [Fraction(1)] + [Fraction(0)] * (f - 1)
    for col in range(f):
        piv = next(r for r in range(col, f) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / M[col][col]
        M[col] = [m * inv for m in M[col]]
        rhs[col] *= inv
        for r in range(f):
            if r != col and M[r][col] != 0:
                fac = M[r][col]
                M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
                rhs[r] -= fac * rhs[col]
    return rhs


class TruncSeries2:
    """Two-variable truncated series: coefficients c[i, j] of X^i Y^j for
    total degree i + j < D."""

    __slots__ = ("desc", "D", "domain", "data")

    def __init__(self, desc, D, domain, data):
        self.desc = desc
        self.D = D
        self.domain = domain
        self.data = data

    @classmethod
    def zero(cls, desc, D, domain="integral"):
        dtype = _dtype_for(desc, D, domain)
        return cls(desc, D, domain, np.zeros((D, D, desc.f), dtype=dtype))

    @classmethod
    def from_triples(cls, desc, triples, D, domain="integral"):
        """triples: iterable of (i, j, value or vector)."""
        s = cls.zero(desc, D, domain)
        for i, j, v in triples:
            if i + j >= D:
                continue
            vec = v.coeffs if isinstance(v, UnramifiedRingElem) else v
            if not isinstance(vec, (list, tuple)):
                vec = (vec,) + (0,) * (desc.f - 1)
            for c, vv in enumerate(vec):
                s.data[i, j, c] = vv % desc.pN if domain == "integral" else Fraction(vv)
        return s

    def _modulo(self):
        return self.desc.pN if self.domain == "integral" else None

    def _compat(self, other):
        if self.desc != other.desc or self.domain != other.domain or self.D != other.D:
            raise ValueError("series rings differ")

    def __add__(self, other):
        self._compat(other)
        data = self.data + other.data
        m = self._modulo()
        if m is not None:
            data = data % m
        return TruncSeries2(self.desc, self.D, self.domain, data)

    def __sub__(self, other):
        self._compat(other)
        data = self.data - other.data
        m = self._modulo()
        if m is not None:
            data = data % m
        return TruncSeries2(self.desc, self.D, self.domain, data)

    def __neg__(self):
        m = self._modulo()
        data = -self.data
        if m is not None:
            data = data % m
        return TruncSeries2(self.desc, self.D, self.domain, data)

    def __mul__(self, other):
        self._compat(other)
        D, f = self.D, self.desc.f
        m = self._modulo()
        dtype = self.data.dtype
        rows_red = self.desc.reduction_rows()
        cross = [np.zeros((D, D), dtype=dtype) for _ in range(2 * f - 1)]
        arows = [i for i in range(D) if self.data[i].any()]
        brows = [i for i in range(D) if other.data[i].any()]
        for c1 in range(f):
            for c2 in range(f):
                k = c1 + c2
                tgt = cross[k]
                for i1 in arows:
                    a = self.data[i1, : D - i1, c1]
                    if not a.any():
                        continue
                    for i2 in brows:
                        i = i1 + i2
                        if i >= D:
                            break
                        b = other.data[i2, : D - i2, c2]
                        if not b.any():
                            continue
                        seg = np.convolve(a, b)[: D - i]
                        tgt[i, : len(seg)] += seg
                        if m is not None:
                            np.mod(tgt[i], m, out=tgt[i])
        out = np.zeros((D, D, f), dtype=dtype)
        for j in range(f):
            out[:, :, j] = cross[j]
        for t in range(f - 1):
            c = cross[f + t]
            if not c.any():
                continue
            for j in range(f):
                r = rows_red[t][j] % m if m is not None else rows_red[t][j]
                if r:
                    out[:, :, j] += c * r
        if m is not None:
            out = out % m
        return TruncSeries2(self.desc, self.D, self.domain, out)

    def scalar_mul(self, c):
        vec = c.coeffs if isinstance(c, UnramifiedRingElem) else c
        if not isinstance(vec, (list, tuple)):
            vec = (vec,) + (0,) * (self.desc.f - 1)
        flat = self.data.reshape(self.D * self.D, self.desc.f)
        out = _scalar_mul_data(flat, vec, self.desc, self._modulo())
        return TruncSeries2(self.desc, self.D, self.domain, out.reshape(self.D, self.D, self.desc.f))

    def swap(self):
        return TruncSeries2(self.desc, self.D, self.domain, np.swapaxes(self.data, 0, 1).copy())

    def x_part(self) -> TruncSeries1:
        """Restriction to Y = 0."""
        return TruncSeries1(self.desc, self.D, self.domain, self.data[:, 0, :].copy())

    def y_part(self) -> TruncSeries1:
        return TruncSeries1(self.desc, self.D, self.domain, self.data[0, :, :].copy())

    def partial_y_at_zero(self) -> TruncSeries1:
        """d/dY at Y = 0, a series in X."""
        out = TruncSeries1.zero(self.desc, self.D, self.domain)
        out.data[:, :] = self.data[:, 1, :]
        return out

    def coefficient(self, i, j):
        if self.domain == "integral":
            return UnramifiedRingElem(self.desc, [int(v) for v in self.data[i, j]])
        return ScaledFieldElem.from_rational_vec(self.desc, list(self.data[i, j]))

    def equal_mod(self, other, M=None):
        self._compat(other)
        if self.domain == "scaled":
            return bool(np.array_equal(self.data, other.data))
        m = self.desc.p ** (M if M is not None else self.desc.N)
        return bool(((self.data - other.data) % m == 0).all())

    def coeff_triples(self):
        out = []
        for i in range(self.D):
            for j in range(self.D - i):
                if any(v != 0 for v in self.data[i, j]):
                    out.append((i, j, tuple(self.data[i, j])))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries2)
            and self.desc == other.desc
            and self.domain == other.domain
            and self.D == other.D
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self):
        return f"TruncSeries2(D={self.D}, {self.domain}, {len(self.coeff_triples())} terms)"


def inject_x(s: TruncSeries1) -> TruncSeries2:
    out = TruncSeries2.zero(s.desc, s.D, s.domain)
    out.data[:, 0, :] = s.data
    return out


def inject_y(s: TruncSeries1) -> TruncSeries2:
    out = TruncSeries2.zero(s.desc, s.D, s.domain)
    out.data[0, :, :] = s.data
    return out


def substitute2(F: TruncSeries2, g: TruncSeries1, h: TruncSeries1) -> TruncSeries1:
    """F(g(X), h(X)) for one-variable g, h with zero constant terms."""
    if any(v != 0 for v in g.data[0]) or any(v != 0 for v in h.data[0]):
        raise ValueError("substituted series must have zero constant term")
    if g.desc != F.desc or g.domain != F.domain:
        raise ValueError("series rings differ")
    D = g.D
    gpow = [TruncSeries1.zero(F.desc, D, F.domain)]
    gpow[0].data[0, 0] = 1 if F.domain == "integral" else Fraction(1)
    for i in range(1, min(F.D, D)):
        gpow.append(gpow[-1] * g)
    acc = TruncSeries1.zero(F.desc, D, F.domain)
    for j in range(min(F.D, D) - 1, -1, -1):
        inner = TruncSeries1.zero(F.desc, D, F.domain)
        for i in range(min(F.D - j, D)):
            if F.data[i, j].any():
                inner = inner + gpow[i].scalar_mul(tuple(F.data[i, j]))
        acc = acc * h + inner
    return acc


def substitute2_into2(F: TruncSeries2, G: TruncSeries2, H: TruncSeries2) -> TruncSeries2:
    """F(G(X,Y), H(X,Y)) for two-variable arguments without constant terms."""
    if G.data[0, 0].any() or H.data[0, 0].any():
        raise ValueError("substituted series must have zero constant term")
    D = F.D
    gpow = [TruncSeries2.zero(F.desc, D, F.domain)]
    gpow[0].data[0, 0, 0] = 1 if F.domain == "integral" else Fraction(1)
    for i in range(1, D):
        gpow.append(gpow[-1] * G)
    acc = TruncSeries2.zero(F.desc, D, F.domain)
    for j in range(D - 1, -1, -1):
        inner = TruncSeries2.zero(F.desc, D, F.domain)
        for i in range(D - j):
            if F.data[i, j].any():
                inner = inner + gpow[i].scalar_mul(tuple(F.data[i, j]))
        acc = acc * H + inner
    return acc


def embed_series(s: TruncSeries1, emb, dst_desc: RingDescriptor) -> TruncSeries1:
    """Apply a coefficient embedding to every coefficient."""
    if s.domain == "scaled":
        # rational coefficients embed unchanged componentwise only for f=1
        if s.desc.f != 1:
            raise ValueError("scaled embedding supported for rational coefficients only")
        out = TruncSeries1.zero(dst_desc, s.D, "scaled")
        for k in range(s.D):
            out.data[k, 0] = Fraction(s.data[k, 0])
        return out
    out = TruncSeries1.zero(dst_desc, s.D, "integral")
    for k in range(s.D):
        e = emb(UnramifiedRingElem(s.desc, [int(v) for v in s.data[k]]))
        out.data[k] = np.array([c % dst_desc.pN for c in e.coeffs], dtype=out.data.dtype)
    return out


def embed_series2(F: TruncSeries2, emb, dst_desc: RingDescriptor) -> TruncSeries2:
    out = TruncSeries2.zero(dst_desc, F.D, "integral")
    for i in range(F.D):
        for j in range(F.D - i):
            if any(v != 0 for v in F.data[i, j]):
                e = emb(UnramifiedRingElem(F.desc, [int(v) for v in F.data[i, j]]))
                out.data[i, j] = np.array([c % dst_desc.pN for c in e.coeffs], dtype=out.data.dtype)
    return out
