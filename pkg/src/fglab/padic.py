"""Exact arithmetic in unramified p-adic coefficient rings.

Elements of W(F_{p^f}) mod p^N are stored as coefficient vectors of length f
over Z/p^N with respect to a fixed monic modulus polynomial, chosen
deterministically so that independently created descriptors agree.
"""

from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _factor(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (desk-scale inputs)."""
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


# ---------------------------------------------------------------------------
# polynomial helpers over F_p, used only to pick and certify the modulus

def _fp_polmul(a, b, p, mod):
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _fp_polrem(res, mod, p)


def _fp_polrem(a, mod, p):
    a = list(a)
    d = len(mod) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i] % p
        if c:
            for j in range(d):
                a[i - d + j] = (a[i - d + j] - c * mod[j]) % p
        a[i] = 0
    return [x % p for x in a[:d]]


def _fp_polpow_x(e, p, mod):
    """X^e mod (mod, p)."""
    result = [1] + [0] * (len(mod) - 2) if len(mod) > 2 else [1]
    result = result[: len(mod) - 1]
    base = _fp_polrem([0, 1] + [0] * len(mod), mod, p)
    while e:
        if e & 1:
            result = _fp_polmul(result, base, p, mod)
        base = _fp_polmul(base, base, p, mod)
        e >>= 1
    return result


def _is_irreducible(mod, p):
    """Rabin test: X^{p^f} = X and X^{p^{f/l}} != X for prime l | f."""
    f = len(mod) - 1
    if f == 1:
        return True
    xq = _fp_polpow_x(p**f, p, mod)
    x = [0, 1] + [0] * (f - 2)
    x = x[:f]
    if xq != x:
        return False
    for ell in _factor(f):
        sub = _fp_polpow_x(p ** (f // ell), p, mod)
        if sub == x:
            return False
    return True


def minimal_modulus(p: int, f: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree f over F_p, low coefficients
    enumerated as base-p digits of an increasing counter."""
    for code in range(p**f):
        low = []
        c = code
        for _ in range(f):
            low.append(c % p)
            c //= p
        cand = low + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")


class RingDescriptor:
    """Parameters (p, f, N) plus the fixed modulus of W(F_{p^f}) mod p^N."""

    __slots__ = ("p", "f", "N", "modulus", "_red_rows")

    def __init__(self, p: int, f: int, N: int, modulus: tuple[int, ...] | None = None):
        if not is_prime(p) or p == 2:
            raise ValueError("p must be an odd prime")
        if f < 1 or N < 1:
            raise ValueError("need f >= 1 and N >= 1")
        if modulus is None:
            modulus = minimal_modulus(p, f)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if not _is_irreducible([c % p for c in modulus], p):
            raise ValueError("modulus is reducible mod p")
        self.p = p
        self.f = f
        self.N = N
        self.modulus = modulus
        self._red_rows = None

    @property
    def pN(self) -> int:
        return self.p**self.N

    @property
    def q(self) -> int:
        return self.p**self.f

    def reduction_rows(self) -> list[list[int]]:
        """Integer rows expressing X^{f+t} mod modulus, t = 0 .. f-2."""
        if self._red_rows is None:
            f = self.f
            rows = []
            cur = [-c for c in self.modulus[:f]]
            for _ in range(max(f - 1, 0)):
                rows.append(list(cur))
                top = cur[f - 1]
                cur = [0] + cur[: f - 1]
                if top:
                    for j in range(f):
                        cur[j] += top * rows[0][j]
            self._red_rows = rows
        return self._red_rows

    def at_precision(self, M: int) -> "RingDescriptor":
        return RingDescriptor(self.p, self.f, M, self.modulus)

    def same_field(self, other: "RingDescriptor") -> bool:
        return (self.p, self.f, self.modulus) == (other.p, other.f, other.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, RingDescriptor)
            and (self.p, self.f, self.N, self.modulus)
            == (other.p, other.f, other.N, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.f, self.N, self.modulus))

    def __repr__(self):
        return f"RingDescriptor(p={self.p}, f={self.f}, N={self.N})"

    def to_dict(self) -> dict:
        return {"p": self.p, "f": self.f, "N": self.N, "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d: dict) -> "RingDescriptor":
        return cls(d["p"], d["f"], d["N"], tuple(d["modulus"]))

    # element constructors
    def zero(self) -> "UnramifiedRingElem":
        return UnramifiedRingElem(self, (0,) * self.f)

    def one(self) -> "UnramifiedRingElem":
        return UnramifiedRingElem(self, (1,) + (0,) * (self.f - 1))

    def from_int(self, n: int) -> "UnramifiedRingElem":
        return UnramifiedRingElem(self, (n % self.pN,) + (0,) * (self.f - 1))

    def from_coeffs(self, coeffs) -> "UnramifiedRingElem":
        return UnramifiedRingElem(self, tuple(int(c) % self.pN for c in coeffs))

    def element_from_rationals(self, vec) -> "UnramifiedRingElem":
        """Reduce a vector of p-integral Fractions mod p^N."""
        out = []
        for r in vec:
            r = Fraction(r)
            den = r.denominator
            if den % self.p == 0:
                raise ValueError("not p-integral")
            out.append(r.numerator * pow(den, -1, self.pN) % self.pN)
        return UnramifiedRingElem(self, tuple(out))


def _vec_mulmod(a, b, desc, m):
    """Multiply coefficient vectors mod (modulus, m)."""
    f = desc.f
    if f == 1:
        return ((a[0] * b[0]) % m,)
    prod = [0] * (2 * f - 1)
    for i in range(f):
        if a[i]:
            for j in range(f):
                prod[i + j] += a[i] * b[j]
    rows = desc.reduction_rows()
    out = prod[:f]
    for t in range(f - 1):
        c = prod[f + t]
        if c:
            row = rows[t]
            for j in range(f):
                out[j] += c * row[j]
    return tuple(x % m for x in out)


class ResidueElem:
    """Element of the residue field F_{p^f}."""

    __slots__ = ("desc", "coeffs")

    def __init__(self, desc: RingDescriptor, coeffs):
        self.desc = desc
        self.coeffs = tuple(int(c) % desc.p for c in coeffs)
        if len(self.coeffs) != desc.f:
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def from_code(cls, desc: RingDescriptor, code: int) -> "ResidueElem":
        digits = []
        for _ in range(desc.f):
            digits.append(code % desc.p)
            code //= desc.p
        return cls(desc, digits)

    def code(self) -> int:
        c = 0
        for d in reversed(self.coeffs):
            c = c * self.desc.p + d
        return c

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other):
        self._check(other)
        return ResidueElem(self.desc, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return ResidueElem(self.desc, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return ResidueElem(self.desc, [-a for a in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        return ResidueElem(self.desc, _vec_mulmod(self.coeffs, other.coeffs, self.desc, self.desc.p))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = ResidueElem(self.desc, (1,) + (0,) * (self.desc.f - 1))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "ResidueElem":
        if self.is_zero():
            raise ZeroDivisionError("residue is zero")
        return self ** (self.desc.q - 2)

    def multiplicative_order(self) -> int:
        if self.is_zero():
            raise ZeroDivisionError("residue is zero")
        n = self.desc.q - 1
        order = n
        for ell in _factor(n):
            while order % ell == 0 and (self ** (order // ell)).code() == 1:
                order //= ell
        return order

    def _check(self, other):
        if not self.desc.same_field(other.desc):
            raise ValueError("descriptor mismatch")

    def __eq__(self, other):
        return isinstance(other, ResidueElem) and self.desc.same_field(other.desc) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("res", self.coeffs))

    def __repr__(self):
        return f"ResidueElem{self.coeffs}"


def multiplicative_generator(desc: RingDescriptor) -> ResidueElem:
    """Deterministic generator of F_{p^f}^*: smallest element code that works."""
    n = desc.q - 1
    for code in range(1, desc.q):
        r = ResidueElem.from_code(desc, code)
        if r.multiplicative_order() == n:
            return r
    raise AssertionError("no generator found")


def residue_power_test(r: ResidueElem, d: int) -> bool:
    """True iff r is a d-th power in F_{p^f}^* (r nonzero, d | p^f - 1)."""
    if r.is_zero():
        raise ValueError("zero is not a unit")
    n = r.desc.q - 1
    if n % d != 0:
        raise ValueError("d must divide p^f - 1")
    return (r ** (n // d)).code() == 1


class UnramifiedRingElem:
    """Element of W(F_{p^f}) mod p^N."""

    __slots__ = ("desc", "coeffs")

    def __init__(self, desc: RingDescriptor, coeffs):
        self.desc = desc
        self.coeffs = tuple(int(c) % desc.pN for c in coeffs)
        if len(self.coeffs) != desc.f:
            raise ValueError("coefficient vector has wrong length")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def residue(self) -> ResidueElem:
        return ResidueElem(self.desc, self.coeffs)

    def is_unit(self) -> bool:
        return not self.residue().is_zero()

    def valuation(self):
        """Largest v <= N with p^v | a, or INF when a = 0 mod p^N."""
        if self.is_zero():
            return INF
        v = self.desc.N
        for c in self.coeffs:
            if c:
                w = 0
                while c % self.desc.p == 0:
                    c //= self.desc.p
                    w += 1
                v = min(v, w)
        return v

    def __add__(self, other):
        self._check(other)
        return UnramifiedRingElem(self.desc, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return UnramifiedRingElem(self.desc, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return UnramifiedRingElem(self.desc, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return UnramifiedRingElem(self.desc, [a * other for a in self.coeffs])
        self._check(other)
        return UnramifiedRingElem(
            self.desc, _vec_mulmod(self.coeffs, other.coeffs, self.desc, self.desc.pN)
        )

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.invert() ** (-e)
        result = self.desc.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def invert(self) -> "UnramifiedRingElem":
        """Inverse of a unit, residue-field inverse refined by Newton steps."""
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        inv_res = self.residue().inverse()
        x = UnramifiedRingElem(self.desc, inv_res.coeffs)
        two = self.desc.from_int(2)
        steps = max(1, math.ceil(math.log2(self.desc.N)) + 1)
        for _ in range(steps):
            x = x * (two - self * x)
        return x

    def exact_div_p(self, k: int = 1) -> "UnramifiedRingElem":
        """Divide by p^k; requires p^k | a. Top k digits of the result are
        unconstrained by the input and are returned as zero."""
        pk = self.desc.p**k
        if any(c % pk for c in self.coeffs):
            raise ValueError("not divisible by p^%d" % k)
        return UnramifiedRingElem(self.desc, [c // pk for c in self.coeffs])

    def reduce_to(self, desc: RingDescriptor) -> "UnramifiedRingElem":
        if not desc.same_field(self.desc):
            raise ValueError("descriptor mismatch")
        return UnramifiedRingElem(desc, self.coeffs)

    def _check(self, other):
        if self.desc != other.desc:
            raise ValueError("descriptor mismatch")

    def __eq__(self, other):
        return (
            isinstance(other, UnramifiedRingElem)
            and self.desc == other.desc
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(("elem", self.coeffs))

    def __repr__(self):
        if self.desc.f == 1:
            return f"UnramifiedRingElem({self.coeffs[0]} mod {self.desc.p}^{self.desc.N})"
        return f"UnramifiedRingElem{self.coeffs}"


def teichmuller_lift(desc: RingDescriptor, r) -> UnramifiedRingElem:
    """Teichmuller representative: the unique lift fixed by x -> x^{p^f}.

    Accepts a ResidueElem, an int, or any coefficient vector; iterates the
    q-power map to its fixed point mod p^N.
    """
    if isinstance(r, ResidueElem):
        coeffs = r.coeffs
    elif isinstance(r, int):
        coeffs = (r % desc.p,) + (0,) * (desc.f - 1)
    else:
        coeffs = tuple(int(c) % desc.p for c in r)
    x = UnramifiedRingElem(desc, coeffs)
    for _ in range(desc.N + 4):
        nxt = x**desc.q
        if nxt == x:
            return x
        x = nxt
    raise AssertionError("Teichmuller iteration did not stabilize")


def teichmuller_digits(desc: RingDescriptor, d: int | None = None) -> list[UnramifiedRingElem]:
    """All Teichmuller digits of the subring W(F_{p^d}): 0 and mu_{p^d-1}.

    Requires d | f so that F_{p^d} sits inside the residue field. Digits are
    returned in a deterministic order: zero, then powers of the canonical
    generator of mu_{p^d-1}.
    """
    if d is None:
        d = desc.f
    if desc.f % d != 0:
        raise ValueError("d must divide f")
    m = desc.p**d - 1
    g = multiplicative_generator(desc)
    zeta = teichmuller_lift(desc, g ** ((desc.q - 1) // m))
    out = [desc.zero()]
    cur = desc.one()
    for _ in range(m):
        out.append(cur)
        cur = cur * zeta
    return out


class ScaledFieldElem:
    """p^exponent * unit, with the unit carried mod p^N.

    Additions can cancel; the renormalized unit then keeps N stored digits of
    which only the original overlap is meaningful.  Exact analytic work in
    this package uses Fractions instead; this type is the fixed-precision
    view used in serialized coefficients.
    """

    __slots__ = ("desc", "unit", "exponent")

    def __init__(self, desc: RingDescriptor, unit: UnramifiedRingElem | None, exponent: int = 0):
        self.desc = desc
        if unit is not None and unit.is_zero():
            unit = None
        if unit is not None:
            v = unit.valuation()
            if v > 0:
                unit = unit.exact_div_p(v)
                exponent += v
        self.unit = unit
        self.exponent = exponent if unit is not None else 0

    @classmethod
    def from_ring_elem(cls, a: UnramifiedRingElem) -> "ScaledFieldElem":
        return cls(a.desc, a, 0)

    @classmethod
    def from_rational_vec(cls, desc: RingDescriptor, vec) -> "ScaledFieldElem":
        vec = [Fraction(r) for r in vec]
        if all(r == 0 for r in vec):
            return cls(desc, None, 0)
        v = min(_frac_val(r, desc.p) for r in vec if r != 0)
        scaled = [r / Fraction(desc.p) ** v for r in vec]
        return cls(desc, desc.element_from_rationals(scaled), v)

    def is_zero(self) -> bool:
        return self.unit is None

    def valuation(self):
        return INF if self.unit is None else self.exponent

    def __add__(self, other):
        self._check(other)
        if self.unit is None:
            return other
        if other.unit is None:
            return self
        e = min(self.exponent, other.exponent)
        a = self.unit * self.desc.from_int(self.desc.p ** (self.exponent - e))
        b = other.unit * self.desc.from_int(self.desc.p ** (other.exponent - e))
        return ScaledFieldElem(self.desc, a + b, e)

    def __neg__(self):
        if self.unit is None:
            return self
        return ScaledFieldElem(self.desc, -self.unit, self.exponent)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.unit is None or other.unit is None:
            return ScaledFieldElem(self.desc, None, 0)
        return ScaledFieldElem(self.desc, self.unit * other.unit, self.exponent + other.exponent)

    def _check(self, other):
        if self.desc != other.desc:
            raise ValueError("descriptor mismatch")

    def __eq__(self, other):
        return (
            isinstance(other, ScaledFieldElem)
            and self.desc == other.desc
            and self.unit == other.unit
            and self.exponent == other.exponent
        )

    def __repr__(self):
        if self.unit is None:
            return "ScaledFieldElem(0)"
        return f"ScaledFieldElem(p^{self.exponent} * {self.unit.coeffs})"


def _frac_val(r: Fraction, p: int):
    if r == 0:
        return INF
    v = 0
    n = r.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = r.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def rational_vec_valuation(vec, p: int):
    """min p-adic valuation over a vector of Fractions."""
    v = INF
    for r in vec:
        v = min(v, _frac_val(Fraction(r), p))
    return v


class Embedding:
    """Coefficient embedding W(F_{p^f}) -> W(F_{p^{f'}}) for f | f'.

    Sends the source modulus root to a deterministically chosen Hensel-lifted
    root of the source modulus in the target ring.
    """

    def __init__(self, src: RingDescriptor, dst: RingDescriptor):
        if src.p != dst.p or dst.f % src.f != 0:
            raise ValueError("target must be an unramified extension of the source")
        self.src = src
        self.dst = dst
        self.root = self._find_root()
        self._powers = [dst.one()]
        for _ in range(src.f - 1):
            self._powers.append(self._powers[-1] * self.root)

    def _find_root(self) -> UnramifiedRingElem:
        dst, src = self.dst, self.src
        if src.f == 1:
            return dst.zero()
        # root of the source modulus in the target residue field, smallest code
        root_res = None
        for code in range(dst.q):
            r = ResidueElem.from_code(dst, code)
            acc = ResidueElem.from_code(dst, 0)
            for c in reversed(src.modulus):
                acc = acc * r + ResidueElem.from_code(dst, c % dst.p)
            if acc.is_zero():
                root_res = r
                break
        if root_res is None:
            raise AssertionError("no root of modulus in target residue field")
        x = UnramifiedRingElem(dst, root_res.coeffs)
        # Newton: x <- x - M(x)/M'(x); derivative is a unit (separable mod p)
        for _ in range(max(1, math.ceil(math.log2(dst.N)) + 1)):
            val = dst.zero()
            for c in reversed(src.modulus):
                val = val * x + dst.from_int(c)
            der = dst.zero()
            for i in range(len(src.modulus) - 1, 0, -1):
                der = der * x + dst.from_int(i * src.modulus[i])
            x = x - val * der.invert()
        return x

    def __call__(self, a: UnramifiedRingElem) -> UnramifiedRingElem:
        if not a.desc.same_field(self.src):
            raise ValueError("descriptor mismatch")
        acc = self.dst.zero()
        for i, c in enumerate(a.coeffs):
            acc = acc + self.dst.from_int(c) * self._powers[i]
        return acc
