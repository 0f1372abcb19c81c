"""Exact arithmetic kernel.

Dense integer polynomials, cyclotomic integers, truncated Puiseux series in
q^(1/d) with cyclotomic coefficients, and a thin precision helper around
mpmath for the floating complex backend.

Large products go through Kronecker substitution: both operands are packed
into a single big integer, multiplied by GMP, and unpacked.  Everything else
is plain Python integers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2
import mpmath

# Below this operand length schoolbook is faster than packing.
_KRONECKER_CUTOFF = 24


class NotDivisible(ArithmeticError):
    """Exact division left a nonzero remainder or a non-integral quotient."""


# ---------------------------------------------------------------------------
# Kronecker packing


def _slot_bits(bound: int) -> int:
    """Bit width of a signed slot able to hold integers of absolute value <= bound."""
    bits = bound.bit_length() + 2
    return (bits + 7) & ~7


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    pos = bytearray()
    neg = bytearray()
    zero = bytes(nbytes)
    for c in coeffs:
        if c > 0:
            pos += c.to_bytes(nbytes, "little")
            neg += zero
        elif c < 0:
            pos += zero
            neg += (-c).to_bytes(nbytes, "little")
        else:
            pos += zero
            neg += zero
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, nslots: int, nbytes: int) -> list[int]:
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes((bytes(nbytes - 1) + b"\x80") * nslots, "little")
    raw = (value + offset).to_bytes(nslots * nbytes, "little")
    frombytes = int.from_bytes
    return [
        frombytes(raw[i : i + nbytes], "little") - half
        for i in range(0, nslots * nbytes, nbytes)
    ]


def _max_abs(coeffs: Iterable[int]) -> int:
    m = 0
    for c in coeffs:
        if c > m:
            m = c
        elif -c > m:
            m = -c
    return m


def mul_coeffs(a: Sequence[int], b: Sequence[int], limit: int | None = None) -> list[int]:
    """Product of two coefficient lists (constant term first).

    If ``limit`` is given only the first ``limit`` coefficients are returned.
    """
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if limit is not None:
        n = min(n, limit)
        a = a[:n]
        b = b[:n]
    if min(len(a), len(b)) < _KRONECKER_CUTOFF:
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: n - i]):
                    out[i + j] += x * y
        return out
    bound = _max_abs(a) * _max_abs(b) * min(len(a), len(b))
    if bound == 0:
        return [0] * n
    nbytes = _slot_bits(bound) // 8
    prod = int(gmpy2.mpz(_pack(a, nbytes)) * gmpy2.mpz(_pack(b, nbytes)))
    return _unpack(prod, len(a) + len(b) - 1, nbytes)[:n]


# ---------------------------------------------------------------------------
# Integer polynomials


def _trim(coeffs: list[int]) -> list[int]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class IntPolynomial:
    """Dense univariate polynomial over Z, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        self.coeffs: tuple[int, ...] = tuple(_trim([int(c) for c in coeffs]))

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "IntPolynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = IntPolynomial((other,))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self.coeffs)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __add__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial((other,))
        return self + (-other)

    def __rsub__(self, other: int) -> "IntPolynomial":
        return IntPolynomial((other,)) - self

    def __mul__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPolynomial":
        if e < 0:
            raise ValueError("negative exponent")
        result = IntPolynomial((1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g


def poly_mul(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    return IntPolynomial(mul_coeffs(p.coeffs, q.coeffs))


def poly_divexact(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Return r with q*r == p over Z, else raise NotDivisible."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return IntPolynomial()
    if p.degree < q.degree:
        raise NotDivisible("degree of divisor exceeds dividend")
    rem = list(p.coeffs)
    dq = q.degree
    lead = q.leading
    out = [0] * (p.degree - dq + 1)
    qc = q.coeffs
    for k in range(len(out) - 1, -1, -1):
        top = rem[k + dq]
        if top % lead:
            raise NotDivisible("non-integral quotient coefficient")
        t = top // lead
        out[k] = t
        if t:
            for i, c in enumerate(qc):
                rem[k + i] -= t * c
    if any(rem[:dq]):
        raise NotDivisible("nonzero remainder")
    return IntPolynomial(out)


def format_poly(p: IntPolynomial, var: str = "X") -> str:
    """Shared one-line text format, descending degree with explicit signs."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        if not parts:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def parse_poly(text: str, var: str = "X") -> IntPolynomial:
    """Inverse of :func:`format_poly`."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return IntPolynomial()
    term = re.compile(r"([+-]?)(\d*)(?:\*?(" + re.escape(var) + r")(?:\^(\d+))?)?$")
    coeffs: dict[int, int] = {}
    for chunk in re.findall(r"[+-]?[^+-]+", s):
        m = term.match(chunk)
        if m is None or (not m.group(2) and not m.group(3)):
            raise ValueError(f"cannot parse term {chunk!r} in {text!r}")
        sign, num, x, exp = m.groups()
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        k = (int(exp) if exp else 1) if x else 0
        coeffs[k] = coeffs.get(k, 0) + c
    deg = max(coeffs)
    return IntPolynomial(coeffs.get(i, 0) for i in range(deg + 1))


# ---------------------------------------------------------------------------
# Cyclotomic integers


@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> IntPolynomial:
    """The d-th cyclotomic polynomial."""
    if d < 1:
        raise ValueError("index must be positive")
    p = IntPolynomial([-1] + [0] * (d - 1) + [1])
    for e in range(1, d):
        if d % e == 0:
            p = poly_divexact(p, cyclotomic_poly(e))
    return p


def totient(d: int) -> int:
    return cyclotomic_poly(d).degree


@lru_cache(maxsize=None)
def _power_residues(d: int, upto: int) -> tuple[tuple[int, ...], ...]:
    """x^k mod Phi_d for 0 <= k < upto, as residue vectors of length phi(d)."""
    phi_d = cyclotomic_poly(d)
    n = phi_d.degree
    tail = [-c for c in phi_d.coeffs[:n]]  # x^n = sum tail[i] x^i
    rows = []
    cur = [0] * n
    cur[0] = 1
    for _ in range(upto):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(n):
                cur[i] += top * tail[i]
    return tuple(rows)


def _reduce_cyclo(coeffs: Sequence[int], d: int) -> tuple[int, ...]:
    n = totient(d)
    if len(coeffs) <= n:
        return tuple(coeffs) + (0,) * (n - len(coeffs))
    rows = _power_residues(d, len(coeffs))
    out = list(coeffs[:n])
    for k in range(n, len(coeffs)):
        c = coeffs[k]
        if c:
            row = rows[k]
            for i in range(n):
                out[i] += c * row[i]
    return tuple(out)


@dataclass(frozen=True)
class CycloInt:
    """Element of Z[zeta_d] stored as a residue modulo Phi_d."""

    d: int
    residue: tuple[int, ...]

    def __post_init__(self):
        if len(self.residue) != totient(self.d):
            raise ValueError("residue length must equal phi(d)")

    @classmethod
    def from_poly(cls, d: int, coeffs: Sequence[int]) -> "CycloInt":
        return cls(d, _reduce_cyclo(list(coeffs), d))

    @classmethod
    def integer(cls, d: int, n: int) -> "CycloInt":
        return cls.from_poly(d, [n])

    @classmethod
    def zeta(cls, d: int, k: int = 1) -> "CycloInt":
        """zeta_d^k for any integer k."""
        k %= d
        return cls(d, _power_residues(d, d)[k])

    def lift(self, D: int) -> "CycloInt":
        """Image in Z[zeta_D] for a multiple D of d, via zeta_d = zeta_D^(D/d)."""
        if D % self.d:
            raise ValueError("target index must be a multiple")
        s = D // self.d
        spread = [0] * (s * (len(self.residue) - 1) + 1)
        for i, c in enumerate(self.residue):
            spread[i * s] = c
        return CycloInt.from_poly(D, spread)

    def _common(self, other: "CycloInt | int") -> tuple["CycloInt", "CycloInt"]:
        if isinstance(other, int):
            return self, CycloInt.integer(self.d, other)
        if other.d == self.d:
            return self, other
        D = math.lcm(self.d, other.d)
        return self.lift(D), other.lift(D)

    def __add__(self, other):
        a, b = self._common(other)
        return CycloInt(a.d, tuple(x + y for x, y in zip(a.residue, b.residue)))

    __radd__ = __add__

    def __neg__(self):
        return CycloInt(self.d, tuple(-x for x in self.residue))

    def __sub__(self, other):
        return self + (-other if isinstance(other, CycloInt) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        return CycloInt.from_poly(a.d, mul_coeffs(a.residue, b.residue))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycloInt":
        if e < 0:
            raise ValueError("negative exponent")
        result = CycloInt.integer(self.d, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycloInt.integer(self.d, other)
        if not isinstance(other, CycloInt):
            return NotImplemented
        a, b = self._common(other)
        return a.residue == b.residue

    def __hash__(self):
        return hash((self.d, self.residue))

    def is_zero(self) -> bool:
        return not any(self.residue)

    def is_rational(self) -> bool:
        return not any(self.residue[1:])

    def as_integer(self) -> int:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational integer")
        return self.residue[0]


# ---------------------------------------------------------------------------
# Puiseux series


class PuiseuxSeries:
    """Truncated series sum_k c_k q^(k/d) with c_k in Z[zeta_d].

    ``val`` is the numerator of the lowest stored exponent, ``coeffs[i]`` is
    the residue vector of the coefficient of q^((val+i)/d) and ``prec`` is the
    numerator of the truncation order (exponents >= prec/d are unknown), or
    None for an exact (finite) series.  The exponent denominator and the
    cyclotomic index are the same integer ``d``.
    """

    __slots__ = ("d", "val", "coeffs", "prec")

    def __init__(self, d: int, val: int, coeffs: Sequence[Sequence[int]], prec: int | None):
        n = totient(d)
        rows = [tuple(r) for r in coeffs]
        for r in rows:
            if len(r) != n:
                raise ValueError("coefficient residue has wrong length")
        if prec is not None:
            rows = rows[: max(0, prec - val)]
        zero = (0,) * n
        lo = 0
        while lo < len(rows) and rows[lo] == zero:
            lo += 1
        hi = len(rows)
        while hi > lo and rows[hi - 1] == zero:
            hi -= 1
        rows = rows[lo:hi]
        val += lo
        if not rows and prec is not None:
            val = prec
        self.d = d
        self.val = val
        self.coeffs = tuple(rows)
        self.prec = prec

    # construction ---------------------------------------------------------

    @classmethod
    def from_laurent(cls, coeffs: Sequence[int], val: int = 0, prec: int | None = None, d: int = 1):
        """Integer series sum coeffs[i] q^((val+i)/d)."""
        n = totient(d)
        pad = (0,) * (n - 1)
        return cls(d, val, [(c,) + pad for c in coeffs], prec)

    @classmethod
    def monomial(cls, c: CycloInt, num: int, d: int | None = None) -> "PuiseuxSeries":
        d = c.d if d is None else d
        c = c.lift(d) if c.d != d else c
        return cls(d, num, [c.residue], None)

    # accessors ------------------------------------------------------------

    @property
    def lowest_exponent(self) -> Fraction:
        return Fraction(self.val, self.d)

    @property
    def truncation_order(self) -> Fraction | None:
        return None if self.prec is None else Fraction(self.prec, self.d)

    def coefficient(self, exponent: Fraction | int) -> CycloInt:
        """Coefficient of q^exponent; raises if beyond the truncation order."""
        num = Fraction(exponent) * self.d
        if num.denominator != 1:
            return CycloInt.integer(self.d, 0)
        k = int(num)
        if self.prec is not None and k >= self.prec:
            raise ValueError("coefficient beyond truncation order")
        i = k - self.val
        if 0 <= i < len(self.coeffs):
            return CycloInt(self.d, self.coeffs[i])
        return CycloInt.integer(self.d, 0)

    def terms(self):
        """Yield (exponent, CycloInt) for the stored nonzero coefficients."""
        for i, r in enumerate(self.coeffs):
            if any(r):
                yield Fraction(self.val + i, self.d), CycloInt(self.d, r)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self) -> str:
        head = ", ".join(
            f"{e}:{list(c.residue)}" for e, c in list(self.terms())[:4]
        )
        return f"PuiseuxSeries(d={self.d}, {head}, ..., O(q^{self.truncation_order}))"

    # rescaling -------------------------------------------------------------

    def rescale(self, D: int) -> "PuiseuxSeries":
        """Same series viewed with exponent denominator and cyclotomic index D."""
        if D == self.d:
            return self
        if D % self.d:
            raise ValueError("new denominator must be a multiple of the old one")
        s = D // self.d
        n_new = totient(D)
        zero = (0,) * n_new
        rows = [zero] * (s * (len(self.coeffs) - 1) + 1) if self.coeffs else []
        for i, r in enumerate(self.coeffs):
            if any(r):
                rows[i * s] = CycloInt(self.d, r).lift(D).residue
        prec = None if self.prec is None else self.prec * s
        return PuiseuxSeries(D, self.val * s, rows, prec)

    def _aligned(self, other: "PuiseuxSeries") -> tuple["PuiseuxSeries", "PuiseuxSeries"]:
        if self.d == other.d:
            return self, other
        D = math.lcm(self.d, other.d)
        return self.rescale(D), other.rescale(D)

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(self.d, self.val, [tuple(-x for x in r) for r in self.coeffs], self.prec)

    def __add__(self, other: "PuiseuxSeries | int") -> "PuiseuxSeries":
        if isinstance(other, int):
            other = PuiseuxSeries.from_laurent([other], 0, None, 1)
        a, b = self._aligned(other)
        precs = [p for p in (a.prec, b.prec) if p is not None]
        prec = min(precs) if precs else None
        n = totient(a.d)
        zero = (0,) * n
        if not a.coeffs:
            lo = b.val
        elif not b.coeffs:
            lo = a.val
        else:
            lo = min(a.val, b.val)
        hi = max(a.val + len(a.coeffs), b.val + len(b.coeffs))
        if prec is not None:
            hi = min(hi, prec)
        rows = []
        for k in range(lo, hi):
            i, j = k - a.val, k - b.val
            ra = a.coeffs[i] if 0 <= i < len(a.coeffs) else zero
            rb = b.coeffs[j] if 0 <= j < len(b.coeffs) else zero
            rows.append(tuple(x + y for x, y in zip(ra, rb)))
        return PuiseuxSeries(a.d, lo, rows, prec)

    __radd__ = __add__

    def __sub__(self, other: "PuiseuxSeries | int") -> "PuiseuxSeries":
        return self + (-other)

    def __rsub__(self, other: int) -> "PuiseuxSeries":
        return (-self) + other

    def scale(self, c: int) -> "PuiseuxSeries":
        return PuiseuxSeries(self.d, self.val, [tuple(c * x for x in r) for r in self.coeffs], self.prec)

    def __mul__(self, other: "PuiseuxSeries | int") -> "PuiseuxSeries":
        if isinstance(other, int):
            return self.scale(other)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PuiseuxSeries":
        if e < 0:
            raise ValueError("negative exponent")
        result = PuiseuxSeries.from_laurent([1], 0, None, self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def equals(self, other: "PuiseuxSeries") -> bool:
        """Agreement on the common known range."""
        return (self - other).is_zero()

    # collapse -------------------------------------------------------------

    def to_integer_laurent(self) -> tuple[int, list[int], int | None]:
        """Collapse to an integer Laurent series in q.

        Returns (val, coeffs, prec) with exponents val, val+1, ... in q.
        Raises ValueError when some coefficient is not a rational integer or
        some nonzero term has a fractional exponent.
        """
        d = self.d
        for i, r in enumerate(self.coeffs):
            if any(r[1:]):
                raise ValueError(
                    f"non-rational coefficient at exponent {Fraction(self.val + i, d)}"
                )
            if r[0] and (self.val + i) % d:
                raise ValueError(
                    f"nonzero term at fractional exponent {Fraction(self.val + i, d)}"
                )
        if not self.coeffs:
            val = 0 if self.prec is None else -(-self.prec // d)
            return val, [], None if self.prec is None else -(-self.prec // d)
        val = -(-self.val // d)
        top = self.val + len(self.coeffs)
        out = []
        k = val * d
        while k < top:
            i = k - self.val
            out.append(self.coeffs[i][0] if 0 <= i < len(self.coeffs) else 0)
            k += d
        prec = None if self.prec is None else -(-self.prec // d)
        return val, out, prec


def series_mul(s: PuiseuxSeries, t: PuiseuxSeries) -> PuiseuxSeries:
    """Product with truncation propagated pessimistically."""
    a, b = s._aligned(t)
    d = a.d
    if a.prec is None and b.prec is None:
        prec = None
    else:
        cands = []
        if a.prec is not None:
            cands.append(a.prec + (b.val if b.coeffs else a.prec))
        if b.prec is not None:
            cands.append(b.prec + (a.val if a.coeffs else b.prec))
        prec = min(cands)
    if not a.coeffs or not b.coeffs:
        return PuiseuxSeries(d, 0 if prec is None else prec, [], prec)
    val = a.val + b.val
    limit = None if prec is None else max(0, prec - val)
    la, lb = len(a.coeffs), len(b.coeffs)
    if limit is not None:
        la, lb = min(la, limit), min(lb, limit)
    if la == 0 or lb == 0:
        return PuiseuxSeries(d, prec, [], prec)
    n = totient(d)
    if n == 1:
        prod = mul_coeffs([r[0] for r in a.coeffs[:la]], [r[0] for r in b.coeffs[:lb]], limit)
        return PuiseuxSeries(d, val, [(c,) for c in prod], prec)
    # Two-variable Kronecker substitution: slot (i, k) at i*W + k, W = 2n - 1.
    W = 2 * n - 1
    pad = (0,) * (W - n)
    flat_a = [c for r in a.coeffs[:la] for c in r + pad]
    flat_b = [c for r in b.coeffs[:lb] for c in r + pad]
    bound = _max_abs(flat_a) * _max_abs(flat_b) * n * min(la, lb)
    nrows = la + lb - 1
    if limit is not None:
        nrows = min(nrows, limit)
    if bound == 0:
        return PuiseuxSeries(d, val, [], prec)
    nbytes = _slot_bits(bound) // 8
    prod = int(gmpy2.mpz(_pack(flat_a, nbytes)) * gmpy2.mpz(_pack(flat_b, nbytes)))
    slots = _unpack(prod, (la + lb - 1) * W, nbytes)
    rows = []
    for i in range(nrows):
        rows.append(_reduce_cyclo(slots[i * W : (i + 1) * W], d))
    return PuiseuxSeries(d, val, rows, prec)


# ---------------------------------------------------------------------------
# Floating complex backend


def bigcomplex(re_part, im_part=0, prec: int = 53) -> mpmath.mpc:
    """Complex number rounded to ``prec`` bits."""
    with mpmath.workprec(prec):
        return mpmath.mpc(re_part, im_part)
