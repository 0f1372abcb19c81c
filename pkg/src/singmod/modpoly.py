"""Hecke sets C(N), j-map normal forms, and exact F_N and Phi_N.

F_N(j) = prod_{g in C(N)} (j - j o g) is formed as an exact Puiseux product
with cyclotomic coefficients, checked to collapse to an integer q-series, and
then rewritten as a polynomial in j by cancelling the most negative exponent
with powers of the j series until nothing is left.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

from .arith import CycloInt, IntPolynomial, NotDivisible, PuiseuxSeries, mul_coeffs, poly_divexact, totient
from .cmval import class_polynomial, j_series
from .forms import SingularModulusRef, discriminants
from .halfplane import IDENTITY, S, T, IntMatrix2

PHI_MAX_LEVEL = 8
TRANSPORTER_DEPTH = 24
SERIES_MARGIN = 2


class NonIntegralSeries(ArithmeticError):
    pass


class NonzeroRemainder(ArithmeticError):
    pass


class NonConstantRemainder(ArithmeticError):
    pass


class SearchExhausted(RuntimeError):
    pass


class HeckeMatrix(NamedTuple):
    """Upper-triangular (a, b; 0, d) with ad = N, a > 0, 0 <= b < d, gcd 1."""

    a: int
    b: int
    d: int

    @property
    def N(self) -> int:
        return self.a * self.d

    @property
    def matrix(self) -> IntMatrix2:
        return IntMatrix2(self.a, self.b, 0, self.d)

    def is_valid(self) -> bool:
        return self.a > 0 and 0 <= self.b < self.d and math.gcd(self.a, self.b, self.d) == 1


def psi(N: int) -> int:
    """Dedekind psi, N prod_{p | N} (1 + 1/p) = #C(N)."""
    result = N
    m = N
    p = 2
    while p * p <= m:
        if m % p == 0:
            result += result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result += result // m
    return result


@lru_cache(maxsize=None)
def hecke_set(N: int) -> tuple[HeckeMatrix, ...]:
    if N < 1:
        raise ValueError("level must be positive")
    out = []
    for a in range(1, N + 1):
        if N % a:
            continue
        d = N // a
        for b in range(d):
            if math.gcd(a, b, d) == 1:
                out.append(HeckeMatrix(a, b, d))
    out.sort()
    return tuple(out)


# ---------------------------------------------------------------------------
# j-maps


@dataclass(frozen=True)
class Constant:
    ref: SingularModulusRef


@dataclass(frozen=True)
class Modular:
    """z -> j(r z + s), r > 0, 0 <= s < 1."""

    r: Fraction
    s: Fraction

    def __post_init__(self):
        r, s = Fraction(self.r), Fraction(self.s)
        if r <= 0 or not 0 <= s < 1:
            raise ValueError("need r > 0 and 0 <= s < 1")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    def hecke(self) -> HeckeMatrix:
        r, s = self.r, self.s
        den = math.lcm(r.denominator, s.denominator)
        a, b, d = int(r * den), int(s * den), den
        g = math.gcd(a, b, d)
        return HeckeMatrix(a // g, b // g, d // g)


JMap = Union[Constant, Modular]


def _triangularize(g: IntMatrix2) -> tuple[int, int, int]:
    """Left-multiply by SL2(Z) to reach upper-triangular (mu, p; 0, q), mu > 0."""
    a, b, c, d = g
    mu, m, n = _xgcd(a, c)
    if mu < 0:
        mu, m, n = -mu, -m, -n
    p = m * b + n * d
    q = (a * d - b * c) // mu
    return mu, p, q


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    """(g, m, n) with m x + n y = g = gcd(x, y) >= 0."""
    m0, m1, n0, n1 = 1, 0, 0, 1
    while y:
        k, r = divmod(x, y)
        x, y = y, r
        m0, m1 = m1, m0 - k * m1
        n0, n1 = n1, n0 - k * n1
    if x < 0:
        return -x, -m0, -n0
    return x, m0, n0


def jmap_normalize(g: IntMatrix2) -> tuple[int, HeckeMatrix]:
    """The unique (N, h), h in C(N), with j(g z) = j(h z) for all z."""
    if g.det <= 0:
        raise ValueError("matrix must have positive determinant")
    mu, p, q = _triangularize(g)
    cont = math.gcd(mu, p, q)
    mu, p, q = mu // cont, p // cont, q // cont
    h = HeckeMatrix(mu, p % q, q)
    return h.N, h


def jmap_of_matrix(g: IntMatrix2) -> Modular:
    _, h = jmap_normalize(g)
    return Modular(Fraction(h.a, h.d), Fraction(h.b, h.d))


def hecke_right_action(g: HeckeMatrix, gamma: IntMatrix2) -> HeckeMatrix:
    """The h in C(N) with j(g gamma z) = j(h z)."""
    if gamma.det != 1:
        raise ValueError("gamma must be unimodular")
    N, h = jmap_normalize(g.matrix @ gamma)
    assert N == g.N
    return h


def hecke_transporter(g: HeckeMatrix, h: HeckeMatrix, max_depth: int = TRANSPORTER_DEPTH) -> IntMatrix2:
    """Some gamma in SL2(Z) with hecke_right_action(g, gamma) == h.

    Breadth-first search over words in S, T, T^-1, pruned by the Hecke matrix
    reached so far.  The result is checked before it is returned.
    """
    if g.N != h.N:
        raise ValueError("transporter needs two elements of the same C(N)")
    moves = (S, T, T.inverse())
    seen = {g: IDENTITY}
    frontier = deque([(g, IDENTITY, 0)])
    while frontier:
        cur, word, depth = frontier.popleft()
        if cur == h:
            assert hecke_right_action(g, word) == h
            return word
        if depth == max_depth:
            continue
        for m in moves:
            nxt = hecke_right_action(cur, m)
            if nxt not in seen:
                seen[nxt] = word @ m
                frontier.append((nxt, word @ m, depth + 1))
    raise SearchExhausted(f"no transporter from {g} to {h} within depth {max_depth}")


# ---------------------------------------------------------------------------
# q-expansions


def j_as_series(order) -> PuiseuxSeries:
    """j(z) known for exponents < order."""
    return j_of_gz_series(HeckeMatrix(1, 0, 1), order)


def j_of_gz_series(g: HeckeMatrix, order) -> PuiseuxSeries:
    """sum_m c(m) zeta_d^(b m) q^(a m/d), all exponents < order."""
    a, b, d = g
    prec = math.ceil(Fraction(order) * d)
    # a*m < prec  <=>  m <= (prec - 1) // a
    mmax = (prec - 1) // a
    js = j_series(max(mmax, 0))
    n = totient(d)
    zero = (0,) * n
    rows = [zero] * (a * (mmax + 1) + 1)
    for m in range(-1, mmax + 1):
        c = js.c(m)
        if c:
            rows[a * (m + 1)] = CycloInt.zeta(d, b * m).residue if c == 1 else tuple(
                c * x for x in CycloInt.zeta(d, b * m).residue
            )
    return PuiseuxSeries(d, -a, rows, prec)


def _pole_order(g: HeckeMatrix) -> Fraction:
    return max(Fraction(1), Fraction(g.a, g.d))


def hecke_diagonal_series(N: int, order: int) -> PuiseuxSeries:
    """prod_{g in C(N)} (j - j o g), known for exponents < order."""
    C = hecke_set(N)
    total = sum(_pole_order(g) for g in C)
    factors = []
    for g in C:
        need = order + total - _pole_order(g)
        f = (j_as_series(need) - j_of_gz_series(g, need)).rescale(N)
        factors.append((_pole_order(g), f))
    # Multiply high-pole factors last so early partial products stay short.
    factors.sort(key=lambda t: t[0])
    prod = PuiseuxSeries.from_laurent([1], 0, None, N)
    for _, f in factors:
        prod = prod * f
    return prod


def _j_powers(kmax: int, prec: int) -> list[list[int]]:
    """j^k for k <= kmax as coefficient lists starting at q^-k.

    Every list has prec + kmax entries, which is enough for j^k to be exact
    below q^(prec + kmax - k) and so in particular below q^prec.
    """
    length = prec + kmax
    base = list(j_series(max(length, 1)).coeffs)[: length + 1]
    powers = [[1] + [0] * (length - 1)]
    for _ in range(kmax):
        powers.append(mul_coeffs(powers[-1], base, length))
    return powers


def pole_reduce(val: int, coeffs: list[int], prec: int) -> IntPolynomial:
    """Write an integer q-series (exponents val.., known below prec) as P(j)."""
    if prec is None:
        prec = max(1, val + len(coeffs))
    if prec < 1:
        raise ValueError("series must be known through the constant term")
    K = max(0, -val)
    work = {val + i: c for i, c in enumerate(coeffs) if c}
    powers = _j_powers(K, prec)
    out = [0] * (K + 1)
    for k in range(K, -1, -1):
        lam = work.get(-k, 0)
        if not lam:
            continue
        out[k] = lam
        for i, c in enumerate(powers[k]):
            e = i - k
            if e >= prec:
                break
            if c:
                work[e] = work.get(e, 0) - lam * c
    leftover = {e: c for e, c in work.items() if c and e < prec}
    if leftover:
        e = min(leftover)
        raise NonzeroRemainder(f"remainder {leftover[e]} q^{e} after pole reduction")
    return IntPolynomial(out)


def series_to_poly_in_j(s: PuiseuxSeries) -> IntPolynomial:
    try:
        val, coeffs, prec = s.to_integer_laurent()
    except ValueError as exc:
        raise NonIntegralSeries(str(exc)) from None
    return pole_reduce(val, coeffs, prec)


def poly_at_j_series(P: IntPolynomial, order: int) -> PuiseuxSeries:
    """P(j) as a q-series known for exponents < order."""
    J = j_as_series(order + max(P.degree, 0) + 1)
    acc = PuiseuxSeries.from_laurent([], 0, None)
    for c in reversed(P.coeffs):
        acc = acc * J + c
    return PuiseuxSeries(acc.d, acc.val, acc.coeffs, order)


@lru_cache(maxsize=None)
def f_polynomial(N: int) -> IntPolynomial:
    """F_N(X) = Phi_N(X, X)."""
    if N < 2:
        raise ValueError("F_N is defined for N > 1")
    return series_to_poly_in_j(hecke_diagonal_series(N, SERIES_MARGIN + 1))


@lru_cache(maxsize=None)
def modular_polynomial(N: int, max_level: int = PHI_MAX_LEVEL) -> tuple[IntPolynomial, ...]:
    """Phi_N(X, Y) as coefficients of X^0, X^1, ..., each a polynomial in Y."""
    if not 2 <= N <= max_level:
        raise ValueError(f"modular polynomial supported for 2 <= N <= {max_level}")
    C = hecke_set(N)
    total = sum(Fraction(g.a, g.d) for g in C)
    need = SERIES_MARGIN + 1 + total
    one = PuiseuxSeries.from_laurent([1], 0, None, N)
    # coefficients of X^0 .. X^k of prod (X - j o g)
    poly = [one]
    for g in C:
        s = j_of_gz_series(g, need).rescale(N)
        nxt = [None] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = c if nxt[i + 1] is None else nxt[i + 1] + c
            t = -(c * s)
            nxt[i] = t if nxt[i] is None else nxt[i] + t
        poly = nxt
    return tuple(series_to_poly_in_j(c) for c in poly)


def phi_eval_diagonal(phi: tuple[IntPolynomial, ...]) -> IntPolynomial:
    """Phi(X, X) from the X-coefficient list."""
    x = IntPolynomial.x()
    out = IntPolynomial()
    for i, coeff in enumerate(phi):
        out = out + coeff * x ** i
    return out


def format_bivariate(phi: tuple[IntPolynomial, ...]) -> str:
    terms = []
    for i in range(len(phi) - 1, -1, -1):
        for k in range(phi[i].degree, -1, -1):
            c = phi[i][k]
            if not c:
                continue
            mono = "*".join(
                m for m in (
                    "" if i == 0 else ("X" if i == 1 else f"X^{i}"),
                    "" if k == 0 else ("Y" if k == 1 else f"Y^{k}"),
                ) if m
            )
            a = abs(c)
            body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{s} {b}" for s, b in terms[1:]])


# ---------------------------------------------------------------------------
# factorization into class polynomials


@dataclass(frozen=True)
class FFactorization:
    N: int
    sign: int
    content: int
    factors: tuple[tuple[int, int], ...]  # (disc, multiplicity), by increasing |disc|

    @property
    def leading(self) -> int:
        return self.sign * self.content

    def multiplicity(self, D: int) -> int:
        return dict(self.factors).get(D, 0)


@lru_cache(maxsize=None)
def factor_f_into_class_polys(N: int) -> FFactorization:
    """F_N = sign * content * prod H_D^m, trial-dividing by H_D for |D| <= 4N."""
    rest = f_polynomial(N)
    factors = []
    for D in discriminants(4 * N):
        H = class_polynomial(D).poly
        m = 0
        while rest.degree >= H.degree:
            try:
                rest = poly_divexact(rest, H)
            except NotDivisible:
                break
            m += 1
        if m:
            factors.append((D, m))
    if rest.degree != 0:
        raise NonConstantRemainder(f"F_{N} has a factor of degree {rest.degree} left over")
    c = rest.leading
    return FFactorization(N, 1 if c > 0 else -1, abs(c), tuple(factors))
