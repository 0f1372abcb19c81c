"""Multiplicative dependence among exact rationals, heights of quadratic numbers,
and an exhaustive search over differences of rational singular moduli.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import sympy

from .cmval import class_polynomial
from .forms import SingularModulusRef, class_number, discriminants

TRIAL_LIMIT = 10**6
INFINITE = math.inf


class FactorizationIncomplete(ArithmeticError):
    pass


class ContractViolation(ValueError):
    pass


# ---------------------------------------------------------------------------
# factored rationals


@lru_cache(maxsize=1 << 14)
def factor_int(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |n| > 0 as sorted (p, e) pairs."""
    n = abs(n)
    if n == 0:
        raise ValueError("zero has no factorization")
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p, step = 7, itertools.cycle((4, 2, 4, 2, 4, 6, 2, 6))
    while n > 1 and p <= TRIAL_LIMIT and p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += next(step)
    if n > 1:
        if n < TRIAL_LIMIT ** 2 or sympy.isprime(n):
            out[n] = out.get(n, 0) + 1
        else:
            for q, e in sympy.factorint(n).items():
                if not sympy.isprime(q):
                    raise FactorizationIncomplete(f"could not split {q}")
                out[q] = out.get(q, 0) + e
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class FactoredRational:
    sign: int
    exponents: tuple[tuple[int, int], ...]  # sorted (prime, nonzero exponent)

    @classmethod
    def of(cls, x: int | Fraction) -> "FactoredRational":
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero is not a unit in the multiplicative group")
        exps = Counter(dict(factor_int(x.numerator)))
        if x.denominator != 1:
            exps.subtract(dict(factor_int(x.denominator)))
        return cls(1 if x > 0 else -1, tuple(sorted((p, e) for p, e in exps.items() if e)))

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        exps = Counter(dict(self.exponents))
        exps.update(dict(other.exponents))
        return FactoredRational(self.sign * other.sign, tuple(sorted((p, e) for p, e in exps.items() if e)))

    def __pow__(self, k: int) -> "FactoredRational":
        sign = self.sign if k % 2 else 1
        return FactoredRational(sign, tuple((p, e * k) for p, e in self.exponents if k))

    @property
    def value(self) -> Fraction:
        out = Fraction(self.sign)
        for p, e in self.exponents:
            out *= Fraction(p) ** e
        return out

    def is_one(self) -> bool:
        return self.sign == 1 and not self.exponents

    def format(self) -> str:
        parts = [str(p) if e == 1 else f"{p}^{e}" for p, e in self.exponents]
        body = " * ".join(parts) if parts else "1"
        return ("-" if self.sign < 0 else "") + body


def _as_factored(v) -> FactoredRational:
    return v if isinstance(v, FactoredRational) else FactoredRational.of(v)


# ---------------------------------------------------------------------------
# integer kernels


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Basis of {v in Z^n : row . v = 0 for every row}.

    Column operations reduce the matrix to echelon form while the same
    operations act on an identity matrix; the transformed columns that end up
    over zero columns span the integer kernel.
    """
    A = [list(r) for r in rows]
    cols = [[A[i][j] for i in range(len(A))] for j in range(n)]
    U = [[int(i == j) for i in range(n)] for j in range(n)]
    pivot_col = 0
    for i in range(len(A)):
        if pivot_col == n:
            break
        while True:
            nz = [j for j in range(pivot_col, n) if cols[j][i]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(cols[j][i]))
            cols[pivot_col], cols[j0] = cols[j0], cols[pivot_col]
            U[pivot_col], U[j0] = U[j0], U[pivot_col]
            piv = cols[pivot_col][i]
            done = True
            for j in range(pivot_col + 1, n):
                c = cols[j][i]
                if c:
                    k = c // piv
                    cols[j] = [x - k * y for x, y in zip(cols[j], cols[pivot_col])]
                    U[j] = [x - k * y for x, y in zip(U[j], U[pivot_col])]
                    if cols[j][i]:
                        done = False
            if done:
                pivot_col += 1
                break
    return [_primitive_sign(tuple(U[j])) for j in range(pivot_col, n)]


def _primitive_sign(v: tuple[int, ...]) -> tuple[int, ...]:
    g = math.gcd(*v)
    if g > 1:
        v = tuple(x // g for x in v)
    return _leading_positive(v)


def _leading_positive(v: tuple[int, ...]) -> tuple[int, ...]:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def exponent_matrix(values: Sequence[FactoredRational]) -> tuple[list[list[int]], list[int]]:
    """Prime-exponent rows and the sign indicator row."""
    primes = sorted({p for v in values for p, _ in v.exponents})
    rows = [[dict(v.exponents).get(p, 0) for v in values] for p in primes]
    signs = [1 if v.sign < 0 else 0 for v in values]
    return rows, signs


def multiplicative_kernel(values: Sequence) -> list[tuple[int, ...]]:
    """Lattice basis of {v : prod values[i]^v[i] = 1}."""
    vals = [_as_factored(v) for v in values]
    n = len(vals)
    if n == 0:
        return []
    rows, signs = exponent_matrix(vals)
    # An auxiliary column t with  sum v_i [x_i < 0] + 2 t = 0  enforces even sign weight.
    ext = [r + [0] for r in rows] + [signs + [2]]
    return [_leading_positive(v[:n]) for v in integer_kernel(ext, n + 1)]


def _vanishes_on(basis: Sequence[Sequence[int]], i: int) -> bool:
    return all(v[i] == 0 for v in basis)


def verify_relation(values: Sequence, exps: Sequence[int]) -> bool:
    total = FactoredRational(1, ())
    for v, e in zip(values, exps):
        total = total * (_as_factored(v) ** e)
    return total.is_one()


def is_dependent(values: Sequence) -> bool:
    return bool(multiplicative_kernel(values))


def minimal_dependent_subset_containing(values: Sequence, i: int) -> tuple[int, ...] | None:
    """A minimally dependent index set containing i, or None.

    Greedy deletion keeps only indices without which no relation involves i;
    what remains is a circuit of the exponent matroid.
    """
    vals = [_as_factored(v) for v in values]
    if _vanishes_on(multiplicative_kernel(vals), i):
        return None
    keep = list(range(len(vals)))
    for j in range(len(vals)):
        if j == i:
            continue
        trial = [k for k in keep if k != j]
        sub = multiplicative_kernel([vals[k] for k in trial])
        if not _vanishes_on(sub, trial.index(i)):
            keep = trial
    return tuple(keep)


def minimal_dependent_subsets(values: Sequence) -> list[tuple[int, ...]]:
    """One minimal dependent subset for each index lying in some dependent subset."""
    vals = [_as_factored(v) for v in values]
    found: list[tuple[int, ...]] = []
    covered: set[int] = set()
    for i in range(len(vals)):
        if i in covered:
            continue
        s = minimal_dependent_subset_containing(vals, i)
        if s is not None:
            found.append(s)
            covered.update(s)
    return found


def relation_on_subset(values: Sequence, subset: Sequence[int]) -> tuple[int, ...]:
    """The (unique up to scaling) relation supported on a minimal subset, padded to full length."""
    vals = [_as_factored(values[k]) for k in subset]
    basis = multiplicative_kernel(vals)
    if len(basis) != 1:
        raise ContractViolation("subset is not minimally dependent")
    out = [0] * len(values)
    for k, e in zip(subset, basis[0]):
        out[k] = e
    return tuple(out)


# ---------------------------------------------------------------------------
# combination lemma


@dataclass(frozen=True)
class CombineStep:
    index: int
    lam: int
    result: tuple[int, ...]

    @property
    def bound(self) -> int:
        return 2 * self.lam * self.lam


def combine_step(v: Sequence[int], w: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """u = v + lam w with lam = 1 + max |entries|; supp u = supp v | supp w."""
    lam = 1 + max(max(abs(x) for x in v), max(abs(x) for x in w))
    return tuple(x + lam * y for x, y in zip(v, w)), lam


def combine_all_nonzero(vectors: Sequence[Sequence[int]], trace: list | None = None) -> tuple[int, ...]:
    """An integer combination of the inputs with every coordinate nonzero.

    Requires vectors[i][i] != 0.  Each step that fixes a zero coordinate
    records a CombineStep in ``trace`` when one is supplied.
    """
    n = len(vectors)
    if n == 0:
        return ()
    for i, v in enumerate(vectors):
        if len(v) != n:
            raise ContractViolation("vectors must have one coordinate per input")
        if v[i] == 0:
            raise ContractViolation(f"diagonal entry {i} is zero")
    u = tuple(vectors[0])
    for k in range(1, n):
        if u[k]:
            continue
        u, lam = combine_step(u, vectors[k])
        if max(abs(x) for x in u) > 2 * lam * lam:
            raise AssertionError("combination bound violated")  # pragma: no cover
        if trace is not None:
            trace.append(CombineStep(k, lam, u))
    return u


def all_nonzero_relation(values: Sequence) -> tuple[int, ...] | None:
    """A relation with every exponent nonzero, or None if none exists."""
    vals = [_as_factored(v) for v in values]
    n = len(vals)
    basis = multiplicative_kernel(vals)
    if not basis or any(_vanishes_on(basis, i) for i in range(n)):
        return None
    vecs = []
    for i in range(n):
        sub = minimal_dependent_subset_containing(vals, i)
        vecs.append(relation_on_subset(vals, sub))
    u = combine_all_nonzero(vecs)
    g = math.gcd(*u)
    # Dividing out the content keeps the prime rows at zero but can break the
    # sign parity; in that case the relation is twice a primitive vector.
    if not verify_relation(vals, tuple(x // g for x in u)):
        g //= 2
    return _leading_positive(tuple(x // g for x in u))


# ---------------------------------------------------------------------------
# search over rational singular moduli


def rational_singular_moduli(max_disc: int) -> list[tuple[SingularModulusRef, int]]:
    out = []
    for D in discriminants(max_disc):
        if class_number(D) == 1:
            out.append((SingularModulusRef.of(D, 0), -class_polynomial(D).poly[0]))
    return out


def search_difference_relations(max_disc: int, n: int) -> list[tuple[tuple[SingularModulusRef, ...], tuple[int, ...]]]:
    """Tuples (x_1, ..., x_n, y) with prod (x_i - y)^{a_i} = 1 and all a_i nonzero.

    The x's are listed in increasing |disc| order; every emitted relation is
    re-verified by exact multiplication.
    """
    if n <= 0:
        return []
    pool = rational_singular_moduli(max_disc)
    results = []
    for yi, (yref, y) in enumerate(pool):
        others = [p for k, p in enumerate(pool) if k != yi]
        for xs in itertools.combinations(others, n):
            diffs = [x - y for _, x in xs]
            exps = all_nonzero_relation(diffs)
            if exps is None:
                continue
            if not verify_relation(diffs, exps):
                raise AssertionError("relation failed exact re-verification")  # pragma: no cover
            results.append((tuple(r for r, _ in xs) + (yref,), exps))
    return results


# ---------------------------------------------------------------------------
# quadratic numbers and heights


def _squarefree_split(D: int) -> tuple[int, int]:
    """(s, f) with D = f^2 s, s squarefree (sign kept on s)."""
    if D == 0:
        return 0, 0
    sign = -1 if D < 0 else 1
    s, f = 1, 1
    for p, e in factor_int(abs(D)):
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    return sign * s, f


@dataclass(frozen=True)
class QuadraticNumber:
    """p + q sqrt(D) with D squarefree; rational iff q == 0 (then D == 1)."""

    p: Fraction
    q: Fraction = Fraction(0)
    D: int = 1

    def __post_init__(self):
        p, q = Fraction(self.p), Fraction(self.q)
        s, f = _squarefree_split(self.D)
        q *= f
        if s == 1:
            p, q = p + q, Fraction(0)
        if q == 0 or s == 0:
            s, q = 1, Fraction(0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", s)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    @property
    def is_real(self) -> bool:
        return self.D > 0

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.p, -self.q, self.D)

    def _check(self, other: "QuadraticNumber") -> None:
        if not (self.is_rational or other.is_rational or self.D == other.D):
            raise ValueError("different quadratic fields")

    def _field(self, other):
        return self.D if not self.is_rational else other.D

    def __add__(self, other):
        other = _qn(other)
        self._check(other)
        return QuadraticNumber(self.p + other.p, self.q + other.q, self._field(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.p, -self.q, self.D)

    def __sub__(self, other):
        return self + (-_qn(other))

    def __rsub__(self, other):
        return _qn(other) - self

    def __mul__(self, other):
        other = _qn(other)
        self._check(other)
        D = self._field(other)
        return QuadraticNumber(
            self.p * other.p + self.q * other.q * D,
            self.p * other.q + self.q * other.p,
            D,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.D

    def sign(self) -> int:
        """Sign of a real quadratic number, decided exactly."""
        if self.D < 0 and self.q:
            raise ValueError("not a real number")
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0 or sp == sq:
            return sp or sq
        if sp == 0:
            return sq
        # opposite signs: compare p^2 with q^2 D
        diff = self.p * self.p - self.q * self.q * self.D
        return sp if diff > 0 else (sq if diff < 0 else 0)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def compare(self, other) -> int:
        return (self - _qn(other)).sign()

    def minimal_polynomial(self) -> tuple[int, ...]:
        """Primitive integer minimal polynomial, constant term first, positive leading."""
        if self.is_rational:
            x = self.p
            return (-x.numerator, x.denominator)
        tr, nm = 2 * self.p, self.norm()
        den = math.lcm(tr.denominator, nm.denominator)
        coeffs = (int(nm * den), int(-tr * den), den)
        g = math.gcd(*coeffs)
        return tuple(c // g for c in coeffs)

    def to_mpc(self, prec: int = 128):
        with mpmath.workprec(prec):
            p, q = mpmath.mpf(self.p.numerator) / self.p.denominator, mpmath.mpf(self.q.numerator) / self.q.denominator
            root = mpmath.sqrt(mpmath.mpf(self.D)) if self.D > 0 else mpmath.mpc(0, mpmath.sqrt(-self.D))
            return p + q * root

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt({self.D})"


def _qn(x) -> QuadraticNumber:
    return x if isinstance(x, QuadraticNumber) else QuadraticNumber(Fraction(x))


@dataclass(frozen=True)
class Height:
    """Multiplicative height, with the Mahler measure M = H^deg held exactly."""

    degree: int
    mahler: QuadraticNumber
    value: mpmath.mpf = field(compare=False)


def mahler_measure(alpha: QuadraticNumber) -> QuadraticNumber:
    f = alpha.minimal_polynomial()
    if len(f) == 2:
        return _qn(max(abs(f[0]), abs(f[1])))
    a0, _, a2 = f
    if alpha.D < 0:
        # |r1| = |r2| = sqrt(a0/a2)
        return _qn(max(a0, a2))
    big = [r for r in (alpha, alpha.conjugate()) if abs(r).compare(1) > 0]
    if len(big) == 2:
        return _qn(abs(a0))
    if not big:
        return _qn(a2)
    return abs(big[0]) * a2


def height(alpha) -> Height:
    """H(alpha) = M(f)^(1/deg) for the primitive minimal polynomial f."""
    alpha = _qn(alpha)
    M = mahler_measure(alpha)
    deg = 1 if alpha.is_rational else 2
    with mpmath.workprec(96):
        m = M.to_mpc(96).real
        value = m if deg == 1 else mpmath.sqrt(m)
    return Height(deg, M, value)


def height_at_most(alpha, bound: int) -> bool:
    """Exact test H(alpha) <= bound."""
    h = height(alpha)
    return h.mahler.compare(bound ** h.degree) <= 0


def k_height(alpha, k: int):
    """Smallest max-coefficient of a nonzero integer polynomial of degree <= k vanishing at alpha."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    alpha = _qn(alpha)
    if alpha.is_rational:
        return max(abs(alpha.p.numerator), alpha.p.denominator)
    if k == 1:
        return INFINITE
    return max(abs(c) for c in alpha.minimal_polynomial())


def cm_point_parts(form) -> tuple[QuadraticNumber, QuadraticNumber]:
    """Re tau and Im tau of the CM point of a form (a, b, c)."""
    a, b, c = form
    D = b * b - 4 * a * c
    return QuadraticNumber(Fraction(-b, 2 * a)), QuadraticNumber(0, Fraction(1, 2 * a), -D)


