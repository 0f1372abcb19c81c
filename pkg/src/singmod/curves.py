"""Enumeration and exact verification of multiplicative special curves.

A curve in C^(n+1) is determined by distinct levels N_1 < ... < N_k and a
primitive exponent vector b.  Its coordinates are the singular moduli where
prod F_{N_i}^{b_i} has a zero or a pole, the j-maps z -> j(gz) for g in the
union of the C(N_i), and finally j(z) itself.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .arith import IntPolynomial, poly_mul
from .cmval import class_polynomial
from .depsearch import factor_int, integer_kernel
from .forms import SingularModulusRef, class_number, cm_point, reduced_forms
from .halfplane import act, reduce_to_fundamental
from .modpoly import HeckeMatrix, f_polynomial, factor_f_into_class_polys, hecke_set, psi


class IdentityFailed(AssertionError):
    pass


def disc_order(D: int) -> tuple[int, int]:
    """Constants are listed by increasing |disc|."""
    return (-D, 0)


@dataclass(frozen=True)
class CurveLevelData:
    N: int
    f_poly: IntPolynomial
    factors: tuple[tuple[int, int], ...]
    sign: int
    content: int
    content_factors: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, N: int) -> "CurveLevelData":
        fac = factor_f_into_class_polys(N)
        return cls(N, f_polynomial(N), fac.factors, fac.sign, fac.content, factor_int(fac.content))

    def multiplicity(self, D: int) -> int:
        return dict(self.factors).get(D, 0)

    def valuation(self, p: int) -> int:
        return dict(self.content_factors).get(p, 0)


@dataclass(frozen=True)
class CurveIdentity:
    sign: int
    multiplicities: tuple[tuple[int, int], ...]  # (disc, sum_i b_i e_{i,disc})


@dataclass(frozen=True)
class MSCurve:
    n: int
    levels: tuple[int, ...]
    b: tuple[int, ...]
    multiplicities: tuple[tuple[int, int], ...]  # support discs with nonzero total exponent
    kernel_dim: int = 1

    @property
    def constant_coords(self) -> tuple[SingularModulusRef, ...]:
        out = []
        for D, _ in sorted(self.multiplicities, key=lambda t: disc_order(t[0])):
            out.extend(SingularModulusRef(D, f) for f in reduced_forms(D))
        return tuple(out)

    @property
    def nonconstant_coords(self) -> tuple[HeckeMatrix, ...]:
        return tuple(g for N in self.levels for g in hecke_set(N))

    @property
    def m(self) -> int:
        return sum(class_number(D) for D, _ in self.multiplicities)

    @property
    def l(self) -> int:
        return sum(psi(N) for N in self.levels)

    def to_json(self, identity: CurveIdentity | None = None) -> dict:
        out = {
            "n": self.n,
            "levels": list(self.levels),
            "b": list(self.b),
            "constants": [{"disc": r.disc, "rootIndex": r.root_index} for r in self.constant_coords],
            "heckes": [{"N": g.N, "a": g.a, "b": g.b, "d": g.d} for g in self.nonconstant_coords],
            "metadata": {"kernelDim": self.kernel_dim, "dedupKey": "levels+support"},
        }
        if identity is not None:
            out["identity"] = {
                "sign": identity.sign,
                "multiplicities": [{"disc": D, "mult": m} for D, m in identity.multiplicities],
            }
        return out


# ---------------------------------------------------------------------------
# identity check


def _prod_powers(items: Sequence[tuple[IntPolynomial, int]]) -> IntPolynomial:
    out = IntPolynomial.constant(1)
    for p, e in items:
        if e:
            out = poly_mul(out, p ** e)
    return out


def verify_curve_identity(c: MSCurve) -> CurveIdentity:
    """Check prod F_{N_i}^{b_i} = sign * prod H_D^{m_D} exactly.

    Negative exponents are moved across so that both sides are integer
    polynomials; the sign is then read off and confirmed coefficientwise.
    """
    data = [CurveLevelData.of(N) for N in c.levels]
    mults = {}
    for lvl, bi in zip(data, c.b):
        for D, e in lvl.factors:
            mults[D] = mults.get(D, 0) + bi * e
    mults = {D: m for D, m in mults.items() if m}
    lhs_num = _prod_powers([(lvl.f_poly, bi) for lvl, bi in zip(data, c.b) if bi > 0])
    lhs_den = _prod_powers([(lvl.f_poly, -bi) for lvl, bi in zip(data, c.b) if bi < 0])
    rhs_num = _prod_powers([(class_polynomial(D).poly, m) for D, m in mults.items() if m > 0])
    rhs_den = _prod_powers([(class_polynomial(D).poly, -m) for D, m in mults.items() if m < 0])
    left = poly_mul(lhs_num, rhs_den)
    right = poly_mul(lhs_den, rhs_num)
    sign = 1 if left.leading * right.leading > 0 else -1
    target = right * sign
    if left != target:
        for k in range(max(left.degree, target.degree) + 1):
            if left[k] != target[k]:
                raise IdentityFailed(f"coefficient of X^{k}: {left[k]} != {target[k]}")
    expected = dict(sorted(c.multiplicities))
    if expected != mults:
        raise IdentityFailed(f"multiplicities {mults} differ from recorded {expected}")
    return CurveIdentity(sign, tuple(sorted(mults.items(), key=lambda t: disc_order(t[0]))))


# ---------------------------------------------------------------------------
# membership


def curve_contains(c: MSCurve, point: Sequence[SingularModulusRef]) -> bool:
    """Whether a tuple of singular moduli lies on the curve, decided exactly."""
    consts = c.constant_coords
    heckes = c.nonconstant_coords
    if len(point) != len(consts) + len(heckes) + 1:
        return False
    if tuple(point[: len(consts)]) != consts:
        return False
    tau = cm_point(point[-1].form)
    for g, ref in zip(heckes, point[len(consts) : -1]):
        w, _ = reduce_to_fundamental(act(g.matrix, tau))
        if w.tag != tuple(ref.form):
            return False
    return True


def image_refs(levels: Sequence[int], ref: SingularModulusRef) -> list[SingularModulusRef]:
    """The singular moduli j(g tau) for g in the union of the C(N_i), in coordinate order."""
    tau = cm_point(ref.form)
    out = []
    for N in levels:
        for g in hecke_set(N):
            w, _ = reduce_to_fundamental(act(g.matrix, tau))
            a, b, cc = w.tag
            out.append(SingularModulusRef(b * b - 4 * a * cc, w.tag))
    return out


# ---------------------------------------------------------------------------
# enumeration


def max_levels(n: int) -> int:
    """Upper bound for the number k of distinct levels."""
    return max(0, math.floor((math.isqrt(8 * n + 17) - 5) / 2))


def level_sets(n: int) -> list[tuple[int, ...]]:
    out = []
    candidates = [N for N in range(2, n - 1) if psi(N) <= n - 1]
    for k in range(1, max_levels(n) + 1):
        for combo in itertools.combinations(candidates, k):
            if sum(psi(N) for N in combo) <= n - 1:
                out.append(combo)
    return out


def _supports(classes: Sequence[int], m: int):
    """Subsets of discriminant classes whose class numbers sum to m."""
    h = [class_number(D) for D in classes]

    def rec(i, remaining, chosen):
        if remaining == 0:
            yield tuple(chosen)
            return
        if i == len(classes):
            return
        if h[i] <= remaining:
            chosen.append(classes[i])
            yield from rec(i + 1, remaining - h[i], chosen)
            chosen.pop()
        yield from rec(i + 1, remaining, chosen)

    yield from rec(0, m, [])


def _generic_element(basis: Sequence[Sequence[int]], functionals: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """An integer kernel vector on which no listed functional vanishes.

    Returns None when some functional vanishes on the whole kernel.  Otherwise
    each functional evaluated on sum_j t^j basis_j is a nonzero polynomial in t,
    so some small t avoids every root.
    """
    evals = []
    for f in functionals:
        vals = [sum(x * y for x, y in zip(f, v)) for v in basis]
        if not any(vals):
            return None
        evals.append(vals)
    for t in itertools.count(1):
        coeffs = [t ** j for j in range(len(basis))]
        if all(sum(c * v for c, v in zip(coeffs, vals)) for vals in evals):
            vec = [sum(c * v[i] for c, v in zip(coeffs, basis)) for i in range(len(basis[0]))]
            g = math.gcd(*vec)
            vec = [x // g for x in vec]
            if vec[0] < 0:
                vec = [-x for x in vec]
            return tuple(vec)


def curves_for_levels(n: int, levels: tuple[int, ...]) -> list[MSCurve]:
    l = sum(psi(N) for N in levels)
    m = n - l
    if m < 1:
        return []
    data = [CurveLevelData.of(N) for N in levels]
    k = len(levels)
    classes = sorted({D for lvl in data for D, _ in lvl.factors}, key=disc_order)
    primes = sorted({p for lvl in data for p, _ in lvl.content_factors})
    prime_rows = [[lvl.valuation(p) for lvl in data] for p in primes]
    class_rows = {D: [lvl.multiplicity(D) for lvl in data] for D in classes}
    unit_rows = [[int(i == j) for j in range(k)] for i in range(k)]
    out = []
    for support in _supports(classes, m):
        off = [class_rows[D] for D in classes if D not in support]
        basis = integer_kernel(prime_rows + off, k)
        if not basis:
            continue
        b = _generic_element(basis, unit_rows + [class_rows[D] for D in support])
        if b is None:
            continue
        mults = tuple((D, sum(x * y for x, y in zip(b, class_rows[D]))) for D in support)
        out.append(MSCurve(n, levels, b, mults, len(basis)))
    return out


def _curves_checked(args):
    n, levels = args
    found = curves_for_levels(n, levels)
    for c in found:
        verify_curve_identity(c)
    return found


def enumerate_curves(n: int, jobs: int = 1) -> list[MSCurve]:
    """All multiplicative special curves in C^(n+1), one per (levels, support)."""
    if n < 1:
        raise ValueError("n must be positive")
    tasks = [(n, levels) for levels in level_sets(n)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_curves_checked, tasks))
    else:
        chunks = [_curves_checked(t) for t in tasks]
    curves = [c for chunk in chunks for c in chunk]
    curves.sort(key=lambda c: (c.levels, [disc_order(D) for D, _ in c.multiplicities]))
    return curves


def example_curve() -> MSCurve:
    """The curve through (1728, -3375, 8000, j(z/2), j((z+1)/2), j(2z), j(z))."""
    return MSCurve(6, (2,), (1,), ((-4, 1), (-7, 2), (-8, 1)))
