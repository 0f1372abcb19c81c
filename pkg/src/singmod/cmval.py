"""The q-expansion of j, evaluation at CM points, and Hilbert class polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .arith import IntPolynomial, mul_coeffs
from .forms import check_discriminant, cm_point, reduced_forms
from .halfplane import HPoint, reduce_to_fundamental

MAX_DOUBLINGS = 6


class PrecisionEscalationFailed(ArithmeticError):
    pass


@dataclass(frozen=True)
class JSeries:
    """Coefficients c(-1), c(0), ..., c(order) of j = sum c(n) q^n."""

    coeffs: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 2

    def c(self, n: int) -> int:
        if not -1 <= n <= self.order:
            raise IndexError(f"c({n}) outside the computed range")
        return self.coeffs[n + 1]


def _partition_series(n: int) -> list[int]:
    """Coefficients of 1/prod(1 - q^m) through q^(n-1), by the pentagonal recurrence."""
    p = [0] * n
    p[0] = 1
    pent = []
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 >= n:
            break
        sign = 1 if k % 2 else -1
        pent.append((g1, sign))
        g2 = k * (3 * k + 1) // 2
        if g2 < n:
            pent.append((g2, sign))
        k += 1
    for m in range(1, n):
        total = 0
        for g, sign in pent:
            if g > m:
                break
            total += sign * p[m - g]
        p[m] = total
    return p


def _sigma3(n: int) -> list[int]:
    s = [0] * n
    for d in range(1, n):
        d3 = d ** 3
        for m in range(d, n, d):
            s[m] += d3
    return s


def _power(series: list[int], e: int, n: int) -> list[int]:
    result = [1]
    base = series[:n]
    while e:
        if e & 1:
            result = mul_coeffs(result, base, n)
        e >>= 1
        if e:
            base = mul_coeffs(base, base, n)
    return result


@lru_cache(maxsize=8)
def _j_coeffs(order: int) -> tuple[int, ...]:
    n = order + 2  # q*j known through q^(order+1)
    inv_eta24 = _power(_partition_series(n), 24, n)
    sig = _sigma3(n)
    e4 = [1] + [240 * s for s in sig[1:]]
    e4_cubed = _power(e4, 3, n)
    qj = mul_coeffs(e4_cubed, inv_eta24, n)
    return tuple(qj)


def j_series(order: int) -> JSeries:
    """Exact coefficients of j through q^order, as E4^3/Delta."""
    if order < 0:
        raise ValueError("order must be non-negative")
    # Compute in coarse steps so nearby orders share one cache entry.
    size = max(64, 1 << (order + 1).bit_length())
    return JSeries(_j_coeffs(size)[: order + 2])


# ---------------------------------------------------------------------------
# numerical evaluation


def series_order(im_tau, bits: int) -> int:
    """Terms needed so the tail of the j series at Im(tau) is below 2^-bits.

    Uses c(m) <= exp(4 pi sqrt(m)); successive tail terms then shrink by at
    least exp(2 pi / sqrt(M + 1) - 2 pi Im tau).
    """
    y = float(im_tau)
    target = -(bits + 8) * math.log(2)
    M = 1
    while True:
        m = M + 1
        log_term = 4 * math.pi * math.sqrt(m) - 2 * math.pi * y * m
        log_ratio = 2 * math.pi / math.sqrt(m) - 2 * math.pi * y
        if log_ratio < 0:
            log_tail = log_term - math.log1p(-math.exp(log_ratio)) + math.log(M + 2)
            if log_tail < target:
                return M
        M += 1


@lru_cache(maxsize=64)
def _coeff_mpf(order: int, prec: int) -> tuple:
    js = j_series(order)
    with mpmath.workprec(prec):
        return tuple(mpmath.mpf(c) for c in js.coeffs)


def j_eval(tau: HPoint, precision: int) -> mpmath.mpc:
    """j(tau) with absolute error below 2^-precision (tau is reduced first)."""
    z, _ = reduce_to_fundamental(tau)
    if z.tag is not None:
        z = z.with_prec(precision + 64)
    y = float(z.imag)
    mag_bits = int(2 * math.pi * y / math.log(2)) + 2
    wprec = precision + mag_bits + 20
    M = series_order(y, precision)
    # Coefficient tables are cached per power-of-two order and precision bucket.
    order = max(64, 1 << (M + 1).bit_length())
    pbucket = ((wprec + 255) // 256) * 256
    coeffs = _coeff_mpf(order, pbucket)
    with mpmath.workprec(wprec):
        tau_v = mpmath.mpc(z.value)
        q = mpmath.expjpi(2 * tau_v)
        acc = mpmath.mpc(0)
        for m in range(M, -1, -1):
            acc = acc * q + coeffs[m + 1]
        acc = acc + 1 / q
    with mpmath.workprec(precision + mag_bits):
        return +acc


# ---------------------------------------------------------------------------
# class polynomials


@dataclass(frozen=True)
class ClassPolynomial:
    disc: int
    poly: IntPolynomial

    @property
    def degree(self) -> int:
        return self.poly.degree


def initial_precision(D: int) -> int:
    forms = reduced_forms(D)
    s = sum(1 / f.a for f in forms)
    return math.ceil(math.pi * math.sqrt(-D) / math.log(2) * s) + 64 + 16 * len(forms)


def _expand(roots, prec: int) -> list:
    with mpmath.workprec(prec):
        coeffs = [mpmath.mpc(1)]
        for r in roots:
            nxt = [mpmath.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] += c
                nxt[i] -= c * r
            coeffs = nxt
    return coeffs


def _round_coeffs(coeffs, prec: int) -> list[int] | None:
    quarter = mpmath.mpf(1) / 4
    out = []
    with mpmath.workprec(prec):
        for c in coeffs:
            n = int(mpmath.nint(c.real))
            if abs(c.real - n) >= quarter or abs(c.imag) >= quarter:
                return None
            out.append(n)
    return out


def class_polynomial_at(D: int, precision: int) -> IntPolynomial | None:
    """One attempt at precision bits; None if some coefficient fails to round."""
    roots = [j_eval(cm_point(f, precision + 64), precision) for f in reduced_forms(D)]
    coeffs = _expand(roots, precision + 64)
    rounded = _round_coeffs(coeffs, precision + 64)
    return None if rounded is None else IntPolynomial(rounded)


@lru_cache(maxsize=4096)
def class_polynomial(D: int) -> ClassPolynomial:
    """Monic H_D by expanding prod (X - j(tau_f)) numerically and rounding."""
    check_discriminant(D)
    P = initial_precision(D)
    for _ in range(MAX_DOUBLINGS):
        poly = class_polynomial_at(D, P)
        if poly is not None:
            return ClassPolynomial(D, poly)
        P *= 2
    raise PrecisionEscalationFailed(f"class polynomial of {D} did not round")


def singular_modulus(D: int, root_index: int = 0, precision: int = 256) -> mpmath.mpc:
    """Numerical value of the root_index-th singular modulus of discriminant D."""
    return j_eval(cm_point(reduced_forms(D)[root_index], precision + 64), precision)
