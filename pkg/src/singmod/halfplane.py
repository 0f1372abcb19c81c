"""Upper half-plane: integer matrix action, the fundamental domain, and reduction.

Points optionally carry an exact tag (a, b, c), a > 0, meaning the root
(-b + sqrt(b^2 - 4ac))/(2a) in the upper half-plane.  Tagged points are moved
and compared in exact integer arithmetic; the numeric value is recomputed from
the tag.  Untagged points use mpmath at the point's working precision and
refuse to decide boundary tests closer than 2^-(prec/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath


class Ambiguous(ArithmeticError):
    """A numeric point is too close to a boundary to decide at this precision."""


class NotCM(ValueError):
    """The matrix is a rational multiple of the identity."""


class NoFixedPointInH(ValueError):
    """The matrix has no fixed point in the upper half-plane."""


@dataclass(frozen=True)
class IntMatrix2:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def adjugate(self) -> "IntMatrix2":
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "IntMatrix2":
        """Inverse of a unimodular matrix."""
        if self.det != 1:
            raise ValueError("only determinant-1 matrices are inverted exactly")
        return self.adjugate()

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def content(self) -> int:
        return math.gcd(self.a, self.b, self.c, self.d)


IDENTITY = IntMatrix2(1, 0, 0, 1)
S = IntMatrix2(0, -1, 1, 0)
T = IntMatrix2(1, 1, 0, 1)


def translation(k: int) -> IntMatrix2:
    return IntMatrix2(1, k, 0, 1)


def _primitive_upper(A: int, B: int, C: int) -> tuple[int, int, int]:
    g = math.gcd(A, B, C)
    A, B, C = A // g, B // g, C // g
    if A < 0:
        A, B, C = -A, -B, -C
    return A, B, C


def _tag_value(tag: tuple[int, int, int], prec: int) -> mpmath.mpc:
    a, b, c = tag
    D = b * b - 4 * a * c
    with mpmath.workprec(prec + 10):
        re_part = mpmath.mpf(-b) / (2 * a)
        im_part = mpmath.sqrt(mpmath.mpf(-D)) / (2 * a)
    with mpmath.workprec(prec):
        return mpmath.mpc(+re_part, +im_part)


@dataclass(frozen=True)
class HPoint:
    value: mpmath.mpc
    prec: int = 256
    tag: tuple[int, int, int] | None = None

    def __post_init__(self):
        if not self.value.imag > 0:
            raise ValueError("point must lie in the upper half-plane")

    @classmethod
    def from_form(cls, a: int, b: int, c: int, prec: int = 256) -> "HPoint":
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise ValueError("tag must have a > 0 and negative discriminant")
        tag = _primitive_upper(a, b, c)
        return cls(_tag_value(tag, prec), prec, tag)

    @classmethod
    def numeric(cls, re_part, im_part, prec: int = 256) -> "HPoint":
        with mpmath.workprec(prec):
            return cls(mpmath.mpc(re_part, im_part), prec, None)

    @property
    def disc(self) -> int | None:
        if self.tag is None:
            return None
        a, b, c = self.tag
        return b * b - 4 * a * c

    @property
    def real(self) -> mpmath.mpf:
        return self.value.real

    @property
    def imag(self) -> mpmath.mpf:
        return self.value.imag

    def with_prec(self, prec: int) -> "HPoint":
        if self.tag is not None:
            return HPoint(_tag_value(self.tag, prec), prec, self.tag)
        return HPoint(self.value, prec, None)


def act(g: IntMatrix2, z: HPoint) -> HPoint:
    """Fractional linear action of a positive-determinant integer matrix."""
    if g.det <= 0:
        raise ValueError("matrix must have positive determinant")
    if z.tag is not None:
        A, B, C = z.tag
        a, b, c, d = g
        # w = g z  <=>  z = (d w - b)/(-c w + a); substitute into A z^2 + B z + C.
        new = (
            A * d * d - B * d * c + C * c * c,
            -2 * A * d * b + B * (d * a + b * c) - 2 * C * c * a,
            A * b * b - B * a * b + C * a * a,
        )
        tag = _primitive_upper(*new)
        return HPoint(_tag_value(tag, z.prec), z.prec, tag)
    with mpmath.workprec(z.prec):
        w = (g.a * z.value + g.b) / (g.c * z.value + g.d)
    return HPoint(w, z.prec, None)


# -- three-valued comparisons for numeric points ----------------------------


def _tol(prec: int) -> mpmath.mpf:
    return mpmath.ldexp(1, -(prec // 2))


def _cmp(x, y, tol) -> int | None:
    """Sign of x - y, or None when |x - y| < tol."""
    diff = x - y
    if abs(diff) < tol:
        return None
    return 1 if diff > 0 else -1


def _and(*vals):
    if any(v is False for v in vals):
        return False
    if all(v is True for v in vals):
        return True
    return None


def _or(*vals):
    if any(v is True for v in vals):
        return True
    if all(v is False for v in vals):
        return False
    return None


def _ge(s):
    return None if s is None else s >= 0


def _gt(s):
    return None if s is None else s > 0


def _lt(s):
    return None if s is None else s < 0


def _le(s):
    return None if s is None else s <= 0


def _eq(s):
    return None if s is None else s == 0


def _in_domain_tag(tag: tuple[int, int, int]) -> bool:
    a, b, c = tag
    return (-a < b <= a < c) or (0 <= b <= a == c)


def in_fundamental_domain(z: HPoint) -> bool:
    """Membership in {Re in [-1/2, 1/2), |z| >= 1, and Re <= 0 when |z| = 1}."""
    if z.tag is not None:
        return _in_domain_tag(z.tag)
    with mpmath.workprec(z.prec):
        tol = _tol(z.prec)
        x = z.value.real
        r2 = x * x + z.value.imag ** 2
        half = mpmath.mpf(1) / 2
        s_lo = _cmp(x, -half, tol)
        s_hi = _cmp(x, half, tol)
        s_r = _cmp(r2, 1, tol)
        s_0 = _cmp(x, 0, tol)
    verdict = _and(
        _ge(s_lo),
        _lt(s_hi),
        _or(_gt(s_r), _and(_eq(s_r), _le(s_0))),
    )
    if verdict is None:
        raise Ambiguous("point within tolerance of the fundamental domain boundary")
    return verdict


def _shift_to_strip(z: HPoint) -> int:
    """The k with Re(z + k) in [-1/2, 1/2)."""
    if z.tag is not None:
        a, b, _ = z.tag
        # Re z = -b/(2a); need -1/2 <= -b/(2a) + k < 1/2, i.e. k = ceil((b - a)/(2a)).
        return -((a - b) // (2 * a))
    with mpmath.workprec(z.prec):
        t = z.value.real + mpmath.mpf(1) / 2
        k = -int(mpmath.floor(t))
        frac = t - mpmath.floor(t)
        tol = _tol(z.prec)
        if frac < tol or 1 - frac < tol:
            raise Ambiguous("real part within tolerance of a strip boundary")
    return k


def reduce_to_fundamental(z: HPoint, max_steps: int = 10_000) -> tuple[HPoint, IntMatrix2]:
    """Move z into the fundamental domain by translations and inversions.

    Returns (w, gamma) with w = gamma z and gamma in SL2(Z).
    """
    gamma = IDENTITY
    for _ in range(max_steps):
        if in_fundamental_domain(z):
            return z, gamma
        k = _shift_to_strip(z)
        if k:
            z = act(translation(k), z)
            gamma = translation(k) @ gamma
        if in_fundamental_domain(z):
            return z, gamma
        z = act(S, z)
        gamma = S @ gamma
    raise RuntimeError("reduction did not terminate")  # pragma: no cover


def fixed_point_discriminant(g: IntMatrix2) -> int:
    """Discriminant of j at the fixed point of g in the upper half-plane."""
    N = g.det
    if N <= 0:
        raise ValueError("matrix must have positive determinant")
    a, b, c, d = g
    if b == 0 and c == 0 and a == d:
        raise NotCM("scalar matrix has no isolated fixed point")
    h = math.gcd(c, d - a, b)
    num = (a + d) ** 2 - 4 * N
    if num >= 0:
        raise NoFixedPointInH("fixed points are real or at infinity")
    return num // (h * h)


def same_orbit(z: HPoint, w: HPoint) -> bool:
    rz, _ = reduce_to_fundamental(z)
    rw, _ = reduce_to_fundamental(w)
    if rz.tag is not None and rw.tag is not None:
        return rz.tag == rw.tag
    prec = min(rz.prec, rw.prec)
    with mpmath.workprec(prec):
        return bool(abs(rz.value - rw.value) < _tol(prec))
