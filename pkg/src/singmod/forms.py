"""Binary quadratic forms of negative discriminant and the singular moduli they name."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .halfplane import HPoint


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self
        return (-a < b <= a < c) or (0 <= b <= a == c)


@dataclass(frozen=True, order=True)
class SingularModulusRef:
    """One singular modulus, named by its discriminant and reduced form."""

    disc: int
    form: QuadForm

    def __post_init__(self):
        check_discriminant(self.disc)
        form = QuadForm(*self.form)
        object.__setattr__(self, "form", form)
        if form.disc != self.disc or not form.is_reduced() or not form.is_primitive():
            raise ValueError(f"{form} is not a reduced primitive form of discriminant {self.disc}")

    @property
    def root_index(self) -> int:
        return reduced_forms(self.disc).index(self.form)

    @classmethod
    def of(cls, disc: int, root_index: int = 0) -> "SingularModulusRef":
        return cls(disc, reduced_forms(disc)[root_index])


def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def check_discriminant(D: int) -> int:
    if not is_discriminant(D):
        raise ValueError(f"{D} is not a negative discriminant")
    return D


@lru_cache(maxsize=4096)
def reduced_forms(D: int) -> tuple[QuadForm, ...]:
    """All reduced primitive forms of discriminant D, sorted by (a, b, c)."""
    check_discriminant(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadForm(a, b, c)
            if f.is_reduced() and f.is_primitive():
                out.append(f)
    out.sort()
    return tuple(out)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    k = D % 2
    return QuadForm(1, k, (k * k - D) // 4)


def cm_point(f: QuadForm, prec: int = 256) -> HPoint:
    """The exact-tagged point (-b + sqrt|D| i)/(2a) of a reduced form."""
    return HPoint.from_form(*f, prec=prec)


def discriminants(max_abs: int) -> list[int]:
    """Negative discriminants D with |D| <= max_abs, in order of increasing |D|."""
    return [-n for n in range(3, max_abs + 1) if is_discriminant(-n)]


def form_of_point(z: HPoint) -> QuadForm:
    """Primitive form of an exact-tagged point."""
    if z.tag is None:
        raise ValueError("point carries no exact tag")
    return QuadForm(*z.tag)
