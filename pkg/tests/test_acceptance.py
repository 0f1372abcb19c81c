"""End-to-end acceptance checks, one test per criterion, each with its time budget."""

import itertools
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import mpmath
import pytest

from singmod.arith import IntPolynomial, parse_poly
from singmod.cli import verify_example
from singmod.cmval import class_polynomial
from singmod.curves import enumerate_curves, example_curve, verify_curve_identity
from singmod.depsearch import (
    QuadraticNumber,
    cm_point_parts,
    combine_all_nonzero,
    height,
    height_at_most,
    k_height,
    rational_singular_moduli,
)
from singmod.forms import discriminants, reduced_forms
from singmod.halfplane import (
    IDENTITY,
    S,
    HPoint,
    IntMatrix2,
    act,
    in_fundamental_domain,
    reduce_to_fundamental,
    translation,
)
from singmod.modpoly import (
    f_polynomial,
    factor_f_into_class_polys,
    hecke_diagonal_series,
    modular_polynomial,
    poly_at_j_series,
)

X = IntPolynomial.x()


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f}s, budget {seconds}s"


def test_criterion_01_phi2():
    with budget(1):
        phi = modular_polynomial(2)
        got = {(i, k): c for i, p in enumerate(phi) for k, c in enumerate(p.coeffs) if c}
    assert got == {
        (3, 0): 1, (0, 3): 1, (2, 2): -1,
        (2, 1): 1488, (1, 2): 1488,
        (2, 0): -162000, (0, 2): -162000,
        (1, 1): 40773375,
        (1, 0): 8748000000, (0, 1): 8748000000,
        (0, 0): -157464000000000,
    }


def test_criterion_02_f2_f3():
    with budget(1):
        F2, F3 = f_polynomial(2), f_polynomial(3)
    assert F2 == parse_poly("-X^4 + 2978*X^3 + 40449375*X^2 + 17496000000*X - 157464000000000")
    assert F2 == -((X - 1728) * (X + 3375) ** 2 * (X - 8000))
    assert F3 == -(X * (X - 8000) ** 2 * (X + 32768) ** 2 * (X - 54000))


def test_criterion_03_leading_and_degree():
    with budget(60):
        assert f_polynomial(4).leading == -2
        assert f_polynomial(16).leading == -2
        for N in range(2, 11):
            F = f_polynomial(N)
            assert F.degree >= 2 * N
            if math.isqrt(N) ** 2 != N:
                assert F.leading in (1, -1)


def test_criterion_04_class_polynomials():
    H652 = parse_poly(
        "X^3 - 68925893036109279891085639286946000*X^2"
        " + 102561728837719322645921325412908000000*X"
        " - 18095625621665522953693950872675200892692248000000000"
    )
    with budget(5):
        assert class_polynomial(-4).poly == X - 1728
        assert class_polynomial(-7).poly == X + 3375
        assert class_polynomial(-8).poly == X - 8000
        assert class_polynomial(-163).poly == X + 262537412640768000
        assert class_polynomial(-652).poly == H652


def test_criterion_05_verify_example():
    with budget(5):
        report = verify_example()
    k = -262537412640768000
    assert report.ok
    assert report.lhs == f_polynomial(2)(k) == class_polynomial(-652).poly(k)
    assert report.factored.format() == (
        "-2^12 * 3^22 * 5^9 * 7^6 * 11^2 * 13^3 * 17^2 * 19^2 * 31^2 * 37 * 101"
        " * 103^2 * 127^2 * 157 * 163 * 229^2 * 277 * 283^2 * 317"
    )
    assert report.factored.value == report.lhs


def test_criterion_06_curve_enumeration():
    with budget(300):
        for n in range(1, 6):
            assert enumerate_curves(n) == []
        assert enumerate_curves(6) == [example_curve()]
        c = example_curve()
        assert [r.disc for r in c.constant_coords] == [-4, -7, -8]
        for n in range(6, 10):
            for curve in enumerate_curves(n):
                verify_curve_identity(curve)


def test_criterion_07_factorization():
    with budget(120):
        for N in range(2, 11):
            fac = factor_f_into_class_polys(N)
            prod = IntPolynomial.constant(fac.sign * fac.content)
            for D, m in fac.factors:
                assert -D <= 4 * N and m >= 1
                prod = prod * class_polynomial(D).poly ** m
            assert prod == f_polynomial(N)
            assert fac.multiplicity(-4 * N) >= 1


def test_criterion_08_series_identity():
    with budget(120):
        for N in range(2, 7):
            diff = hecke_diagonal_series(N, 50) - poly_at_j_series(f_polynomial(N), 50)
            assert diff.is_zero()


def _random_word(rng, length):
    g = IDENTITY
    for _ in range(length):
        g = g @ (S if rng.random() < 0.5 else translation(rng.choice([-3, -2, -1, 1, 2, 3])))
    return g


def _is_translate(t, u):
    return t[0] == u[0] and t[1] ** 2 - 4 * t[0] * t[2] == u[1] ** 2 - 4 * u[0] * u[2] \
        and (t[1] - u[1]) % (2 * t[0]) == 0


def _random_det_one(rng):
    while True:
        a, b, c, d = (rng.randint(-10, 10) for _ in range(4))
        if a * d - b * c == 1:
            return IntMatrix2(a, b, c, d)


def test_criterion_09_fundamental_domain():
    rng = random.Random(2009)
    with budget(60):
        with mpmath.workprec(256):
            for _ in range(500):
                while True:
                    x = mpmath.mpf(rng.uniform(-0.49, 0.49))
                    y = mpmath.mpf(rng.uniform(0.5, 4.0))
                    if x * x + y * y > mpmath.mpf("1.01"):
                        break
                z0 = HPoint.numeric(x, y, 256)
                assert in_fundamental_domain(z0)
                scrambled = act(_random_word(rng, rng.randint(0, 20)), z0)
                w, g = reduce_to_fundamental(scrambled)
                assert g.det == 1
                assert abs(w.value - z0.value) / abs(z0.value) < mpmath.mpf(2) ** -64

        discs = discriminants(400)
        for _ in range(50):
            D = rng.choice(discs)
            f = rng.choice(reduced_forms(D))
            z0 = HPoint.from_form(*f)
            assert in_fundamental_domain(z0)
            inv = act(S, z0)
            specials = [z0.tag, inv.tag]
            if f[1] == f[0]:  # Re z0 = -b/(2a) = -1/2
                specials.append(act(S, act(translation(1), z0)).tag)
            for _ in range(40):
                w = act(_random_det_one(rng), z0)
                if any(_is_translate(w.tag, t) for t in specials):
                    continue
                # same discriminant, so Im w < Im(-1/z0) iff the leading coefficient is larger
                assert w.tag[0] > inv.tag[0]


def test_criterion_10_heights():
    with budget(60):
        for D in discriminants(2000):
            for f in reduced_forms(D):
                re_part, im_part = cm_point_parts(f)
                assert height_at_most(re_part, 2 * abs(D))
                assert height_at_most(im_part, 2 * abs(D))
        rng = random.Random(10)
        for _ in range(500):
            alpha = QuadraticNumber(
                Fraction(rng.randint(-60, 60), rng.randint(1, 30)),
                Fraction(rng.randint(0, 60), rng.randint(1, 30)),
                rng.choice([2, 3, 5, 6, 7, 10, 11, 13, -1, -2, -3, -5, -7]),
            )
            h = height(alpha)
            # H^2 = M^(2/deg), kept exact
            h_squared = h.mahler if h.degree == 2 else h.mahler * h.mahler
            assert (h_squared * 2).compare(k_height(alpha, 2)) >= 0


def test_criterion_11_combination_lemma():
    rng = random.Random(11)
    with budget(10):
        for _ in range(1000):
            n = rng.randint(1, 7)
            vecs = []
            for i in range(n):
                v = [rng.randint(-40, 40) if rng.random() < 0.4 else 0 for _ in range(n)]
                v[i] = rng.choice([-1, 1]) * rng.randint(1, 40)
                vecs.append(tuple(v))
            trace = []
            u = combine_all_nonzero(vecs, trace)
            assert all(u)
            # replay the trace: each step adds an integer multiple of an input vector
            acc = vecs[0]
            for step in trace:
                w = vecs[step.index]
                acc = tuple(a + step.lam * b for a, b in zip(acc, w))
                assert acc == step.result
                assert max(abs(x) for x in step.result) <= step.bound == 2 * step.lam ** 2
            assert acc == u


def test_criterion_12_unit_differences():
    with budget(1):
        values = [x for _, x in rational_singular_moduli(163)]
        assert len(values) == 13 == len(set(values))
        for x, y in itertools.permutations(values, 2):
            assert x - y not in (1, -1)
