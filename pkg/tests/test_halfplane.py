import random

import mpmath
import pytest

from singmod.halfplane import (
    IDENTITY,
    S,
    T,
    Ambiguous,
    HPoint,
    IntMatrix2,
    NoFixedPointInH,
    NotCM,
    act,
    fixed_point_discriminant,
    in_fundamental_domain,
    reduce_to_fundamental,
    same_orbit,
    translation,
)

I = HPoint.from_form(1, 0, 1)          # i
RHO = HPoint.from_form(1, 1, 1)        # e^{2 pi i/3}
TWO_I = HPoint.from_form(1, 0, 4)      # 2i


def close(z, w, bits=100):
    return abs(z.value - w.value) < mpmath.mpf(2) ** -bits


class TestAct:
    def test_identity(self):
        assert act(IDENTITY, TWO_I).tag == TWO_I.tag

    def test_s_fixes_i(self):
        assert act(S, I).tag == I.tag

    def test_t_moves_rho_to_minus_rho_bar(self):
        w = act(T, RHO)
        with mpmath.workprec(256):
            assert close(w, HPoint.numeric(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2))
        assert w.tag == (1, -1, 1)

    def test_rejects_nonpositive_det(self):
        with pytest.raises(ValueError):
            act(IntMatrix2(0, 1, 1, 0), I)

    def test_imaginary_part_scaling(self):
        g = IntMatrix2(2, 1, 3, 5)
        z = HPoint.numeric(0.3, 1.7)
        w = act(g, z)
        with mpmath.workprec(256):
            expect = g.det * z.imag / abs(g.c * z.value + g.d) ** 2
            assert abs(w.imag - expect) < mpmath.mpf(2) ** -200

    def test_exact_and_numeric_agree(self):
        g = IntMatrix2(3, -2, 5, -3)
        z = HPoint.from_form(2, 1, 3)
        exact = act(g, z)
        numeric = act(g, HPoint(z.value, z.prec))
        assert close(exact, numeric, 200)


class TestFundamentalDomain:
    def test_examples(self):
        assert in_fundamental_domain(TWO_I)
        assert not in_fundamental_domain(act(T, RHO))
        assert in_fundamental_domain(RHO)

    def test_numeric_interior(self):
        assert in_fundamental_domain(HPoint.numeric(0.1, 3))
        assert not in_fundamental_domain(HPoint.numeric(0.6, 3))

    def test_numeric_boundary_is_ambiguous(self):
        with pytest.raises(Ambiguous):
            in_fundamental_domain(HPoint.numeric(0, 1))

    def test_left_edge_in_right_edge_out(self):
        assert in_fundamental_domain(HPoint.from_form(1, 1, 3))     # Re = -1/2
        assert not in_fundamental_domain(HPoint.from_form(1, -1, 3))  # Re = +1/2


class TestReduce:
    def test_translate(self):
        w, g = reduce_to_fundamental(act(translation(5), I))
        assert w.tag == I.tag and g == translation(-5)

    def test_half_plus_half_i(self):
        z = HPoint.from_form(2, -2, 1)  # (1 + i)/2
        w, g = reduce_to_fundamental(z)
        assert w.tag == I.tag
        assert act(g, z).tag == I.tag and g.det == 1

    def test_rho_plus_seven(self):
        w, g = reduce_to_fundamental(act(translation(7), RHO))
        assert w.tag == RHO.tag and g == translation(-7)

    def test_idempotent(self):
        rng = random.Random(3)
        for _ in range(50):
            z = HPoint.numeric(rng.uniform(-5, 5), rng.uniform(0.01, 2))
            w, _ = reduce_to_fundamental(z)
            w2, g2 = reduce_to_fundamental(w)
            assert g2 == IDENTITY and w2.value == w.value

    def test_boundary_tag_terminates(self):
        w, _ = reduce_to_fundamental(HPoint.from_form(1, 163, 6644))
        assert w.tag == (1, 1, 2)


class TestFixedPoints:
    def test_examples(self):
        assert fixed_point_discriminant(S) == -4
        assert fixed_point_discriminant(IntMatrix2(1, -1, 1, 0)) == -3
        with pytest.raises(NotCM):
            fixed_point_discriminant(IntMatrix2(2, 0, 0, 2))
        with pytest.raises(NoFixedPointInH):
            fixed_point_discriminant(IntMatrix2(2, 0, 0, 1))

    def test_bound(self):
        rng = random.Random(7)
        for _ in range(500):
            a, b, c, d = (rng.randint(-9, 9) for _ in range(4))
            g = IntMatrix2(a, b, c, d)
            if g.det <= 0:
                continue
            try:
                D = fixed_point_discriminant(g)
            except (NotCM, NoFixedPointInH):
                continue
            assert D < 0 and D % 4 in (0, 1) and -D <= 4 * g.det


class TestSameOrbit:
    def test_examples(self):
        assert same_orbit(TWO_I, act(S, TWO_I))
        assert not same_orbit(TWO_I, HPoint.from_form(1, 0, 9))
        assert same_orbit(RHO, act(T, RHO))
