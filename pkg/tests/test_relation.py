"""Integer-relation search: soundness, the worked examples, discovery."""

import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from bseries.closedform import parse_closed_form
from bseries.evaluator import evaluate
from bseries.kernels import kernel_by_tag
from bseries.precision import ApproxReal, digits_to_bits, working_bits
from bseries.relation import (
    discover_rhs,
    pslq,
    required_digits,
    shortfall_warning,
)
from bseries.seriesmodel import (
    Position,
    SeriesDef,
    parse_base,
    parse_den_factors,
    parse_weight,
)


def ball(x: str, digits: int = 45) -> ApproxReal:
    with working_bits(digits_to_bits(digits + 5)):
        return parse_closed_form(x).eval_ball(digits)


def rand_ball(rng: random.Random, digits: int = 50) -> ApproxReal:
    bits = max(170, digits * 4)
    q = Fraction(rng.getrandbits(bits) | (1 << (bits - 1)) | 1, 1 << bits)
    with working_bits(digits_to_bits(digits + 5)):
        return ApproxReal.from_fraction_ball(q, Fraction(1, 10**digits))


class TestPslqExamples:
    def test_exact_halves(self):
        r = pslq([ApproxReal.from_int(1), ApproxReal.from_fraction(Fraction(1, 2))], 24)
        assert r.coefficients == (1, -2)
        assert r.confidence_digits > 100

    def test_golden_ratio_square(self):
        with working_bits(digits_to_bits(45)):
            phi = (ApproxReal.from_int(1) + ApproxReal.from_int(5).sqrt()) / ApproxReal.from_int(2)
            vals = [ApproxReal.from_int(1), phi, phi * phi]
        r = pslq(vals, 24)
        assert r.coefficients == (1, 1, -1)
        assert r.confidence_digits >= 35

    def test_series_value_against_pi_squared(self):
        # sum_{k>=1} (3k-1) 16^k / (k^3 C(2k,k)^3) relates 2:1 to pi^2
        sdef = SeriesDef(
            base_root=parse_base("16")[0],
            base_exp=1,
            kernel=kernel_by_tag("central^3"),
            kernel_pos=Position.DENOMINATOR,
            weight=parse_weight("3*k - 1"),
            den_factors=parse_den_factors("k^3"),
            k_start=1,
        )
        s = evaluate(sdef, 45, mode="certified").ball
        r = pslq([s, ball("pi^2")], 24)
        assert r.coefficients == (2, -1)

    def test_sign_and_gcd_normalization(self):
        r = pslq([ApproxReal.from_fraction(Fraction(1, 2)), ApproxReal.from_int(1)], 24)
        assert r.coefficients == (2, -1)
        r = pslq([ApproxReal.from_int(6), ApproxReal.from_int(4)], 24)
        assert r.coefficients == (2, -3)

    def test_relation_invariant(self):
        with working_bits(digits_to_bits(45)):
            vals = [ball("pi"), ball("3*pi"), ball("sqrt(2)")]
        r = pslq(vals, 24)
        assert r.coefficients == (3, -1, 0)
        scale = max(v.upper_abs() for v in vals)
        assert r.residual.upper_abs() <= mpf(10) ** (-r.confidence_digits) * scale


class TestPslqSoundness:
    def test_no_false_positives_on_random(self):
        rng = random.Random(20260815)
        for trial in range(100):
            n = 2 + trial % 3
            vals = [rand_ball(rng) for _ in range(n)]
            r = pslq(vals, 24)
            assert r.coefficients is None, (trial, r.coefficients, r.note)

    def test_near_relation_rejected(self):
        # off by 1e-12: ball residual excludes zero at 40 certified digits
        v = ApproxReal.from_fraction_ball(
            Fraction(1, 2) + Fraction(1, 10**12), Fraction(1, 10**40)
        )
        r = pslq([ApproxReal.from_int(1), v], 24)
        assert r.coefficients is None

    def test_coefficient_bound_respected(self):
        v = ApproxReal.from_fraction(Fraction(2 * 10**8 + 1, 2 * 10**8))
        r = pslq([ApproxReal.from_int(1), v], 24)
        assert r.coefficients is None

    def test_zero_input_detected(self):
        z = ApproxReal.from_fraction_ball(Fraction(0), Fraction(1, 10**30))
        r = pslq([ball("pi"), z], 24)
        assert r.coefficients == (0, 1)

    def test_wide_zero_straddler_rejected(self):
        z = ApproxReal.from_fraction_ball(Fraction(0), Fraction(1, 2))
        r = pslq([ball("pi"), z], 24)
        assert r.coefficients is None
        assert "straddles" in r.note

    def test_input_validation(self):
        with pytest.raises(ValueError):
            pslq([ApproxReal.from_int(1)], 24)
        with pytest.raises(ValueError):
            pslq([ApproxReal.from_int(1), ApproxReal.from_int(2)], 0)

    def test_residual_never_exceeds_radii(self):
        # fuzz: every accepted relation's residual ball must contain zero
        rng = random.Random(99)
        for _ in range(25):
            a = rng.randint(1, 50)
            b = rng.randint(-50, 50) or 1
            c = rng.randint(1, 9)
            with working_bits(digits_to_bits(50)):
                x = ball("pi", 45)
                y = (ApproxReal.from_int(a) * x + ApproxReal.from_int(b)) / ApproxReal.from_int(c)
            r = pslq([ApproxReal.from_int(1), x, y], 24)
            assert r.found, (a, b, c)
            assert not r.residual.excludes_zero()
            got = r.coefficients
            want = (b, a, -c)
            g = __import__("math").gcd(__import__("math").gcd(abs(b), a), c)
            want = tuple(v // g for v in want)
            if want[0] < 0 or (want[0] == 0 and want[1] < 0):
                want = tuple(-v for v in want)
            assert got == want, (a, b, c, got)


class TestPrecisionRule:
    def test_required_digits(self):
        assert required_digits(2, 24) == 29
        assert required_digits(3, 24) == 44

    def test_shortfall_warning(self):
        thin = [rand_ball(random.Random(1), digits=20) for _ in range(3)]
        msg = shortfall_warning(thin, 24)
        assert msg is not None and "below the ~44" in msg
        thick = [rand_ball(random.Random(2), digits=80) for _ in range(3)]
        assert shortfall_warning(thick, 24) is None

    def test_thin_inputs_fail_safe(self):
        rng = random.Random(5)
        for _ in range(10):
            vals = [rand_ball(rng, digits=18) for _ in range(3)]
            r = pslq(vals, 24)
            assert r.coefficients is None


class TestDiscoverRhs:
    def test_three_halves_pi(self):
        got = discover_rhs(ball("3/2*pi"), [parse_closed_form("pi")], 24)
        assert got == parse_closed_form("3/2*pi")

    def test_lvalue_combination(self):
        target = ball("3520/3*sqrt(33)*L(-11) - 8640*L(-3)", digits=60)
        basis = [parse_closed_form("sqrt(33)*L(-11)"), parse_closed_form("L(-3)")]
        got = discover_rhs(target, basis, 24)
        assert got == parse_closed_form("3520/3*sqrt(33)*L(-11) - 8640*L(-3)")

    def test_random_value_finds_nothing(self):
        rng = random.Random(11)
        basis = [
            parse_closed_form("pi"),
            parse_closed_form("pi^2"),
            parse_closed_form("L(-4)"),
            parse_closed_form("log(2)"),
        ]
        assert discover_rhs(rand_ball(rng, digits=60), basis, 24) is None

    def test_basis_internal_relation_gives_none(self):
        # relation hits the basis alone (c0 = 0): no reconstruction claimed
        rng = random.Random(13)
        basis = [parse_closed_form("pi"), parse_closed_form("2*pi")]
        assert discover_rhs(rand_ball(rng, digits=60), basis, 24) is None

    def test_empty_basis(self):
        assert discover_rhs(ball("pi"), [], 24) is None

    def test_unused_basis_elements_dropped(self):
        got = discover_rhs(
            ball("5/8*pi^2", digits=50),
            [parse_closed_form("pi"), parse_closed_form("pi^2"), parse_closed_form("log(2)")],
            24,
        )
        assert got == parse_closed_form("5/8*pi^2")
