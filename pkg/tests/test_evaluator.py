"""Evaluator tests: exact term streams, certified envelopes, verification.

Frozen reference sums were computed independently with mpmath.nsum at 70
significant digits.
"""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bseries.closedform import parse_closed_form
from bseries.evaluator import (
    BudgetExceeded,
    NonConvergent,
    Status,
    _TermStream,
    certify_envelope,
    evaluate,
    sum_series,
    verify_identity,
)
from bseries.exactnum import QuadElem
from bseries.kernels import kernel_by_tag
from bseries.precision import working_bits
from bseries.seriesmodel import (
    HarmonicCache,
    Position,
    SeriesDef,
    parse_base,
    parse_den_factors,
    parse_weight,
)

# sum_{k>=1} k 2^k / C(2k,k)^3
REF_CENTRAL3_DEN = "0.29023413400657121703470999343912139021301191051624900008780285"
# sum_{k>=0} C(3k,k) / 16^k
REF_BIN3K_NUM = "1.2788434842132471363252268584432438448292614533246540296855359"


def mk(base, weight="1", den="", kernel=None, pos="den", k0=0):
    base_root, base_exp = parse_base(base)
    return SeriesDef(
        base_root=base_root,
        base_exp=base_exp,
        kernel=kernel_by_tag(kernel) if kernel else None,
        kernel_pos=Position.NUMERATOR if pos == "num" else Position.DENOMINATOR,
        weight=parse_weight(weight),
        den_factors=parse_den_factors(den) if den else (),
        k_start=k0,
    )


# ----------------------------------------------------------------------
# exact term streams


STREAM_CASES = [
    mk("1/2"),
    mk("-2/3", weight="k^2 - 3"),
    mk("(3 - sqrt(5))/4", weight="(1 + 2*sqrt(5))*k + 3", k0=1),
    mk("2", weight="k", kernel="central^3", pos="den", k0=1),
    mk("1/16", kernel="binom(3k,k)", pos="num"),
    mk("1/2", weight="H(k,1) + k", den="k*(k + 1)", k0=1),
    mk("(12 + 4*sqrt(5))^-4", weight="k + 1", kernel="central^3", pos="num"),
    mk("1/64", weight="3*H(2*k - 1,2) - 1", kernel="binom(4k,2k)", pos="den", k0=1),
]


def test_stream_matches_direct_terms():
    from bseries.evaluator import _Embedder

    for sdef in STREAM_CASES:
        with working_bits(300):
            stream = _TermStream(sdef, _Embedder(sdef.field_d))
            harm = HarmonicCache() if sdef.has_harmonic() else None
            for _ in range(25):
                k, tb = stream.next_term()
                with working_bits(500):
                    ref = sdef.term_exact(k, harm).embed()
                # the stream ball must contain the exact term, and tightly
                assert not (tb - ref).excludes_zero(), (sdef, k)
                assert tb.to_digits() >= 60, (sdef, k)


# ----------------------------------------------------------------------
# envelope certification


def test_envelope_geometric():
    env = certify_envelope(mk("1/2"))
    assert env.q == Fraction(65, 128)
    assert env.k0 == 0


def test_envelope_bound_holds_exactly():
    for sdef in (
        mk("1/2"),
        mk("-2/3", weight="k^2 - 3", k0=2),
        mk("2", weight="k", kernel="central^3", pos="den", k0=1),
        mk("1/16", kernel="binom(3k,k)", pos="num"),
        mk("(12 + 4*sqrt(5))^-4", weight="k + 1", kernel="central^3", pos="num"),
    ):
        env = certify_envelope(sdef)
        assert env.q < 1
        assert env.k0 >= sdef.k_start
        num, den = env.ratio.num, env.ratio.den
        for k in range(env.k0, env.k0 + 40):
            nk = QuadElem.of(num(Fraction(k)))
            dk = QuadElem.of(den(Fraction(k)))
            # |num/den| <= q  <=>  q^2 den^2 - num^2 >= 0
            gap = dk * dk * (env.q * env.q) - nk * nk
            assert gap.sign() >= 0, (sdef, k)


def test_envelope_start_is_sharp():
    # where k0 > k_start the bound must genuinely fail just below k0
    sdef = mk("2", weight="k", kernel="central^3", pos="den", k0=1)
    env = certify_envelope(sdef)
    assert env.k0 > sdef.k_start
    num, den = env.ratio.num, env.ratio.den
    k = env.k0 - 1
    nk = QuadElem.of(num(Fraction(k)))
    dk = QuadElem.of(den(Fraction(k)))
    gap = dk * dk * (env.q * env.q) - nk * nk
    assert gap.sign() < 0


def test_envelope_rejects_unit_ratio():
    with pytest.raises(NonConvergent):
        certify_envelope(mk("-1/64", weight="4*k + 1", kernel="central^3", pos="num"))


def test_envelope_rejects_divergent():
    with pytest.raises(NonConvergent):
        certify_envelope(mk("2", kernel="central^3", pos="num"))


# ----------------------------------------------------------------------
# certified summation


def test_geometric_sum_certified():
    with working_bits(200):
        res = sum_series(mk("1/2"), 40)
    assert res.tail_mode == "certified"
    lo, hi = res.ball.to_fraction_bounds()
    assert lo <= 2 <= hi
    assert res.ball.to_digits() >= 40


def test_kernel_denominator_reference():
    res = evaluate(mk("2", weight="k", kernel="central^3", pos="den", k0=1), 50)
    assert res.tail_mode == "certified"
    lo, hi = res.ball.to_fraction_bounds()
    ref = Fraction(REF_CENTRAL3_DEN)
    assert lo - Fraction(1, 10**58) <= ref <= hi + Fraction(1, 10**58)
    assert res.ball.to_digits() >= 50


def test_kernel_numerator_reference():
    res = evaluate(mk("1/16", kernel="binom(3k,k)", pos="num"), 50)
    lo, hi = res.ball.to_fraction_bounds()
    ref = Fraction(REF_BIN3K_NUM)
    assert lo - Fraction(1, 10**58) <= ref <= hi + Fraction(1, 10**58)


def test_budget_raises():
    with working_bits(150):
        with pytest.raises(BudgetExceeded):
            sum_series(mk("1/2"), 40, budget_terms=10)


# ----------------------------------------------------------------------
# verification


def test_verify_surd_geometric():
    # sum_{k>=0} ((3 - sqrt(5))/4)^k = 1/(1 - b) = sqrt(5) - 1
    rep = verify_identity(mk("(3 - sqrt(5))/4"), parse_closed_form("sqrt(5) - 1"), 40)
    assert rep.status is Status.PASS
    assert rep.tail_mode == "certified"
    assert rep.digits_matched >= 40


def test_verify_weighted_geometric():
    # sum_{k>=1} k^2 / 3^k = 3/2
    rep = verify_identity(mk("1/3", weight="k^2", k0=1), parse_closed_form("3/2"), 45)
    assert rep.status is Status.PASS


def test_verify_alternating_geometric():
    rep = verify_identity(mk("-1/2"), parse_closed_form("2/3"), 45)
    assert rep.status is Status.PASS
    assert rep.tail_mode == "certified"


def test_verify_central_even_kernel_closed_form():
    # sum_{k>=0} C(4k,2k) / 64^k = (1/2) (1/sqrt(1 - 1/2) + 1/sqrt(1 + 1/2))
    rep = verify_identity(
        mk("1/64", kernel="binom(4k,2k)", pos="num"),
        parse_closed_form("1/2*sqrt(2) + 1/6*sqrt(6)"),
        45,
    )
    assert rep.status is Status.PASS
    assert rep.tail_mode == "certified"


def test_verify_harmonic_log():
    # sum_{k>=1} H_k / 2^k = 2 log 2 (harmonic weights force the heuristic tail)
    rep = verify_identity(mk("1/2", weight="H(k,1)", k0=1), parse_closed_form("2*log(2)"), 40)
    assert rep.status is Status.PASS
    assert rep.tail_mode == "heuristic"


def test_verify_den_factors_log():
    # sum_{k>=1} (1/2)^k / (k (k+1)) = 1 - log 2
    rep = verify_identity(
        mk("1/2", den="k*(k + 1)", k0=1), parse_closed_form("1 - log(2)"), 45
    )
    assert rep.status is Status.PASS
    assert rep.tail_mode == "certified"


def test_verify_detects_wrong_rhs():
    rep = verify_identity(mk("1/2"), parse_closed_form("2 + 1/100000000"), 30)
    assert rep.status is Status.FAIL
    assert rep.digits_matched in range(6, 10)


def test_verify_budget_inconclusive():
    rep = verify_identity(mk("1/2"), parse_closed_form("2"), 30, budget_terms=10)
    assert rep.status is Status.INCONCLUSIVE
    assert rep.terms_used == 10
    assert "budget" in rep.note


def test_verify_certified_mode_unavailable():
    rep = verify_identity(
        mk("1/2", weight="H(k,1)", k0=1),
        parse_closed_form("2*log(2)"),
        30,
        mode="certified",
    )
    assert rep.status is Status.INCONCLUSIVE
    assert "unavailable" in rep.note


def test_verify_boundary_series_inconclusive():
    rep = verify_identity(
        mk("-1/64", weight="4*k + 1", kernel="central^3", pos="num"),
        parse_closed_form("2/pi"),
        10,
        budget_terms=300,
    )
    assert rep.status is Status.INCONCLUSIVE


@settings(max_examples=12, deadline=None)
@given(
    st.fractions(
        min_value=Fraction(-9, 10), max_value=Fraction(9, 10), max_denominator=12
    )
)
def test_geometric_closed_form_property(b):
    assume(b != 0)
    rhs = 1 / (1 - b)
    rep = verify_identity(mk(str(b)), parse_closed_form(str(rhs)), 30)
    assert rep.status is Status.PASS, (b, rep.note)


def test_report_fields():
    rep = verify_identity(mk("1/2"), parse_closed_form("2"), 35)
    assert rep.status is Status.PASS
    assert rep.digits_requested == 35
    assert rep.digits_matched >= 35
    assert rep.terms_used > 100
    assert rep.elapsed >= 0
    assert rep.attempts == 1
    assert rep.lhs_str.startswith("2.0")
