"""Series summation with certified or heuristic tails, and identity verification.

Certified mode proves a geometric envelope for the term ratio first: with
``rho(k) = t_{k+1}/t_k`` (an exact rational function over the quadratic
field) and a rational ``q < 1`` slightly above the limiting ratio
``L = |base| * growth^(+-1)``, the inequality ``|rho(k)| <= q`` for every
real ``k >= k0`` is certified exactly — the polynomial

    G(k) = q^2 * den(rho)^2 - num(rho)^2

is positive beyond its last real root (isolated by a Sturm chain on the
rational norm polynomial ``G * conj(G)``) and its sign is checked at every
integer from ``k0`` down to the summation start.  The tail after ``t_K``
is then at most ``|t_K| * q / (1 - q)``, added as an explicit ball radius.

Heuristic mode (for weights with harmonic atoms, or on request) stops after
32 consecutive non-increasing terms below ``10^-(digits+6)`` and charges a
``64 * |t_last|`` slack; the summed prefix is still exact-ball arithmetic,
only the tail allowance is unproven.

Verification at D digits: PASS iff the residual ball ``LHS - RHS`` contains
zero and its magnitude upper bound is at most ``10^-D``; FAIL iff the ball
excludes zero (a proof of discrepancy, up to the tail caveat in heuristic
mode); otherwise the working precision is doubled, up to 4 attempts, and
INCONCLUSIVE is reported.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .closedform import ClosedForm
from .exactnum import Poly, QuadElem, RatFun, last_integer_beyond_roots
from .precision import DIGITS_INF, ApproxReal, attempt_bits, working_bits
from .seriesmodel import HarmonicCache, NotHypergeometric, Position, SeriesDef

__all__ = [
    "NonConvergent",
    "BudgetExceeded",
    "Envelope",
    "certify_envelope",
    "SumResult",
    "sum_series",
    "evaluate",
    "Status",
    "VerificationReport",
    "verify_identity",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 200_000


class NonConvergent(ArithmeticError):
    """The limiting term ratio is >= 1; no geometric tail exists."""


class BudgetExceeded(ArithmeticError):
    def __init__(self, terms_used: int, message: str):
        super().__init__(message)
        self.terms_used = terms_used


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


# ----------------------------------------------------------------------
# envelope certification


@dataclass(frozen=True)
class Envelope:
    q: Fraction
    k0: int
    ratio: RatFun


def _ratio_limit_cmp_one(sdef: SeriesDef) -> int:
    """Exact sign of L - 1 where L = |base| * growth^s."""
    g = Fraction(1)
    if sdef.kernel is not None:
        g = sdef.kernel.growth()
        if sdef.kernel_pos is Position.DENOMINATOR:
            g = 1 / g
    # L >= 1  <=>  base^2 * g^2 - 1 >= 0
    val = sdef.base_value * sdef.base_value * (g * g) - 1
    return val.sign()


def _rational_upper_abs(x: QuadElem, bits: int = 192) -> Fraction:
    with working_bits(bits):
        ball = abs(x.embed())
    lo, hi = ball.to_fraction_bounds()
    return hi


def certify_envelope(sdef: SeriesDef) -> Envelope:
    """Prove |t_{k+1}/t_k| <= q < 1 for all k >= k0 (exact arithmetic only)."""
    ratio = sdef.term_ratio()  # raises NotHypergeometric for harmonic weights
    if _ratio_limit_cmp_one(sdef) >= 0:
        raise NonConvergent("limiting term ratio is >= 1")

    g = Fraction(1)
    if sdef.kernel is not None:
        g = sdef.kernel.growth()
        if sdef.kernel_pos is Position.DENOMINATOR:
            g = 1 / g
    def dyadic_up(x: Fraction, bits: int = 24) -> Fraction:
        # Round up to a small-denominator dyadic: keeps every downstream
        # coefficient (and hence the Sturm chain) small.
        return Fraction(math.ceil(x * (1 << bits)), 1 << bits)

    l_hi = _rational_upper_abs(sdef.base_value) * g
    q = dyadic_up(l_hi * Fraction(65, 64))
    if q >= 1:
        q = dyadic_up((l_hi + 1) / 2)
    if q >= 1:
        raise NonConvergent("cannot select a geometric bound below 1")

    num, den = ratio.num, ratio.den
    big_g = den * den * (q * q) - num * num  # want big_g(k) >= 0

    # Norm polynomial with Fraction coefficients for root isolation.
    def conj_poly(p: Poly) -> Poly:
        return p.map_coeffs(lambda c: c.conjugate() if isinstance(c, QuadElem) else c)

    def rationalize(p: Poly) -> Poly:
        def down(c):
            if isinstance(c, QuadElem):
                return c.as_fraction()
            return c

        return p.map_coeffs(down)

    if sdef.field_d == 1:
        norm_poly = rationalize(big_g)
    else:
        norm_poly = rationalize(big_g * conj_poly(big_g))

    k_min = sdef.k_start
    k_star = last_integer_beyond_roots(norm_poly, start=k_min)

    def nonneg_at(k: int) -> bool:
        v = big_g(Fraction(k))
        if isinstance(v, QuadElem):
            return v.sign() >= 0
        return v >= 0

    if not nonneg_at(k_star):
        raise NonConvergent("envelope is negative beyond its last root")
    k0 = k_star
    k = k_star - 1
    while k >= k_min and nonneg_at(k):
        k0 = k
        k -= 1
    return Envelope(q=q, k0=k0, ratio=ratio)


# ----------------------------------------------------------------------
# summation


@dataclass
class SumResult:
    ball: ApproxReal
    terms_used: int
    tail_mode: str  # "certified" | "heuristic"
    q: Optional[Fraction] = None
    k_last: int = 0


class _TermStream:
    """Term balls t_k produced incrementally at the ambient precision.

    Weight, kernel and denominator values are exact rationals and embed
    without cancellation, but the base power is carried as a *ball*: for a
    quadratic base whose conjugate is much larger than the value itself
    (huge integer coefficients, small magnitude), the exact power has
    catastrophic cancellation on embedding, while the incremental ball
    only accrues a few ulp of relative radius per step.
    """

    def __init__(self, sdef: SeriesDef, embed: "_Embedder"):
        self.sdef = sdef
        self.embed = embed
        self.k = sdef.k_start
        self.base_ball = embed(sdef.base_root) ** sdef.base_exp
        self.power = self.base_ball**sdef.k_start
        self.kernel_val = sdef.kernel.value(sdef.k_start) if sdef.kernel else 1
        if sdef.kernel:
            a, b = sdef.kernel.ratio_polys()
            self.ratio_num = [int(c) for c in a.coeffs]
            self.ratio_den = [int(c) for c in b.coeffs]
        self.harm = HarmonicCache() if sdef.has_harmonic() else None

    def _poly_int(self, coeffs: list[int], k: int) -> int:
        out = 0
        for c in reversed(coeffs):
            out = out * k + c
        return out

    def next_term(self) -> tuple[int, ApproxReal]:
        sdef, k = self.sdef, self.k
        w = sdef.weight_value(k, self.harm)
        t = self.embed(QuadElem.of(w)) * self.power
        if sdef.kernel is not None:
            if sdef.kernel_pos is Position.NUMERATOR:
                t = t * ApproxReal.from_int(self.kernel_val)
            else:
                t = t * ApproxReal.from_fraction(Fraction(1, self.kernel_val))
        d = sdef.den_value(k)
        if d != 1:
            t = t * ApproxReal.from_fraction(Fraction(1) / d)
        # advance the incremental state
        self.power = self.power * self.base_ball
        if sdef.kernel is not None:
            self.kernel_val = (
                self.kernel_val * self._poly_int(self.ratio_num, k)
            ) // self._poly_int(self.ratio_den, k)
        self.k += 1
        return k, t


class _Embedder:
    """Quadratic-surd -> ball embedding with the sqrt(d) ball cached."""

    def __init__(self, d: int):
        self.root = ApproxReal.from_int(d).sqrt() if d > 1 else None

    def __call__(self, x: QuadElem) -> ApproxReal:
        out = ApproxReal.from_fraction(x.a)
        if x.b:
            if self.root is None or x.d == 1:
                raise ValueError("unexpected radicand")
            out = out + ApproxReal.from_fraction(x.b) * self.root
        return out


def sum_series(
    sdef: SeriesDef,
    digits: int,
    mode: str = "auto",
    budget_terms: Optional[int] = None,
    envelope: Optional[Envelope] = None,
) -> SumResult:
    """Sum the series to ~`digits` absolute decimal digits at the ambient precision.

    mode: "certified" (requires a provable envelope), "heuristic", or "auto"
    (certified when possible, else heuristic).
    """
    budget = budget_terms if budget_terms is not None else DEFAULT_BUDGET
    if mode not in ("auto", "certified", "heuristic"):
        raise ValueError(f"unknown mode {mode!r}")

    if mode in ("auto", "certified") and envelope is None:
        try:
            envelope = certify_envelope(sdef)
        except NotHypergeometric:
            if mode == "certified":
                raise
            envelope = None
        except NonConvergent:
            if mode == "certified":
                raise
            envelope = None
    if mode == "heuristic":
        envelope = None

    stream = _TermStream(sdef, _Embedder(sdef.field_d))
    acc = ApproxReal.from_int(0)

    if envelope is not None:
        q = envelope.q
        qf = q / (1 - q)  # exact; q < 1 guaranteed by certify_envelope
        q_over = mpmath.make_mpf(
            mpmath.libmp.from_rational(qf.numerator, qf.denominator, 64, "c")
        )
        eps = mpf(10) ** (-(digits + 3))
        terms = 0
        while True:
            k, tb = stream.next_term()
            acc = acc + tb
            terms += 1
            if k >= envelope.k0:
                tail = mpmath.fmul(tb.upper_abs(), q_over, prec=64, rounding="c")
                if tail <= eps:
                    acc = acc + ApproxReal(mpf(0), tail)
                    return SumResult(acc, terms, "certified", q=q, k_last=k)
            if terms >= budget:
                raise BudgetExceeded(terms, "term budget exhausted in certified mode")

    # heuristic tail detection
    threshold = mpf(10) ** (-(digits + 6))
    streak = 0
    prev_abs = None
    terms = 0
    while True:
        k, tb = stream.next_term()
        acc = acc + tb
        terms += 1
        cur = tb.upper_abs()
        if cur <= threshold and (prev_abs is None or cur <= prev_abs):
            streak += 1
        else:
            streak = 0
        prev_abs = cur
        if streak >= 32:
            slack = mpmath.fmul(cur, 64, prec=64, rounding="c")
            acc = acc + ApproxReal(mpf(0), slack)
            return SumResult(acc, terms, "heuristic", k_last=k)
        if terms >= budget:
            raise BudgetExceeded(terms, "term budget exhausted in heuristic mode")


def evaluate(
    sdef: SeriesDef,
    digits: int,
    mode: str = "auto",
    budget_terms: Optional[int] = None,
) -> SumResult:
    """Attempt loop around sum_series: doubles precision until the ball is tight."""
    envelope: Optional[Envelope] = None
    sum_mode = mode
    if mode in ("auto", "certified"):
        try:
            envelope = certify_envelope(sdef)
        except (NotHypergeometric, NonConvergent):
            if mode == "certified":
                raise
            sum_mode = "heuristic"
    res: Optional[SumResult] = None
    for attempt in range(4):
        bits = attempt_bits(digits + 5, attempt)
        with working_bits(bits):
            res = sum_series(
                sdef, digits, mode=sum_mode, budget_terms=budget_terms, envelope=envelope
            )
        if res.ball.to_digits() >= digits:
            return res
    return res


# ----------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    status: Status
    digits_requested: int
    digits_matched: int
    terms_used: int
    tail_mode: str
    elapsed: float
    attempts: int
    lhs_str: str = ""
    residual_str: str = ""
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS


def _magnitude_digits(x) -> int:
    """floor(-log10(x)) for a positive mpf upper bound; huge when x == 0."""
    if x == 0:
        return DIGITS_INF
    with working_bits(64):
        return int(mpmath.floor(-mpmath.log(x, 10)))


def verify_identity(
    sdef: SeriesDef,
    rhs: ClosedForm,
    digits: int,
    mode: str = "auto",
    budget_terms: Optional[int] = None,
    lhs_scale: Optional[ClosedForm] = None,
) -> VerificationReport:
    """Compare the series against its closed form at the requested digits."""
    t0 = time.monotonic()
    note = ""
    res: Optional[SumResult] = None
    residual = None

    envelope: Optional[Envelope] = None
    sum_mode = mode
    if mode in ("auto", "certified"):
        try:
            envelope = certify_envelope(sdef)
        except (NotHypergeometric, NonConvergent) as e:
            if mode == "certified":
                return VerificationReport(
                    status=Status.INCONCLUSIVE,
                    digits_requested=digits,
                    digits_matched=0,
                    terms_used=0,
                    tail_mode=mode,
                    elapsed=time.monotonic() - t0,
                    attempts=0,
                    note=f"certified summation unavailable: {e}",
                )
            sum_mode = "heuristic"

    for attempt in range(4):
        bits = attempt_bits(digits + 8, attempt)
        try:
            with working_bits(bits):
                res = sum_series(
                    sdef,
                    digits + 5,
                    mode=sum_mode,
                    budget_terms=budget_terms,
                    envelope=envelope,
                )
                lhs = res.ball
                if lhs_scale is not None:
                    lhs = lhs * lhs_scale.eval_ball(digits + 10)
                rhs_ball = rhs.eval_ball(digits + 10)
                residual = lhs - rhs_ball
        except BudgetExceeded as e:
            return VerificationReport(
                status=Status.INCONCLUSIVE,
                digits_requested=digits,
                digits_matched=0,
                terms_used=e.terms_used,
                tail_mode=mode,
                elapsed=time.monotonic() - t0,
                attempts=attempt + 1,
                note=str(e),
            )
        except (NonConvergent, NotHypergeometric) as e:
            return VerificationReport(
                status=Status.INCONCLUSIVE,
                digits_requested=digits,
                digits_matched=0,
                terms_used=0,
                tail_mode=mode,
                elapsed=time.monotonic() - t0,
                attempts=attempt + 1,
                note=f"certified summation unavailable: {e}",
            )

        ua = residual.upper_abs()
        tol = mpf(10) ** (-digits)
        if residual.contains_zero() and ua <= tol:
            return VerificationReport(
                status=Status.PASS,
                digits_requested=digits,
                digits_matched=min(_magnitude_digits(ua), DIGITS_INF),
                terms_used=res.terms_used,
                tail_mode=res.tail_mode,
                elapsed=time.monotonic() - t0,
                attempts=attempt + 1,
                lhs_str=mpmath.nstr(lhs.mid, digits + 5),
                residual_str=mpmath.nstr(residual.mid, 8),
            )
        if residual.excludes_zero():
            return VerificationReport(
                status=Status.FAIL,
                digits_requested=digits,
                digits_matched=max(0, _magnitude_digits(ua)),
                terms_used=res.terms_used,
                tail_mode=res.tail_mode,
                elapsed=time.monotonic() - t0,
                attempts=attempt + 1,
                lhs_str=mpmath.nstr(lhs.mid, digits + 5),
                residual_str=mpmath.nstr(residual.mid, 8),
                note="residual ball excludes zero",
            )
        note = "residual ball still straddles zero at max precision"
    return VerificationReport(
        status=Status.INCONCLUSIVE,
        digits_requested=digits,
        digits_matched=max(0, residual.to_digits()) if residual is not None else 0,
        terms_used=res.terms_used if res else 0,
        tail_mode=res.tail_mode if res else mode,
        elapsed=time.monotonic() - t0,
        attempts=4,
        note=note,
    )
