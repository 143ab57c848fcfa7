"""Exact arithmetic: rationals, real quadratic surds, polynomials, rational functions.

The scalar tower is ``Fraction`` ⊂ ``QuadElem`` where a :class:`QuadElem`
is ``a + b*sqrt(d)`` with rational ``a, b`` and squarefree integer
``d >= 1`` (``d == 1`` degenerates to a plain rational).  All predicates —
sign, comparisons, equality — are decided exactly from the rational parts;
no floating point is consulted anywhere in this module.

:class:`Poly` is a dense polynomial whose coefficients only need ``+``,
``-``, ``*``, ``==`` and truthiness, so coefficients may themselves be
Fractions, QuadElems, or Polys in a *different* variable (nested
polynomials stand in for bivariate ones).  :class:`RatFun` is a lazy
(unreduced) quotient of two Polys with equality decided by
cross-multiplication.

Also here: monic polynomial gcd, Sturm chains and exact root counting for
polynomials with Fraction coefficients (used to certify term-ratio
envelopes behind the last real root).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Rational",
    "QuadElem",
    "sqrt_surd",
    "squarefree_split",
    "Poly",
    "RatFun",
    "poly_divmod",
    "poly_gcd",
    "sturm_chain",
    "count_real_roots_above",
    "last_integer_beyond_roots",
]

Rational = Fraction


def squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = s*s*m`` with ``m`` squarefree; return ``(s, m)``.  n >= 1."""
    if n < 1:
        raise ValueError("squarefree_split needs a positive integer")
    s = 1
    m = 1
    k = 2
    while k * k <= n:
        if n % k == 0:
            e = 0
            while n % k == 0:
                n //= k
                e += 1
            s *= k ** (e // 2)
            if e & 1:
                m *= k
        k += 1 if k == 2 else 2
    return s, m * n


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


class QuadElem:
    """An element ``a + b*sqrt(d)`` of a real quadratic field (or Q when d=1)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a = _as_fraction(a)
        b = _as_fraction(b)
        if not isinstance(d, int) or d < 1:
            raise ValueError("radicand must be a positive integer")
        if d > 1:
            s, m = squarefree_split(d)
            if s != 1:
                b, d = b * s, m
            else:
                d = m
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QuadElem is immutable")

    # -- construction helpers -----------------------------------------

    @staticmethod
    def of(x) -> "QuadElem":
        if isinstance(x, QuadElem):
            return x
        return QuadElem(_as_fraction(x))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    # -- ring/field structure ------------------------------------------

    def _match(self, other) -> tuple["QuadElem", "QuadElem"]:
        """Coerce to a common radicand; raises on genuinely mixed fields."""
        if not isinstance(other, QuadElem):
            other = QuadElem(_as_fraction(other))
        if self.d == other.d or self.b == 0 or other.b == 0:
            return self, other
        raise ValueError(f"incompatible radicands sqrt({self.d}) and sqrt({other.d})")

    def __add__(self, other):
        try:
            x, y = self._match(other)
        except TypeError:
            return NotImplemented
        d = x.d if x.d != 1 else y.d
        return QuadElem(x.a + y.a, x.b + y.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            x, y = self._match(other)
        except TypeError:
            return NotImplemented
        d = x.d if x.d != 1 else y.d
        return QuadElem(x.a - y.a, x.b - y.b, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            return QuadElem(self.a * q, self.b * q, self.d)
        if not isinstance(other, QuadElem):
            return NotImplemented
        x, y = self._match(other)
        d = x.d if x.d != 1 else y.d
        return QuadElem(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero quadratic element")
        return QuadElem(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            return QuadElem(self.a / q, self.b / q, self.d)
        if not isinstance(other, QuadElem):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElem(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- Galois action and exact predicates -----------------------------

    def conjugate(self) -> "QuadElem":
        """The Galois conjugate a - b*sqrt(d)."""
        return QuadElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """a^2 - d*b^2 (multiplicative; nonzero for nonzero elements)."""
        return self.a * self.a - self.b * self.b * self.d

    def trace(self) -> Fraction:
        return 2 * self.a

    def sign(self) -> int:
        """Exact sign of the real embedding with sqrt(d) > 0."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Opposite signs: |a| vs |b|sqrt(d) decided by a^2 vs d b^2.
        n = self.norm()
        if a > 0:
            return 1 if n > 0 else -1
        return -1 if n > 0 else 1

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadElem):
            if self.d == other.d:
                return self.a == other.a and self.b == other.b
            return self.b == 0 and other.b == 0 and self.a == other.a
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        diff = self - other
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- numeric embedding ----------------------------------------------

    def embed(self):
        """Ball enclosure of the real embedding at the ambient precision."""
        from .precision import ApproxReal

        out = ApproxReal.from_fraction(self.a)
        if self.b:
            root = ApproxReal.from_int(self.d).sqrt()
            out = out + ApproxReal.from_fraction(self.b) * root
        return out

    def __repr__(self):
        if self.b == 0:
            return f"QuadElem({self.a})"
        return f"QuadElem({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"


def sqrt_surd(q) -> QuadElem:
    """Exact sqrt of a nonnegative rational as a QuadElem (b*sqrt(m))."""
    q = _as_fraction(q)
    if q < 0:
        raise ValueError("sqrt of a negative rational")
    if q == 0:
        return QuadElem(0)
    n = q.numerator * q.denominator
    s, m = squarefree_split(n)
    return QuadElem(0, Fraction(s, q.denominator), m) if m > 1 else QuadElem(Fraction(s, q.denominator))


# ----------------------------------------------------------------------
# polynomials


class Poly:
    """Dense polynomial in one named variable over a duck-typed coefficient ring.

    Mixed-variable arithmetic is an error by design: bivariate work is done
    with explicitly nested Polys (coefficients that are Polys in another
    variable), so a stray implicit coercion can never silently change the
    meaning of an identity check.
    """

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs: Iterable = (), var: str = "k"):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def const(c, var: str = "k") -> "Poly":
        return Poly((c,), var)

    @staticmethod
    def variable(var: str = "k") -> "Poly":
        return Poly((Fraction(0), Fraction(1)), var)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __bool__(self):
        return bool(self.coeffs)

    def _check_var(self, other: "Poly"):
        if self.var != other.var:
            raise TypeError(
                f"mixed polynomial variables {self.var!r} and {other.var!r}; lift explicitly"
            )

    def __add__(self, other):
        if isinstance(other, Poly):
            self._check_var(other)
            n = max(len(self.coeffs), len(other.coeffs))
            return Poly(
                (self.coeff(i) + other.coeff(i) for i in range(n)), self.var
            )
        cs = list(self.coeffs) or [Fraction(0)]
        cs[0] = cs[0] + other
        return Poly(cs, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly((-c for c in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check_var(other)
            if not self.coeffs or not other.coeffs:
                return Poly((), self.var)
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
            return Poly(out, self.var)
        if not other:
            return Poly((), self.var)
        return Poly((c * other for c in self.coeffs), self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power must be a nonnegative integer")
        result = Poly.const(Fraction(1), self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            if self.var == other.var:
                return self.coeffs == other.coeffs
            # Different variables only agree when both sides are constants.
            if self.degree() > 0 or other.degree() > 0:
                return False
            a = self.coeffs[0] if self.coeffs else Fraction(0)
            b = other.coeffs[0] if other.coeffs else Fraction(0)
            return a == b
        if not self.coeffs:
            return not other
        return self.degree() == 0 and self.coeffs[0] == other

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __call__(self, x):
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def shift(self, delta) -> "Poly":
        """p(var + delta)."""
        t = Poly((delta, Fraction(1)), self.var)
        result = Poly((), self.var)
        for c in reversed(self.coeffs):
            result = result * t + Poly.const(c, self.var)
        return result

    def derivative(self) -> "Poly":
        return Poly((i * c for i, c in enumerate(self.coeffs) if i), self.var)

    def map_coeffs(self, f) -> "Poly":
        return Poly((f(c) for c in self.coeffs), self.var)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(f"{c}")
            elif i == 1:
                parts.append(f"({c})*{self.var}")
            else:
                parts.append(f"({c})*{self.var}^{i}")
        return " + ".join(parts)


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    """Division with remainder; coefficients must form a field."""
    f._check_var(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    var = f.var
    q = [Fraction(0)] * max(0, f.degree() - g.degree() + 1)
    rem = list(f.coeffs)
    glead = g.leading()
    gdeg = g.degree()
    while rem and not rem[-1]:
        rem.pop()
    while len(rem) - 1 >= gdeg:
        shift = len(rem) - 1 - gdeg
        factor = rem[-1] / glead
        q[shift] = q[shift] + factor
        for i, gc in enumerate(g.coeffs):
            rem[shift + i] = rem[shift + i] - factor * gc
        rem.pop()  # leading term cancelled exactly
        while rem and not rem[-1]:
            rem.pop()
    return Poly(q, var), Poly(rem, var)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over a field of coefficients."""
    a, b = f, g
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a.leading()
    return a.map_coeffs(lambda c: c / lead)


# ----------------------------------------------------------------------
# Sturm chains (Fraction coefficients)


def sturm_chain(f: Poly) -> list[Poly]:
    """Sturm chain of the squarefree part of f."""
    df = f.derivative()
    g = poly_gcd(f, df)
    if g.degree() > 0:
        f, _ = poly_divmod(f, g)
    chain = [f, f.derivative()]
    while chain[-1]:
        _, r = poly_divmod(chain[-2], chain[-1])
        chain.append(-r)
    chain.pop()  # drop the zero remainder
    return chain


def _sign_at(p: Poly, x) -> int:
    if x == "inf":
        if not p:
            return 0
        c = p.leading()
        return 1 if c > 0 else -1
    if x == "-inf":
        if not p:
            return 0
        c = p.leading()
        s = 1 if c > 0 else -1
        return s if p.degree() % 2 == 0 else -s
    v = p(x)
    return (v > 0) - (v < 0)


def _variations(chain: Sequence[Poly], x) -> int:
    signs = [s for s in (_sign_at(p, x) for p in chain) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_real_roots_above(f: Poly, a: Fraction) -> int:
    """Number of distinct real roots of f in the open interval (a, +inf)."""
    chain = sturm_chain(f)
    return _variations(chain, a) - _variations(chain, "inf")


def last_integer_beyond_roots(f: Poly, start: int = 0) -> int:
    """Smallest integer K >= start with no real roots of f in [K, +inf).

    Uses a Cauchy bound to find a point beyond every root, then walks a
    Sturm chain down by halving to tighten it.  f must be nonzero with
    Fraction coefficients.
    """
    if not f:
        raise ValueError("zero polynomial")
    if f.degree() == 0:
        return start
    lead = abs(f.leading())
    bound = 1 + max(abs(c) for c in f.coeffs[:-1]) / lead if f.degree() > 0 else Fraction(0)
    hi = max(start, int(bound) + 1)
    chain = sturm_chain(f)
    tail_vars = _variations(chain, "inf")

    def clear_from(x: int) -> bool:
        # No roots in (x-1, +inf) implies none in [x, +inf); monotone in x.
        return _variations(chain, Fraction(x - 1)) - tail_vars == 0

    if clear_from(start):
        return start
    lo = start  # clear_from(lo) is False
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if clear_from(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ----------------------------------------------------------------------
# rational functions


class RatFun:
    """Quotient of two Polys in the same variable; equality by cross-multiplication.

    No automatic gcd reduction: construction is cheap and equality does not
    depend on normal form.  ``reduced()`` gives the monic-denominator
    canonical representative when the coefficients form a field.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.const(Fraction(1), num.var)
        num._check_var(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RatFun is immutable")

    @property
    def var(self) -> str:
        return self.num.var

    @staticmethod
    def const(c, var: str = "k") -> "RatFun":
        return RatFun(Poly.const(c, var))

    @staticmethod
    def of(x, var: str = "k") -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return RatFun(x)
        return RatFun.const(x, var)

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def __bool__(self):
        return bool(self.num)

    def _coerce(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            return other
        if isinstance(other, Poly):
            return RatFun(other)
        return RatFun.const(other, self.var)

    def __add__(self, other):
        o = self._coerce(other)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            if not self.num:
                raise ZeroDivisionError
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num**n, self.den**n)

    def __eq__(self, other):
        if isinstance(other, (RatFun, Poly, Fraction, int, QuadElem)):
            o = self._coerce(other)
            return self.num * o.den == o.num * self.den
        return NotImplemented

    def __hash__(self):
        r = self.reduced()
        return hash((r.num, r.den))

    def __call__(self, x):
        d = self.den(x)
        if not d:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def derivative(self) -> "RatFun":
        return RatFun(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def compose_shift(self, delta) -> "RatFun":
        return RatFun(self.num.shift(delta), self.den.shift(delta))

    def reduced(self) -> "RatFun":
        g = poly_gcd(self.num, self.den)
        num, den = self.num, self.den
        if g.degree() > 0:
            num, _ = poly_divmod(num, g)
            den, _ = poly_divmod(den, g)
        if den.degree() >= 0 and den:
            lead = den.leading()
            num = num.map_coeffs(lambda c: c / lead)
            den = den.map_coeffs(lambda c: c / lead)
        return RatFun(num, den)

    def __repr__(self):
        return f"RatFun(({self.num!r}) / ({self.den!r}))"
