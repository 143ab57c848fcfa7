"""Exact closed forms: rational combinations of pi powers, square roots,
Dirichlet L-values, logarithms and zeta(3).

A :class:`ClosedForm` is a sum of terms ``coeff * prod atom^exp`` with
``Fraction`` coefficients.  Atoms:

* ``pi`` with any integer exponent (``1/pi`` and ``pi^-1`` both parse);
* ``sqrt(m)`` for squarefree integer m >= 2 (even powers fold into the
  coefficient, inverses use ``1/sqrt(m) = sqrt(m)/m``);
* ``sqrt(x)`` for a positive quadratic surd x (nested radical; inverses
  use ``1/sqrt(x) = sqrt(1/x)``, powers beyond +-1 are rejected);
* ``L(d)`` for a discriminant d, with ``G`` = L(-4) and ``K`` = L(-3) as
  aliases (Catalan-type values at s = 2);
* ``log(q)`` for positive rational q;
* ``zeta(3)``.

Rendering is canonical (sorted atoms, negative exponents as ``/pi`` style
suffixes) and parse/render round-trips byte-for-byte on canonical text.
Evaluation produces a conservative ball via :mod:`bseries.constants`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from mpmath import mp

from . import constants
from .exactnum import QuadElem, sqrt_surd, squarefree_split
from .exprparse import EvalContext, ExprError, ast_as_int, eval_ast, parse_expr
from .precision import ApproxReal, digits_to_bits, working_bits
from .seriesmodel import parse_quad, render_quad

__all__ = ["ClosedForm", "CFAtom", "parse_closed_form", "render_closed_form"]

_KIND_RANK = {"sqrt": 0, "sqrtq": 1, "pi": 2, "lvalue": 3, "log": 4, "zeta3": 5}


class CFAtom(NamedTuple):
    kind: str
    param: object = None

    def sort_key(self):
        p = self.param
        if isinstance(p, QuadElem):
            p = (p.a, p.b, p.d)
        elif p is None:
            p = 0
        return (_KIND_RANK[self.kind], p)

    def render(self) -> str:
        if self.kind == "pi":
            return "pi"
        if self.kind == "zeta3":
            return "zeta(3)"
        if self.kind == "sqrt":
            return f"sqrt({self.param})"
        if self.kind == "sqrtq":
            return f"sqrt({render_quad(self.param)})"
        if self.kind == "log":
            return f"log({self.param})"
        if self.kind == "lvalue":
            if self.param == -4:
                return "G"
            if self.param == -3:
                return "K"
            return f"L({self.param})"
        raise AssertionError(self.kind)


_PI = CFAtom("pi")


def _term_key(atoms: tuple) -> tuple:
    return tuple((a.sort_key(), e) for a, e in atoms)


class ClosedForm:
    """Sum of coeff * prod(atom^exp) with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        merged: dict[tuple, tuple[tuple, Fraction]] = {}
        for coeff, atoms in terms:
            atoms = _normalize_atoms_tuple(atoms)
            coeff2, atoms = _fold_even_sqrt(Fraction(coeff), atoms)
            atoms = _normalize_atoms_tuple((a, e) for a, e in atoms)
            if not coeff2:
                continue
            key = _term_key(atoms)
            if key in merged:
                prev_atoms, prev_c = merged[key]
                merged[key] = (prev_atoms, prev_c + coeff2)
            else:
                merged[key] = (atoms, coeff2)
        out = [(c, atoms) for atoms, c in merged.values() if c]
        out.sort(key=lambda t: _term_key(t[1]))
        object.__setattr__(self, "terms", tuple(out))

    def __setattr__(self, *_):
        raise AttributeError("ClosedForm is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def const(c) -> "ClosedForm":
        return ClosedForm([(Fraction(c), ())])

    @staticmethod
    def term(coeff, atoms) -> "ClosedForm":
        return ClosedForm([(Fraction(coeff), tuple(atoms))])

    @staticmethod
    def zero() -> "ClosedForm":
        return ClosedForm([])

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(not atoms for _, atoms in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if self.is_rational():
            return sum((c for c, _ in self.terms), Fraction(0))
        raise ValueError("closed form is not rational")

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = _coerce_cf(other)
        return ClosedForm(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return ClosedForm([(-c, atoms) for c, atoms in self.terms])

    def __sub__(self, other):
        return self + (-_coerce_cf(other))

    def __rsub__(self, other):
        return (-self) + _coerce_cf(other)

    def __mul__(self, other):
        other = _coerce_cf(other)
        out = []
        for c1, a1 in self.terms:
            for c2, a2 in other.terms:
                coeff, atoms = _mul_atom_lists(c1 * c2, a1, a2)
                out.append((coeff, atoms))
        return ClosedForm(out)

    __rmul__ = __mul__

    def inverse(self) -> "ClosedForm":
        if len(self.terms) != 1:
            raise ExprError("can only divide by a single closed-form term")
        coeff, atoms = self.terms[0]
        inv_coeff = 1 / coeff
        inv_atoms = []
        for atom, exp in atoms:
            if atom.kind == "pi":
                inv_atoms.append((atom, -exp))
            elif atom.kind == "sqrt":
                if exp != 1:
                    raise ExprError("unexpected radical power in divisor")
                # 1/sqrt(m) = sqrt(m)/m
                inv_coeff /= atom.param
                inv_atoms.append((atom, 1))
            elif atom.kind == "sqrtq":
                if exp != 1:
                    raise ExprError("unexpected radical power in divisor")
                inv_atoms.append((CFAtom("sqrtq", atom.param.inverse()), 1))
            else:
                raise ExprError(f"cannot invert {atom.render()}")
        return ClosedForm([(inv_coeff, tuple(inv_atoms))])

    def __truediv__(self, other):
        return self * _coerce_cf(other).inverse()

    def __rtruediv__(self, other):
        return _coerce_cf(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return (self.inverse()) ** (-n)
        out = ClosedForm.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, (ClosedForm, int, Fraction)):
            return NotImplemented
        return self.terms == _coerce_cf(other).terms

    def __hash__(self):
        return hash(self.terms)

    # -- numerics ----------------------------------------------------------

    def eval_ball(self, digits: int) -> ApproxReal:
        """Ball enclosure good to ~`digits`; runs at the ambient working
        precision when that is already higher."""
        pad = digits + 10
        for c, _ in self.terms:
            pad = max(pad, digits + 10 + len(str(abs(c.numerator))) // 3)
        with working_bits(max(mp.prec, digits_to_bits(pad))):
            total = ApproxReal.from_int(0)
            for coeff, atoms in self.terms:
                v = ApproxReal.from_fraction(coeff)
                for atom, exp in atoms:
                    v = v * _atom_ball(atom, pad) ** exp
                total = total + v
            return total

    def atoms_used(self) -> set[CFAtom]:
        out = set()
        for _, atoms in self.terms:
            for a, _ in atoms:
                out.add(a)
        return out

    def __repr__(self):
        return f"ClosedForm({render_closed_form(self)!r})"


def _coerce_cf(x) -> ClosedForm:
    if isinstance(x, ClosedForm):
        return x
    if isinstance(x, (int, Fraction)):
        return ClosedForm.const(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a closed form")


def _normalize_atoms_tuple(atoms) -> tuple:
    merged: dict[CFAtom, int] = {}
    for atom, exp in atoms:
        merged[atom] = merged.get(atom, 0) + exp
    out = [(a, e) for a, e in merged.items() if e]
    out.sort(key=lambda t: t[0].sort_key())
    return tuple(out)


def _fold_even_sqrt(coeff: Fraction, atoms: tuple) -> tuple[Fraction, tuple]:
    """sqrt(m)^(2j+r) -> m^j * sqrt(m)^r, merging residual roots into one
    radicand (sqrt(2)*sqrt(3) = sqrt(6)); rejects powered surd radicals."""
    out = []
    radicand = 1
    for atom, exp in atoms:
        if atom.kind == "sqrt":
            j, r = divmod(exp, 2)
            coeff *= Fraction(atom.param) ** j
            if r:
                radicand *= atom.param
        elif atom.kind == "sqrtq":
            if exp not in (0, 1):
                raise ExprError("cannot take powers of nested radicals")
            if exp:
                out.append((atom, exp))
        elif atom.kind == "pi":
            out.append((atom, exp))
        else:
            if exp < 0:
                raise ExprError(f"cannot invert {atom.render()}")
            out.append((atom, exp))
    if radicand != 1:
        s, m = squarefree_split(radicand)
        coeff *= s
        if m != 1:
            out.append((CFAtom("sqrt", m), 1))
    return coeff, tuple(out)


def _mul_atom_lists(coeff: Fraction, a1: tuple, a2: tuple) -> tuple[Fraction, tuple]:
    return coeff, _normalize_atoms_tuple(tuple(a1) + tuple(a2))


def _atom_ball(atom: CFAtom, digits: int) -> ApproxReal:
    if atom.kind == "pi":
        return constants.pi_ball(digits)
    if atom.kind == "zeta3":
        return constants.zeta3_ball(digits)
    if atom.kind == "lvalue":
        return constants.l_value_ball(atom.param, digits)
    if atom.kind == "log":
        return constants.log_ball(atom.param, digits)
    if atom.kind == "sqrt":
        return ApproxReal.from_int(atom.param).sqrt()
    if atom.kind == "sqrtq":
        return atom.param.embed().sqrt()
    raise AssertionError(atom.kind)


# ----------------------------------------------------------------------
# parsing and rendering


class _CFCtx(EvalContext):
    def number(self, n: int):
        return ClosedForm.const(n)

    def name(self, name: str):
        if name == "pi":
            return ClosedForm.term(1, ((_PI, 1),))
        if name == "G":
            return ClosedForm.term(1, ((CFAtom("lvalue", -4), 1),))
        if name == "K":
            return ClosedForm.term(1, ((CFAtom("lvalue", -3), 1),))
        raise ExprError(f"unknown closed-form name {name!r}")

    def call(self, name, args):
        if name == "sqrt" and len(args) == 1:
            x = eval_ast(args[0], _QuadArgCtx())
            return _sqrt_cf(x)
        if name == "L" and len(args) == 1:
            d = ast_as_int(args[0])
            if d % 4 not in (0, 1) or d == 0:
                raise ExprError(f"L({d}): not a discriminant")
            return ClosedForm.term(1, ((CFAtom("lvalue", d), 1),))
        if name == "log" and len(args) == 1:
            q = eval_ast(args[0], _QuadArgCtx()).as_fraction()
            if q <= 0:
                raise ExprError("log of non-positive rational")
            if q == 1:
                return ClosedForm.const(0)
            return ClosedForm.term(1, ((CFAtom("log", q), 1),))
        if name == "zeta" and len(args) == 1:
            if ast_as_int(args[0]) != 3:
                raise ExprError("only zeta(3) is supported")
            return ClosedForm.term(1, ((CFAtom("zeta3"), 1),))
        raise ExprError(f"unknown closed-form function {name!r}")


class _QuadArgCtx(EvalContext):
    """Arguments of sqrt()/log(): exact scalars, possibly nested sqrt."""

    def number(self, n: int):
        return QuadElem(Fraction(n))

    def call(self, name, args):
        if name == "sqrt" and len(args) == 1:
            inner = eval_ast(args[0], self)
            return sqrt_surd(inner.as_fraction())
        raise ExprError(f"function {name!r} not allowed inside radicand")


def _sqrt_cf(x: QuadElem) -> ClosedForm:
    if x.sign() <= 0:
        raise ExprError("sqrt of a non-positive closed-form radicand")
    if x.is_rational:
        q = x.as_fraction()
        # sqrt(p/q) = sqrt(p*q)/q; then split out the square part
        n = q.numerator * q.denominator
        s, m = squarefree_split(n)
        c = Fraction(s, q.denominator)
        if m == 1:
            return ClosedForm.const(c)
        return ClosedForm.term(c, ((CFAtom("sqrt", m), 1),))
    return ClosedForm.term(1, ((CFAtom("sqrtq", x), 1),))


def parse_closed_form(s: str) -> ClosedForm:
    return eval_ast(parse_expr(s), _CFCtx())


def _coeff_prefix(c: Fraction) -> str:
    return str(c)


def render_closed_form(cf: ClosedForm) -> str:
    if not cf.terms:
        return "0"
    rendered = []
    for coeff, atoms in cf.terms:
        num_parts = [a.render() if e == 1 else f"{a.render()}^{e}" for a, e in atoms if e > 0]
        den_parts = [a.render() if e == -1 else f"{a.render()}^{-e}" for a, e in atoms if e < 0]
        neg = coeff < 0
        c = -coeff if neg else coeff
        if num_parts and c == 1:
            body = "*".join(num_parts)
        else:
            body = "*".join([str(c)] + num_parts)
        for d in den_parts:
            body += f"/{d}"
        rendered.append(("-" if neg else "") + body)
    out = rendered[0]
    for r in rendered[1:]:
        out += f" - {r[1:]}" if r.startswith("-") else f" + {r}"
    return out
